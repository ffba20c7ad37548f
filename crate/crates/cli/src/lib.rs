//! Scenario runner for the vacfield workbench.
//!
//! A scenario is one JSON file describing one experiment. Running it writes
//! the sampled series as `<name>.csv` and a `report.json` with every
//! invariant residual into `$VFW_OUT/<output>`.

use std::path::{Path, PathBuf};
use std::time::Instant;

pub mod bundled;
pub mod compare;
pub mod report;
pub mod run;
pub mod scenario;
pub mod table;

use report::{declared_invariants, RunReport};
pub use scenario::Scenario;

/// Environment variable naming the output root.
pub const OUTPUT_ROOT_VAR: &str = "VFW_OUT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

/// `$VFW_OUT`, or the working directory when unset or empty.
pub fn output_root() -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_VAR) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from("."),
    }
}

/// Reads a scenario from a file, or from the bundled set when `arg` names
/// one and no such file exists.
pub fn load(arg: &str) -> Result<Scenario, CliError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(text) = bundled::get(arg) {
            return Scenario::from_json(text);
        }
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("{arg}: {e} (not a file or a bundled scenario)")))?;
    Scenario::from_json(&text)
}

/// Runs `sc` under `root` and returns its report with the process exit code.
pub fn run_scenario(sc: &Scenario, root: &Path) -> Result<(RunReport, i32), CliError> {
    sc.validate()?;
    let dir = root.join(sc.output_dir());
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let start = Instant::now();
    let outcome = run::execute(sc, &dir)?;
    let wall = start.elapsed().as_secs_f64();

    let names: Vec<&str> = outcome.checks.iter().map(|c| c.name).collect();
    let declared = declared_invariants(sc.kind);
    if names != declared {
        return Err(CliError::Runtime(format!("reported invariants {names:?} differ from declared {declared:?}")));
    }

    let csv = format!("{}.csv", sc.name);
    let io = |p: &Path, e: std::io::Error| CliError::Runtime(format!("{}: {e}", p.display()));
    let csv_path = dir.join(&csv);
    let file = std::fs::File::create(&csv_path).map_err(|e| io(&csv_path, e))?;
    outcome.table.write_to(std::io::BufWriter::new(file)).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut artifacts = vec![csv];
    artifacts.extend(outcome.extra);
    artifacts.push("report.json".to_string());
    let passed = outcome.checks.iter().all(|c| c.passed());
    let report = RunReport {
        scenario: sc.clone(),
        passed,
        invariants: outcome.checks,
        wall_time_s: wall,
        phases: outcome.phases,
        artifacts,
    };
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, report.to_json()).map_err(|e| io(&report_path, e))?;
    Ok((report, if passed { 0 } else { 1 }))
}
