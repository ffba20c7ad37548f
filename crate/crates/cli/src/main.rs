use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vacfield_cli::bundled::BUNDLED;
use vacfield_cli::compare::{compare, table_for};
use vacfield_cli::{load, output_root, run_scenario, CliError, Scenario};

/// Run vacfield experiments from JSON scenario files.
#[derive(Parser)]
#[command(name = "vacfield", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name.
    Run { scenario: String },
    /// Tabulate B - A for two scenarios or CSV series.
    Compare {
        a: String,
        b: String,
        /// Comma-separated columns to compare; defaults to all but the key.
        #[arg(long, value_delimiter = ',')]
        columns: Option<Vec<String>>,
        /// Write the difference table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario against the schema without running it.
    Validate { scenario: String },
    /// List the bundled scenarios.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("vacfield: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Run { scenario } => {
            let sc = load(&scenario)?;
            let root = output_root();
            let (report, code) = run_scenario(&sc, &root)?;
            for c in &report.invariants {
                let status = format!("{:?}", c.status).to_uppercase();
                match c.residual {
                    Some(r) => eprintln!("{status:7} {:26} {r:e} (tol {:e})", c.name, c.tolerance.unwrap()),
                    None => eprintln!("{status:7} {:26} {}", c.name, c.detail),
                }
            }
            eprintln!("wrote {}", root.join(sc.output_dir()).display());
            Ok(code as u8)
        }
        Command::Compare { a, b, columns, out } => {
            let root = output_root();
            let (ta, tb) = (table_for(&a, &root)?, table_for(&b, &root)?);
            let d = compare(&ta, &tb, columns.as_deref())?;
            let csv = d.table.to_csv_string();
            match out {
                Some(p) => std::fs::write(&p, csv).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?,
                None => std::io::stdout().write_all(csv.as_bytes()).map_err(|e| CliError::Runtime(e.to_string()))?,
            }
            eprint!("{}", d.summary_text());
            Ok(0)
        }
        Command::Validate { scenario } => {
            let sc: Scenario = load(&scenario)?;
            eprintln!("{}: ok ({})", sc.name, sc.kind.name());
            Ok(0)
        }
        Command::ListScenarios => {
            for (name, text) in BUNDLED {
                let sc = Scenario::from_json(text)?;
                println!("{name}\t{}\t{}", sc.kind.name(), sc.description.as_deref().unwrap_or(""));
            }
            Ok(0)
        }
    }
}
