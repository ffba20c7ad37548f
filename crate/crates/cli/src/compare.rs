//! Column-wise divergence between two runs sampled on the same key.

use std::path::Path;

use crate::table::{format_number, Table};
use crate::{load, run_scenario, CliError};

/// Max and root-sum-square of one difference column.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub column: String,
    pub max_abs: f64,
    pub l2: f64,
}

#[derive(Clone, Debug)]
pub struct Divergence {
    /// Key column followed by `B - A` for each compared column.
    pub table: Table,
    pub summaries: Vec<Summary>,
}

impl Divergence {
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for m in &self.summaries {
            s.push_str(&format!("{}: max {} l2 {}\n", m.column, format_number(m.max_abs), format_number(m.l2)));
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.summaries.iter().all(|m| m.max_abs == 0.0)
    }
}

/// A CSV table, or a scenario that is run first (under `root`) to produce one.
pub fn table_for(arg: &str, root: &Path) -> Result<Table, CliError> {
    if arg.ends_with(".csv") {
        let f = std::fs::File::open(arg).map_err(|e| CliError::Runtime(format!("{arg}: {e}")))?;
        return Table::read_from(std::io::BufReader::new(f)).map_err(|e| CliError::Schema(format!("{arg}: {e}")));
    }
    let sc = load(arg)?;
    run_scenario(&sc, root)?;
    let path = root.join(sc.output_dir()).join(format!("{}.csv", sc.name));
    let f = std::fs::File::open(&path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Table::read_from(std::io::BufReader::new(f)).map_err(|e| CliError::Runtime(e.to_string()))
}

/// Differences `b - a`, row by row. The first column is the key and must
/// agree exactly; `columns` defaults to every other column of `a`.
pub fn compare(a: &Table, b: &Table, columns: Option<&[String]>) -> Result<Divergence, CliError> {
    let schema = |m: String| Err(CliError::Schema(m));
    if a.columns.is_empty() || b.columns.is_empty() {
        return schema("empty table".into());
    }
    let key = &a.columns[0];
    if &b.columns[0] != key {
        return schema(format!("key columns differ: `{key}` and `{}`", b.columns[0]));
    }
    if a.rows.len() != b.rows.len() {
        return schema(format!("row counts differ: {} and {}", a.rows.len(), b.rows.len()));
    }
    if let Some(i) = a.rows.iter().zip(&b.rows).position(|(x, y)| x[0] != y[0]) {
        return schema(format!("`{key}` differs at row {}: {} and {}", i + 1, a.rows[i][0], b.rows[i][0]));
    }
    let names: Vec<String> = match columns {
        Some(c) => c.to_vec(),
        None => a.columns[1..].to_vec(),
    };
    let mut pairs = Vec::new();
    for n in &names {
        match (a.column_index(n), b.column_index(n)) {
            (Some(i), Some(j)) => pairs.push((i, j)),
            _ => return schema(format!("column `{n}` is not in both tables")),
        }
    }

    let mut table = Table::new(std::iter::once(key.clone()).chain(names.iter().cloned()));
    let mut max = vec![0.0_f64; names.len()];
    let mut sq = vec![0.0_f64; names.len()];
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        let mut row = vec![ra[0]];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let d = rb[j] - ra[i];
            max[k] = max[k].max(d.abs());
            sq[k] += d * d;
            row.push(d);
        }
        table.push(row);
    }
    let summaries = names
        .into_iter()
        .zip(max.iter().zip(&sq))
        .map(|(column, (m, s))| Summary { column, max_abs: *m, l2: s.sqrt() })
        .collect();
    Ok(Divergence { table, summaries })
}
