//! Flat CSV view of one or more reports: one row per solved entry.

use std::fmt;

use crate::report::RunReport;

const HEADER: [&str; 19] = [
    "mode",
    "label",
    "p",
    "lambda",
    "mu",
    "k",
    "n",
    "energy",
    "norm",
    "sup",
    "decay_slope",
    "g_mass",
    "mu_g_mass",
    "outside_mass",
    "limit_residual",
    "hard_pass",
    "hard_fail",
    "soft_pass",
    "soft_fail",
];

#[derive(Debug)]
pub enum TableError {
    MixedModes(String, String),
    Csv(csv::Error),
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::MixedModes(a, b) => write!(f, "cannot tabulate {a} and {b} reports together"),
            TableError::Csv(e) => write!(f, "csv: {e}"),
        }
    }
}

impl std::error::Error for TableError {}

impl From<csv::Error> for TableError {
    fn from(e: csv::Error) -> Self {
        TableError::Csv(e)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The header is always written, so an empty input gives a header-only table.
pub fn sweep_table(reports: &[RunReport]) -> Result<String, TableError> {
    if let Some(first) = reports.first() {
        if let Some(other) = reports.iter().find(|r| r.mode != first.mode) {
            return Err(TableError::MixedModes(first.mode.to_string(), other.mode.to_string()));
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in reports {
        for e in &r.entries {
            let t = crate::report::tally(e.checks.iter());
            let s = &e.solution;
            w.write_record([
                r.mode.to_string(),
                e.label.clone(),
                s.p.to_string(),
                s.lambda.to_string(),
                s.mu.to_string(),
                s.k.to_string(),
                s.n.to_string(),
                s.energy.to_string(),
                s.norm.to_string(),
                s.sup.to_string(),
                opt(e.decay.as_ref().map(|d| d.slope)),
                e.g_mass.to_string(),
                e.mu_g_mass.to_string(),
                e.outside_mass.to_string(),
                opt(e.limit_residual),
                t.hard_pass.to_string(),
                t.hard_fail.to_string(),
                t.soft_pass.to_string(),
                t.soft_fail.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| TableError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
