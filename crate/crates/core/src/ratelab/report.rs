use std::io::Write;

use serde::Serialize;

use super::experiment::{RateConfig, RateReport, RateRow};
use crate::error::Result;

pub const CSV_COLUMNS: [&str; 11] = [
    "n",
    "a_n",
    "a_n_prime",
    "A_n",
    "sup_lo",
    "sup_hi",
    "witness_x",
    "bound_tail",
    "bound_interior",
    "bound_A",
    "n_times_sup",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One line per row; missing bound components are left empty.
pub fn write_csv(report: &RateReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            r.a_n.to_string(),
            r.a_n_prime.to_string(),
            r.big_a_n.to_string(),
            r.sup_lo.to_string(),
            r.sup_hi.to_string(),
            r.witness_x.to_string(),
            opt(r.bound_tail),
            opt(r.bound_interior),
            opt(r.bound_a),
            r.n_times_sup.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonView<'a> {
    config: &'a RateConfig,
    rows: &'a [RateRow],
    slope: Option<f64>,
    intercept: Option<f64>,
    residual: Option<f64>,
    onset_n0: Option<u64>,
    passed: bool,
    von_mises_ratio_max: f64,
}

pub fn to_json(report: &RateReport) -> Result<String> {
    let view = JsonView {
        config: &report.config,
        rows: &report.rows,
        slope: report.fit.as_ref().map(|f| f.slope),
        intercept: report.fit.as_ref().map(|f| f.intercept),
        residual: report.fit.as_ref().map(|f| f.residual),
        onset_n0: report.onset_n0,
        passed: report.passed,
        von_mises_ratio_max: report.von_mises_ratio_max,
    };
    Ok(serde_json::to_string_pretty(&view)?)
}
