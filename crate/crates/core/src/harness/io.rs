use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::aggregate::{AggregateRow, Stat};
use super::histogram::Histogram;
use super::sweep::TrialRecord;
use crate::error::{Error, Result};

pub const RECORD_HEADER: [&str; 17] = [
    "mode",
    "n",
    "m",
    "k",
    "q",
    "lambda",
    "trial",
    "seed",
    "s1_hat",
    "beta_hat",
    "overlap_left",
    "overlap_right",
    "axis",
    "pred_outlier",
    "pred_overlap_left",
    "pred_overlap_right",
    "status",
];

pub const AGGREGATE_HEADER: [&str; 21] = [
    "mode",
    "n",
    "m",
    "k",
    "q",
    "lambda",
    "axis",
    "trials",
    "failures",
    "s1_hat_mean",
    "s1_hat_se",
    "beta_hat_mean",
    "beta_hat_se",
    "overlap_left_mean",
    "overlap_left_se",
    "overlap_right_mean",
    "overlap_right_se",
    "pred_outlier",
    "pred_overlap_left",
    "pred_overlap_right",
    "status",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn record_fields(r: &TrialRecord) -> Vec<String> {
    vec![
        r.mode.as_str().to_string(),
        r.n.to_string(),
        r.m.to_string(),
        r.k.to_string(),
        r.q.to_string(),
        fmt_f64(r.lambda),
        r.trial.to_string(),
        r.seed.to_string(),
        opt(r.s1_hat),
        opt(r.beta_hat),
        opt(r.overlap_left),
        opt(r.overlap_right),
        r.axis.map(|a| a.to_string()).unwrap_or_default(),
        fmt_f64(r.prediction.outlier),
        fmt_f64(r.prediction.left_overlap),
        fmt_f64(r.prediction.right_overlap),
        r.status.to_string(),
    ]
}

fn aggregate_fields(a: &AggregateRow) -> Vec<String> {
    let stat = |s: Option<Stat>| -> [String; 2] {
        match s {
            Some(s) => [fmt_f64(s.mean), fmt_f64(s.se)],
            None => [String::new(), String::new()],
        }
    };
    let mut out = vec![
        a.mode.as_str().to_string(),
        a.n.to_string(),
        a.m.to_string(),
        a.k.to_string(),
        a.q.to_string(),
        fmt_f64(a.lambda),
        a.axis.map(|x| x.to_string()).unwrap_or_default(),
        a.trials.to_string(),
        a.failures.to_string(),
    ];
    for s in [a.s1_hat, a.beta_hat, a.overlap_left, a.overlap_right] {
        out.extend(stat(s));
    }
    out.extend([
        fmt_f64(a.prediction.outlier),
        fmt_f64(a.prediction.left_overlap),
        fmt_f64(a.prediction.right_overlap),
        if a.all_failed() { "all_failed" } else { "ok" }.to_string(),
    ]);
    out
}

fn write_rows<W: Write>(
    out: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_records<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    write_rows(out, &RECORD_HEADER, records.iter().map(record_fields))
}

pub fn write_aggregates<W: Write>(out: W, rows: &[AggregateRow]) -> Result<()> {
    write_rows(out, &AGGREGATE_HEADER, rows.iter().map(aggregate_fields))
}

pub fn write_histogram<W: Write>(out: W, hist: &Histogram) -> Result<()> {
    write_rows(
        out,
        &["bin_lo", "bin_hi", "center", "density", "theory"],
        hist.bins.iter().map(|b| {
            vec![
                fmt_f64(b.lo),
                fmt_f64(b.hi),
                fmt_f64(b.center),
                fmt_f64(b.density),
                fmt_f64(b.theory),
            ]
        }),
    )
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_records_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    write_records(create(path)?, records)
}

pub fn write_aggregates_csv(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    write_aggregates(create(path)?, rows)
}

pub fn write_histogram_csv(path: &Path, hist: &Histogram) -> Result<()> {
    write_histogram(create(path)?, hist)
}

/// Sidecar describing how an aggregate file was produced.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateMeta<'a> {
    pub overlap_statistic: &'a str,
    pub standard_error: &'a str,
    pub config: &'a super::SweepConfig,
}

impl<'a> AggregateMeta<'a> {
    pub fn new(config: &'a super::SweepConfig) -> Self {
        Self {
            overlap_statistic: "mean of absolute overlaps |<v_hat, v>| and |<u_hat, u>|",
            standard_error: "sample standard deviation / sqrt(successful trials)",
            config,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}
