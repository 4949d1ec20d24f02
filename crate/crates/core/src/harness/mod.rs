//! Seeded Monte Carlo sweeps, their aggregation and CSV output.
//!
//! Each trial derives its random stream from `(base_seed, lambda index,
//! trial index)` alone, so a sweep is reproducible bit for bit regardless of
//! how many workers run it.

mod aggregate;
mod config;
mod histogram;
mod io;
mod sweep;

pub use aggregate::{aggregate, AggregateRow, Stat};
pub use config::{SignalKind, SweepConfig, SweepMode};
pub use histogram::{bin_values, spectrum_histogram, Histogram, HistogramBin};
pub use io::{
    fmt_f64, write_aggregates, write_aggregates_csv, write_histogram, write_histogram_csv,
    write_json, write_records, write_records_csv, AggregateMeta, AGGREGATE_HEADER, RECORD_HEADER,
};
pub use sweep::{run_matrix_sweep, run_sweep, run_tensor_sweep, TrialRecord, TrialStatus};
