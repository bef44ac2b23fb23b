//! Files on disk: time series, snapshots, run directories, sweeps and comparisons.

pub mod compare;
pub mod runs;
pub mod tables;

pub use compare::{compare_runs, compare_series, CompareReport, SeriesComparison};
pub use runs::{cell_name, run_artifacts, run_to_dir, sweep, RunArtifacts, RunSummary, SweepCell, SwirlChoice};
pub use tables::{
    parse_timeseries, read_timeseries, write_snapshot, write_timeseries, SNAPSHOT_HEADER, TIMESERIES_HEADER,
};
