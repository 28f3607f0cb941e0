//! Scenarios, runs, sweeps and their output files.

mod metrics;
mod output;
mod run;
mod scenario;
mod sweep;

pub use metrics::{cdf, excess_of, mean, quantile, spearman, trim_excess, FlowRecord, MetricStore, TraceRow, TrimExcess};
pub use output::{
    compare, read_counters, read_flows, write_run, write_sweep, CountersFile, COUNTERS_FILE, FLOWS_FILE,
    HEADER_CDF_FILE, MODES_FILE, QUEUES_FILE, SWEEP_FILE, TRACE_FILE,
};
pub use run::run_scenario;
pub use scenario::{Scenario, MAX_SENDERS};
pub use sweep::{axis_values, sweep, sweep_values, AxisValue, SweepAxis, SweepPoint, SweepRow};
