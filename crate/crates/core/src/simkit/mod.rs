//! i.i.d. tensor-power experiments: convergence scans, monotonicity probes and the S_q
//! property suite.

mod covariant;
mod probes;
mod scan;
mod suite;

pub use probes::{
    admixed_sequence, channel_violation, largest_ev_bound, largest_ev_check, monotonicity_probe, negative_control,
    pure_limit_probe, Admixture, LargestEvReport, MonotonicityReport, PureLimitReport, PureLimitRow,
};
pub use scan::{convergence_scan, loglog_slope, shifted_iid_state, ScanConfig, ScanRow, ScanTable};
pub use suite::{convex_roof_counterexample, s_q_property_suite, CounterexampleReport, SqSuiteReport};
