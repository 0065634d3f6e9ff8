//! Experiment suites, calibrated tolerances and CSV output.

pub mod config;
pub mod report;
pub mod stats;
pub mod suites;
pub mod tolerance;

pub use config::{mixed_functions, ExperimentConfig, Family};
pub use suites::{
    method_discrepancies, run_agreement_suite, run_oracle_suite, run_polygonal_convergence,
    run_transport_suite, AgreementReport, ConvergenceReport, OracleOptions, OracleReport,
    TransportReport,
};
pub use tolerance::ToleranceSchedule;
