//! Monte-Carlo experiments, efficiency accounting and report output.

mod diagnostics;
mod efficiency;
mod experiment;

pub use diagnostics::{
    duality_survey, monogamy_survey, DualitySurvey, MonogamySurvey, MONOGAMY_TOL,
};
pub use efficiency::{analytic_efficiency, eta1, eta2, EfficiencyReport, Rational};
pub use experiment::{
    derive_seed, experiment_leakage, run_experiment, run_sweep, sweep_to_csv, sweep_to_json,
    ExperimentOutcome, ExperimentSpec, SweepPoint, SweepSpec, TrialRecord, TrialStats,
    SCHEMA_VERSION,
};
