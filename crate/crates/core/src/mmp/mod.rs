//! The minimal model program over either backend.

pub mod pair;
pub mod report;
pub mod run;
pub mod step;

pub use pair::{CertifiedRay, Pair};
pub use report::{cone_bound_check, nef_polytope, rationality_report, RationalityReport};
pub use run::{
    replay, run_lmmp_scaling, run_lmmp_scaling_with, run_mmp, Candidate, Chooser, FinalState, MMPStepRecord,
    MMPTrace, MmpRun, RunError, Strategy, DEFAULT_STEP_BUDGET, TRACE_SCHEMA_VERSION,
};
pub use step::{mmp_step, negative_extremal_rays, nef_threshold, ray_values, MMPStep, NefThreshold, RayValue, StepKind};
