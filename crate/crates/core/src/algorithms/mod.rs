//! Solvers: the deterministic and stochastic sliding methods, their parameter
//! schedules and validation, and a mirror-prox baseline.

mod mirror_prox;
mod schedule;
mod sliding;
mod trace;
mod validate;

pub use mirror_prox::{default_mirror_prox_step, run_mirror_prox};
pub use schedule::{
    guarded_ceil, schedule_deterministic, schedule_stochastic, Schedule, ScheduleKind,
};
pub use sliding::{run_mps, run_smps, START_FEASIBILITY_TOL};
pub use trace::{Method, Trace, TraceRecord};
pub use validate::{
    validate_schedule, ConditionReport, ValidationMode, ValidationReport, VALIDATION_RTOL,
};
