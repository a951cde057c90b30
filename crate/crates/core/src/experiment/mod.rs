//! Experiment runner behind the `mpsvi` binary: INI configs, `(N, seed)`
//! sweeps, CSV/JSON traces, bound verdicts and slope reports.
//!
//! Config sections are `[problem]`, `[solver]`, `[sweep]` and `[output]`; see
//! the shipped files under `configs/` for every key.

mod cli;
mod config;
mod ini;
mod runner;

pub use cli::{parse_point, run_cli, Cli, Command};
pub use config::{
    BuiltProblem, ExperimentConfig, Family, KSource, OutputFormat, ProblemConfig, SetConfig, Timing,
};
pub use ini::{ConfigError, Entry, Ini, Section};
pub use runner::{
    cell_stem, emit_trace_csv, plan_experiment, run_cell, run_experiment, trace_csv, CellResult,
    ConditionMargin, ExitStatus, ExperimentError, PerN, Plan, Summary, TraceRow,
    MAX_TOTAL_INNER_STEPS,
};
