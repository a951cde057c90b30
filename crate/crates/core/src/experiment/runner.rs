use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{BuiltProblem, ExperimentConfig, Timing};
use super::ini::ConfigError;
use crate::algorithms::{
    default_mirror_prox_step, run_mirror_prox, run_mps, run_smps, schedule_deterministic,
    schedule_stochastic, validate_schedule, Method, Schedule, Trace, ValidationMode,
    ValidationReport,
};
use crate::evaluation::{
    fit_loglog_slope, sup_gap_ascent, sup_gap_saddle, theoretical_bound, BoundKind, GapReport,
};
use crate::problems::StochasticOracle;
use crate::space::{stream_id_for, OracleCounters, RngStream};

/// Refuse sliding runs whose schedule asks for more inner steps than this.
pub const MAX_TOTAL_INNER_STEPS: u64 = 500_000_000;

const ASCENT_ITERS: usize = 2000;
const ASCENT_RESTARTS: usize = 4;

/// Exit statuses of the experiment runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    BoundFail = 1,
    UsageError = 2,
    RuntimeAbort = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub enum ExperimentError {
    Config(ConfigError),
    Validation { n: usize, violation: String },
    Runtime(crate::Error),
    Io { path: PathBuf, message: String },
}

impl ExperimentError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            ExperimentError::Config(_) => ExitStatus::UsageError,
            _ => ExitStatus::RuntimeAbort,
        }
    }
}

impl std::fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExperimentError::Config(e) => write!(f, "config error: {e}"),
            ExperimentError::Validation { n, violation } => {
                write!(f, "schedule validation failed for N={n}: {violation}")
            }
            ExperimentError::Runtime(e) => write!(f, "run aborted: {e}"),
            ExperimentError::Io { path, message } => {
                write!(f, "cannot write {}: {message}", path.display())
            }
        }
    }
}

impl std::error::Error for ExperimentError {}

impl From<ConfigError> for ExperimentError {
    fn from(e: ConfigError) -> Self {
        ExperimentError::Config(e)
    }
}

impl From<crate::Error> for ExperimentError {
    fn from(e: crate::Error) -> Self {
        ExperimentError::Runtime(e)
    }
}

/// One CSV row: the state after outer iteration `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub grad_evals: u64,
    pub h_evals: u64,
    pub h_samples: u64,
    pub gap: f64,
    pub bound: f64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub n: usize,
    pub seed: u64,
    pub gap: f64,
    pub bound: f64,
    pub certified: bool,
    pub counters: OracleCounters,
    pub rows: Vec<TraceRow>,
    pub z_bar: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionMargin {
    pub name: &'static str,
    pub worst_margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerN {
    pub n: usize,
    pub seeds: usize,
    pub mean_gap: f64,
    pub bound: f64,
    pub passed: bool,
    pub grad_g_evals: u64,
    pub h_evals: u64,
    pub h_samples: u64,
    pub validation: Vec<ConditionMargin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub method: Method,
    pub lipschitz_l: f64,
    pub lipschitz_m: f64,
    pub l_floor_applied: bool,
    pub omega: f64,
    pub sigma: f64,
    pub bound_formula: &'static str,
    pub per_n: Vec<PerN>,
    pub slope: Option<f64>,
    pub slope_excluded: Vec<usize>,
    pub certified: bool,
    pub verdict: &'static str,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.per_n.iter().all(|p| p.passed)
    }
}

/// Everything needed to run cells: the built problem, its `Omega`, the start
/// point and, for the sliding methods, one validated schedule per `N`.
pub struct Plan {
    pub built: BuiltProblem,
    pub omega: f64,
    pub z0: Vec<f64>,
    pub schedules: Vec<(usize, Option<Schedule>, Option<ValidationReport>)>,
}

fn validation_mode(method: Method) -> ValidationMode {
    match method {
        Method::Smps => ValidationMode::Stochastic,
        _ => ValidationMode::Deterministic,
    }
}

fn schedule_for(
    cfg: &ExperimentConfig,
    built: &BuiltProblem,
    omega: f64,
    n: usize,
) -> crate::Result<Schedule> {
    let (l, m) = (built.spec.lipschitz_l(), built.spec.lipschitz_m());
    let s = match cfg.method {
        Method::Smps => schedule_stochastic(n, l, m, cfg.problem.sigma, omega)?,
        _ => schedule_deterministic(n, l, m)?,
    };
    Ok(if cfg.eta_scale == 1.0 {
        s
    } else {
        s.with_scaled_eta(cfg.eta_scale)
    })
}

/// Builds the problem and all schedules, and validates every schedule.
/// Returns the plan even when validation fails, so callers can report.
pub fn plan_experiment(cfg: &ExperimentConfig) -> Result<Plan, ExperimentError> {
    let built = cfg.problem.build()?;
    let set = built.spec.setup().set();
    let z0 = match &cfg.start {
        None => set.center(),
        Some(z) => {
            if z.len() != set.dim() {
                return Err(ConfigError::general(format!(
                    "'start' has {} entries, the problem has dimension {}",
                    z.len(),
                    set.dim()
                ))
                .into());
            }
            let violation = set.violation(z);
            if violation > crate::algorithms::START_FEASIBILITY_TOL {
                return Err(ConfigError::general(format!(
                    "'start' is not in the feasible set (violation {violation:e})"
                ))
                .into());
            }
            z.clone()
        }
    };
    let omega = built.spec.setup().omega(&z0)?;
    let mut schedules = Vec::new();
    for &n in &cfg.sweep {
        if cfg.method == Method::MirrorProx {
            schedules.push((n, None, None));
            continue;
        }
        let s = schedule_for(cfg, &built, omega, n)?;
        let report = validate_schedule(
            &s,
            built.spec.lipschitz_l(),
            built.spec.lipschitz_m(),
            validation_mode(cfg.method),
        );
        schedules.push((n, Some(s), Some(report)));
    }
    Ok(Plan {
        built,
        omega,
        z0,
        schedules,
    })
}

fn bound_kind(method: Method) -> BoundKind {
    match method {
        Method::Smps => BoundKind::Stochastic,
        _ => BoundKind::Deterministic,
    }
}

/// Bound reported in the `bound` column after `k` iterations. For mirror-prox
/// this is the classical `Omega / (step k)`.
fn bound_at(cfg: &ExperimentConfig, plan: &Plan, step: f64, k: usize) -> f64 {
    match cfg.method {
        Method::MirrorProx => plan.omega / (step * k as f64),
        m => theoretical_bound(bound_kind(m), plan.built.spec.lipschitz_l(), plan.omega, k),
    }
}

fn gap_of(plan: &Plan, z: &[f64]) -> crate::Result<GapReport> {
    if let Some(sp) = &plan.built.saddle {
        match sup_gap_saddle(sp, &plan.built.spec, z) {
            Err(crate::Error::UnsupportedGap(_)) => {}
            other => return other,
        }
    }
    sup_gap_ascent(&plan.built.spec, z, ASCENT_ITERS, ASCENT_RESTARTS)
}

fn mirror_prox_step(cfg: &ExperimentConfig, plan: &Plan) -> f64 {
    cfg.step
        .unwrap_or_else(|| default_mirror_prox_step(&plan.built.spec))
}

/// Runs one `(N, seed)` cell and evaluates the gap at every outer iteration.
pub fn run_cell(
    cfg: &ExperimentConfig,
    plan: &Plan,
    n: usize,
    schedule: Option<&Schedule>,
    seed: u64,
) -> Result<CellResult, ExperimentError> {
    let spec = &plan.built.spec;
    let step = mirror_prox_step(cfg, plan);
    let trace: Trace = match (cfg.method, schedule) {
        (Method::MirrorProx, _) => run_mirror_prox(spec, step, n, &plan.z0)?,
        (Method::Mps, Some(s)) => run_mps(spec, s, &plan.z0)?,
        (Method::Smps, Some(s)) => {
            let rng = RngStream::new(seed, stream_id_for(&[n as u64, seed]));
            let mut oracle =
                StochasticOracle::new(spec.clone(), cfg.problem.noise, cfg.problem.sigma, rng)?;
            let mut tr = run_smps(&mut oracle, s, &plan.z0)?;
            tr.seed = Some(seed);
            tr
        }
        _ => unreachable!("sliding methods always carry a schedule"),
    };

    let mut rows = Vec::with_capacity(trace.records.len());
    let mut certified = true;
    for r in &trace.records {
        let g = gap_of(plan, r.z_bar.values())?;
        certified &= g.certified;
        rows.push(TraceRow {
            k: r.k,
            grad_evals: r.counters.grad_g_evals,
            h_evals: r.counters.h_evals,
            h_samples: r.counters.h_samples,
            gap: g.sup_gap,
            bound: bound_at(cfg, plan, step, r.k),
            elapsed_seconds: match cfg.timing {
                Timing::Wall => r.elapsed_seconds,
                Timing::None => 0.0,
            },
        });
    }
    let last = rows.last().cloned().expect("n >= 1");
    Ok(CellResult {
        n,
        seed,
        gap: last.gap,
        bound: last.bound,
        certified,
        counters: trace.counters(),
        rows,
        z_bar: trace.output().expect("n >= 1").values().to_vec(),
    })
}

/// CSV with columns `k,grad_evals,h_evals,h_samples,gap,bound,elapsed_seconds`;
/// reals are written with 17 significant digits.
pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut s = String::from("k,grad_evals,h_evals,h_samples,gap,bound,elapsed_seconds\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{:.16e},{:.16e},{:.16e}",
            r.k, r.grad_evals, r.h_evals, r.h_samples, r.gap, r.bound, r.elapsed_seconds
        )
        .expect("writing to a String cannot fail");
    }
    s
}

pub fn emit_trace_csv(rows: &[TraceRow], path: &Path) -> Result<(), ExperimentError> {
    write_file(path, &trace_csv(rows))
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|e| ExperimentError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn cell_stem(method: Method, n: usize, seed: u64) -> String {
    format!("{}_n{n}_seed{seed}", method.as_str())
}

fn first_violation(plan: &Plan) -> Option<(usize, String)> {
    plan.schedules.iter().find_map(|(n, _, r)| {
        r.as_ref().filter(|r| !r.passed()).map(|r| {
            (
                *n,
                r.first_violation()
                    .unwrap_or("unknown condition")
                    .to_string(),
            )
        })
    })
}

/// Runs every `(N, seed)` cell, writes per-cell traces and `summary.json` to
/// `out`, and returns the summary. `jobs > 1` runs cells on a thread pool;
/// results do not depend on `jobs`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out: &Path,
    jobs: usize,
) -> Result<Summary, ExperimentError> {
    let plan = plan_experiment(cfg)?;
    if let Some((n, violation)) = first_violation(&plan) {
        return Err(ExperimentError::Validation { n, violation });
    }
    for (n, s, _) in &plan.schedules {
        if let Some(s) = s {
            if s.total_inner_steps() > MAX_TOTAL_INNER_STEPS {
                return Err(ExperimentError::Runtime(crate::Error::InvalidParameter(format!(
                    "schedule for N={n} needs {} inner steps (M/L too large); use method = mirror_prox",
                    s.total_inner_steps()
                ))));
            }
        }
    }

    let seeds: Vec<u64> = match cfg.method {
        Method::Smps => cfg.seeds.clone(),
        _ => cfg.seeds[..1].to_vec(),
    };
    let cells: Vec<(usize, Option<&Schedule>, u64)> = plan
        .schedules
        .iter()
        .flat_map(|(n, s, _)| seeds.iter().map(move |&seed| (*n, s.as_ref(), seed)))
        .collect();

    let run = |&(n, s, seed): &(usize, Option<&Schedule>, u64)| run_cell(cfg, &plan, n, s, seed);
    let results: Vec<Result<CellResult, ExperimentError>> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ExperimentError::Runtime(crate::Error::InvalidParameter(e.to_string())))?;
        pool.install(|| cells.par_iter().map(run).collect())
    } else {
        cells.iter().map(run).collect()
    };
    let results: Vec<CellResult> = results.into_iter().collect::<Result<_, _>>()?;

    fs::create_dir_all(out).map_err(|e| ExperimentError::Io {
        path: out.to_path_buf(),
        message: e.to_string(),
    })?;
    for c in &results {
        let stem = cell_stem(cfg.method, c.n, c.seed);
        if cfg.format.csv() {
            emit_trace_csv(&c.rows, &out.join(format!("{stem}.csv")))?;
        }
        if cfg.format.json() {
            let json = serde_json::to_string_pretty(c).expect("cell results serialize");
            write_file(&out.join(format!("{stem}.json")), &(json + "\n"))?;
        }
    }

    let summary = summarize(cfg, &plan, &results);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&out.join("summary.json"), &(json + "\n"))?;
    Ok(summary)
}

fn summarize(cfg: &ExperimentConfig, plan: &Plan, results: &[CellResult]) -> Summary {
    let mut per_n = Vec::new();
    for (n, _, report) in &plan.schedules {
        let cells: Vec<&CellResult> = results.iter().filter(|c| c.n == *n).collect();
        let mean_gap = cells.iter().map(|c| c.gap).sum::<f64>() / cells.len() as f64;
        let bound = cells[0].bound;
        let first = cells[0].counters;
        per_n.push(PerN {
            n: *n,
            seeds: cells.len(),
            mean_gap,
            bound,
            passed: mean_gap <= bound,
            grad_g_evals: first.grad_g_evals,
            h_evals: first.h_evals,
            h_samples: first.h_samples,
            validation: report
                .iter()
                .flat_map(|r| &r.conditions)
                .map(|c| ConditionMargin {
                    name: c.name,
                    worst_margin: c.worst_margin,
                    passed: c.passed(),
                })
                .collect(),
        });
    }
    let pairs: Vec<(usize, f64)> = per_n.iter().map(|p| (p.n, p.mean_gap)).collect();
    let fit = fit_loglog_slope(&pairs).ok();
    let certified = results.iter().all(|c| c.certified);
    let passed = per_n.iter().all(|p| p.passed);
    Summary {
        problem: plan.built.spec.name().to_string(),
        method: cfg.method,
        lipschitz_l: plan.built.spec.lipschitz_l(),
        lipschitz_m: plan.built.spec.lipschitz_m(),
        l_floor_applied: plan.built.l_floor_applied,
        omega: plan.omega,
        sigma: cfg.problem.sigma,
        bound_formula: match cfg.method {
            Method::Mps => "6 L Omega / N^2",
            Method::Smps => "19 L Omega / N^2 (mean over seeds)",
            Method::MirrorProx => "Omega / (step N)",
        },
        per_n,
        slope: fit.as_ref().map(|f| f.slope),
        slope_excluded: fit
            .map(|f| f.excluded.iter().map(|&(n, _)| n).collect())
            .unwrap_or_default(),
        certified,
        verdict: if passed { "pass" } else { "fail" },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format() {
        let rows = vec![TraceRow {
            k: 1,
            grad_evals: 1,
            h_evals: 2,
            h_samples: 0,
            gap: 0.5,
            bound: 120.0,
            elapsed_seconds: 0.0,
        }];
        let s = trace_csv(&rows);
        assert_eq!(
            s,
            "k,grad_evals,h_evals,h_samples,gap,bound,elapsed_seconds\n\
             1,1,2,0,5.0000000000000000e-1,1.2000000000000000e2,0.0000000000000000e0\n"
        );
        assert_eq!(s.lines().count(), 2);
    }
}
