use std::time::Instant;

use super::schedule::Schedule;
use super::trace::{Method, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::problems::{ProblemSpec, StochasticOracle};
use crate::space::{OracleCounters, Point};

/// Largest violation of `z0` allowed before a run is refused.
pub const START_FEASIBILITY_TOL: f64 = 1e-9;

/// Runs the deterministic sliding method for `schedule.n_outer()` outer
/// iterations from `z0`.
///
/// Each outer iteration evaluates `grad G` once at the extrapolated point
/// `z_under_k` and freezes it; the `T_k` inner steps are prox-extragradient
/// steps on `H` with fixed `beta_k`-center `z_{k-1}`, each costing two `H`
/// evaluations.
pub fn run_mps(problem: &ProblemSpec, schedule: &Schedule, z0: &[f64]) -> Result<Trace> {
    run_sliding(
        problem,
        schedule,
        z0,
        Method::Mps,
        None,
        |z, out, counters| problem.eval_h(z, out, counters),
    )
}

/// Stochastic variant: identical to [`run_mps`] except that every `H` call is
/// replaced by one sample from `oracle`.
pub fn run_smps(oracle: &mut StochasticOracle, schedule: &Schedule, z0: &[f64]) -> Result<Trace> {
    let problem = oracle.base().clone();
    let seed = Some(oracle.rng().seed());
    run_sliding(
        &problem,
        schedule,
        z0,
        Method::Smps,
        seed,
        |z, out, counters| oracle.sample_h_into(z, out, counters),
    )
}

pub(crate) fn check_start(problem: &ProblemSpec, z0: &[f64]) -> Result<()> {
    if z0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: z0.len(),
        });
    }
    if let Some(index) = z0.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            index,
            value: z0[index],
        });
    }
    let violation = problem.setup().set().violation(z0);
    if violation > START_FEASIBILITY_TOL {
        return Err(Error::Infeasible { violation });
    }
    Ok(())
}

pub(crate) fn check_iterate(v: &[f64], k: usize, t: usize) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFiniteIterate {
            k,
            t,
            index,
            value: v[index],
        }),
        None => Ok(()),
    }
}

fn run_sliding<F>(
    problem: &ProblemSpec,
    schedule: &Schedule,
    z0: &[f64],
    method: Method,
    seed: Option<u64>,
    mut h_oracle: F,
) -> Result<Trace>
where
    F: FnMut(&[f64], &mut [f64], &mut OracleCounters),
{
    check_start(problem, z0)?;
    let setup = problem.setup();
    let blocks = problem.blocks().to_vec();
    let d = problem.dim();
    let start = Instant::now();

    let mut counters = OracleCounters::default();
    let mut z_prev = z0.to_vec();
    let mut z_bar = z0.to_vec();
    let mut z_under = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut h = vec![0.0; d];
    let mut lin = vec![0.0; d];
    let mut z_inner = vec![0.0; d];
    let mut z_next = vec![0.0; d];
    let mut z_tilde = vec![0.0; d];
    let mut tilde_sum = vec![0.0; d];
    let mut records = Vec::with_capacity(schedule.n_outer());

    for k in 1..=schedule.n_outer() {
        let gamma = schedule.gamma(k);
        let beta = schedule.beta(k);
        let tk = schedule.inner_steps(k);

        for i in 0..d {
            z_under[i] = (1.0 - gamma) * z_bar[i] + gamma * z_prev[i];
        }
        problem.eval_grad_g(&z_under, &mut grad, &mut counters);
        check_iterate(&grad, k, 0)?;

        z_inner.copy_from_slice(&z_prev);
        tilde_sum.fill(0.0);
        for t in 1..=tk {
            let eta = schedule.eta(k, t);

            h_oracle(&z_inner, &mut h, &mut counters);
            for i in 0..d {
                lin[i] = grad[i] + h[i];
            }
            setup.prox_map_into(&lin, &z_prev, &z_inner, beta, eta, &mut z_tilde)?;
            counters.prox_solves += 1;
            check_iterate(&z_tilde, k, t as usize)?;

            h_oracle(&z_tilde, &mut h, &mut counters);
            for i in 0..d {
                lin[i] = grad[i] + h[i];
            }
            setup.prox_map_into(&lin, &z_prev, &z_inner, beta, eta, &mut z_next)?;
            counters.prox_solves += 1;
            check_iterate(&z_next, k, t as usize)?;

            for (s, v) in tilde_sum.iter_mut().zip(&z_tilde) {
                *s += v;
            }
            std::mem::swap(&mut z_inner, &mut z_next);
        }

        std::mem::swap(&mut z_prev, &mut z_inner);
        let inv_t = 1.0 / tk as f64;
        for i in 0..d {
            z_bar[i] = (1.0 - gamma) * z_bar[i] + gamma * (tilde_sum[i] * inv_t);
        }
        check_iterate(&z_bar, k, tk as usize)?;
        records.push(TraceRecord {
            k,
            z_bar: Point::with_blocks(z_bar.clone(), blocks.clone())?,
            counters,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
    }

    Ok(Trace {
        method,
        problem: problem.name().to_string(),
        seed,
        records,
        final_iterate: Point::with_blocks(z_prev, blocks)?,
    })
}
