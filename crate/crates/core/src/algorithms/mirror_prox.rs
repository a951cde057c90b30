use std::time::Instant;

use super::sliding::{check_iterate, check_start};
use super::trace::{Method, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::space::{OracleCounters, Point};

/// `1 / (sqrt(2) (L + M))`, the usual step for the full operator `grad G + H`.
pub fn default_mirror_prox_step(problem: &ProblemSpec) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * (problem.lipschitz_l() + problem.lipschitz_m()))
}

/// Classical mirror-prox (extragradient with Bregman steps) on `F = grad G + H`.
///
/// Each iteration calls `grad G` and `H` twice. The output after `t`
/// iterations is the plain average of the intermediate points `w_1..w_t`.
pub fn run_mirror_prox(
    problem: &ProblemSpec,
    step: f64,
    n_iters: usize,
    z0: &[f64],
) -> Result<Trace> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step must be finite and > 0, got {step}"
        )));
    }
    if n_iters == 0 {
        return Err(Error::InvalidParameter("n_iters must be >= 1".into()));
    }
    check_start(problem, z0)?;
    let setup = problem.setup();
    let blocks = problem.blocks().to_vec();
    let d = problem.dim();
    let beta = 1.0 / step;
    let start = Instant::now();

    let mut counters = OracleCounters::default();
    let mut z = z0.to_vec();
    let mut w = vec![0.0; d];
    let mut f = vec![0.0; d];
    let mut h = vec![0.0; d];
    let mut z_next = vec![0.0; d];
    let mut w_sum = vec![0.0; d];
    let mut records = Vec::with_capacity(n_iters);

    let mut operator = |at: &[f64], f: &mut [f64], counters: &mut OracleCounters| {
        problem.eval_grad_g(at, f, counters);
        problem.eval_h(at, &mut h, counters);
        for (fi, hi) in f.iter_mut().zip(&h) {
            *fi += hi;
        }
    };

    for t in 1..=n_iters {
        operator(&z, &mut f, &mut counters);
        setup.prox_map_into(&f, &z, &z, beta, 0.0, &mut w)?;
        counters.prox_solves += 1;
        check_iterate(&w, t, 1)?;

        operator(&w, &mut f, &mut counters);
        setup.prox_map_into(&f, &z, &z, beta, 0.0, &mut z_next)?;
        counters.prox_solves += 1;
        check_iterate(&z_next, t, 2)?;
        std::mem::swap(&mut z, &mut z_next);

        for (s, v) in w_sum.iter_mut().zip(&w) {
            *s += v;
        }
        let avg: Vec<f64> = w_sum.iter().map(|s| s / t as f64).collect();
        records.push(TraceRecord {
            k: t,
            z_bar: Point::with_blocks(avg, blocks.clone())?,
            counters,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
    }

    Ok(Trace {
        method: Method::MirrorProx,
        problem: problem.name().to_string(),
        seed: None,
        records,
        final_iterate: Point::with_blocks(z, blocks)?,
    })
}
