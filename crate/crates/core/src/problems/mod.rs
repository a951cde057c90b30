//! Problem definitions for `VI(Z; G, H, J)`: evaluators for `G`, `grad G` and
//! `H`, their Lipschitz constants, stochastic samplers for `H`, and built-in
//! saddle-point families.

mod matrix;
mod saddle;
mod stochastic;

use std::fmt;
use std::sync::Arc;

pub use matrix::{certified_operator_norm, estimate_operator_norm, Matrix, POWER_ITERATION_MAX};
pub use saddle::{
    build_matrix_game, build_saddle_problem, reference_instance, SaddleProblem, REFERENCE_K_SEED,
};
pub use stochastic::{NoiseKind, StochasticOracle};

use crate::error::{Error, Result};
use crate::geometry::{ProxSetup, SimpleTerm};
use crate::space::{Block, OracleCounters};

/// The smooth part `G` and the monotone operator `H` of a VI.
pub trait Operators: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn g_value(&self, z: &[f64]) -> f64;

    fn grad_g(&self, z: &[f64], out: &mut [f64]);

    fn h(&self, z: &[f64], out: &mut [f64]);

    /// Whether `H` is affine, which makes `z -> Q(z_tilde, z)` concave.
    fn h_is_affine(&self) -> bool {
        false
    }
}

/// Lipschitz floor applied when `grad G` is (nearly) zero, so that `2L/k` and
/// `ceil(kM/L)` stay defined.
pub fn floored_lipschitz_l(l: f64, m: f64) -> f64 {
    let floor = 1e-12 * m;
    let v = l.max(floor);
    if v > 0.0 {
        v
    } else {
        1e-12
    }
}

/// A fully specified `VI(Z; G, H, J)` instance.
#[derive(Clone)]
pub struct ProblemSpec {
    ops: Arc<dyn Operators>,
    setup: ProxSetup,
    blocks: Vec<Block>,
    lipschitz_l: f64,
    lipschitz_m: f64,
    name: String,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("lipschitz_l", &self.lipschitz_l)
            .field("lipschitz_m", &self.lipschitz_m)
            .field("setup", &self.setup)
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        ops: Arc<dyn Operators>,
        setup: ProxSetup,
        lipschitz_l: f64,
        lipschitz_m: f64,
    ) -> Result<Self> {
        if ops.dim() != setup.dim() {
            return Err(Error::DimensionMismatch {
                expected: setup.dim(),
                got: ops.dim(),
            });
        }
        for (label, v) in [("L", lipschitz_l), ("M", lipschitz_m)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "Lipschitz constant {label} must be finite and >= 0, got {v}"
                )));
            }
        }
        let blocks = setup.set().leaves().into_iter().map(|(b, _)| b).collect();
        Ok(Self {
            ops,
            setup,
            blocks,
            lipschitz_l,
            lipschitz_m,
            name: name.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.setup.dim()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn setup(&self) -> &ProxSetup {
        &self.setup
    }

    pub fn simple_term(&self) -> SimpleTerm {
        self.setup.simple_term()
    }

    pub fn lipschitz_l(&self) -> f64 {
        self.lipschitz_l
    }

    pub fn lipschitz_m(&self) -> f64 {
        self.lipschitz_m
    }

    pub fn operators(&self) -> &Arc<dyn Operators> {
        &self.ops
    }

    pub fn g_value(&self, z: &[f64]) -> f64 {
        self.ops.g_value(z)
    }

    pub fn j_value(&self, z: &[f64]) -> f64 {
        self.setup.simple_term().value(z)
    }

    pub fn h_is_affine(&self) -> bool {
        self.ops.h_is_affine()
    }

    /// Uncounted `grad G(z)`.
    pub fn grad_g(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.ops.grad_g(z, &mut out);
        out
    }

    /// Uncounted `H(z)`.
    pub fn h(&self, z: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.ops.h(z, &mut out);
        out
    }

    pub fn eval_grad_g(&self, z: &[f64], out: &mut [f64], counters: &mut OracleCounters) {
        counters.grad_g_evals += 1;
        self.ops.grad_g(z, out);
    }

    pub fn eval_h(&self, z: &[f64], out: &mut [f64], counters: &mut OracleCounters) {
        counters.h_evals += 1;
        self.ops.h(z, out);
    }
}

impl ProblemSpec {
    /// Replaces the stored Lipschitz constants.
    pub fn with_lipschitz(mut self, l: f64, m: f64) -> Result<Self> {
        for (label, v) in [("L", l), ("M", m)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "Lipschitz constant {label} must be finite and >= 0, got {v}"
                )));
            }
        }
        self.lipschitz_l = l;
        self.lipschitz_m = m;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// `sum_i (w_i / 2) (z_i - a_i)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalQuadratic {
    pub weights: Vec<f64>,
    pub targets: Vec<f64>,
}

impl DiagonalQuadratic {
    pub fn new(weights: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if weights.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: targets.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter(
                "quadratic weights must be finite and >= 0".into(),
            ));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter(
                "quadratic targets must be finite".into(),
            ));
        }
        Ok(Self { weights, targets })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            weights: vec![0.0; n],
            targets: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        crate::space::compensated_sum(
            z.iter()
                .zip(self.weights.iter().zip(&self.targets))
                .map(|(x, (w, a))| 0.5 * w * (x - a) * (x - a)),
        )
    }

    pub fn gradient(&self, z: &[f64], out: &mut [f64]) {
        for (o, (x, (w, a))) in out
            .iter_mut()
            .zip(z.iter().zip(self.weights.iter().zip(&self.targets)))
        {
            *o = w * (x - a);
        }
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| *w == 0.0)
    }
}

/// `G` a diagonal quadratic, `H = 0`. The pure smooth-minimization case.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    pub g: DiagonalQuadratic,
}

impl Operators for QuadraticProblem {
    fn dim(&self) -> usize {
        self.g.dim()
    }

    fn g_value(&self, z: &[f64]) -> f64 {
        self.g.value(z)
    }

    fn grad_g(&self, z: &[f64], out: &mut [f64]) {
        self.g.gradient(z, out)
    }

    fn h(&self, _z: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn h_is_affine(&self) -> bool {
        true
    }
}

/// Builds `VI(Z; G, 0, J)` with a diagonal quadratic `G`; `L` is the largest weight.
pub fn build_quadratic_problem(g: DiagonalQuadratic, setup: ProxSetup) -> Result<ProblemSpec> {
    let l = g.max_weight();
    ProblemSpec::new(
        "diagonal_quadratic",
        Arc::new(QuadraticProblem { g }),
        setup,
        l,
        0.0,
    )
}
