use std::sync::Arc;

use super::matrix::{estimate_operator_norm, Matrix};
use super::{floored_lipschitz_l, DiagonalQuadratic, Operators, ProblemSpec};
use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, ProxKind, ProxSetup, SimpleTerm};
use crate::space::RngStream;

/// Tolerance used for the spectral norm of `K` when building saddle problems.
const NORM_TOL: f64 = 1e-12;

/// `min_{x in X} max_{y in Y} f(x) + <K x, y> - g(y)` with diagonal quadratic
/// `f`, `g`, written as `VI(X x Y; G, H, 0)` with `G(z) = f(x) + g(y)` and
/// `H(z) = (K^T y, -K x)`.
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    k: Matrix,
    f: DiagonalQuadratic,
    g: DiagonalQuadratic,
    x_set: FeasibleSet,
    y_set: FeasibleSet,
}

impl SaddleProblem {
    pub fn k(&self) -> &Matrix {
        &self.k
    }

    pub fn f(&self) -> &DiagonalQuadratic {
        &self.f
    }

    pub fn g(&self) -> &DiagonalQuadratic {
        &self.g
    }

    pub fn x_set(&self) -> &FeasibleSet {
        &self.x_set
    }

    pub fn y_set(&self) -> &FeasibleSet {
        &self.y_set
    }

    /// Dimension of the minimizing block `x`.
    pub fn nx(&self) -> usize {
        self.k.cols()
    }

    /// Dimension of the maximizing block `y`.
    pub fn ny(&self) -> usize {
        self.k.rows()
    }

    pub fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        z.split_at(self.nx())
    }

    /// `f(x) + <K x, y> - g(y)`.
    pub fn lagrangian(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut kx = vec![0.0; self.ny()];
        self.k.matvec(x, &mut kx);
        let bilinear: f64 = kx.iter().zip(y).map(|(a, b)| a * b).sum();
        self.f.value(x) + bilinear - self.g.value(y)
    }
}

impl Operators for SaddleProblem {
    fn dim(&self) -> usize {
        self.nx() + self.ny()
    }

    fn g_value(&self, z: &[f64]) -> f64 {
        let (x, y) = self.split(z);
        self.f.value(x) + self.g.value(y)
    }

    fn grad_g(&self, z: &[f64], out: &mut [f64]) {
        let (x, y) = self.split(z);
        let (ox, oy) = out.split_at_mut(self.nx());
        self.f.gradient(x, ox);
        self.g.gradient(y, oy);
    }

    fn h(&self, z: &[f64], out: &mut [f64]) {
        let (x, y) = self.split(z);
        let (ox, oy) = out.split_at_mut(self.nx());
        self.k.matvec_t(y, ox);
        self.k.matvec(x, oy);
        oy.iter_mut().for_each(|v| *v = -*v);
    }

    fn h_is_affine(&self) -> bool {
        true
    }
}

/// Builds the saddle VI. `K` is `m x n`: `x` has `n` coordinates, `y` has `m`.
/// `L` is the largest quadratic weight and `M = ||K||_2`.
pub fn build_saddle_problem(
    k: Matrix,
    f: DiagonalQuadratic,
    g: DiagonalQuadratic,
    x_set: FeasibleSet,
    y_set: FeasibleSet,
    kind: ProxKind,
) -> Result<(ProblemSpec, Arc<SaddleProblem>)> {
    let (n, m) = (k.cols(), k.rows());
    let checks = [
        ("f", f.dim(), n),
        ("X", x_set.dim(), n),
        ("g", g.dim(), m),
        ("Y", y_set.dim(), m),
    ];
    for (what, got, expected) in checks {
        if got != expected {
            return Err(Error::InvalidParameter(format!(
                "{what} has dimension {got}, but K is {m}x{n} and requires {expected}"
            )));
        }
    }
    let l = f.max_weight().max(g.max_weight());
    let m_norm = estimate_operator_norm(&k, NORM_TOL)?;
    let setup = ProxSetup::new(
        kind,
        FeasibleSet::new_product(vec![x_set.clone(), y_set.clone()])?,
        SimpleTerm::Zero,
    )?;
    let saddle = Arc::new(SaddleProblem {
        k,
        f,
        g,
        x_set,
        y_set,
    });
    let spec = ProblemSpec::new("saddle", saddle.clone(), setup, l, m_norm)?;
    Ok((spec, saddle))
}

/// Bilinear matrix game `min_{x in simplex} max_{y in simplex} <K x, y>` with
/// the entropy prox. `G = 0`, so the stored `L` is the floored value.
pub fn build_matrix_game(k: Matrix) -> Result<(ProblemSpec, Arc<SaddleProblem>)> {
    let (n, m) = (k.cols(), k.rows());
    let (spec, saddle) = build_saddle_problem(
        k,
        DiagonalQuadratic::zero(n),
        DiagonalQuadratic::zero(m),
        FeasibleSet::new_simplex(n)?,
        FeasibleSet::new_simplex(m)?,
        ProxKind::Entropy,
    )?;
    let l = floored_lipschitz_l(spec.lipschitz_l(), spec.lipschitz_m());
    let m_norm = spec.lipschitz_m();
    Ok((
        spec.with_lipschitz(l, m_norm)?.with_name("matrix_game"),
        saddle,
    ))
}

pub const REFERENCE_K_SEED: u64 = 7;

/// The shipped benchmark instance: `m = n = 20`, `K` uniform on `[-1, 1]` from
/// seed 7 rescaled to spectral norm 2, all quadratic weights 4 (targets 0.25
/// for `x`, 0.75 for `y`), unit boxes and the Euclidean prox. `L = 4`, `M = 2`,
/// and `Omega = 5` from the box centers.
pub fn reference_instance() -> Result<(ProblemSpec, Arc<SaddleProblem>)> {
    let dim = 20;
    let mut rng = RngStream::new(REFERENCE_K_SEED, 0);
    let raw = Matrix::random_uniform(dim, dim, &mut rng);
    let k = raw.scaled(2.0 / estimate_operator_norm(&raw, NORM_TOL)?);
    let (spec, saddle) = build_saddle_problem(
        k,
        DiagonalQuadratic::new(vec![4.0; dim], vec![0.25; dim])?,
        DiagonalQuadratic::new(vec![4.0; dim], vec![0.75; dim])?,
        FeasibleSet::uniform_box(dim, 0.0, 1.0)?,
        FeasibleSet::uniform_box(dim, 0.0, 1.0)?,
        ProxKind::Euclidean,
    )?;
    Ok((
        spec.with_lipschitz(4.0, 2.0)?.with_name("reference_saddle"),
        saddle,
    ))
}
