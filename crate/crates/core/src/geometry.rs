//! Prox-functions, feasible sets, the simple term `J`, and the composite
//! prox-mapping with two Bregman terms.
//!
//! The inner step of the sliding methods minimizes
//!
//! ```text
//!     <g, z> + J(z) + beta * V(z0, z) + eta * V(z1, z)      over z in Z
//! ```
//!
//! Both Bregman terms share the same distance-generating function, so they
//! collapse into a single term `(beta + eta) * V(c, z)` (plus a constant) whose
//! center satisfies `grad pi(c) = (beta grad pi(z0) + eta grad pi(z1)) / (beta + eta)`.
//! Every supported combination then has a closed-form solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{compensated_sum, euclidean_norm, linf_norm, Block, RngStream};

/// Smallest coordinate kept on a simplex under the entropy prox.
pub const ENTROPY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProxKind {
    /// `pi(z) = ||z||^2 / 2`, paired with the l2 norm.
    Euclidean,
    /// `pi(z) = sum z_i ln z_i`, paired with the l1 norm on each simplex.
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProxFunction {
    pub kind: ProxKind,
    pub domain_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Simplex { dim: usize },
    Product(Vec<FeasibleSet>),
}

impl FeasibleSet {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::InvalidSet("box must have positive dimension".into()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(Error::InvalidSet(format!(
                    "box bounds at coordinate {i} must be finite with lo <= hi (got [{l}, {h}])"
                )));
            }
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// The box `[lo, hi]^dim`.
    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new_box(vec![lo; dim], vec![hi; dim])
    }

    pub fn new_ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidSet(
                "ball must have positive dimension".into(),
            ));
        }
        if !radius.is_finite() || radius < 0.0 || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSet(format!(
                "ball needs a finite center and a finite radius >= 0 (got {radius})"
            )));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn new_simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet(
                "simplex must have positive dimension".into(),
            ));
        }
        Ok(FeasibleSet::Simplex { dim })
    }

    pub fn new_product(parts: Vec<FeasibleSet>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidSet("empty product".into()));
        }
        Ok(FeasibleSet::Product(parts))
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Simplex { dim } => *dim,
            FeasibleSet::Product(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    /// Non-product factors in order, with the coordinates each one owns.
    pub fn leaves(&self) -> Vec<(Block, &FeasibleSet)> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, offset: usize, out: &mut Vec<(Block, &'a FeasibleSet)>) {
        match self {
            FeasibleSet::Product(parts) => {
                let mut off = offset;
                for p in parts {
                    p.collect_leaves(off, out);
                    off += p.dim();
                }
            }
            leaf => out.push((
                Block {
                    offset,
                    len: leaf.dim(),
                },
                leaf,
            )),
        }
    }

    /// Largest constraint violation of `p` (0 when `p` is in the set).
    pub fn violation(&self, p: &[f64]) -> f64 {
        if p.len() != self.dim() {
            return f64::INFINITY;
        }
        if p.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        self.leaves()
            .into_iter()
            .map(|(b, leaf)| leaf_violation(leaf, &p[b.range()]))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.violation(p) <= tol
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, p: &[f64]) -> Vec<f64> {
        let mut out = p.to_vec();
        for (b, leaf) in self.leaves() {
            project_leaf(leaf, &mut out[b.range()]);
        }
        out
    }

    /// The natural prox-center: box midpoint, ball center, uniform simplex point.
    pub fn center(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (b, leaf) in self.leaves() {
            let dst = &mut out[b.range()];
            match leaf {
                FeasibleSet::Box { lo, hi } => {
                    for (d, (l, h)) in dst.iter_mut().zip(lo.iter().zip(hi)) {
                        *d = 0.5 * (l + h);
                    }
                }
                FeasibleSet::Ball { center, .. } => dst.copy_from_slice(center),
                FeasibleSet::Simplex { dim } => dst.fill(1.0 / *dim as f64),
                FeasibleSet::Product(_) => unreachable!("leaves are never products"),
            }
        }
        out
    }

    /// A random feasible point (uniform on boxes, balls and simplices).
    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (b, leaf) in self.leaves() {
            let dst = &mut out[b.range()];
            match leaf {
                FeasibleSet::Box { lo, hi } => {
                    for (d, (l, h)) in dst.iter_mut().zip(lo.iter().zip(hi)) {
                        *d = rng.uniform_in(*l, *h);
                    }
                }
                FeasibleSet::Ball { center, radius } => {
                    let n = center.len();
                    let dir: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
                    let len = euclidean_norm(&dir).max(f64::MIN_POSITIVE);
                    let r = radius * rng.uniform().powf(1.0 / n as f64);
                    for (i, d) in dst.iter_mut().enumerate() {
                        *d = center[i] + r * dir[i] / len;
                    }
                }
                FeasibleSet::Simplex { dim } => dst.copy_from_slice(&rng.simplex_point(*dim)),
                FeasibleSet::Product(_) => unreachable!("leaves are never products"),
            }
        }
        out
    }

    fn all_leaves_are_boxes(&self) -> bool {
        self.leaves()
            .iter()
            .all(|(_, l)| matches!(l, FeasibleSet::Box { .. }))
    }

    fn all_leaves_are_simplices(&self) -> bool {
        self.leaves()
            .iter()
            .all(|(_, l)| matches!(l, FeasibleSet::Simplex { .. }))
    }
}

fn leaf_violation(leaf: &FeasibleSet, p: &[f64]) -> f64 {
    match leaf {
        FeasibleSet::Box { lo, hi } => p
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(v, (l, h))| (l - v).max(v - h).max(0.0))
            .fold(0.0, f64::max),
        FeasibleSet::Ball { center, radius } => {
            let d: Vec<f64> = p.iter().zip(center).map(|(a, c)| a - c).collect();
            (euclidean_norm(&d) - radius).max(0.0)
        }
        FeasibleSet::Simplex { .. } => {
            let neg = p.iter().fold(0.0f64, |m, v| m.max(-v));
            let sum = compensated_sum(p.iter().copied());
            neg.max((sum - 1.0).abs())
        }
        FeasibleSet::Product(_) => unreachable!("leaves are never products"),
    }
}

fn project_leaf(leaf: &FeasibleSet, v: &mut [f64]) {
    match leaf {
        FeasibleSet::Box { lo, hi } => {
            for (x, (l, h)) in v.iter_mut().zip(lo.iter().zip(hi)) {
                *x = x.clamp(*l, *h);
            }
        }
        FeasibleSet::Ball { center, radius } => {
            let d: Vec<f64> = v.iter().zip(center).map(|(a, c)| a - c).collect();
            let len = euclidean_norm(&d);
            if len > *radius {
                let s = radius / len;
                for (x, (di, c)) in v.iter_mut().zip(d.iter().zip(center)) {
                    *x = c + s * di;
                }
            }
        }
        FeasibleSet::Simplex { .. } => project_simplex(v),
        FeasibleSet::Product(_) => unreachable!("leaves are never products"),
    }
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimpleTerm {
    Zero,
    /// `J(z) = weight * ||z||_1`.
    L1 {
        weight: f64,
    },
}

impl SimpleTerm {
    pub fn value(&self, z: &[f64]) -> f64 {
        match self {
            SimpleTerm::Zero => 0.0,
            SimpleTerm::L1 { weight } => weight * compensated_sum(z.iter().map(|v| v.abs())),
        }
    }

    fn l1_weight(&self) -> f64 {
        match self {
            SimpleTerm::Zero => 0.0,
            SimpleTerm::L1 { weight } => *weight,
        }
    }
}

/// The triple (prox-function, feasible set, simple term) that defines every
/// prox-mapping of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxSetup {
    prox: ProxFunction,
    set: FeasibleSet,
    j: SimpleTerm,
}

impl ProxSetup {
    /// Validates the combination. Entropy requires simplices and `J = 0`;
    /// an l1 term requires the Euclidean prox on boxes.
    pub fn new(kind: ProxKind, set: FeasibleSet, j: SimpleTerm) -> Result<Self> {
        if let SimpleTerm::L1 { weight } = j {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "l1 weight must be finite and >= 0, got {weight}"
                )));
            }
        }
        match kind {
            ProxKind::Entropy => {
                if !set.all_leaves_are_simplices() {
                    return Err(Error::UnsupportedSetup(
                        "entropy prox requires a simplex or a product of simplices".into(),
                    ));
                }
                if j != SimpleTerm::Zero {
                    return Err(Error::UnsupportedSetup(
                        "entropy prox supports only J = 0".into(),
                    ));
                }
            }
            ProxKind::Euclidean => {
                if matches!(j, SimpleTerm::L1 { .. }) && !set.all_leaves_are_boxes() {
                    return Err(Error::UnsupportedSetup(
                        "an l1 term is supported only with the Euclidean prox on boxes".into(),
                    ));
                }
            }
        }
        let domain_dim = set.dim();
        Ok(Self {
            prox: ProxFunction { kind, domain_dim },
            set,
            j,
        })
    }

    pub fn euclidean(set: FeasibleSet) -> Result<Self> {
        Self::new(ProxKind::Euclidean, set, SimpleTerm::Zero)
    }

    pub fn entropy(set: FeasibleSet) -> Result<Self> {
        Self::new(ProxKind::Entropy, set, SimpleTerm::Zero)
    }

    pub fn kind(&self) -> ProxKind {
        self.prox.kind
    }

    pub fn prox(&self) -> ProxFunction {
        self.prox
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn simple_term(&self) -> SimpleTerm {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.prox.domain_dim
    }

    /// Same set and `J`, Euclidean prox-function.
    pub fn as_euclidean(&self) -> ProxSetup {
        ProxSetup {
            prox: ProxFunction {
                kind: ProxKind::Euclidean,
                domain_dim: self.prox.domain_dim,
            },
            set: self.set.clone(),
            j: self.j,
        }
    }

    /// The norm the prox-function is 1-strongly convex against: block l2 of the
    /// per-factor norms (l2 for Euclidean, l1 for entropy).
    pub fn primal_norm(&self, v: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .set
            .leaves()
            .into_iter()
            .map(|(b, _)| match self.prox.kind {
                ProxKind::Euclidean => euclidean_norm(&v[b.range()]),
                ProxKind::Entropy => compensated_sum(v[b.range()].iter().map(|x| x.abs())),
            })
            .collect();
        euclidean_norm(&parts)
    }

    /// Dual of [`Self::primal_norm`].
    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        let parts: Vec<f64> = self
            .set
            .leaves()
            .into_iter()
            .map(|(b, _)| match self.prox.kind {
                ProxKind::Euclidean => euclidean_norm(&v[b.range()]),
                ProxKind::Entropy => linf_norm(&v[b.range()]),
            })
            .collect();
        euclidean_norm(&parts)
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Bregman divergence `V(z, u) = pi(u) - pi(z) - <grad pi(z), u - z>`.
    pub fn bregman(&self, z: &[f64], u: &[f64]) -> Result<f64> {
        self.check_dim(z)?;
        self.check_dim(u)?;
        match self.prox.kind {
            ProxKind::Euclidean => {
                Ok(0.5 * compensated_sum(z.iter().zip(u).map(|(a, b)| (a - b) * (a - b))))
            }
            ProxKind::Entropy => {
                if let Some(i) = z.iter().position(|&v| v <= 0.0 || !v.is_finite()) {
                    return Err(Error::DomainViolation(format!(
                        "entropy center has non-positive coordinate {i}: {}",
                        z[i]
                    )));
                }
                if let Some(i) = u.iter().position(|&v| v < 0.0 || !v.is_finite()) {
                    return Err(Error::DomainViolation(format!(
                        "entropy argument has negative coordinate {i}: {}",
                        u[i]
                    )));
                }
                let terms = z.iter().zip(u).map(|(&zi, &ui)| {
                    let xlogx = if ui > 0.0 { ui * (ui / zi).ln() } else { 0.0 };
                    xlogx - ui + zi
                });
                Ok(compensated_sum(terms).max(0.0))
            }
        }
    }

    /// Unique minimizer of `<g,z> + J(z) + beta V(z0,z) + eta V(z1,z)` over the set.
    pub fn prox_map(
        &self,
        g: &[f64],
        z0: &[f64],
        z1: &[f64],
        beta: f64,
        eta: f64,
    ) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.prox_map_into(g, z0, z1, beta, eta, &mut out)?;
        Ok(out)
    }

    /// Allocation-free form of [`Self::prox_map`].
    pub fn prox_map_into(
        &self,
        g: &[f64],
        z0: &[f64],
        z1: &[f64],
        beta: f64,
        eta: f64,
        out: &mut [f64],
    ) -> Result<()> {
        self.check_dim(g)?;
        self.check_dim(z0)?;
        self.check_dim(z1)?;
        self.check_dim(out)?;
        if !(beta >= 0.0 && eta >= 0.0 && beta + eta > 0.0) || !(beta + eta).is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prox weights need beta >= 0, eta >= 0, beta + eta > 0 (got {beta}, {eta})"
            )));
        }
        let s = beta + eta;
        let (wb, we) = (beta / s, eta / s);
        match self.prox.kind {
            ProxKind::Euclidean => {
                for i in 0..out.len() {
                    out[i] = wb * z0[i] + we * z1[i] - g[i] / s;
                }
                let shrink = self.j.l1_weight() / s;
                for (b, leaf) in self.set.leaves() {
                    let v = &mut out[b.range()];
                    if shrink > 0.0 {
                        for x in v.iter_mut() {
                            *x = x.signum() * (x.abs() - shrink).max(0.0);
                        }
                    }
                    project_leaf(leaf, v);
                }
            }
            ProxKind::Entropy => {
                for (b, _) in self.set.leaves() {
                    let r = b.range();
                    let logits = &mut out[r.clone()];
                    for (j, i) in r.clone().enumerate() {
                        let mut a = -g[i] / s;
                        if wb > 0.0 {
                            a += wb * positive_ln(z0[i], i)?;
                        }
                        if we > 0.0 {
                            a += we * positive_ln(z1[i], i)?;
                        }
                        logits[j] = a;
                    }
                    softmax_in_place(logits);
                }
            }
        }
        Ok(())
    }

    /// First-order optimality residual of `candidate` for the prox subproblem:
    /// `sup_z <a, candidate - z> + J(candidate) - J(z)`, clipped at 0, where `a` is
    /// the gradient of the smooth part at `candidate`. The supremum is taken
    /// exactly over the whole set (box coordinates, simplex vertices, ball
    /// support function), so it dominates any finite probe set.
    #[allow(clippy::too_many_arguments)]
    pub fn prox_optimality_residual(
        &self,
        g: &[f64],
        z0: &[f64],
        z1: &[f64],
        beta: f64,
        eta: f64,
        candidate: &[f64],
    ) -> f64 {
        let n = self.dim();
        if [g, z0, z1, candidate].iter().any(|v| v.len() != n) {
            return f64::INFINITY;
        }
        let grad = |v: f64| -> f64 {
            match self.prox.kind {
                ProxKind::Euclidean => v,
                ProxKind::Entropy => v.ln(),
            }
        };
        let a: Vec<f64> = (0..n)
            .map(|i| {
                let gc = grad(candidate[i]);
                let mut ai = g[i];
                if beta != 0.0 {
                    ai += beta * (gc - grad(z0[i]));
                }
                if eta != 0.0 {
                    ai += eta * (gc - grad(z1[i]));
                }
                ai
            })
            .collect();
        if a.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let lambda = self.j.l1_weight();
        let mut total = Vec::new();
        for (b, leaf) in self.set.leaves() {
            let r = b.range();
            let (ab, cb) = (&a[r.clone()], &candidate[r]);
            match leaf {
                FeasibleSet::Box { lo, hi } => {
                    for i in 0..ab.len() {
                        let obj = |z: f64| ab[i] * (cb[i] - z) + lambda * (cb[i].abs() - z.abs());
                        let mut best = obj(lo[i]).max(obj(hi[i]));
                        if lo[i] < 0.0 && hi[i] > 0.0 {
                            best = best.max(obj(0.0));
                        }
                        total.push(best);
                    }
                }
                FeasibleSet::Simplex { .. } => {
                    let amin = ab.iter().copied().fold(f64::INFINITY, f64::min);
                    let csum = compensated_sum(cb.iter().copied());
                    total.push(compensated_sum(
                        cb.iter().zip(ab).map(|(c, ai)| c * (ai - amin)),
                    ));
                    total.push(amin * (csum - 1.0));
                }
                FeasibleSet::Ball { center, radius } => {
                    total.push(compensated_sum(
                        ab.iter()
                            .zip(cb.iter().zip(center))
                            .map(|(ai, (c, o))| ai * (c - o)),
                    ));
                    total.push(radius * euclidean_norm(ab));
                }
                FeasibleSet::Product(_) => unreachable!("leaves are never products"),
            }
        }
        compensated_sum(total).max(0.0)
    }

    /// `Omega_{z0} = sup_{z in Z} V(z0, z)`.
    pub fn omega(&self, z0: &[f64]) -> Result<f64> {
        self.check_dim(z0)?;
        let mut parts = Vec::new();
        for (b, leaf) in self.set.leaves() {
            let c = &z0[b.range()];
            let part = match (self.prox.kind, leaf) {
                (ProxKind::Euclidean, FeasibleSet::Box { lo, hi }) => compensated_sum(
                    c.iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(x, (l, h))| 0.5 * (x - l).abs().max((h - x).abs()).powi(2)),
                ),
                (ProxKind::Euclidean, FeasibleSet::Ball { center, radius }) => {
                    let d: Vec<f64> = c.iter().zip(center).map(|(a, o)| a - o).collect();
                    0.5 * (radius + euclidean_norm(&d)).powi(2)
                }
                (ProxKind::Euclidean, FeasibleSet::Simplex { .. }) => {
                    let sq = compensated_sum(c.iter().map(|x| x * x));
                    let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
                    0.5 * (sq - 2.0 * cmin + 1.0)
                }
                (ProxKind::Entropy, FeasibleSet::Simplex { .. }) => {
                    let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
                    if cmin <= 0.0 {
                        return Err(Error::DomainViolation(
                            "entropy omega needs an interior starting point".into(),
                        ));
                    }
                    -cmin.ln()
                }
                _ => {
                    return Err(Error::UnsupportedSetup(
                        "omega is not available for this prox/set combination".into(),
                    ))
                }
            };
            parts.push(part);
        }
        Ok(compensated_sum(parts))
    }
}

fn positive_ln(v: f64, i: usize) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::DomainViolation(format!(
            "entropy prox center has non-positive coordinate {i}: {v}"
        )))
    }
}

fn softmax_in_place(v: &mut [f64]) {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for x in v.iter_mut() {
        *x = (*x - m).exp();
    }
    let s = compensated_sum(v.iter().copied());
    for x in v.iter_mut() {
        *x = (*x / s).max(ENTROPY_FLOOR);
    }
}
