//! Independent oracles and random instance generators shared by the
//! integration tests. Nothing here calls the library's prox or projection
//! code; the oracles work on the raw objectives.
#![allow(dead_code)]

use std::sync::Arc;

use mpsvi::geometry::{FeasibleSet, ProxKind, ProxSetup, SimpleTerm};
use mpsvi::problems::{
    build_matrix_game, build_quadratic_problem, build_saddle_problem, reference_instance,
    DiagonalQuadratic, Matrix, ProblemSpec, SaddleProblem,
};
use mpsvi::space::RngStream;

/// Test-side description of one leaf set.
#[derive(Debug, Clone)]
pub enum Leaf {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Simplex(usize),
}

impl Leaf {
    pub fn dim(&self) -> usize {
        match self {
            Leaf::Box { lo, .. } => lo.len(),
            Leaf::Ball { center, .. } => center.len(),
            Leaf::Simplex(n) => *n,
        }
    }

    fn to_set(&self) -> FeasibleSet {
        match self {
            Leaf::Box { lo, hi } => FeasibleSet::new_box(lo.clone(), hi.clone()).unwrap(),
            Leaf::Ball { center, radius } => {
                FeasibleSet::new_ball(center.clone(), *radius).unwrap()
            }
            Leaf::Simplex(n) => FeasibleSet::new_simplex(*n).unwrap(),
        }
    }

    /// A feasible point; strictly inside simplices.
    fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        match self {
            Leaf::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(l, h)| rng.uniform_in(*l, *h))
                .collect(),
            Leaf::Ball { center, radius } => {
                let dir: Vec<f64> = center.iter().map(|_| rng.standard_normal()).collect();
                let len = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
                let r = radius * rng.uniform();
                center
                    .iter()
                    .zip(&dir)
                    .map(|(c, d)| c + r * d / len)
                    .collect()
            }
            Leaf::Simplex(n) => {
                let w: Vec<f64> = (0..*n).map(|_| -rng.uniform().max(1e-12).ln()).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|x| x / s).collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProxInstance {
    pub kind: ProxKind,
    pub leaves: Vec<Leaf>,
    pub lambda: f64,
    pub setup: ProxSetup,
    pub g: Vec<f64>,
    pub z0: Vec<f64>,
    pub z1: Vec<f64>,
    pub beta: f64,
    pub eta: f64,
}

/// Box with between 1 and `max_dim` coordinates.
fn random_box(rng: &mut RngStream, max_dim: usize) -> Leaf {
    let n = 1 + rng.index(max_dim);
    let lo: Vec<f64> = (0..n).map(|_| rng.uniform_in(-2.0, 1.0)).collect();
    let hi = lo.iter().map(|l| l + rng.uniform_in(0.01, 3.0)).collect();
    Leaf::Box { lo, hi }
}

fn random_leaf(rng: &mut RngStream, euclidean: bool) -> Leaf {
    if !euclidean {
        return Leaf::Simplex(2 + rng.index(6));
    }
    match rng.index(3) {
        0 => random_box(rng, 6),
        1 => {
            let n = 1 + rng.index(6);
            Leaf::Ball {
                center: (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect(),
                radius: rng.uniform_in(0.1, 2.0),
            }
        }
        _ => Leaf::Simplex(2 + rng.index(6)),
    }
}

/// Random instance of one of the supported (prox, set, J) combinations,
/// cycling through them by `case`.
pub fn random_prox_instance(rng: &mut RngStream, case: usize) -> ProxInstance {
    let (kind, leaves, lambda) = match case % 7 {
        0 => (ProxKind::Euclidean, vec![random_box(rng, 8)], 0.0),
        1 => {
            let parts = (0..1 + rng.index(3)).map(|_| random_box(rng, 4)).collect();
            (ProxKind::Euclidean, parts, rng.uniform_in(0.0, 3.0))
        }
        2 => {
            let n = 1 + rng.index(8);
            let leaf = Leaf::Ball {
                center: (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect(),
                radius: rng.uniform_in(0.1, 2.0),
            };
            (ProxKind::Euclidean, vec![leaf], 0.0)
        }
        3 => (
            ProxKind::Euclidean,
            vec![Leaf::Simplex(1 + rng.index(8))],
            0.0,
        ),
        4 => {
            let parts = (0..2 + rng.index(3))
                .map(|_| random_leaf(rng, true))
                .collect();
            (ProxKind::Euclidean, parts, 0.0)
        }
        5 => (
            ProxKind::Entropy,
            vec![Leaf::Simplex(1 + rng.index(8))],
            0.0,
        ),
        _ => {
            let parts = (0..2 + rng.index(3))
                .map(|_| random_leaf(rng, false))
                .collect();
            (ProxKind::Entropy, parts, 0.0)
        }
    };
    let set = if leaves.len() == 1 {
        leaves[0].to_set()
    } else {
        FeasibleSet::new_product(leaves.iter().map(Leaf::to_set).collect()).unwrap()
    };
    let j = if lambda > 0.0 {
        SimpleTerm::L1 { weight: lambda }
    } else {
        SimpleTerm::Zero
    };
    let setup = ProxSetup::new(kind, set, j).unwrap();
    let sample =
        |rng: &mut RngStream| -> Vec<f64> { leaves.iter().flat_map(|l| l.sample(rng)).collect() };
    let z0 = sample(rng);
    let z1 = sample(rng);
    let scale = [0.1, 1.0, 10.0][rng.index(3)];
    let g: Vec<f64> = (0..z0.len())
        .map(|_| scale * rng.standard_normal())
        .collect();
    let (beta, eta) = match rng.index(4) {
        0 => (rng.uniform_in(0.05, 10.0), 0.0),
        1 => (0.0, rng.uniform_in(0.05, 10.0)),
        _ => (rng.uniform_in(0.05, 10.0), rng.uniform_in(0.05, 10.0)),
    };
    ProxInstance {
        kind,
        leaves,
        lambda,
        setup,
        g,
        z0,
        z1,
        beta,
        eta,
    }
}

/// Minimizer of the convex 1D function with subgradient
/// `g + lambda sign(z) + beta (z - a) + eta (z - b)` over `[lo, hi]`, by
/// bisection on the sign of the one-sided derivatives.
#[allow(clippy::too_many_arguments)]
fn box_coordinate(
    g: f64,
    lambda: f64,
    a: f64,
    b: f64,
    beta: f64,
    eta: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let smooth = |z: f64| g + beta * (z - a) + eta * (z - b);
    let right = |z: f64| smooth(z) + if z >= 0.0 { lambda } else { -lambda };
    let left = |z: f64| smooth(z) + if z > 0.0 { lambda } else { -lambda };
    if right(lo) >= 0.0 {
        return lo;
    }
    if left(hi) <= 0.0 {
        return hi;
    }
    let (mut l, mut h) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (l + h);
        if right(m) < 0.0 {
            l = m;
        } else if left(m) > 0.0 {
            h = m;
        } else {
            return m;
        }
    }
    0.5 * (l + h)
}

/// Euclidean projection onto the simplex by bisection on the threshold.
pub fn bisect_simplex_projection(p: &[f64]) -> Vec<f64> {
    let excess = |tau: f64| p.iter().map(|v| (v - tau).max(0.0)).sum::<f64>() - 1.0;
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (max - 1.0, max);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if excess(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let tau = 0.5 * (lo + hi);
    p.iter().map(|v| (v - tau).max(0.0)).collect()
}

fn ball_projection(p: &[f64], c: &[f64], r: f64) -> Vec<f64> {
    let d = p
        .iter()
        .zip(c)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if d <= r {
        p.to_vec()
    } else {
        c.iter()
            .zip(p)
            .map(|(ci, pi)| ci + r * (pi - ci) / d)
            .collect()
    }
}

/// Projected gradient on the raw objective
/// `<g, z> + beta/2 ||z - a||^2 + eta/2 ||z - b||^2`.
fn projected_gradient(
    g: &[f64],
    a: &[f64],
    b: &[f64],
    beta: f64,
    eta: f64,
    project: impl Fn(&[f64]) -> Vec<f64>,
) -> Vec<f64> {
    let step = 0.5 / (beta + eta);
    let mut z = project(a);
    for _ in 0..400 {
        let y: Vec<f64> = (0..z.len())
            .map(|i| z[i] - step * (g[i] + beta * (z[i] - a[i]) + eta * (z[i] - b[i])))
            .collect();
        z = project(&y);
    }
    z
}

/// Entropy prox on one simplex: bisection on the multiplier `nu` of the
/// constraint `sum z = 1`, with each coordinate found by bisection in the log
/// domain on `g_i + beta ln(z_i/a_i) + eta ln(z_i/b_i) = nu`.
fn entropy_simplex(g: &[f64], a: &[f64], b: &[f64], beta: f64, eta: f64) -> Vec<f64> {
    let coord = |i: usize, nu: f64| -> f64 {
        let f = |u: f64| g[i] + beta * (u - a[i].ln()) + eta * (u - b[i].ln()) - nu;
        let (mut lo, mut hi) = (-2000.0, 2000.0);
        for _ in 0..120 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        (0.5 * (lo + hi)).exp()
    };
    let total = |nu: f64| (0..g.len()).map(|i| coord(i, nu)).sum::<f64>();
    let (mut lo, mut hi) = (-1.0, 1.0);
    while total(lo) > 1.0 {
        lo *= 2.0;
    }
    while total(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if total(m) < 1.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let nu = 0.5 * (lo + hi);
    (0..g.len()).map(|i| coord(i, nu)).collect()
}

/// Brute-force minimizer of `<g,z> + J(z) + beta V(z0,z) + eta V(z1,z)`.
pub fn brute_force_prox(inst: &ProxInstance) -> Vec<f64> {
    let mut out = Vec::new();
    let mut offset = 0;
    for leaf in &inst.leaves {
        let r = offset..offset + leaf.dim();
        offset += leaf.dim();
        let (g, a, b) = (&inst.g[r.clone()], &inst.z0[r.clone()], &inst.z1[r]);
        let (beta, eta) = (inst.beta, inst.eta);
        let part = match (inst.kind, leaf) {
            (ProxKind::Euclidean, Leaf::Box { lo, hi }) => (0..g.len())
                .map(|i| box_coordinate(g[i], inst.lambda, a[i], b[i], beta, eta, lo[i], hi[i]))
                .collect(),
            (ProxKind::Euclidean, Leaf::Ball { center, radius }) => {
                projected_gradient(g, a, b, beta, eta, |p| ball_projection(p, center, *radius))
            }
            (ProxKind::Euclidean, Leaf::Simplex(_)) => {
                projected_gradient(g, a, b, beta, eta, bisect_simplex_projection)
            }
            (ProxKind::Entropy, Leaf::Simplex(_)) => entropy_simplex(g, a, b, beta, eta),
            _ => unreachable!("unsupported combination generated"),
        };
        out.extend(part);
    }
    out
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Built-in problems used by the property suites, with a label.
pub fn builtin_problems() -> Vec<(&'static str, ProblemSpec, Option<Arc<SaddleProblem>>)> {
    let mut out = Vec::new();
    let (p, sp) = reference_instance().unwrap();
    out.push(("reference_saddle", p, Some(sp)));

    let mut rng = RngStream::new(101, 0);
    let k = Matrix::random_uniform(7, 5, &mut rng);
    let (p, sp) = build_saddle_problem(
        k,
        DiagonalQuadratic::new(
            (0..5).map(|_| rng.uniform_in(0.0, 3.0)).collect(),
            (0..5).map(|_| rng.uniform_in(-1.0, 1.0)).collect(),
        )
        .unwrap(),
        DiagonalQuadratic::new(
            (0..7).map(|_| rng.uniform_in(0.0, 3.0)).collect(),
            (0..7).map(|_| rng.uniform_in(-1.0, 1.0)).collect(),
        )
        .unwrap(),
        FeasibleSet::uniform_box(5, -1.0, 2.0).unwrap(),
        FeasibleSet::new_ball(vec![0.5; 7], 1.5).unwrap(),
        ProxKind::Euclidean,
    )
    .unwrap();
    out.push(("random_box_ball_saddle", p, Some(sp)));

    let rps = Matrix::from_rows(&[
        vec![0.0, -1.0, 1.0],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, 0.0],
    ])
    .unwrap();
    let (p, sp) = build_matrix_game(rps).unwrap();
    out.push(("rps_game", p, Some(sp)));

    let k = Matrix::random_uniform(4, 6, &mut rng);
    let (p, sp) = build_matrix_game(k).unwrap();
    out.push(("random_matrix_game", p, Some(sp)));

    let g = DiagonalQuadratic::new(vec![2.0, 0.5, 3.0], vec![0.1, -0.4, 2.0]).unwrap();
    let setup = ProxSetup::new(
        ProxKind::Euclidean,
        FeasibleSet::uniform_box(3, -1.0, 1.0).unwrap(),
        SimpleTerm::L1 { weight: 0.3 },
    )
    .unwrap();
    out.push((
        "diagonal_quadratic",
        build_quadratic_problem(g, setup).unwrap(),
        None,
    ));
    out
}

/// `3 x 3` rock-paper-scissors matrix.
pub fn rps_matrix() -> Matrix {
    Matrix::from_rows(&[
        vec![0.0, -1.0, 1.0],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, 0.0],
    ])
    .unwrap()
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of the four property checks on one problem.
#[derive(Debug, Default)]
pub struct PropertyReport {
    pub worst_monotonicity: f64,
    pub worst_bilinear_abs: f64,
    pub worst_grad_lipschitz_ratio: f64,
    pub worst_h_lipschitz_ratio: f64,
    pub worst_fd_rel_error: f64,
    pub worst_sandwich_low: f64,
    pub worst_sandwich_high: f64,
}

/// Runs the monotonicity, Lipschitz, finite-difference and convexity
/// sandwich checks on `pairs` random feasible pairs (and `pairs / 10` points
/// for finite differences).
pub fn check_problem(p: &ProblemSpec, pairs: usize, seed: u64) -> PropertyReport {
    let mut rng = RngStream::new(seed, 1);
    let set = p.setup().set();
    let (l, m) = (p.lipschitz_l(), p.lipschitz_m());
    let mut r = PropertyReport {
        worst_monotonicity: f64::INFINITY,
        worst_sandwich_low: f64::INFINITY,
        worst_sandwich_high: f64::NEG_INFINITY,
        ..Default::default()
    };
    for _ in 0..pairs {
        let u = set.sample(&mut rng);
        let v = set.sample(&mut rng);
        let d = sub(&u, &v);
        let dh = sub(&p.h(&u), &p.h(&v));
        let mono = inner(&dh, &d);
        r.worst_monotonicity = r.worst_monotonicity.min(mono);
        r.worst_bilinear_abs = r.worst_bilinear_abs.max(mono.abs());

        let dg = sub(&p.grad_g(&u), &p.grad_g(&v));
        let nd2 = l2(&d);
        if nd2 > 0.0 {
            if l > 0.0 {
                r.worst_grad_lipschitz_ratio =
                    r.worst_grad_lipschitz_ratio.max(l2(&dg) / (l * nd2));
            } else {
                r.worst_grad_lipschitz_ratio = r.worst_grad_lipschitz_ratio.max(l2(&dg));
            }
            let ratio =
                p.setup().dual_norm(&dh) / (m * p.setup().primal_norm(&d)).max(f64::MIN_POSITIVE);
            r.worst_h_lipschitz_ratio = r.worst_h_lipschitz_ratio.max(ratio);
        }

        let gap = p.g_value(&u) - p.g_value(&v) - inner(&p.grad_g(&v), &d);
        let scale = 1e-12 * p.g_value(&u).abs().max(p.g_value(&v).abs()).max(1.0);
        r.worst_sandwich_low = r.worst_sandwich_low.min(gap + scale);
        r.worst_sandwich_high = r.worst_sandwich_high.max(gap - scale - 0.5 * l * nd2 * nd2);
    }
    for _ in 0..(pairs / 10).max(1) {
        let z = set.sample(&mut rng);
        let grad = p.grad_g(&z);
        let h = 1e-6;
        let fd: Vec<f64> = (0..z.len())
            .map(|i| {
                let (mut a, mut b) = (z.clone(), z.clone());
                a[i] += h;
                b[i] -= h;
                (p.g_value(&a) - p.g_value(&b)) / (2.0 * h)
            })
            .collect();
        let err = l2(&sub(&fd, &grad));
        let rel = if l2(&grad) > 0.0 {
            err / l2(&grad)
        } else {
            err
        };
        r.worst_fd_rel_error = r.worst_fd_rel_error.max(rel);
    }
    r
}

impl PropertyReport {
    pub fn passes(&self, bilinear: bool) -> Result<(), String> {
        if self.worst_monotonicity < -1e-10 {
            return Err(format!(
                "monotonicity violated: {:e}",
                self.worst_monotonicity
            ));
        }
        if bilinear && self.worst_bilinear_abs > 1e-10 {
            return Err(format!(
                "bilinear monotonicity not zero: {:e}",
                self.worst_bilinear_abs
            ));
        }
        if self.worst_grad_lipschitz_ratio > 1.0 + 1e-9 {
            return Err(format!(
                "grad G Lipschitz ratio {}",
                self.worst_grad_lipschitz_ratio
            ));
        }
        if self.worst_h_lipschitz_ratio > 1.0 + 1e-9 {
            return Err(format!(
                "H Lipschitz ratio {}",
                self.worst_h_lipschitz_ratio
            ));
        }
        if self.worst_fd_rel_error > 1e-5 {
            return Err(format!(
                "finite-difference error {:e}",
                self.worst_fd_rel_error
            ));
        }
        if self.worst_sandwich_low < 0.0 || self.worst_sandwich_high > 0.0 {
            return Err(format!(
                "convexity sandwich violated ({:e}, {:e})",
                self.worst_sandwich_low, self.worst_sandwich_high
            ));
        }
        Ok(())
    }
}
