use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::problems::{DiagonalQuadratic, ProblemSpec, SaddleProblem};
use crate::space::{compensated_sum, dot, Point, RngStream};

/// Largest set violation accepted for points handed to the gap oracles.
pub const GAP_FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    ClosedFormSaddle,
    VertexEnumeration,
    ProjectedAscent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub sup_gap: f64,
    pub argmax_z: Option<Point>,
    pub method: GapMethod,
    pub certified: bool,
}

fn check_feasible(set: &FeasibleSet, p: &[f64]) -> Result<()> {
    if set.dim() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: p.len(),
        });
    }
    if let Some(index) = p.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            index,
            value: p[index],
        });
    }
    let violation = set.violation(p);
    if violation > GAP_FEASIBILITY_TOL {
        return Err(Error::Infeasible { violation });
    }
    Ok(())
}

fn q_unchecked(problem: &ProblemSpec, z_tilde: &[f64], z: &[f64]) -> f64 {
    let h = problem.h(z);
    let diff: Vec<f64> = z_tilde.iter().zip(z).map(|(a, b)| a - b).collect();
    compensated_sum([
        problem.g_value(z_tilde),
        -problem.g_value(z),
        dot(&h, &diff),
        problem.j_value(z_tilde),
        -problem.j_value(z),
    ])
}

/// `Q(z_tilde, z) = G(z_tilde) - G(z) + <H(z), z_tilde - z> + J(z_tilde) - J(z)`.
pub fn gap_q(problem: &ProblemSpec, z_tilde: &[f64], z: &[f64]) -> Result<f64> {
    let set = problem.setup().set();
    check_feasible(set, z_tilde)?;
    check_feasible(set, z)?;
    Ok(q_unchecked(problem, z_tilde, z))
}

/// Minimizer and minimum of `q(v) + <b, v>` over one leaf set, where `q` is a
/// diagonal quadratic restricted to that leaf.
fn minimize_leaf(
    leaf: &FeasibleSet,
    weights: &[f64],
    targets: &[f64],
    b: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let all_zero = weights.iter().all(|w| *w == 0.0);
    let v = match leaf {
        FeasibleSet::Box { lo, hi } => (0..b.len())
            .map(|i| {
                if weights[i] > 0.0 {
                    (targets[i] - b[i] / weights[i]).clamp(lo[i], hi[i])
                } else if b[i] > 0.0 {
                    lo[i]
                } else if b[i] < 0.0 {
                    hi[i]
                } else {
                    targets[i].clamp(lo[i], hi[i])
                }
            })
            .collect(),
        FeasibleSet::Simplex { .. } if all_zero => {
            let mut best = 0;
            for i in 1..b.len() {
                if b[i] < b[best] {
                    best = i;
                }
            }
            let mut v = vec![0.0; b.len()];
            v[best] = 1.0;
            v
        }
        FeasibleSet::Simplex { .. } if weights.iter().all(|w| *w > 0.0) => {
            water_fill(weights, targets, b)
        }
        FeasibleSet::Ball { center, radius } if all_zero => {
            let nb = crate::space::euclidean_norm(b);
            if nb == 0.0 {
                center.clone()
            } else {
                center
                    .iter()
                    .zip(b)
                    .map(|(c, bi)| c - radius * bi / nb)
                    .collect()
            }
        }
        FeasibleSet::Simplex { .. } => {
            return Err(Error::UnsupportedGap(
                "simplex block with mixed zero and positive quadratic weights".into(),
            ))
        }
        FeasibleSet::Ball { .. } => {
            return Err(Error::UnsupportedGap(
                "ball block with a quadratic term".into(),
            ))
        }
        FeasibleSet::Product(_) => unreachable!("leaves are never products"),
    };
    let value = compensated_sum((0..v.len()).map(|i| {
        let d = v[i] - targets[i];
        0.5 * weights[i] * d * d + b[i] * v[i]
    }));
    Ok((v, value))
}

/// `argmin_{v in simplex} sum_i (w_i/2)(v_i - a_i)^2 + b_i v_i` for `w > 0`,
/// by sorting the breakpoints of `v_i(nu) = max(0, a_i + (nu - b_i)/w_i)`.
fn water_fill(w: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = w.len();
    let breaks: Vec<f64> = (0..n).map(|i| b[i] - w[i] * a[i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| breaks[i].total_cmp(&breaks[j]));
    let (mut s_const, mut s_inv) = (0.0, 0.0);
    let mut nu = breaks[order[0]];
    for (j, &i) in order.iter().enumerate() {
        s_const += a[i] - b[i] / w[i];
        s_inv += 1.0 / w[i];
        nu = (1.0 - s_const) / s_inv;
        let next = order.get(j + 1).map_or(f64::INFINITY, |&i2| breaks[i2]);
        if nu <= next {
            break;
        }
    }
    let mut v: Vec<f64> = (0..n)
        .map(|i| (a[i] + (nu - b[i]) / w[i]).max(0.0))
        .collect();
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
    v
}

/// `min_{v in S} q(v) + <b, v>` over a (possibly product) set.
fn minimize_over(set: &FeasibleSet, q: &DiagonalQuadratic, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut v = vec![0.0; set.dim()];
    let mut values = Vec::new();
    for (block, leaf) in set.leaves() {
        let r = block.range();
        let (vb, val) = minimize_leaf(
            leaf,
            &q.weights[r.clone()],
            &q.targets[r.clone()],
            &b[r.clone()],
        )?;
        v[r].copy_from_slice(&vb);
        values.push(val);
    }
    Ok((v, compensated_sum(values)))
}

/// Exact `sup_z Q(z_tilde, z)` for a saddle problem, equal to the
/// primal-dual gap `sup_y L(x_tilde, y) - inf_x L(x, y_tilde)`.
///
/// Both inner problems are solved in closed form: coordinate clamping on
/// boxes, vertex selection (or exact water-filling when all weights are
/// positive) on simplices, and the support function on balls with a linear
/// objective.
pub fn sup_gap_saddle(
    sp: &SaddleProblem,
    problem: &ProblemSpec,
    z_tilde: &[f64],
) -> Result<GapReport> {
    check_feasible(problem.setup().set(), z_tilde)?;
    let (xt, yt) = sp.split(z_tilde);

    // sup_y <K x~, y> - g(y) = -min_y g(y) + <-K x~, y>
    let mut kx = vec![0.0; sp.ny()];
    sp.k().matvec(xt, &mut kx);
    kx.iter_mut().for_each(|v| *v = -*v);
    let (y_star, min_y) = minimize_over(sp.y_set(), sp.g(), &kx)?;

    // inf_x f(x) + <K^T y~, x>
    let mut kty = vec![0.0; sp.nx()];
    sp.k().matvec_t(yt, &mut kty);
    let (x_star, min_x) = minimize_over(sp.x_set(), sp.f(), &kty)?;

    let closed = compensated_sum([sp.f().value(xt), -min_y, -min_x, -sp.g().value(yt)]);
    let mut z_star = x_star;
    z_star.extend_from_slice(&y_star);
    let probe = q_unchecked(problem, z_tilde, &z_star);
    let sup_gap = closed.max(probe).max(0.0);

    let vertex_only = [sp.f(), sp.g()].iter().all(|q| q.is_zero())
        && sp
            .x_set()
            .leaves()
            .iter()
            .chain(sp.y_set().leaves().iter())
            .all(|(_, l)| matches!(l, FeasibleSet::Simplex { .. }));
    Ok(GapReport {
        sup_gap,
        argmax_z: Some(Point::with_blocks(z_star, problem.blocks().to_vec())?),
        method: if vertex_only {
            GapMethod::VertexEnumeration
        } else {
            GapMethod::ClosedFormSaddle
        },
        certified: true,
    })
}

/// Seed of the fixed stream that draws the random ascent starts. Start `r` is
/// always the same point, so more restarts never lower the result.
const ASCENT_SEED: u64 = 0xA5CE_0175;

/// Uncertified lower estimate of `sup_z Q(z_tilde, z)` for affine `H`, by
/// projected gradient ascent with step `1/(L + M)` from the set center and
/// `restarts - 1` random feasible starts.
pub fn sup_gap_ascent(
    problem: &ProblemSpec,
    z_tilde: &[f64],
    iters: usize,
    restarts: usize,
) -> Result<GapReport> {
    if iters == 0 || restarts == 0 {
        return Err(Error::InvalidParameter(
            "iters and restarts must be >= 1".into(),
        ));
    }
    if !problem.h_is_affine() {
        return Err(Error::UnsupportedGap(
            "ascent oracle requires an affine H".into(),
        ));
    }
    let set = problem.setup().set();
    check_feasible(set, z_tilde)?;
    let d = problem.dim();

    // H(z) = A z + c; column i of A is H(e_i) - H(0).
    let c = problem.h(&vec![0.0; d]);
    let mut a_cols = Vec::with_capacity(d);
    let mut e = vec![0.0; d];
    for i in 0..d {
        e[i] = 1.0;
        let col: Vec<f64> = problem.h(&e).iter().zip(&c).map(|(h, c)| h - c).collect();
        a_cols.push(col);
        e[i] = 0.0;
    }

    let euclid = problem.setup().as_euclidean();
    let lm = problem.lipschitz_l() + problem.lipschitz_m();
    let step = if lm > 0.0 { 1.0 / lm } else { 1.0 };

    let mut rng = RngStream::new(ASCENT_SEED, 0);
    let mut best_z = z_tilde.to_vec();
    let mut best = 0.0;
    let mut neg_grad = vec![0.0; d];
    for r in 0..restarts {
        let mut z = if r == 0 {
            set.center()
        } else {
            set.sample(&mut rng)
        };
        for _ in 0..iters {
            // grad_z Q = -grad G(z) + A^T (z_tilde - z) - H(z)
            let gz = problem.grad_g(&z);
            let hz = problem.h(&z);
            let diff: Vec<f64> = z_tilde.iter().zip(&z).map(|(a, b)| a - b).collect();
            for i in 0..d {
                neg_grad[i] = gz[i] - dot(&a_cols[i], &diff) + hz[i];
            }
            z = euclid.prox_map(&neg_grad, &z, &z, 1.0 / step, 0.0)?;
            let val = q_unchecked(problem, z_tilde, &z);
            if val > best {
                best = val;
                best_z.copy_from_slice(&z);
            }
        }
    }
    Ok(GapReport {
        sup_gap: best,
        argmax_z: Some(Point::with_blocks(best_z, problem.blocks().to_vec())?),
        method: GapMethod::ProjectedAscent,
        certified: false,
    })
}
