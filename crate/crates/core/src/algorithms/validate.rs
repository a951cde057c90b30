use serde::Serialize;

use super::schedule::{Schedule, ScheduleKind};

/// Relative slack allowed when a condition holds with equality.
pub const VALIDATION_RTOL: f64 = 1e-12;

const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMode {
    Deterministic,
    Stochastic,
}

/// Outcome of one named condition over every index where it applies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub name: &'static str,
    pub checked: u64,
    pub violations: u64,
    /// Smallest value of `(rhs - lhs) / max(|lhs|, |rhs|)` seen; negative
    /// beyond `-VALIDATION_RTOL` means violated.
    pub worst_margin: f64,
    pub worst_at: Option<(usize, u64)>,
    /// The first few violations, formatted as `"<name> at k=<k>,t=<t>"`.
    pub violated_at: Vec<String>,
}

impl ConditionReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            worst_at: None,
            violated_at: Vec::new(),
        }
    }

    /// Records `lhs <= rhs` at `(k, t)`; `t = 0` marks an outer-only condition.
    fn check(&mut self, lhs: f64, rhs: f64, k: usize, t: u64) {
        self.checked += 1;
        let scale = lhs.abs().max(rhs.abs());
        let margin = if lhs <= rhs {
            if scale > 0.0 {
                (rhs - lhs) / scale
            } else {
                0.0
            }
        } else if scale.is_finite() {
            (rhs - lhs) / scale
        } else {
            f64::NEG_INFINITY
        };
        let margin = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            margin
        };
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_at = Some((k, t));
        }
        if margin < -VALIDATION_RTOL {
            self.violations += 1;
            if self.violated_at.len() < MAX_LISTED {
                let at = if t == 0 {
                    format!("{} at k={k}", self.name)
                } else {
                    format!("{} at k={k},t={t}", self.name)
                };
                self.violated_at.push(at);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub conditions: Vec<ConditionReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(ConditionReport::passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// The first listed violation, e.g. `"cond_etaM at k=3,t=1"`.
    pub fn first_violation(&self) -> Option<&str> {
        self.conditions
            .iter()
            .flat_map(|c| c.violated_at.first())
            .map(String::as_str)
            .next()
    }
}

/// Checks a schedule against the sufficient conditions for the sliding
/// methods' convergence guarantee:
///
/// * `cond_etaM`: `M <= sqrt((beta_k + eta_k^t) eta_k^t)` (stochastic mode:
///   `sqrt((beta_k + eta_k^t) eta_k^t / 3)`), every `k`, `t`;
/// * `cond_etabeta`: `eta_k^t <= beta_k + eta_k^{t-1}`, `t >= 2`;
/// * `gamma_first`, `gamma_range`, `beta_lower`: `gamma_1 = 1`,
///   `gamma_k in [0, 1]`, `beta_k >= L gamma_k`;
/// * `cond_conv`: `(gamma_k/Gamma_k)(beta_k + eta_k^1/T_k)` is at most
///   `gamma_{k-1}(beta_{k-1} + eta_{k-1}^{T_{k-1}}) / (Gamma_{k-1} T_{k-1})`;
/// * `gamma_cap_recursion`: the stored `Gamma_k` satisfy their recursion;
/// * `identity_3l`: for built-in schedules, `(gamma_k/Gamma_k)(beta_k + eta_k^1/T_k) = 3L`.
///
/// Equalities are accepted up to `VALIDATION_RTOL` relative.
pub fn validate_schedule(s: &Schedule, l: f64, m: f64, mode: ValidationMode) -> ValidationReport {
    let n = s.n_outer();
    let mut eta_m = ConditionReport::new("cond_etaM");
    let mut eta_beta = ConditionReport::new("cond_etabeta");
    let mut gamma_first = ConditionReport::new("gamma_first");
    let mut gamma_range = ConditionReport::new("gamma_range");
    let mut beta_lower = ConditionReport::new("beta_lower");
    let mut conv = ConditionReport::new("cond_conv");
    let mut recursion = ConditionReport::new("gamma_cap_recursion");
    let mut identity = ConditionReport::new("identity_3l");

    let factor = match mode {
        ValidationMode::Deterministic => 1.0,
        ValidationMode::Stochastic => 1.0 / 3.0,
    };

    let g1 = s.gamma(1);
    gamma_first.check(g1, 1.0, 1, 0);
    gamma_first.check(1.0, g1, 1, 0);
    recursion.check(s.gamma_cap(1), 1.0, 1, 0);
    recursion.check(1.0, s.gamma_cap(1), 1, 0);

    for k in 1..=n {
        let (gamma, beta, tk) = (s.gamma(k), s.beta(k), s.inner_steps(k));
        gamma_range.check(0.0, gamma, k, 0);
        gamma_range.check(gamma, 1.0, k, 0);
        beta_lower.check(l * gamma, beta, k, 0);

        let mut prev_eta = f64::NAN;
        for t in 1..=tk {
            let eta = s.eta(k, t);
            let prod = (beta + eta) * eta * factor;
            let rhs = if prod >= 0.0 {
                prod.sqrt()
            } else {
                f64::NEG_INFINITY
            };
            eta_m.check(m, rhs, k, t);
            if t >= 2 {
                eta_beta.check(eta, beta + prev_eta, k, t);
            }
            prev_eta = eta;
        }

        let lhs_k = gamma / s.gamma_cap(k) * (beta + s.eta(k, 1) / tk as f64);
        if k >= 2 {
            let (gp, bp, tp) = (s.gamma(k - 1), s.beta(k - 1), s.inner_steps(k - 1));
            let rhs = gp * (bp + s.eta(k - 1, tp)) / (s.gamma_cap(k - 1) * tp as f64);
            conv.check(lhs_k, rhs, k, 0);

            let expected = (1.0 - gamma) * s.gamma_cap(k - 1);
            recursion.check(s.gamma_cap(k), expected, k, 0);
            recursion.check(expected, s.gamma_cap(k), k, 0);
        }
        if s.kind() != ScheduleKind::Custom {
            identity.check(lhs_k, 3.0 * l, k, 0);
            identity.check(3.0 * l, lhs_k, k, 0);
        }
    }

    let mut conditions = vec![
        eta_m,
        eta_beta,
        gamma_first,
        gamma_range,
        beta_lower,
        conv,
        recursion,
    ];
    if s.kind() != ScheduleKind::Custom {
        conditions.push(identity);
    }
    ValidationReport { mode, conditions }
}
