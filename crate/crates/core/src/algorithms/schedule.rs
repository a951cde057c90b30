use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a schedule's parameters came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// `gamma_k = 2/(k+1)`, `beta_k = 2L/k`, `T_k = ceil(kM/L)`,
    /// `eta_k^t = beta_k (t-1) + L T_k / k`.
    Deterministic,
    /// As `Deterministic` but `T_k = ceil(sqrt(3) k M / L + N k^2 sigma^2 / (Omega L^2))`.
    Stochastic,
    Custom,
}

/// Outer parameters `(gamma_k, beta_k, T_k)` and the affine inner step rule
/// `eta_k^t = slope_k (t - 1) + offset_k`, for `k = 1..=N`, `t = 1..=T_k`.
///
/// All accessors take 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    kind: ScheduleKind,
    gamma: Vec<f64>,
    beta: Vec<f64>,
    inner_steps: Vec<u64>,
    eta_slope: Vec<f64>,
    eta_offset: Vec<f64>,
    gamma_cap: Vec<f64>,
}

impl Schedule {
    /// Builds a schedule from explicit per-iteration parameters and derives
    /// `Gamma_1 = 1`, `Gamma_k = (1 - gamma_k) Gamma_{k-1}`.
    pub fn custom(
        gamma: Vec<f64>,
        beta: Vec<f64>,
        inner_steps: Vec<u64>,
        eta_slope: Vec<f64>,
        eta_offset: Vec<f64>,
    ) -> Result<Self> {
        Self::build(
            ScheduleKind::Custom,
            gamma,
            beta,
            inner_steps,
            eta_slope,
            eta_offset,
        )
    }

    fn build(
        kind: ScheduleKind,
        gamma: Vec<f64>,
        beta: Vec<f64>,
        inner_steps: Vec<u64>,
        eta_slope: Vec<f64>,
        eta_offset: Vec<f64>,
    ) -> Result<Self> {
        let n = gamma.len();
        if n == 0 {
            return Err(Error::InvalidParameter(
                "schedule needs n_outer >= 1".into(),
            ));
        }
        for len in [
            beta.len(),
            inner_steps.len(),
            eta_slope.len(),
            eta_offset.len(),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        if inner_steps.contains(&0) {
            return Err(Error::InvalidParameter("every T_k must be >= 1".into()));
        }
        let all = gamma
            .iter()
            .chain(&beta)
            .chain(&eta_slope)
            .chain(&eta_offset);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "schedule entries must be finite".into(),
            ));
        }
        let mut gamma_cap = Vec::with_capacity(n);
        gamma_cap.push(1.0);
        for k in 1..n {
            let prev = gamma_cap[k - 1];
            gamma_cap.push((1.0 - gamma[k]) * prev);
        }
        Ok(Self {
            kind,
            gamma,
            beta,
            inner_steps,
            eta_slope,
            eta_offset,
            gamma_cap,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn n_outer(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self, k: usize) -> f64 {
        self.gamma[k - 1]
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.beta[k - 1]
    }

    pub fn inner_steps(&self, k: usize) -> u64 {
        self.inner_steps[k - 1]
    }

    /// `Gamma_k`.
    pub fn gamma_cap(&self, k: usize) -> f64 {
        self.gamma_cap[k - 1]
    }

    /// `eta_k^t`.
    pub fn eta(&self, k: usize, t: u64) -> f64 {
        self.eta_slope[k - 1] * (t - 1) as f64 + self.eta_offset[k - 1]
    }

    pub fn total_inner_steps(&self) -> u64 {
        self.inner_steps.iter().sum()
    }

    /// Copy with every `eta_k^t` multiplied by `factor`.
    pub fn with_scaled_eta(&self, factor: f64) -> Self {
        let mut s = self.clone();
        s.kind = ScheduleKind::Custom;
        s.eta_slope.iter_mut().for_each(|v| *v *= factor);
        s.eta_offset.iter_mut().for_each(|v| *v *= factor);
        s
    }
}

/// `ceil(r)`, except that ratios within `1e-12` (relative) of an integer
/// round to that integer. Never below 1.
pub fn guarded_ceil(r: f64) -> u64 {
    let nearest = r.round();
    let c = if (r - nearest).abs() <= 1e-12 * nearest.abs() {
        nearest
    } else {
        r.ceil()
    };
    c.max(1.0) as u64
}

fn check_l(l: f64) -> Result<()> {
    if !l.is_finite() || l <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "L must be > 0 (got {l}); apply the Lipschitz floor for problems with grad G = 0"
        )));
    }
    Ok(())
}

fn default_schedule(kind: ScheduleKind, n_outer: usize, l: f64, t: Vec<u64>) -> Result<Schedule> {
    let gamma = (1..=n_outer).map(|k| 2.0 / (k as f64 + 1.0)).collect();
    let beta: Vec<f64> = (1..=n_outer).map(|k| 2.0 * l / k as f64).collect();
    let offset = t
        .iter()
        .enumerate()
        .map(|(i, &tk)| l * tk as f64 / (i + 1) as f64)
        .collect();
    Schedule::build(kind, gamma, beta.clone(), t, beta, offset)
}

/// Parameter choice for the deterministic sliding method.
pub fn schedule_deterministic(n_outer: usize, l: f64, m: f64) -> Result<Schedule> {
    check_l(l)?;
    if n_outer == 0 {
        return Err(Error::InvalidParameter("n_outer must be >= 1".into()));
    }
    if !m.is_finite() || m < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "M must be finite and >= 0, got {m}"
        )));
    }
    let t = (1..=n_outer)
        .map(|k| guarded_ceil(k as f64 * m / l))
        .collect();
    default_schedule(ScheduleKind::Deterministic, n_outer, l, t)
}

/// Parameter choice for the stochastic sliding method. `n_outer` is also the
/// horizon `N` that enters `T_k`.
pub fn schedule_stochastic(
    n_outer: usize,
    l: f64,
    m: f64,
    sigma: f64,
    omega: f64,
) -> Result<Schedule> {
    check_l(l)?;
    if n_outer == 0 {
        return Err(Error::InvalidParameter("n_outer must be >= 1".into()));
    }
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Omega must be > 0, got {omega}"
        )));
    }
    if !m.is_finite() || !sigma.is_finite() || m < 0.0 || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "M and sigma must be finite and >= 0 (got {m}, {sigma})"
        )));
    }
    let n = n_outer as f64;
    let t = (1..=n_outer)
        .map(|k| {
            let k = k as f64;
            guarded_ceil(3f64.sqrt() * k * m / l + n * k * k * sigma * sigma / (omega * l * l))
        })
        .collect();
    default_schedule(ScheduleKind::Stochastic, n_outer, l, t)
}
