use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Deterministic,
    Stochastic,
}

/// Guaranteed gap after `n` outer iterations of the sliding methods with
/// their default schedules: `6 L Omega / n^2` (deterministic) or
/// `19 L Omega / n^2` (expected, stochastic).
pub fn theoretical_bound(kind: BoundKind, l: f64, omega: f64, n: usize) -> f64 {
    let c = match kind {
        BoundKind::Deterministic => 6.0,
        BoundKind::Stochastic => 19.0,
    };
    let n = n as f64;
    c * l * omega / (n * n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Pairs dropped because their gap was not strictly positive.
    pub excluded: Vec<(usize, f64)>,
}

/// Least-squares slope of `log(gap)` against `log(n)`.
///
/// Pairs with `gap <= 0` (or non-finite) cannot be placed on a log scale; they
/// are skipped and listed in [`SlopeFit::excluded`]. At least three usable
/// pairs are required.
pub fn fit_loglog_slope(pairs: &[(usize, f64)]) -> Result<SlopeFit> {
    let (used, excluded): (Vec<_>, Vec<_>) = pairs
        .iter()
        .copied()
        .partition(|&(n, g)| g > 0.0 && g.is_finite() && n > 0);
    if used.len() < 3 {
        return Err(Error::NotEnoughData(format!(
            "slope fit needs at least 3 pairs with positive gap, got {} ({} excluded)",
            used.len(),
            excluded.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|&(_, g)| g.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::NotEnoughData(
            "slope fit needs at least two distinct n".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        excluded,
    })
}
