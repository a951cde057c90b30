use serde::{Deserialize, Serialize};

use super::ProblemSpec;
use crate::error::{Error, Result};
use crate::space::{euclidean_norm, OracleCounters, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `H(z) + xi`, `xi_i ~ N(0, sigma^2 / d)` i.i.d., so `E||xi||_2^2 = sigma^2`.
    GaussianAdditive,
    /// `H(z) + a (d H_i(z) e_i - H(z))` with `i` uniform: an unbiased
    /// single-coordinate estimate mixed with `H(z)` so that `E||noise||_2^2 = sigma^2`.
    CoordinateSparsified,
}

/// Unbiased sampler `H(z; zeta)` with `E||H(z; zeta) - H(z)||_*^2 <= sigma^2`.
///
/// The noise is added in the dual space, so its l2 norm also bounds the
/// entropy-setup dual norm (l-infinity per block).
#[derive(Debug, Clone)]
pub struct StochasticOracle {
    base: ProblemSpec,
    noise_kind: NoiseKind,
    sigma: f64,
    rng: RngStream,
    exact: Vec<f64>,
}

impl StochasticOracle {
    pub fn new(
        base: ProblemSpec,
        noise_kind: NoiseKind,
        sigma: f64,
        rng: RngStream,
    ) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise level sigma must be finite and >= 0, got {sigma}"
            )));
        }
        let exact = vec![0.0; base.dim()];
        Ok(Self {
            base,
            noise_kind,
            sigma,
            rng,
            exact,
        })
    }

    pub fn base(&self) -> &ProblemSpec {
        &self.base
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.noise_kind
    }

    pub fn rng(&self) -> &RngStream {
        &self.rng
    }

    /// Draws one sample `H(z; zeta)` into `out`. With `sigma = 0` the output is
    /// exactly `H(z)` and no randomness is consumed.
    pub fn sample_h_into(&mut self, z: &[f64], out: &mut [f64], counters: &mut OracleCounters) {
        counters.h_samples += 1;
        self.base.operators().h(z, out);
        if self.sigma == 0.0 {
            return;
        }
        let d = out.len();
        match self.noise_kind {
            NoiseKind::GaussianAdditive => {
                let scale = self.sigma / (d as f64).sqrt();
                for o in out.iter_mut() {
                    *o += scale * self.rng.standard_normal();
                }
            }
            NoiseKind::CoordinateSparsified => {
                let i = self.rng.index(d);
                let h_norm = euclidean_norm(out);
                if d < 2 || h_norm == 0.0 {
                    return;
                }
                // E||d h_i e_i - H||^2 = (d - 1) ||H||^2
                let a = self.sigma / (h_norm * ((d - 1) as f64).sqrt());
                self.exact.copy_from_slice(out);
                for (j, o) in out.iter_mut().enumerate() {
                    let spike = if j == i {
                        d as f64 * self.exact[j]
                    } else {
                        0.0
                    };
                    *o = self.exact[j] + a * (spike - self.exact[j]);
                }
            }
        }
    }

    pub fn sample_h(&mut self, z: &[f64], counters: &mut OracleCounters) -> Vec<f64> {
        let mut out = vec![0.0; self.base.dim()];
        self.sample_h_into(z, &mut out, counters);
        out
    }
}
