//! Derived constants of the partition-guided construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("need 0 < 2*gamma < epsilon < 1/4, got epsilon = {epsilon}, gamma = {gamma}")]
    Exponents { epsilon: f64, gamma: f64 },
    #[error("need n >= 2 and 1 <= d <= n - 1, got n = {n}, d = {d}")]
    Dimensions { n: usize, d: usize },
}

/// Construction constants for a given `(n, d, epsilon, gamma)`.
///
/// Fields are public so tests can build deliberately off-nominal instances;
/// [`derive_params`] is the only constructor that enforces the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub gamma: f64,
    /// Number of bins set aside for the small set; a multiple of 13.
    pub s_star: usize,
    pub omega: u64,
    /// Probability that a B-B edge is labeled corrected, as `num / d`.
    pub alpha_num: u64,
    pub q: u64,
    pub step2_offset: u64,
    pub f2_cap: u64,
    pub forward_range: u64,
}

/// ceil(x), treating values within rounding noise of an integer as that integer.
pub(crate) fn ceil_snapped(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r.max(0.0) as u64
    } else {
        x.ceil().max(0.0) as u64
    }
}

pub fn derive_params(
    n: usize,
    d: usize,
    epsilon: f64,
    gamma: f64,
) -> Result<ConstructionParams, ParamError> {
    if !(gamma > 0.0 && 2.0 * gamma < epsilon && epsilon < 0.25) {
        return Err(ParamError::Exponents { epsilon, gamma });
    }
    if n < 2 || d == 0 || d >= n {
        return Err(ParamError::Dimensions { n, d });
    }
    let (nf, df) = (n as f64, d as f64);
    let (n64, d64) = (n as u64, d as u64);
    let s_star = 13 * ceil_snapped(df.powf(0.5 + epsilon) / 13.0) as usize;
    let omega = ceil_snapped(nf / df.powf(1.0 + epsilon - 2.0 * gamma)).max(2);
    let rem = n64 % d64;
    let alpha_num = rem.max(d64 - rem);
    let q = n64.div_ceil(3 * d64);
    let ceil_nd = n64.div_ceil(d64);
    let step2_offset = d64
        + (7 * omega + ceil_nd - 1) * s_star as u64
        + ceil_snapped(250.0 * nf / df.powf(0.5 - gamma));
    let f2_cap = ceil_snapped(1e3 * nf / df.powf(1.0 + epsilon - gamma));
    let forward_range = (3 * n64).div_ceil(d64);
    Ok(ConstructionParams {
        n,
        d,
        epsilon,
        gamma,
        s_star,
        omega,
        alpha_num,
        q,
        step2_offset,
        f2_cap,
        forward_range,
    })
}

impl ConstructionParams {
    pub fn ceil_nd(&self) -> u64 {
        (self.n as u64).div_ceil(self.d as u64)
    }

    pub fn floor_nd(&self) -> u64 {
        self.n as u64 / self.d as u64
    }

    /// `{n/d} >= 1/2`.
    pub fn frac_at_least_half(&self) -> bool {
        2 * (self.n % self.d) >= self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_num as f64 / self.d as f64
    }

    /// Bins per small subset, `s*/13`.
    pub fn level_width(&self) -> usize {
        self.s_star / 13
    }

    /// Number of bins making up B, `d - s*` (zero when s* >= d).
    pub fn big_bins(&self) -> usize {
        self.d.saturating_sub(self.s_star)
    }

    /// The concentration slack `d^(1/2 + gamma)`.
    pub fn slack(&self) -> f64 {
        (self.d as f64).powf(0.5 + self.gamma)
    }

    /// `beta = epsilon - 2 gamma`, the exponent in the headline bounds.
    pub fn beta(&self) -> f64 {
        self.epsilon - 2.0 * self.gamma
    }

    /// Target vertex weight of the k-th vertex of B (1-based) after leveling.
    pub fn target(&self, k: usize) -> u64 {
        k as u64 + self.step2_offset
    }

    /// Upper end of the per-edge range every final weight must satisfy.
    pub fn max_edge_weight(&self) -> u64 {
        self.ceil_nd() + 13 * self.omega + self.f2_cap
    }
}
