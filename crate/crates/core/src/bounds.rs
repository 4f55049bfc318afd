//! Closed-form lower and upper bounds on the irregularity strength.

use num_rational::Ratio;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("exponent beta = {0} outside (0, 1/4)")]
    BetaOutOfRange(f64),
    #[error("need n >= 2 and 1 <= d <= n - 1, got n = {n}, d = {d}")]
    BadDimensions { n: usize, d: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    /// ceil((n + d - 1) / d), the classical counting bound.
    pub safe_lower: u64,
    /// ceil((n + d + 1) / d), as stated alongside the dense theorem. Reported
    /// only; it exceeds the true strength of C_4.
    pub paper_lower: u64,
    pub beta: f64,
    /// n/d + 28, exact.
    pub thm_dense: Ratio<u64>,
    /// Whether d^(1+beta) >= n.
    pub thm_dense_applicable: bool,
    /// n/d * (1 + 14 / d^beta) + 28.
    pub thm_general: f64,
}

impl BoundSet {
    pub fn thm_dense_f64(&self) -> f64 {
        *self.thm_dense.numer() as f64 / *self.thm_dense.denom() as f64
    }

    /// Strict comparison of an achieved k against n/d + 28 in exact arithmetic.
    pub fn below_thm_dense(&self, k: u64) -> bool {
        Ratio::from_integer(k) < self.thm_dense
    }
}

pub fn bounds(n: usize, d: usize, beta: f64) -> Result<BoundSet, BoundsError> {
    if !(beta > 0.0 && beta < 0.25) {
        return Err(BoundsError::BetaOutOfRange(beta));
    }
    if n < 2 || d == 0 || d >= n {
        return Err(BoundsError::BadDimensions { n, d });
    }
    let (n64, d64) = (n as u64, d as u64);
    let ratio = Ratio::new(n64, d64);
    let nf = n as f64;
    let df = d as f64;
    Ok(BoundSet {
        safe_lower: (n64 + d64 - 1).div_ceil(d64),
        paper_lower: (n64 + d64 + 1).div_ceil(d64),
        beta,
        thm_dense: ratio + Ratio::from_integer(28),
        thm_dense_applicable: df.powf(1.0 + beta) >= nf,
        thm_general: nf / df * (1.0 + 14.0 / df.powf(beta)) + 28.0,
    })
}

/// A counting lower bound valid for any graph with finite strength.
///
/// The `N_i` non-isolated vertices of degree at most `i` need distinct sums in
/// `[delta, i*k]`, where `delta` is the minimum positive degree, so
/// `k >= (N_i + delta - 1) / i`. For a d-regular graph this is
/// `ceil((n + d - 1) / d)`.
pub fn counting_lower_bound(g: &Graph) -> u64 {
    let max_deg = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    let Some(delta) = (0..g.n()).map(|v| g.degree(v)).filter(|&x| x > 0).min() else {
        return 1;
    };
    let mut count_by_deg = vec![0u64; max_deg + 1];
    for v in 0..g.n() {
        count_by_deg[g.degree(v)] += 1;
    }
    let mut best = 1u64;
    let mut cumulative = 0u64;
    for (i, &c) in count_by_deg.iter().enumerate().skip(1) {
        cumulative += c;
        if cumulative == 0 {
            continue;
        }
        best = best.max((cumulative + delta as u64 - 1).div_ceil(i as u64));
    }
    best
}
