use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::snr::closed_form::{in_optimal_set, in_pole_set, loss_omega};

/// Phase slope of antenna 1; antenna 0 has zero slope and offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSlopeConfig {
    pub alpha: f64,
    pub k: usize,
    pub t: f64,
}

impl PhaseSlopeConfig {
    pub fn new(alpha: f64, k: usize, t: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidScenario(
                "burst length K must be at least 2".into(),
            ));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidScenario(
                "repetition interval T must be positive".into(),
            ));
        }
        Ok(PhaseSlopeConfig { alpha, k, t })
    }

    /// `alpha = q 2 pi / (K T)`.
    pub fn from_index(q: usize, k: usize, t: f64) -> Result<Self> {
        PhaseSlopeConfig::new(slope_for_index(q, k, t), k, t)
    }

    /// `alpha T / 2`.
    pub fn half_phase(&self) -> f64 {
        self.alpha * self.t / 2.0
    }
}

pub fn slope_for_index(q: usize, k: usize, t: f64) -> f64 {
    q as f64 * TAU / (k as f64 * t)
}

/// `A* = {q 2 pi / (K T) : q = 1..K-1}`.
pub fn optimal_slope_set(k: usize, t: f64) -> Vec<f64> {
    (1..k).map(|q| slope_for_index(q, k, t)).collect()
}

/// Indices `q` of the slopes in `A*` whose half-slope phase is closest to pi/2.
pub fn design_rule_indices(k: usize) -> Vec<usize> {
    if k.is_multiple_of(2) {
        vec![k / 2]
    } else {
        vec![(k - 1) / 2, k.div_ceil(2)]
    }
}

/// The robust slope(s) `alpha*`: `K/2` for even `K`, `(K -+ 1)/2` for odd `K`.
pub fn design_rule_alpha_star(k: usize, t: f64) -> Vec<f64> {
    design_rule_indices(k)
        .into_iter()
        .map(|q| slope_for_index(q, k, t))
        .collect()
}

/// `alpha` belongs to `A*`, i.e. `alpha T / 2` is in `X*`.
pub fn is_optimal_slope(alpha: f64, k: usize, t: f64) -> bool {
    in_optimal_set(k, alpha * t / 2.0)
}

/// Pairwise optimality: `(alpha_m - alpha_l) T / 2` in `X*` for all `l < m`.
pub fn check_optimality(slopes: &[f64], k: usize, t: f64) -> bool {
    slopes.len() <= k
        && slopes.iter().enumerate().all(|(l, &a)| {
            slopes[l + 1..]
                .iter()
                .all(|&b| in_optimal_set(k, (b - a) * t / 2.0))
        })
}

/// Largest `L_Omega(x0 - s)` for shifts `s` in `[lo, hi]`.
///
/// Equals 1 when the shifted interval contains a multiple of pi; otherwise the
/// maximum over an `n`-point grid including both endpoints.
pub fn max_loss_over_shift(k: usize, x0: f64, lo: f64, hi: f64, n: usize) -> f64 {
    let (a, b) = (x0 - hi, x0 - lo);
    if (b / PI).floor() >= (a / PI).ceil() || in_pole_set(a) || in_pole_set(b) {
        return 1.0;
    }
    let n = n.max(2);
    (0..n)
        .map(|i| loss_omega(k, a + (b - a) * i as f64 / (n - 1) as f64))
        .fold(0.0, f64::max)
}

/// Slopes in `A*` minimising the worst-case loss when `a_Omega T / 2` ranges
/// over `[-half_range, half_range]`. Values within `tol` count as ties.
pub fn most_robust_slopes(k: usize, t: f64, half_range: f64, n: usize, tol: f64) -> Vec<f64> {
    let scored: Vec<(f64, f64)> = optimal_slope_set(k, t)
        .into_iter()
        .map(|a| {
            (
                a,
                max_loss_over_shift(k, a * t / 2.0, -half_range, half_range, n),
            )
        })
        .collect();
    let best = scored.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    scored
        .into_iter()
        .filter(|s| s.1 <= best + tol)
        .map(|s| s.0)
        .collect()
}
