//! Brute-force evaluators. Nothing here relies on the closed forms, so these
//! serve as oracles for them.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Default number of points in the `y` grid scan.
pub const DEFAULT_Y_GRID: usize = 100_000;

/// Multi-antenna cross term
/// `sum_k w_k (2/L) sum_{l<m} |g_l||g_m| cos(psi_m - psi_l - (alpha_m - alpha_l) kT)`.
///
/// `psi[l][k]` is the phase of antenna `l` at packet `k`; `gains[k][l]` is
/// `|g_l(phi_k)|`.
pub fn j_direct(
    slopes: &[f64],
    psi: &[Vec<f64>],
    gains: &[Vec<f64>],
    weights: &[f64],
    t: f64,
) -> f64 {
    let l_count = slopes.len();
    let scale = 2.0 / l_count as f64;
    weights
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let kt = k as f64 * t;
            let mut acc = 0.0;
            for l in 0..l_count {
                for m in l + 1..l_count {
                    let arg = psi[m][k] - psi[l][k] - (slopes[m] - slopes[l]) * kt;
                    acc += gains[k][l] * gains[k][m] * arg.cos();
                }
            }
            w * scale * acc
        })
        .sum()
}

/// Per-packet weights `b + a kT` written through `(c1, c2)`: `c1 + c2 (2k - (K-1))`.
pub fn affine_weights(k: usize, c1: f64, c2: f64) -> Vec<f64> {
    (0..k)
        .map(|i| c1 + c2 * (2.0 * i as f64 - (k - 1) as f64))
        .collect()
}

/// `sum_k w_k cos(y - 2 x k)` summed term by term.
pub fn j_weighted(weights: &[f64], x: f64, y: f64) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(k, &w)| w * (y - 2.0 * x * k as f64).cos())
        .sum()
}

/// Uniform `y` grid with cached sines and cosines.
#[derive(Debug, Clone)]
pub struct YGrid {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl YGrid {
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let (cos, sin) = (0..n)
            .map(|i| {
                let y = TAU * i as f64 / n as f64;
                (y.cos(), y.sin())
            })
            .unzip();
        YGrid { cos, sin }
    }

    pub fn len(&self) -> usize {
        self.cos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cos.is_empty()
    }

    pub fn y(&self, i: usize) -> f64 {
        TAU * i as f64 / self.len() as f64
    }

    /// Grid step `2*pi / n`.
    pub fn step(&self) -> f64 {
        TAU / self.len() as f64
    }

    /// Argmin and minimum of `sum_k w_k cos(y + theta_k)` over the grid.
    ///
    /// Each grid value is `cos(y) sum w cos(theta) - sin(y) sum w sin(theta)`,
    /// the same trigonometric sum regrouped by angle addition.
    pub fn minimise(&self, weights: &[f64], theta: &[f64]) -> (f64, f64) {
        let (a, b) = weights
            .iter()
            .zip(theta)
            .fold((0.0, 0.0), |(a, b), (&w, &th)| {
                (a + w * th.cos(), b + w * th.sin())
            });
        let mut best = (0, f64::INFINITY);
        for i in 0..self.len() {
            let v = a * self.cos[i] - b * self.sin[i];
            if v < best.1 {
                best = (i, v);
            }
        }
        (self.y(best.0), best.1)
    }

    /// Grid minimum of [`j_weighted`] over `y`.
    pub fn minimise_weighted(&self, weights: &[f64], x: f64) -> (f64, f64) {
        let theta: Vec<f64> = (0..weights.len()).map(|k| -2.0 * x * k as f64).collect();
        self.minimise(weights, &theta)
    }
}

/// Analytic `inf_y sum_k w_k cos(y + theta_k) = -|sum_k w_k e^{j theta_k}|`.
pub fn phasor_minimum(weights: &[f64], theta: &[f64]) -> f64 {
    -weights
        .iter()
        .zip(theta)
        .map(|(&w, &th)| Complex64::from_polar(w, th))
        .sum::<Complex64>()
        .norm()
}

/// Curvature bound on the gap between the grid minimum and the true minimum
/// of a sinusoid with amplitude at most `c1 K`.
pub fn grid_error_bound(n: usize, c1: f64, k: usize) -> f64 {
    2.0 * (TAU / n as f64).powi(2) * c1 * k as f64
}
