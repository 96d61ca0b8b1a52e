use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// `x` counts as a multiple of pi when `|sin x|` falls below this.
pub const POLE_TOLERANCE: f64 = 1e-9;

/// Arguments of the generic loss: half-slope phase `x` and the weight
/// coefficients `c1 = b + aT(K-1)/2`, `c2 = aT/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossInput {
    pub x: f64,
    pub c1: f64,
    pub c2: f64,
}

impl LossInput {
    /// Constant unit weights, the Omega-only case.
    pub fn omega(x: f64) -> Self {
        LossInput {
            x,
            c1: 1.0,
            c2: 0.0,
        }
    }

    pub fn loss(&self, k: usize) -> Result<f64> {
        loss(k, self.x, self.c1, self.c2)
    }
}

/// `x` lies in `X = {q*pi}`.
pub fn in_pole_set(x: f64) -> bool {
    x.sin().abs() < POLE_TOLERANCE
}

/// `x` lies in `X* = {q*pi/K} \ X`.
pub fn in_optimal_set(k: usize, x: f64) -> bool {
    let r = k as f64 * x / PI;
    (r - r.round()).abs() * PI < POLE_TOLERANCE && !in_pole_set(x)
}

fn check_domain(x: f64) -> Result<()> {
    if in_pole_set(x) || !x.is_finite() {
        return Err(Error::DomainX { x });
    }
    Ok(())
}

/// Below this `|sin x|` the ratio forms of [`f1`] and [`f2`] lose accuracy
/// and the equivalent finite sums are used instead.
const NEAR_POLE_BAND: f64 = 1e-2;

/// `n_m = K - 1 - 2m`, the harmonics of the Dirichlet form.
fn harmonics(k: usize) -> impl Iterator<Item = f64> {
    (0..k).map(move |m| (k - 1) as f64 - 2.0 * m as f64)
}

/// `sin(Kx) / sin(x)`, or `sum_m cos(n_m x)` near the poles.
pub fn f1(k: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    if x.sin().abs() < NEAR_POLE_BAND {
        return Ok(harmonics(k).map(|n| (n * x).cos()).sum());
    }
    Ok((k as f64 * x).sin() / x.sin())
}

/// `K cos(Kx) / sin(x) - f1(x) cot(x)`, the derivative of [`f1`].
///
/// Near the poles it is evaluated as `-sum_m n_m sin(n_m x)`.
pub fn f2(k: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    let kf = k as f64;
    let s = x.sin();
    if s.abs() < NEAR_POLE_BAND {
        return Ok(-harmonics(k).map(|n| n * (n * x).sin()).sum::<f64>());
    }
    Ok(kf * (kf * x).cos() / s - (kf * x).sin() / s * x.cos() / s)
}

fn check_c1(c1: f64) -> Result<()> {
    if !(c1 > 0.0) {
        return Err(Error::NonPositiveC1(c1));
    }
    Ok(())
}

/// Worst-case normalised loss `-inf_y J(x, y) / (c1 K)`.
///
/// Equals 1 on `X`, otherwise `sqrt(c1^2 f1^2 + c2^2 f2^2) / (c1 K)`.
pub fn loss(k: usize, x: f64, c1: f64, c2: f64) -> Result<f64> {
    check_c1(c1)?;
    if in_pole_set(x) {
        return Ok(1.0);
    }
    let a = c1 * f1(k, x)?;
    let b = c2 * f2(k, x)?;
    Ok(a.hypot(b) / (c1 * k as f64))
}

/// Loss under constant weights, `|f1(x)| / K` off `X`.
pub fn loss_omega(k: usize, x: f64) -> f64 {
    loss(k, x, 1.0, 0.0).expect("c1 = 1 is positive")
}

/// `(|f1|/K, sqrt((K-1)^2 f1^2 + f2^2) / (K(K-1)))`, valid for every
/// admissible weight slope. Both are 1 on `X`.
pub fn loss_bounds(k: usize, x: f64) -> (f64, f64) {
    if in_pole_set(x) {
        return (1.0, 1.0);
    }
    let kf = k as f64;
    let a = f1(k, x).expect("off the pole set");
    let b = f2(k, x).expect("off the pole set");
    let lower = a.abs() / kf;
    let upper = ((kf - 1.0) * a).hypot(b) / (kf * (kf - 1.0));
    (lower, upper)
}

/// Bound on `L_Omega` over `[pi/K, (K-1)pi/K]`: `1 / (K sin(pi/K))`.
pub fn interval_bound(k: usize) -> f64 {
    1.0 / (k as f64 * (PI / k as f64).sin())
}

/// `10 log10(1 - L)`: the normalised worst-case sum-SNR in dB.
pub fn loss_to_db(loss: f64) -> f64 {
    10.0 * (1.0 - loss).log10()
}

/// `J(x, y) = c1 f1 cos(y - (K-1)x) - c2 f2 sin(y - (K-1)x)`; `c1 K cos y` on `X`.
pub fn j_closed(k: usize, x: f64, y: f64, c1: f64, c2: f64) -> f64 {
    if in_pole_set(x) {
        return c1 * k as f64 * y.cos();
    }
    let z = y - (k - 1) as f64 * x;
    let a = f1(k, x).expect("off the pole set");
    let b = f2(k, x).expect("off the pole set");
    c1 * a * z.cos() - c2 * b * z.sin()
}

/// Minimiser and minimum of `J(x, .)` over `y in [0, 2*pi)`.
///
/// When both `c1 f1` and `c2 f2` vanish (to `1e-12 c1 K`), `J` is
/// identically zero and `(0, 0)` is returned.
pub fn worst_case_y(k: usize, x: f64, c1: f64, c2: f64) -> Result<(f64, f64)> {
    check_c1(c1)?;
    if in_pole_set(x) {
        return Ok((PI, -c1 * k as f64));
    }
    let a = c1 * f1(k, x)?;
    let b = -c2 * f2(k, x)?;
    let r = a.hypot(b);
    if r <= 1e-12 * c1 * k as f64 {
        return Ok((0.0, 0.0));
    }
    let phi = b.atan2(a);
    let y = ((k - 1) as f64 * x + phi + PI).rem_euclid(TAU);
    Ok((y, -r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn f1_values() {
        assert!(f1(10, PI / 10.0).unwrap().abs() < 1e-14);
        assert!(f1(6, PI / 2.0).unwrap().abs() < 1e-14);
        assert_relative_eq!(f1(5, PI / 3.0).unwrap(), -1.0, epsilon = 1e-14);
        assert!(matches!(f1(5, 0.0), Err(Error::DomainX { .. })));
        assert!(matches!(f1(5, PI), Err(Error::DomainX { .. })));
        assert!(f1(5, 1e-6).is_ok());
    }

    #[test]
    fn f2_values() {
        for k in [2usize, 4, 6, 10] {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(f2(k, PI / 2.0).unwrap(), sign * k as f64, epsilon = 1e-12);
        }
        let k = 10;
        assert_relative_eq!(
            f2(k, PI / 10.0).unwrap(),
            -10.0 / (PI / 10.0).sin(),
            max_relative = 1e-12
        );
        let h = 1e-6;
        let fd = (f1(k, 0.7 + h).unwrap() - f1(k, 0.7 - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(f2(k, 0.7).unwrap(), fd, max_relative = 1e-4);
    }

    #[test]
    fn continuous_across_near_pole_band() {
        for k in [3usize, 10, 17] {
            for &edge in &[NEAR_POLE_BAND.asin(), PI - NEAR_POLE_BAND.asin()] {
                for f in [f1, f2] {
                    let a = f(k, edge * (1.0 - 1e-9)).unwrap();
                    let b = f(k, edge * (1.0 + 1e-9)).unwrap();
                    assert!((a - b).abs() < 1e-6 * a.abs().max(1.0), "K={k}: {a} vs {b}");
                }
            }
            // f2 ~ -x K (K^2 - 1) / 3 next to the pole at 0
            let kf = k as f64;
            let x = 1e-8;
            assert_relative_eq!(
                f2(k, x).unwrap(),
                -x * kf * (kf * kf - 1.0) / 3.0,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn loss_special_values() {
        assert_eq!(loss(10, 0.0, 1.0, 0.3).unwrap(), 1.0);
        assert_eq!(loss(10, 2.0 * PI, 2.0, 0.0).unwrap(), 1.0);
        for q in 1..10 {
            let x = q as f64 * PI / 10.0;
            assert!(loss(10, x, 1.0, 0.0).unwrap() < 1e-14);
            let c2 = 0.05;
            assert_relative_eq!(
                loss(10, x, 1.0, c2).unwrap(),
                (c2 / x.sin()).abs(),
                max_relative = 1e-12
            );
        }
        assert!(matches!(
            loss(10, 0.5, 0.0, 0.0),
            Err(Error::NonPositiveC1(_))
        ));
    }

    #[test]
    fn interval_bound_values() {
        assert!((interval_bound(5) - 0.340).abs() < 5e-4);
        assert!((interval_bound(10) - 0.324).abs() < 5e-4);
    }

    #[test]
    fn bounds_attained_at_zero_slope() {
        for i in 1..100 {
            let x = i as f64 * 0.031;
            if in_pole_set(x) {
                continue;
            }
            let (lo, _) = loss_bounds(7, x);
            assert_relative_eq!(loss(7, x, 1.0, 0.0).unwrap(), lo, epsilon = 1e-15);
        }
    }

    #[test]
    fn membership() {
        assert!(in_pole_set(0.0));
        assert!(in_pole_set(-3.0 * PI));
        assert!(!in_pole_set(1e-6));
        assert!(in_optimal_set(10, PI / 10.0));
        assert!(in_optimal_set(10, 9.0 * PI / 10.0));
        assert!(!in_optimal_set(10, PI));
        assert!(!in_optimal_set(10, 0.3));
    }

    #[test]
    fn worst_case_on_pole_set() {
        assert_eq!(worst_case_y(4, 0.0, 2.0, 1.0).unwrap(), (PI, -8.0));
    }

    #[test]
    fn worst_case_constant_weights() {
        let (_, j) = worst_case_y(10, 0.4, 1.0, 0.0).unwrap();
        assert_relative_eq!(j, -f1(10, 0.4).unwrap().abs(), epsilon = 1e-14);
        // f1 = 0 and c2 = 0: J vanishes identically
        assert_eq!(worst_case_y(10, PI / 10.0, 1.0, 0.0).unwrap(), (0.0, 0.0));
        assert_eq!(worst_case_y(2, PI / 2.0, 1.0, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn minimiser_attains_minimum() {
        for &(x, c1, c2) in &[(0.4, 1.0, 0.2), (2.1, 3.0, -0.4), (1.3, 0.5, 0.5)] {
            let (y, j) = worst_case_y(8, x, c1, c2).unwrap();
            assert_relative_eq!(j_closed(8, x, y, c1, c2), j, epsilon = 1e-12);
        }
    }

    #[test]
    fn db_floor() {
        assert_relative_eq!(loss_to_db(0.0), 0.0);
        assert!((loss_to_db(interval_bound(10)) + 1.70).abs() < 0.01);
    }
}
