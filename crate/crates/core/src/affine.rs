//! Affine models `b + a*t` of quantities that vary over the burst window.

use std::f64::consts::TAU;

use crate::antenna::{unwrap_phase, Response};
use crate::error::{Error, Result};
use crate::geometry::{omega_exact, propagation_distances, ScenarioParams};
use crate::pathloss::{distance_at, distance_range, PathlossModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMethod {
    Taylor { t0: f64 },
    LeastSquares,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitMethod::Taylor { t0 } => write!(f, "taylor(t0={t0})"),
            FitMethod::LeastSquares => f.write_str("least_squares"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineModel {
    pub slope: f64,
    pub intercept: f64,
    pub method: FitMethod,
    pub window: (f64, f64),
}

impl AffineModel {
    pub fn at(&self, t: f64) -> f64 {
        self.intercept + self.slope * t
    }

    /// `(c1, c2) = (b + a T (K - 1) / 2, a T / 2)`.
    pub fn coefficients(&self, k: usize, t: f64) -> (f64, f64) {
        let c2 = self.slope * t / 2.0;
        (self.intercept + c2 * (k - 1) as f64, c2)
    }

    /// Fails unless `b + a kT > 0` for every packet.
    pub fn check_positive(&self, k: usize, t: f64) -> Result<()> {
        for i in 0..k {
            let value = self.at(i as f64 * t);
            if !(value > 0.0) {
                return Err(Error::PositivityViolation { k: i, value });
            }
        }
        Ok(())
    }

    /// Largest `|f(t) - (b + a t)|` over `times`.
    pub fn max_deviation(&self, times: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        times
            .iter()
            .map(|&t| (f(t) - self.at(t)).abs())
            .fold(0.0, f64::max)
    }
}

/// Sum of squared residuals of `b + a t` against the samples.
pub fn residual_sum_squares(slope: f64, intercept: f64, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(t, v)| (v - intercept - slope * t).powi(2))
        .sum()
}

/// Ordinary least squares line through `(t, value)` samples.
pub fn least_squares_fit(samples: &[(f64, f64)]) -> Result<AffineModel> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSamples);
    }
    let n = samples.len() as f64;
    let mean_t = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_v = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let stt: f64 = samples.iter().map(|s| (s.0 - mean_t).powi(2)).sum();
    if !(stt > 0.0) {
        return Err(Error::DegenerateSamples);
    }
    let stv: f64 = samples
        .iter()
        .map(|s| (s.0 - mean_t) * (s.1 - mean_v))
        .sum();
    let slope = stv / stt;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.0), hi.max(s.0))
        });
    Ok(AffineModel {
        slope,
        intercept: mean_v - slope * mean_t,
        method: FitMethod::LeastSquares,
        window: (lo, hi),
    })
}

fn packet_samples(p: &ScenarioParams, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    p.packet_times().map(|t| (t, f(t))).collect()
}

/// Centre of the burst window, `(K - 1) T / 2`.
pub fn window_centre(p: &ScenarioParams) -> f64 {
    p.window_end() / 2.0
}

/// First-order Taylor model of Omega around `t0`.
pub fn taylor_omega(p: &ScenarioParams, t0: f64) -> Result<AffineModel> {
    let (d0, d1) = propagation_distances(p, t0);
    if d0 == 0.0 || d1 == 0.0 {
        return Err(Error::DegenerateGeometry { t: t0 });
    }
    let u = p.longitudinal(t0);
    // u/d1 - u/d0 rewritten without cancellation
    let radical_diff = u * 2.0 * p.dy * p.delta_a / (d0 * d1 * (d0 + d1));
    let slope = TAU / p.lambda * p.delta_v * radical_diff;
    Ok(AffineModel {
        slope,
        intercept: omega_exact(p, t0) - slope * t0,
        method: FitMethod::Taylor { t0 },
        window: (0.0, p.window_end()),
    })
}

/// Least-squares model of Omega on the packet instants.
pub fn ls_omega(p: &ScenarioParams) -> Result<AffineModel> {
    least_squares_fit(&packet_samples(p, |t| omega_exact(p, t)))
}

fn check_validity(m: &PathlossModel, p: &ScenarioParams) -> Result<()> {
    let (lo, _) = distance_range(p);
    if lo <= m.d_ref {
        return Err(Error::ValidityViolation {
            distance: lo,
            d_ref: m.d_ref,
        });
    }
    Ok(())
}

/// First-order Taylor model of the average path gain around `t0`.
pub fn taylor_pathgain(m: &PathlossModel, p: &ScenarioParams, t0: f64) -> Result<AffineModel> {
    check_validity(m, p)?;
    let d = distance_at(p, t0);
    let u = p.longitudinal(t0);
    let slope = -m.mu_x * m.a0 * m.d_ref.powf(m.n_e) * m.n_e * p.delta_v * u / d.powf(m.n_e + 2.0);
    let model = AffineModel {
        slope,
        intercept: m.mean_path_gain(d)? - slope * t0,
        method: FitMethod::Taylor { t0 },
        window: (0.0, p.window_end()),
    };
    model.check_positive(p.k, p.t)?;
    Ok(model)
}

/// Least-squares model of the average path gain on the packet instants.
pub fn ls_pathgain(m: &PathlossModel, p: &ScenarioParams) -> Result<AffineModel> {
    check_validity(m, p)?;
    let samples: Vec<(f64, f64)> = p
        .packet_times()
        .map(|t| Ok((t, m.mean_path_gain(distance_at(p, t))?)))
        .collect::<Result<_>>()?;
    let model = least_squares_fit(&samples)?;
    model.check_positive(p.k, p.t)?;
    Ok(model)
}

fn response_samples(
    responses: &[Response],
    t: f64,
    f: impl Fn(&Response) -> f64,
) -> Vec<(f64, f64)> {
    responses
        .iter()
        .enumerate()
        .map(|(k, r)| (k as f64 * t, f(r)))
        .collect()
}

/// LS fit of `arg g0(phi_k) - arg g1(phi_k)` after unwrapping across packets.
pub fn fit_antenna_phase_diff(responses: &[Response], t: f64) -> Result<AffineModel> {
    let diffs: Vec<f64> = responses.iter().map(Response::phase_difference).collect();
    let unwrapped = unwrap_phase(&diffs);
    let samples: Vec<(f64, f64)> = unwrapped
        .iter()
        .enumerate()
        .map(|(k, &v)| (k as f64 * t, v))
        .collect();
    least_squares_fit(&samples)
}

/// LS fit of `|g0(phi_k) g1(phi_k)|`; the fitted weights must stay positive.
pub fn fit_antenna_gain_product(responses: &[Response], t: f64) -> Result<AffineModel> {
    let model = least_squares_fit(&response_samples(responses, t, Response::gain_product))?;
    model.check_positive(responses.len(), t)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::{cardioid_pair, sample_responses, AntennaPattern};
    use crate::geometry::kmh_to_ms;
    use approx::assert_relative_eq;

    fn central_diff(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    #[test]
    fn omega_slope_zero_in_same_lane() {
        let p = ScenarioParams::highway().with_dy(0.0);
        assert_eq!(taylor_omega(&p, 0.0).unwrap().slope, 0.0);
    }

    #[test]
    fn omega_slope_vanishes_far_away() {
        // decays as 1/dx^2
        let s6 = taylor_omega(&ScenarioParams::highway().with_dx(1e6), 0.0)
            .unwrap()
            .slope;
        let s7 = taylor_omega(&ScenarioParams::highway().with_dx(1e7), 0.0)
            .unwrap()
            .slope;
        assert_relative_eq!(s6 / s7, 100.0, max_relative = 1e-6);
        assert!(s7.abs() < 1e-9);
    }

    #[test]
    fn omega_slope_matches_finite_difference() {
        let p = ScenarioParams::highway();
        for &t0 in &[0.0, 0.45] {
            let m = taylor_omega(&p, t0).unwrap();
            let fd = central_diff(|t| omega_exact(&p, t), t0, 1e-5);
            assert_relative_eq!(m.slope, fd, max_relative = 1e-6);
            assert_relative_eq!(m.at(t0), omega_exact(&p, t0), epsilon = 1e-12);
        }
    }

    #[test]
    fn omega_degenerate_geometry() {
        let p = ScenarioParams::highway()
            .with_dx(0.0)
            .with_dy(0.0)
            .with_delta_a(0.0);
        assert!(matches!(
            taylor_omega(&p, 0.0),
            Err(Error::DegenerateGeometry { .. })
        ));
    }

    #[test]
    fn pathgain_static_receiver() {
        let m = PathlossModel::winner_b1();
        let p = ScenarioParams::highway().with_speed_kmh(0.0);
        let fit = taylor_pathgain(&m, &p, window_centre(&p)).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(
            fit.intercept,
            m.mean_path_gain(distance_at(&p, 0.0)).unwrap()
        );
    }

    #[test]
    fn pathgain_slope_matches_finite_difference() {
        let m = PathlossModel::winner_b1();
        let p = ScenarioParams::highway().with_dy(0.0);
        let t0 = window_centre(&p);
        let fit = taylor_pathgain(&m, &p, t0).unwrap();
        let fd = central_diff(|t| m.mean_path_gain(distance_at(&p, t)).unwrap(), t0, 1e-5);
        assert_relative_eq!(fit.slope, fd, max_relative = 1e-6);
        // approaching receiver: gain rises
        assert!(fit.slope > 0.0);
    }

    #[test]
    fn pathgain_coefficient_ratio_in_same_lane() {
        let m = PathlossModel::winner_b1();
        for &kmh in &[-60.0, 60.0] {
            let p = ScenarioParams::highway().with_dy(0.0).with_speed_kmh(kmh);
            let t0 = window_centre(&p);
            let fit = taylor_pathgain(&m, &p, t0).unwrap();
            let (c1, c2) = fit.coefficients(p.k, p.t);
            let expected = m.n_e * p.delta_v.abs() * (p.t / 2.0) / p.longitudinal(t0).abs();
            assert_relative_eq!((c2 / c1).abs(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn pathgain_validity_violation() {
        let m = PathlossModel::winner_b1();
        let p = ScenarioParams::highway().with_dx(5.0).with_dy(0.0);
        assert!(matches!(
            taylor_pathgain(&m, &p, 0.0),
            Err(Error::ValidityViolation { .. })
        ));
    }

    #[test]
    fn positivity_violation_reported() {
        let fit = AffineModel {
            slope: -1.0,
            intercept: 0.5,
            method: FitMethod::LeastSquares,
            window: (0.0, 0.9),
        };
        assert!(matches!(
            fit.check_positive(10, 0.1),
            Err(Error::PositivityViolation { k: 5, .. })
        ));
    }

    #[test]
    fn ls_constant_and_affine() {
        let c: Vec<(f64, f64)> = (0..10).map(|k| (k as f64 * 0.1, 2.5)).collect();
        let fit = least_squares_fit(&c).unwrap();
        assert!(fit.slope.abs() < 1e-14);
        assert_relative_eq!(fit.intercept, 2.5, epsilon = 1e-14);

        let s: Vec<(f64, f64)> = (0..10)
            .map(|k| (k as f64 * 0.1, -3.0 + 7.0 * k as f64 * 0.1))
            .collect();
        let fit = least_squares_fit(&s).unwrap();
        assert_relative_eq!(fit.slope, 7.0, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, -3.0, epsilon = 1e-12);
        assert_eq!(fit.window, (0.0, 0.9));
    }

    #[test]
    fn ls_degenerate() {
        assert!(matches!(
            least_squares_fit(&[(1.0, 2.0)]),
            Err(Error::DegenerateSamples)
        ));
        assert!(matches!(
            least_squares_fit(&[(1.0, 2.0), (1.0, 3.0)]),
            Err(Error::DegenerateSamples)
        ));
    }

    #[test]
    fn ls_residual_grows_at_short_range() {
        let base = ScenarioParams::highway();
        let rss = |dx: f64| {
            let p = base.with_dx(dx);
            let samples = packet_samples(&p, |t| omega_exact(&p, t));
            let fit = least_squares_fit(&samples).unwrap();
            residual_sum_squares(fit.slope, fit.intercept, &samples)
        };
        assert!(rss(10.0) > rss(100.0));
    }

    #[test]
    fn ls_pathgain_matches_taylor_roughly() {
        let m = PathlossModel::winner_b1();
        let p = ScenarioParams::highway().with_dx(100.0);
        let ls = ls_pathgain(&m, &p).unwrap();
        let ty = taylor_pathgain(&m, &p, window_centre(&p)).unwrap();
        assert_relative_eq!(ls.slope, ty.slope, max_relative = 0.05);
    }

    #[test]
    fn isotropic_antenna_fits() {
        let iso = AntennaPattern::isotropic();
        let p = ScenarioParams::highway();
        let r = sample_responses(&iso, &iso, &p, 0.0).unwrap();
        let ph = fit_antenna_phase_diff(&r, p.t).unwrap();
        let g = fit_antenna_gain_product(&r, p.t).unwrap();
        assert_eq!((ph.slope, ph.intercept), (0.0, 0.0));
        assert!(g.slope.abs() < 1e-15);
        assert_relative_eq!(g.intercept, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn static_arrival_gives_flat_antenna_fits() {
        let (p0, p1) = cardioid_pair(ScenarioParams::highway().lambda).unwrap();
        let p = ScenarioParams::highway().with_speed_kmh(0.0);
        let r = sample_responses(&p0, &p1, &p, 0.3).unwrap();
        assert!(fit_antenna_phase_diff(&r, p.t).unwrap().slope.abs() < 1e-12);
        assert!(fit_antenna_gain_product(&r, p.t).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn gain_product_fit_matches_normal_equations() {
        let (p0, p1) = cardioid_pair(ScenarioParams::highway().lambda).unwrap();
        let p = ScenarioParams::highway();
        let r = sample_responses(&p0, &p1, &p, 0.0).unwrap();
        let fit = fit_antenna_gain_product(&r, p.t).unwrap();

        // [n  St ; St  Stt] [b; a] = [Sv; Stv]
        let (mut n, mut st, mut stt, mut sv, mut stv) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (k, x) in r.iter().enumerate() {
            let t = k as f64 * p.t;
            let v = x.mag0 * x.mag1;
            n += 1.0;
            st += t;
            stt += t * t;
            sv += v;
            stv += t * v;
        }
        let det = n * stt - st * st;
        let b = (stt * sv - st * stv) / det;
        let a = (n * stv - st * sv) / det;
        assert_relative_eq!(fit.slope, a, max_relative = 1e-9);
        assert_relative_eq!(fit.intercept, b, max_relative = 1e-9);
    }

    #[test]
    fn phase_difference_is_unwrapped() {
        let r: Vec<Response> = (0..6)
            .map(|k| {
                let ph = (3.0 + 0.2 * k as f64 + std::f64::consts::PI).rem_euclid(TAU)
                    - std::f64::consts::PI;
                Response {
                    mag0: 1.0,
                    mag1: 1.0,
                    phase0: ph,
                    phase1: 0.0,
                }
            })
            .collect();
        let fit = fit_antenna_phase_diff(&r, 0.1).unwrap();
        assert_relative_eq!(fit.slope, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn taylor_and_ls_slopes_close_at_moderate_range() {
        let p = ScenarioParams {
            delta_v: kmh_to_ms(40.0),
            ..ScenarioParams::highway().with_dx(60.0)
        };
        let ty = taylor_omega(&p, window_centre(&p)).unwrap();
        let ls = ls_omega(&p).unwrap();
        // second derivative bound from a finite-difference scan
        let h = 1e-3;
        let m2 = (0..=90)
            .map(|i| {
                let t = i as f64 * 0.01;
                ((omega_exact(&p, t + h) - 2.0 * omega_exact(&p, t) + omega_exact(&p, t - h))
                    / (h * h))
                    .abs()
            })
            .fold(0.0, f64::max);
        assert!((ty.slope - ls.slope).abs() <= m2 * p.window_end());
    }
}
