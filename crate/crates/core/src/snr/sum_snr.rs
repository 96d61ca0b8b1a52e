//! Worst-case (over the unknown initial phase `y`) sum-SNR of the 1x2
//! combiner under Omega, path-gain and antenna-response variation.
//!
//! Per packet `k` the SNR contribution is
//! `ref_k + w_k cos(y + theta_k - alpha kT)` where `ref_k` is the mean
//! power term and `w_k` the cross-term weight. Exact evaluation uses the
//! per-packet values directly; affine evaluation substitutes the fitted
//! models and the closed-form loss.

use crate::affine::{
    fit_antenna_gain_product, fit_antenna_phase_diff, ls_omega, ls_pathgain, taylor_omega,
    taylor_pathgain, window_centre, AffineModel,
};
use crate::antenna::{sample_responses, AntennaPattern, Response};
use crate::error::Result;
use crate::geometry::{omega_exact, ScenarioParams};
use crate::pathloss::{packet_gains, PathlossModel};
use crate::snr::closed_form::loss;
use crate::snr::direct::{phasor_minimum, YGrid};

/// How the infimum over `y` is taken on the exact path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YSearch {
    /// `-|sum_k w_k e^{j theta_k}|`.
    Analytic,
    /// Scan of an `n`-point uniform grid on `[0, 2*pi)`.
    Grid(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluation {
    Exact(YSearch),
    Affine,
}

impl Evaluation {
    pub fn exact() -> Self {
        Evaluation::Exact(YSearch::Analytic)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Evaluation::Exact(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitKind {
    #[default]
    Taylor,
    LeastSquares,
}

/// Fit configuration for the affine path. Taylor points default to the
/// window centre `(K - 1) T / 2`. Antenna responses are always fitted by
/// least squares.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub kind: FitKind,
    pub omega_t0: Option<f64>,
    pub pathgain_t0: Option<f64>,
}

impl FitOptions {
    pub fn least_squares() -> Self {
        FitOptions {
            kind: FitKind::LeastSquares,
            ..FitOptions::default()
        }
    }

    pub fn omega(&self, p: &ScenarioParams) -> Result<AffineModel> {
        match self.kind {
            FitKind::Taylor => taylor_omega(p, self.omega_t0.unwrap_or_else(|| window_centre(p))),
            FitKind::LeastSquares => ls_omega(p),
        }
    }

    pub fn pathgain(&self, m: &PathlossModel, p: &ScenarioParams) -> Result<AffineModel> {
        match self.kind {
            FitKind::Taylor => {
                taylor_pathgain(m, p, self.pathgain_t0.unwrap_or_else(|| window_centre(p)))
            }
            FitKind::LeastSquares => ls_pathgain(m, p),
        }
    }
}

/// A pair of receive patterns and the offset added to the geometric
/// arrival angle before the patterns are evaluated.
#[derive(Debug, Clone, Copy)]
pub struct AntennaPair<'a> {
    pub p0: &'a AntennaPattern,
    pub p1: &'a AntennaPattern,
    pub phi0_offset: f64,
}

impl<'a> AntennaPair<'a> {
    pub fn new(p0: &'a AntennaPattern, p1: &'a AntennaPattern, phi0_offset: f64) -> Self {
        AntennaPair {
            p0,
            p1,
            phi0_offset,
        }
    }

    pub fn responses(&self, p: &ScenarioParams) -> Result<Vec<Response>> {
        sample_responses(self.p0, self.p1, p, self.phi0_offset)
    }
}

/// Worst-case sum-SNR and the zero-loss reference `sum_k ref_k`, in the
/// same units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumSnr {
    pub value: f64,
    pub reference: f64,
}

impl SumSnr {
    fn scaled(self, s: f64) -> Self {
        SumSnr {
            value: self.value * s,
            reference: self.reference * s,
        }
    }

    pub fn value_db(&self) -> f64 {
        10.0 * self.value.log10()
    }

    pub fn reference_db(&self) -> f64 {
        10.0 * self.reference.log10()
    }

    /// `reference_db - value_db`.
    pub fn dip_db(&self) -> f64 {
        self.reference_db() - self.value_db()
    }
}

/// Per-packet terms of the exact evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketTerms {
    pub reference: Vec<f64>,
    pub weight: Vec<f64>,
    pub phase: Vec<f64>,
}

impl PacketTerms {
    /// `sum ref_k + inf_y sum_k w_k cos(y + theta_k - alpha kT)`.
    pub fn worst_case(&self, alpha: f64, t: f64, search: YSearch) -> SumSnr {
        let theta: Vec<f64> = self
            .phase
            .iter()
            .enumerate()
            .map(|(k, &th)| th - alpha * k as f64 * t)
            .collect();
        let inf = match search {
            YSearch::Analytic => phasor_minimum(&self.weight, &theta),
            YSearch::Grid(n) => YGrid::new(n).minimise(&self.weight, &theta).1,
        };
        let reference: f64 = self.reference.iter().sum();
        SumSnr {
            value: reference + inf,
            reference,
        }
    }
}

fn omega_phases(p: &ScenarioParams) -> Vec<f64> {
    p.packet_times().map(|t| omega_exact(p, t)).collect()
}

/// Omega-only terms: unit weights.
pub fn omega_terms(p: &ScenarioParams) -> PacketTerms {
    PacketTerms {
        reference: vec![1.0; p.k],
        weight: vec![1.0; p.k],
        phase: omega_phases(p),
    }
}

/// Path-gain terms, isotropic antennas. Omega is included; it is zero when
/// `dy = 0`.
pub fn pathgain_terms(m: &PathlossModel, p: &ScenarioParams) -> Result<PacketTerms> {
    let g = packet_gains(m, p)?;
    Ok(PacketTerms {
        reference: g.clone(),
        weight: g,
        phase: omega_phases(p),
    })
}

/// Antenna-response terms with Omega and path gain frozen.
pub fn antenna_terms(p: &ScenarioParams, ant: &AntennaPair) -> Result<PacketTerms> {
    let r = ant.responses(p)?;
    Ok(PacketTerms {
        reference: r.iter().map(Response::mean_power).collect(),
        weight: r.iter().map(Response::gain_product).collect(),
        phase: r.iter().map(Response::phase_difference).collect(),
    })
}

/// Omega, path gain and antenna responses together.
pub fn combined_terms(
    m: &PathlossModel,
    p: &ScenarioParams,
    ant: &AntennaPair,
) -> Result<PacketTerms> {
    let g = packet_gains(m, p)?;
    let r = ant.responses(p)?;
    let omega = omega_phases(p);
    Ok(PacketTerms {
        reference: g.iter().zip(&r).map(|(g, r)| g * r.mean_power()).collect(),
        weight: g
            .iter()
            .zip(&r)
            .map(|(g, r)| g * r.gain_product())
            .collect(),
        phase: omega
            .iter()
            .zip(&r)
            .map(|(o, r)| o + r.phase_difference())
            .collect(),
    })
}

/// Affine closed form: `reference - c1 K L(x)`.
fn affine_worst_case(k: usize, x: f64, c1: f64, c2: f64, reference: f64) -> Result<SumSnr> {
    let l = loss(k, x, c1, c2)?;
    Ok(SumSnr {
        value: reference - c1 * k as f64 * l,
        reference,
    })
}

/// Omega-only sum-SNR normalised by `K`.
pub fn sum_snr_omega(
    p: &ScenarioParams,
    alpha: f64,
    eval: Evaluation,
    fit: &FitOptions,
) -> Result<SumSnr> {
    p.validate()?;
    let k = p.k as f64;
    match eval {
        Evaluation::Exact(s) => Ok(omega_terms(p).worst_case(alpha, p.t, s).scaled(1.0 / k)),
        Evaluation::Affine => {
            let om = fit.omega(p)?;
            let x = (alpha - om.slope) * p.t / 2.0;
            Ok(affine_worst_case(p.k, x, 1.0, 0.0, k)?.scaled(1.0 / k))
        }
    }
}

/// Path-gain sum-SNR normalised by `K` times the gain at `t = 0`.
pub fn sum_snr_pl(
    m: &PathlossModel,
    p: &ScenarioParams,
    alpha: f64,
    eval: Evaluation,
    fit: &FitOptions,
) -> Result<SumSnr> {
    p.validate()?;
    let norm = 1.0 / (p.k as f64 * m.mean_path_gain(crate::pathloss::distance_at(p, 0.0))?);
    match eval {
        Evaluation::Exact(s) => Ok(pathgain_terms(m, p)?.worst_case(alpha, p.t, s).scaled(norm)),
        Evaluation::Affine => {
            let om = fit.omega(p)?;
            let pl = fit.pathgain(m, p)?;
            let (c1, c2) = pl.coefficients(p.k, p.t);
            let x = (alpha - om.slope) * p.t / 2.0;
            Ok(affine_worst_case(p.k, x, c1, c2, c1 * p.k as f64)?.scaled(norm))
        }
    }
}

/// Antenna-response sum-SNR normalised by `K (|g0|^2 + |g1|^2)/2` at the
/// first packet's arrival angle.
pub fn sum_snr_phi(
    p: &ScenarioParams,
    ant: &AntennaPair,
    alpha: f64,
    eval: Evaluation,
) -> Result<SumSnr> {
    p.validate()?;
    let r = ant.responses(p)?;
    let norm = 1.0 / (p.k as f64 * r[0].mean_power());
    match eval {
        Evaluation::Exact(s) => Ok(antenna_terms(p, ant)?
            .worst_case(alpha, p.t, s)
            .scaled(norm)),
        Evaluation::Affine => {
            let ph = fit_antenna_phase_diff(&r, p.t)?;
            let gp = fit_antenna_gain_product(&r, p.t)?;
            let (c1, c2) = gp.coefficients(p.k, p.t);
            let x = (alpha - ph.slope) * p.t / 2.0;
            let reference: f64 = r.iter().map(Response::mean_power).sum();
            Ok(affine_worst_case(p.k, x, c1, c2, reference)?.scaled(norm))
        }
    }
}

/// Combined sum-SNR, not normalised (multiply by `P_t / sigma_n^2` for an
/// absolute SNR).
///
/// The affine variant multiplies the path-gain and gain-product fits to
/// first order, `b = b_pl b_g`, `a = a_pl b_g + a_g b_pl`, and shifts the
/// slope by both `a_Omega` and `a_PH`.
pub fn sum_snr_combined(
    m: &PathlossModel,
    p: &ScenarioParams,
    ant: &AntennaPair,
    alpha: f64,
    eval: Evaluation,
    fit: &FitOptions,
) -> Result<SumSnr> {
    p.validate()?;
    match eval {
        Evaluation::Exact(s) => Ok(combined_terms(m, p, ant)?.worst_case(alpha, p.t, s)),
        Evaluation::Affine => {
            let r = ant.responses(p)?;
            let om = fit.omega(p)?;
            let pl = fit.pathgain(m, p)?;
            let ph = fit_antenna_phase_diff(&r, p.t)?;
            let gp = fit_antenna_gain_product(&r, p.t)?;
            let w = AffineModel {
                slope: pl.slope * gp.intercept + gp.slope * pl.intercept,
                intercept: pl.intercept * gp.intercept,
                method: gp.method,
                window: gp.window,
            };
            w.check_positive(p.k, p.t)?;
            let (c1, c2) = w.coefficients(p.k, p.t);
            let x = (alpha - om.slope - ph.slope) * p.t / 2.0;
            let reference: f64 = r
                .iter()
                .enumerate()
                .map(|(k, r)| pl.at(k as f64 * p.t) * r.mean_power())
                .sum();
            affine_worst_case(p.k, x, c1, c2, reference)
        }
    }
}
