//! Tabulated azimuth far-field functions `g(phi)`.
//!
//! A pattern stores the field magnitude `|g|` (linear, not dB) and the
//! unwrapped phase on a strictly increasing azimuth grid in `[0, 2*pi)`.
//! Queries interpolate both linearly, closing the circle between the last
//! and the first grid point.
//!
//! # CSV format
//!
//! ```text
//! azimuth_deg,gain_dbi,phase_deg
//! 0,6.0,12.5
//! 1,5.98,12.4
//! ```
//!
//! `gain_dbi` is the power gain `|g|^2` in dBi, so the stored field
//! magnitude is `|g| = 10^(gain_dbi / 20)`.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{aoa_exact, wrap_angle, ScenarioParams};

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaPattern {
    azimuth: Vec<f64>,
    magnitude: Vec<f64>,
    phase: Vec<f64>,
}

/// Per-packet antenna response sampled at the angle of arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub mag0: f64,
    pub mag1: f64,
    pub phase0: f64,
    pub phase1: f64,
}

impl Response {
    /// `(|g0|^2 + |g1|^2) / 2`.
    pub fn mean_power(&self) -> f64 {
        (self.mag0 * self.mag0 + self.mag1 * self.mag1) / 2.0
    }

    /// `|g0 g1|`.
    pub fn gain_product(&self) -> f64 {
        self.mag0 * self.mag1
    }

    /// `arg g0 - arg g1`.
    pub fn phase_difference(&self) -> f64 {
        self.phase0 - self.phase1
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct PatternRow {
    azimuth_deg: f64,
    gain_dbi: f64,
    phase_deg: f64,
}

/// Remove 2*pi jumps between consecutive samples.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    for (i, &p) in phase.iter().enumerate() {
        if i > 0 {
            let prev = phase[i - 1];
            let jump = p - prev;
            offset -= TAU * (jump / TAU).round();
        }
        out.push(p + offset);
    }
    out
}

impl AntennaPattern {
    /// Build a pattern from radians, linear magnitudes and phases. Phases are
    /// unwrapped along the grid.
    pub fn new(azimuth: Vec<f64>, magnitude: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        if azimuth.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if azimuth.len() != magnitude.len() || azimuth.len() != phase.len() {
            return Err(Error::MalformedRow {
                line: azimuth.len().min(magnitude.len()).min(phase.len()) + 1,
                reason: "column lengths differ".into(),
            });
        }
        for (i, &a) in azimuth.iter().enumerate() {
            if !(0.0..TAU).contains(&a) {
                return Err(Error::MalformedRow {
                    line: i + 1,
                    reason: format!("azimuth {a} rad outside [0, 2pi)"),
                });
            }
            if i > 0 && a <= azimuth[i - 1] {
                return Err(Error::NonMonotonicAzimuth { line: i + 1 });
            }
            if !(magnitude[i] >= 0.0 && magnitude[i].is_finite()) {
                return Err(Error::MalformedRow {
                    line: i + 1,
                    reason: format!("magnitude {} is not finite and non-negative", magnitude[i]),
                });
            }
            if !phase[i].is_finite() {
                return Err(Error::MalformedRow {
                    line: i + 1,
                    reason: "phase is not finite".into(),
                });
            }
        }
        let phase = unwrap_phase(&phase);
        Ok(AntennaPattern {
            azimuth,
            magnitude,
            phase,
        })
    }

    /// Unit gain and zero phase in every direction.
    pub fn isotropic() -> Self {
        AntennaPattern {
            azimuth: vec![0.0],
            magnitude: vec![1.0],
            phase: vec![0.0],
        }
    }

    /// Tabulate `f(phi) -> (|g|, arg g)` on `n` uniformly spaced azimuths.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let az: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let (mag, ph): (Vec<f64>, Vec<f64>) = az.iter().map(|&a| f(a)).unzip();
        AntennaPattern::new(az, mag, ph)
    }

    pub fn len(&self) -> usize {
        self.azimuth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.azimuth.is_empty()
    }

    pub fn azimuth(&self) -> &[f64] {
        &self.azimuth
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    /// Magnitude and phase at azimuth `phi` (any real; reduced mod 2*pi).
    pub fn evaluate(&self, phi: f64) -> Result<(f64, f64)> {
        let n = self.azimuth.len();
        if n == 0 {
            return Err(Error::EmptyPattern);
        }
        if n == 1 {
            return Ok((self.magnitude[0], self.phase[0]));
        }
        let phi = wrap_angle(phi);
        let first = self.azimuth[0];
        let last = self.azimuth[n - 1];
        if phi >= first && phi < last {
            // index of the last grid point <= phi
            let i = self.azimuth.partition_point(|&a| a <= phi) - 1;
            let (a0, a1) = (self.azimuth[i], self.azimuth[i + 1]);
            let w = (phi - a0) / (a1 - a0);
            return Ok((
                lerp(self.magnitude[i], self.magnitude[i + 1], w),
                lerp(self.phase[i], self.phase[i + 1], w),
            ));
        }
        // closing segment from `last` to `first + 2*pi`
        let span = first + TAU - last;
        let along = if phi >= last {
            phi - last
        } else {
            phi + TAU - last
        };
        let w = along / span;
        let p_last = self.phase[n - 1];
        let p_first = self.phase[0] + TAU * ((p_last - self.phase[0]) / TAU).round();
        Ok((
            lerp(self.magnitude[n - 1], self.magnitude[0], w),
            lerp(p_last, p_first, w),
        ))
    }

    fn power(&self, phi: f64) -> f64 {
        let (m, _) = self.evaluate(phi).expect("pattern is non-empty");
        m * m
    }

    /// Rotate the pattern so that direction `phi` maps to `phi + offset`.
    pub fn rotated(&self, offset: f64) -> Result<Self> {
        let mut rows: Vec<(f64, f64, f64)> = self
            .azimuth
            .iter()
            .zip(&self.magnitude)
            .zip(&self.phase)
            .map(|((&a, &m), &p)| (wrap_angle(a + offset), m, p))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let az = rows.iter().map(|r| r.0).collect();
        let mag = rows.iter().map(|r| r.1).collect();
        let ph = rows.iter().map(|r| r.2).collect();
        AntennaPattern::new(az, mag, ph)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        AntennaPattern::from_reader(file)
    }

    pub fn from_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut az = Vec::new();
        let mut mag = Vec::new();
        let mut ph = Vec::new();
        for (i, row) in rdr.deserialize::<PatternRow>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| Error::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
            if !(row.azimuth_deg.is_finite()
                && row.gain_dbi.is_finite()
                && row.phase_deg.is_finite())
            {
                return Err(Error::MalformedRow {
                    line,
                    reason: "non-finite value".into(),
                });
            }
            if !(0.0..360.0).contains(&row.azimuth_deg) {
                return Err(Error::MalformedRow {
                    line,
                    reason: format!("azimuth {} deg outside [0, 360)", row.azimuth_deg),
                });
            }
            if let Some(&prev) = az.last() {
                if row.azimuth_deg.to_radians() <= prev {
                    return Err(Error::NonMonotonicAzimuth { line });
                }
            }
            az.push(row.azimuth_deg.to_radians());
            mag.push(10f64.powf(row.gain_dbi / 20.0));
            ph.push(row.phase_deg.to_radians());
        }
        AntennaPattern::new(az, mag, ph)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for i in 0..self.len() {
            let m = self.magnitude[i];
            let gain_dbi = if m > 0.0 { 20.0 * m.log10() } else { -300.0 };
            let phase = self.phase[i].rem_euclid(TAU);
            let phase = if phase > PI { phase - TAU } else { phase };
            w.serialize(PatternRow {
                azimuth_deg: self.azimuth[i].to_degrees(),
                gain_dbi,
                phase_deg: phase.to_degrees(),
            })?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + (b - a) * w
}

/// Number of uniform samples used by the coarse stage of [`worst_case_aoa`].
pub const AOA_SCAN_POINTS: usize = 36_000;

/// Direction minimising `(|g0|^2 + |g1|^2) / 2`.
///
/// Scans a 0.01 degree grid plus every tabulated azimuth of both patterns,
/// then refines inside the bracketing cell by golden-section search. Ties go
/// to the smallest angle.
pub fn worst_case_aoa(p0: &AntennaPattern, p1: &AntennaPattern) -> f64 {
    let cost = |phi: f64| (p0.power(phi) + p1.power(phi)) / 2.0;
    let step = TAU / AOA_SCAN_POINTS as f64;
    let mut candidates: Vec<f64> = (0..AOA_SCAN_POINTS).map(|i| i as f64 * step).collect();
    candidates.extend_from_slice(p0.azimuth());
    candidates.extend_from_slice(p1.azimuth());
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut best = (candidates[0], cost(candidates[0]));
    for &c in &candidates[1..] {
        let v = cost(c);
        if v < best.1 {
            best = (c, v);
        }
    }
    let (phi, value) = best;
    let (lo, hi) = (phi - step, phi + step);
    let refined = golden_section(&cost, lo, hi, 1e-12);
    if cost(refined) < value {
        wrap_angle(refined)
    } else {
        phi
    }
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Offset that rotates the arrival angle at `t = 0` onto `target`.
pub fn alignment_offset(scen: &ScenarioParams, target: f64) -> Result<f64> {
    Ok(target - aoa_exact(scen, 0.0)?)
}

/// Responses of both elements at `phi_k = aoa(kT) + phi0_offset`, `k = 0..K-1`.
pub fn sample_responses(
    p0: &AntennaPattern,
    p1: &AntennaPattern,
    scen: &ScenarioParams,
    phi0_offset: f64,
) -> Result<Vec<Response>> {
    scen.packet_times()
        .map(|t| {
            let phi = aoa_exact(scen, t)? + phi0_offset;
            let (mag0, phase0) = p0.evaluate(phi)?;
            let (mag1, phase1) = p1.evaluate(phi)?;
            Ok(Response {
                mag0,
                mag1,
                phase0,
                phase1,
            })
        })
        .collect()
}

/// Analytic element model used to generate the bundled synthetic patterns.
///
/// Power gain `G(phi) = G_max * (((1 + cos(phi - boresight)) / 2)^n * (1 - f) + f)`
/// where `f` is the linear front-to-back floor. The phase response is that of
/// a phase centre displaced by `phase_centre_offset` metres towards
/// boresight: `2*pi/lambda * r * cos(phi - boresight)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticElement {
    pub boresight: f64,
    pub peak_dbi: f64,
    pub exponent: f64,
    pub front_to_back_db: f64,
    pub phase_centre_offset: f64,
    pub lambda: f64,
}

impl SyntheticElement {
    /// Patch-like element: 6 dBi, squared cardioid lobe, 20 dB front-to-back,
    /// phase centre 0.3 lambda in front of the reference point.
    pub fn patch(boresight: f64, lambda: f64) -> Self {
        SyntheticElement {
            boresight,
            peak_dbi: 6.0,
            exponent: 2.0,
            front_to_back_db: 20.0,
            phase_centre_offset: 0.3 * lambda,
            lambda,
        }
    }

    /// Plain cardioid with a 25 dB floor and no phase-centre offset.
    pub fn cardioid(boresight: f64, lambda: f64) -> Self {
        SyntheticElement {
            boresight,
            peak_dbi: 3.0,
            exponent: 1.0,
            front_to_back_db: 25.0,
            phase_centre_offset: 0.0,
            lambda,
        }
    }

    pub fn response(&self, phi: f64) -> (f64, f64) {
        let c = (phi - self.boresight).cos();
        let floor = 10f64.powf(-self.front_to_back_db / 10.0);
        let lobe = ((1.0 + c) / 2.0).powf(self.exponent);
        let power = 10f64.powf(self.peak_dbi / 10.0) * (lobe * (1.0 - floor) + floor);
        let phase = TAU / self.lambda * self.phase_centre_offset * c;
        (power.sqrt(), phase)
    }

    pub fn tabulate(&self, points: usize) -> Result<AntennaPattern> {
        AntennaPattern::from_fn(points, |phi| self.response(phi))
    }
}

/// Forward- and backward-facing patch elements, tabulated at 1 degree.
pub fn back_to_back_patches(lambda: f64) -> Result<(AntennaPattern, AntennaPattern)> {
    Ok((
        SyntheticElement::patch(0.0, lambda).tabulate(360)?,
        SyntheticElement::patch(PI, lambda).tabulate(360)?,
    ))
}

/// Forward- and backward-facing cardioids, tabulated at 1 degree.
pub fn cardioid_pair(lambda: f64) -> Result<(AntennaPattern, AntennaPattern)> {
    Ok((
        SyntheticElement::cardioid(0.0, lambda).tabulate(360)?,
        SyntheticElement::cardioid(PI, lambda).tabulate(360)?,
    ))
}
