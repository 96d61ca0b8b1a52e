//! Two-vehicle highway geometry.
//!
//! The transmitting vehicle starts at the origin. The receiving vehicle
//! starts at `(dx, dy)` and moves longitudinally at `delta_v` relative to
//! the transmitter, so its centre is at `(dx + delta_v * t, dy)`.
//!
//! The two receive antennas sit on the receiver's lateral axis. Antenna 0 is
//! at lateral offset `+delta_a / 2` and antenna 1 at `-delta_a / 2`. This is
//! the sign order of the two radicals in the relative-phase expression and
//! fixes the sign of `a_omega`; the opposite convention negates Omega.
//!
//! Azimuth angles are measured from the +x axis (direction of travel) with
//! the four-quadrant arctangent and wrapped to `[0, 2*pi)`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Carrier frequency of ITS-G5 / C-V2X at 5.9 GHz.
pub const CARRIER_5_9_GHZ: f64 = 5.9e9;

pub fn wavelength(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}

pub fn kmh_to_ms(v: f64) -> f64 {
    v / 3.6
}

pub fn ms_to_kmh(v: f64) -> f64 {
    v * 3.6
}

/// Highway geometry, kinematics and burst timing. All fields are SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    /// Initial longitudinal offset of the receiver (m).
    pub dx: f64,
    /// Lateral offset of the receiver (m).
    pub dy: f64,
    /// Speed difference `v_r - v_t` (m/s).
    pub delta_v: f64,
    /// Receive antenna separation (m).
    pub delta_a: f64,
    /// Carrier wavelength (m).
    pub lambda: f64,
    /// Burst length in packets.
    pub k: usize,
    /// Packet repetition interval (s).
    pub t: f64,
}

impl ScenarioParams {
    pub fn new(
        dx: f64,
        dy: f64,
        delta_v: f64,
        delta_a: f64,
        lambda: f64,
        k: usize,
        t: f64,
    ) -> Result<Self> {
        let p = ScenarioParams {
            dx,
            dy,
            delta_v,
            delta_a,
            lambda,
            k,
            t,
        };
        p.validate()?;
        Ok(p)
    }

    /// The headline configuration: K = 10, T = 0.1 s, 5.9 GHz, 10-lambda
    /// separation, receiver 30 m ahead and one lane (4 m) to the right,
    /// closing at 60 km/h.
    pub fn highway() -> Self {
        let lambda = wavelength(CARRIER_5_9_GHZ);
        ScenarioParams {
            dx: 30.0,
            dy: -4.0,
            delta_v: kmh_to_ms(-60.0),
            delta_a: 10.0 * lambda,
            lambda,
            k: 10,
            t: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidScenario(m.to_string()));
        if self.k < 2 {
            return bad("burst length K must be at least 2");
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad("repetition interval T must be positive");
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("wavelength must be positive");
        }
        if !(self.delta_a >= 0.0 && self.delta_a.is_finite()) {
            return bad("antenna separation must be non-negative");
        }
        if !(self.dx.is_finite() && self.dy.is_finite() && self.delta_v.is_finite()) {
            return bad("positions and speeds must be finite");
        }
        Ok(())
    }

    pub fn with_dx(mut self, dx: f64) -> Self {
        self.dx = dx;
        self
    }

    pub fn with_dy(mut self, dy: f64) -> Self {
        self.dy = dy;
        self
    }

    pub fn with_speed_kmh(mut self, kmh: f64) -> Self {
        self.delta_v = kmh_to_ms(kmh);
        self
    }

    pub fn with_delta_a(mut self, delta_a: f64) -> Self {
        self.delta_a = delta_a;
        self
    }

    /// Antenna separation expressed in wavelengths.
    pub fn with_separation_wavelengths(mut self, n: f64) -> Self {
        self.delta_a = n * self.lambda;
        self
    }

    pub fn with_burst(mut self, k: usize, t: f64) -> Self {
        self.k = k;
        self.t = t;
        self
    }

    /// Time of packet `k`.
    pub fn packet_time(&self, k: usize) -> f64 {
        k as f64 * self.t
    }

    pub fn packet_times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.k).map(move |k| self.packet_time(k))
    }

    /// End of the fit window, `(K - 1) T`.
    pub fn window_end(&self) -> f64 {
        (self.k - 1) as f64 * self.t
    }

    /// Longitudinal offset at time `t`.
    pub fn longitudinal(&self, t: f64) -> f64 {
        self.dx + self.delta_v * t
    }
}

/// Distances from the transmit antenna to receive antennas 0 and 1.
pub fn propagation_distances(p: &ScenarioParams, t: f64) -> (f64, f64) {
    let u = p.longitudinal(t);
    let half = p.delta_a / 2.0;
    let d0 = u.hypot(p.dy + half);
    let d1 = u.hypot(p.dy - half);
    (d0, d1)
}

/// Relative phase of antenna 1 with respect to antenna 0, `2*pi/lambda * (d1 - d0)`.
///
/// Not wrapped; the value is continuous in `t`.
pub fn omega_exact(p: &ScenarioParams, t: f64) -> f64 {
    let u = p.longitudinal(t);
    let half = p.delta_a / 2.0;
    // d1 - d0 = (r1^2 - r0^2) / (r1 + r0) avoids cancellation at long range
    let r0 = u.hypot(p.dy + half);
    let r1 = u.hypot(p.dy - half);
    let sum = r0 + r1;
    if sum == 0.0 {
        return 0.0;
    }
    let diff = -4.0 * p.dy * half / sum;
    TAU / p.lambda * diff
}

/// Angle of arrival of the line-of-sight path at time `t`, in `[0, 2*pi)`.
pub fn aoa_exact(p: &ScenarioParams, t: f64) -> Result<f64> {
    let u = p.longitudinal(t);
    if u == 0.0 && p.dy == 0.0 {
        return Err(Error::DegenerateGeometry { t });
    }
    Ok(wrap_angle(p.dy.atan2(u)))
}

/// Wrap an angle to `[0, 2*pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can return exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Smallest signed difference between two angles, in `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Time grid over `[0, (K - 1) T]` with the given step (default `T / 10`).
///
/// The step is rounded so that it divides `T`; every packet instant `kT` is
/// then a grid point.
pub fn curve_times(p: &ScenarioParams, step: Option<f64>) -> Vec<f64> {
    let step = step.unwrap_or(p.t / 10.0);
    let per_packet = ((p.t / step).round() as usize).max(1);
    let sub = p.t / per_packet as f64;
    let mut out = Vec::with_capacity((p.k - 1) * per_packet + 1);
    for k in 0..p.k - 1 {
        for j in 0..per_packet {
            out.push(p.packet_time(k) + j as f64 * sub);
        }
    }
    out.push(p.window_end());
    out
}
