//! Power-law average path gain with a log-normal shadowing mean correction.
//!
//! Shadowing is treated as block fading over the burst: a single realisation
//! per burst, so only its mean multiplier `mu_x = E{10^(-X/10)}` enters the
//! average gain. Sampled shadowing traces are not simulated.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ScenarioParams;

/// Shadowing decorrelation distance of the WINNER+B1 highway model (m).
/// Documentation only; block fading means it never enters a computation.
pub const SHADOWING_DECORRELATION_M: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossModel {
    /// Reference path gain at `d_ref` (linear).
    pub a0: f64,
    /// Reference distance (m).
    pub d_ref: f64,
    /// Path-loss exponent.
    pub n_e: f64,
    /// Shadowing standard deviation (dB).
    pub sigma_sh: f64,
    /// Mean shadowing multiplier derived from `sigma_sh`.
    pub mu_x: f64,
    /// Distance up to which the power law is trusted (m).
    pub validity: f64,
}

/// On-disk form of [`PathlossModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossConfig {
    pub a0_log10: f64,
    pub d_ref_m: f64,
    pub n_e: f64,
    pub sigma_sh_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity_m: Option<f64>,
}

/// `E{10^(-X/10)}` for zero-mean Gaussian `X` with standard deviation `sigma_db`.
pub fn shadowing_mean(sigma_db: f64) -> f64 {
    ((std::f64::consts::LN_10 * sigma_db).powi(2) / 200.0).exp()
}

impl PathlossModel {
    pub fn new(a0: f64, d_ref: f64, n_e: f64, sigma_sh: f64) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidModel(m.to_string()));
        if !(a0 > 0.0 && a0.is_finite()) {
            return bad("A0 must be positive");
        }
        if !(d_ref > 0.0 && d_ref.is_finite()) {
            return bad("d_ref must be positive");
        }
        if !(n_e > 0.0 && n_e.is_finite()) {
            return bad("n_e must be positive");
        }
        if !(sigma_sh >= 0.0 && sigma_sh.is_finite()) {
            return bad("sigma_sh must be non-negative");
        }
        Ok(PathlossModel {
            a0,
            d_ref,
            n_e,
            sigma_sh,
            mu_x: shadowing_mean(sigma_sh),
            validity: f64::INFINITY,
        })
    }

    /// WINNER+B1 highway LOS at 5.9 GHz with 1.5 m antenna heights.
    ///
    /// `A0` is the path gain at 3 m, i.e. the inverse of the 53.2 dB
    /// reference loss.
    pub fn winner_b1() -> Self {
        PathlossModel {
            validity: 177.0,
            ..PathlossModel::new(10f64.powf(-5.32), 3.0, 2.27, 3.0).expect("constants are valid")
        }
    }

    pub fn with_validity(mut self, validity: f64) -> Self {
        self.validity = validity;
        self
    }

    pub fn from_config(cfg: &PathlossConfig) -> Result<Self> {
        let m = PathlossModel::new(
            10f64.powf(cfg.a0_log10),
            cfg.d_ref_m,
            cfg.n_e,
            cfg.sigma_sh_db,
        )?;
        match cfg.validity_m {
            Some(v) if !(v > 0.0) => Err(Error::InvalidModel("validity_m must be positive".into())),
            Some(v) => Ok(m.with_validity(v)),
            None => Ok(m),
        }
    }

    pub fn to_config(&self) -> PathlossConfig {
        PathlossConfig {
            a0_log10: self.a0.log10(),
            d_ref_m: self.d_ref,
            n_e: self.n_e,
            sigma_sh_db: self.sigma_sh,
            validity_m: self.validity.is_finite().then_some(self.validity),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: PathlossConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        PathlossModel::from_config(&cfg)
    }

    /// Average path gain at distance `d`; below `d_ref` it is held at the
    /// reference value.
    pub fn mean_path_gain(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::NonPositiveDistance(d));
        }
        let d = d.max(self.d_ref);
        Ok(self.mu_x * self.a0 * (self.d_ref / d).powf(self.n_e))
    }

    pub fn validity_horizon(&self) -> f64 {
        self.validity
    }

    /// True when any distance exceeds the validity horizon.
    pub fn exceeds_horizon(&self, max_distance: f64) -> bool {
        max_distance > self.validity
    }
}

impl Default for PathlossModel {
    fn default() -> Self {
        PathlossModel::winner_b1()
    }
}

/// Centre-to-centre distance at time `t`, ignoring the antenna separation.
pub fn distance_at(p: &ScenarioParams, t: f64) -> f64 {
    p.longitudinal(t).hypot(p.dy)
}

/// Smallest and largest centre distance over `[0, (K - 1) T]`.
pub fn distance_range(p: &ScenarioParams) -> (f64, f64) {
    let end = p.window_end();
    let a = distance_at(p, 0.0);
    let b = distance_at(p, end);
    let mut lo = a.min(b);
    // the longitudinal offset may cross zero inside the window
    if p.delta_v != 0.0 {
        let t_cross = -p.dx / p.delta_v;
        if t_cross > 0.0 && t_cross < end {
            lo = p.dy.abs();
        }
    }
    (lo, a.max(b))
}

/// Exact average path gain at the packet instants.
pub fn packet_gains(m: &PathlossModel, p: &ScenarioParams) -> Result<Vec<f64>> {
    p.packet_times()
        .map(|t| m.mean_path_gain(distance_at(p, t)))
        .collect()
}
