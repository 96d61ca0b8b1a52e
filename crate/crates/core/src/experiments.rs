//! Sweep drivers producing tabular results.
//!
//! Every driver returns a [`SweepResult`]: one independent column, any number
//! of named series of the same length, and free-form metadata written as
//! `#` comment lines ahead of the CSV header.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::affine::{ls_omega, ls_pathgain, taylor_omega, taylor_pathgain, window_centre};
use crate::antenna::{alignment_offset, worst_case_aoa, AntennaPattern};
use crate::error::{Error, Result};
use crate::geometry::{aoa_exact, curve_times, ms_to_kmh, omega_exact, ScenarioParams};
use crate::pathloss::{distance_at, distance_range, PathlossModel};
use crate::snr::{
    interval_bound, loss, loss_bounds, loss_to_db, optimal_slope_set, slope_for_index,
    sum_snr_combined, sum_snr_omega, sum_snr_phi, sum_snr_pl, AntennaPair, Evaluation, FitOptions,
    SumSnr, YSearch,
};

/// Transmit power of the headline link budget (dBm).
pub const DEFAULT_TX_POWER_DBM: f64 = 23.0;
/// Receiver noise power of the headline link budget (dBm).
pub const DEFAULT_NOISE_DBM: f64 = -95.0;
/// Default speed-grid step (km/h).
pub const DEFAULT_SPEED_STEP_KMH: f64 = 1.0;
/// Default `x` grid step (rad).
pub const DEFAULT_X_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub independent_name: String,
    pub independent: Vec<f64>,
    pub series: Vec<Series>,
    pub metadata: Vec<(String, String)>,
}

impl SweepResult {
    pub fn new(independent_name: impl Into<String>, independent: Vec<f64>) -> Self {
        SweepResult {
            independent_name: independent_name.into(),
            independent,
            series: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push_series(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.independent.len() {
            return Err(Error::InvalidScenario(format!(
                "series {name} has {} values for {} grid points",
                values.len(),
                self.independent.len()
            )));
        }
        self.series.push(Series { name, values });
        Ok(())
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.values.as_slice())
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &str> {
        self.metadata
            .iter()
            .filter(|(k, _)| k == "warning")
            .map(|(_, v)| v.as_str())
    }

    /// Record the wall-clock time of the run. Off by default so that repeated
    /// runs produce identical files.
    pub fn stamp(&mut self) {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.meta("timestamp_unix", secs);
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let mut head = String::new();
        for (k, v) in &self.metadata {
            writeln!(head, "# {k}: {v}").expect("writing to a String");
        }
        out.write_all(head.as_bytes())
            .map_err(|e| Error::io("<csv>", e))?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.independent_name.clone()];
        header.extend(self.series.iter().map(|s| s.name.clone()));
        w.write_record(&header)?;
        for (i, x) in self.independent.iter().enumerate() {
            let mut row = vec![x.to_string()];
            row.extend(self.series.iter().map(|s| s.values[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Write to `path` through a temporary sibling file and a rename.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out.csv".into());
        let tmp = path.with_file_name(format!(".{file_name}.tmp"));
        let body = self.to_csv_string();
        std::fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    /// A gnuplot script that plots every series of `csv_path` against the
    /// independent variable.
    pub fn gnuplot_script(&self, csv_path: &str) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\nset key autotitle columnhead\nset grid\n");
        writeln!(s, "set xlabel '{}'", self.independent_name).expect("String write");
        let plots: Vec<String> = (0..self.series.len())
            .map(|i| format!("'{csv_path}' using 1:{} with lines", i + 2))
            .collect();
        writeln!(s, "plot {}", plots.join(", \\\n     ")).expect("String write");
        s
    }
}

/// `n`-point inclusive uniform grid.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Inclusive grid from `lo` to `hi` with the given step; `hi` is always the
/// last point.
pub fn stepped_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize + 1;
    linspace(lo, hi, n.max(2))
}

/// `x` grid over `[0, pi]` at the default step.
pub fn default_x_grid() -> Vec<f64> {
    stepped_grid(0.0, PI, DEFAULT_X_STEP)
}

/// Speeds from -60 to 60 km/h at the default step.
pub fn default_speed_grid() -> Vec<f64> {
    stepped_grid(-60.0, 60.0, DEFAULT_SPEED_STEP_KMH)
}

/// Loss and its bounds over an `x` grid.
pub fn loss_curve(k: usize, c1: f64, c2: f64, x_grid: &[f64]) -> Result<SweepResult> {
    let mut r = SweepResult::new("x_rad", x_grid.to_vec());
    let l: Vec<f64> = x_grid
        .iter()
        .map(|&x| loss(k, x, c1, c2))
        .collect::<Result<_>>()?;
    let (lo, hi): (Vec<f64>, Vec<f64>) = x_grid.iter().map(|&x| loss_bounds(k, x)).unzip();
    r.meta("K", k);
    r.meta("c1", c1);
    r.meta("c2", c2);
    r.meta("interval_bound", interval_bound(k));
    r.push_series("loss", l)?;
    r.push_series("lower_bound", lo)?;
    r.push_series("upper_bound", hi)?;
    Ok(r)
}

/// Path-gain loss curves for several speeds, using Taylor fits at the window
/// centre, together with the speed-independent bounds.
pub fn pathgain_loss_curves(
    model: &PathlossModel,
    template: &ScenarioParams,
    speeds_kmh: &[f64],
    x_grid: &[f64],
) -> Result<SweepResult> {
    let mut r = SweepResult::new("x_rad", x_grid.to_vec());
    r.meta("K", template.k);
    r.meta("dx_m", template.dx);
    r.meta("dy_m", template.dy);
    r.meta("fit", "taylor(t0=(K-1)T/2)");
    for &v in speeds_kmh {
        let p = template.with_speed_kmh(v);
        let fit = taylor_pathgain(model, &p, window_centre(&p))?;
        let (c1, c2) = fit.coefficients(p.k, p.t);
        let l = x_grid
            .iter()
            .map(|&x| loss(p.k, x, c1, c2))
            .collect::<Result<_>>()?;
        r.push_series(format!("loss_dv{v:+}kmh"), l)?;
    }
    let (lo, hi): (Vec<f64>, Vec<f64>) = x_grid.iter().map(|&x| loss_bounds(template.k, x)).unzip();
    r.push_series("lower_bound", lo)?;
    r.push_series("upper_bound", hi)?;
    Ok(r)
}

/// Where the Taylor model of Omega is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TaylorPoint {
    Start,
    #[default]
    Centre,
    At(f64),
}

impl TaylorPoint {
    pub fn time(&self, p: &ScenarioParams) -> f64 {
        match *self {
            TaylorPoint::Start => 0.0,
            TaylorPoint::Centre => window_centre(p),
            TaylorPoint::At(t) => t,
        }
    }
}

/// Extremes of `a_Omega T / 2` over a speed grid and a set of lateral offsets.
pub fn half_shift_extremes(
    template: &ScenarioParams,
    speeds_kmh: &[f64],
    dy_set: &[f64],
    at: TaylorPoint,
) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &dy in dy_set {
        for &v in speeds_kmh {
            let p = template.with_dy(dy).with_speed_kmh(v);
            let s = taylor_omega(&p, at.time(&p))?.slope * p.t / 2.0;
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    Ok((lo, hi))
}

/// Per `dx`: minimum, maximum and largest magnitude of `a_Omega T / 2`.
pub fn a_omega_range(
    template: &ScenarioParams,
    dx_grid: &[f64],
    speeds_kmh: &[f64],
    dy_set: &[f64],
    at: TaylorPoint,
) -> Result<SweepResult> {
    let mut r = SweepResult::new("dx_m", dx_grid.to_vec());
    let mut mins = Vec::with_capacity(dx_grid.len());
    let mut maxs = Vec::with_capacity(dx_grid.len());
    for &dx in dx_grid {
        let (lo, hi) = half_shift_extremes(&template.with_dx(dx), speeds_kmh, dy_set, at)?;
        mins.push(lo);
        maxs.push(hi);
    }
    let abs: Vec<f64> = mins
        .iter()
        .zip(&maxs)
        .map(|(a, b)| a.abs().max(b.abs()))
        .collect();
    r.meta("delta_a_m", template.delta_a);
    r.meta("K", template.k);
    r.meta("T_s", template.t);
    r.meta("taylor_point", format!("{at:?}"));
    r.meta("dy_set_m", format!("{dy_set:?}"));
    r.meta(
        "speed_range_kmh",
        format!(
            "[{}, {}]",
            speeds_kmh.first().copied().unwrap_or(0.0),
            speeds_kmh.last().copied().unwrap_or(0.0)
        ),
    );
    r.push_series("min_half_shift_rad", mins)?;
    r.push_series("max_half_shift_rad", maxs)?;
    r.push_series("max_abs_half_shift_rad", abs)?;
    Ok(r)
}

/// Smallest `dx` on the grid from which on every larger grid distance keeps
/// `max |a_Omega| T / 2` strictly below `threshold`.
pub fn min_safe_distance(range: &SweepResult, threshold: f64) -> Option<f64> {
    let abs = range.series("max_abs_half_shift_rad")?;
    let mut best = None;
    for (i, &dx) in range.independent.iter().enumerate().rev() {
        if abs[i] < threshold {
            best = Some(dx);
        } else {
            break;
        }
    }
    best
}

/// Which time variation is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Relative propagation phase only, normalised by `K`.
    Omega,
    /// Average path gain (and Omega when `dy != 0`), normalised by `K A(0)`.
    Pathgain,
    /// Antenna responses only, normalised by the first-packet mean power.
    Antenna,
    /// Everything, absolute SNR from the link budget.
    Combined,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Omega => "omega",
            Mode::Pathgain => "pl",
            Mode::Antenna => "phi",
            Mode::Combined => "combined",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omega" => Ok(Mode::Omega),
            "pl" => Ok(Mode::Pathgain),
            "phi" => Ok(Mode::Antenna),
            "combined" => Ok(Mode::Combined),
            other => Err(Error::InvalidScenario(format!(
                "unknown mode {other}; expected omega, pl, phi or combined"
            ))),
        }
    }
}

/// Arrival-angle alignment of the antenna patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArrivalAlignment {
    /// Rotate so the first packet arrives from the direction minimising the
    /// mean antenna power.
    WorstCase,
    /// Use the geometric arrival angle plus a fixed offset.
    Offset(f64),
}

/// Phase slope with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledSlope {
    pub label: String,
    pub alpha: f64,
}

impl LabelledSlope {
    /// `q 2 pi / (K T)`, labelled `q<q>`.
    pub fn indexed(q: usize, k: usize, t: f64) -> Self {
        LabelledSlope {
            label: format!("q{q}"),
            alpha: slope_for_index(q, k, t),
        }
    }
}

/// The slopes `q = 1..ceil((K-1)/2)`; the rest mirror them.
pub fn half_slope_set(k: usize, t: f64) -> Vec<LabelledSlope> {
    (1..=(k / 2))
        .map(|q| LabelledSlope::indexed(q, k, t))
        .collect()
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub mode: Mode,
    pub template: ScenarioParams,
    pub slopes: Vec<LabelledSlope>,
    pub speeds_kmh: Vec<f64>,
    pub dy_set: Vec<f64>,
    pub exact: bool,
    pub affine: bool,
    pub y_search: YSearch,
    pub fit: FitOptions,
    pub model: PathlossModel,
    pub patterns: Option<(AntennaPattern, AntennaPattern)>,
    pub alignment: ArrivalAlignment,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
}

impl SweepConfig {
    /// Headline configuration for `mode`: `dy in {-4, 4}` (same lane for the
    /// path-gain mode), both evaluations, slopes `q = 1..K/2`, isotropic
    /// antennas, WINNER+B1 path gain.
    pub fn new(mode: Mode) -> Self {
        let template = ScenarioParams::highway();
        let dy_set = match mode {
            Mode::Pathgain => vec![0.0],
            _ => vec![-4.0, 4.0],
        };
        SweepConfig {
            mode,
            slopes: half_slope_set(template.k, template.t),
            template,
            speeds_kmh: default_speed_grid(),
            dy_set,
            exact: true,
            affine: true,
            y_search: YSearch::Analytic,
            fit: FitOptions::default(),
            model: PathlossModel::winner_b1(),
            patterns: None,
            alignment: ArrivalAlignment::WorstCase,
            tx_power_dbm: DEFAULT_TX_POWER_DBM,
            noise_dbm: DEFAULT_NOISE_DBM,
        }
    }

    fn link_gain(&self) -> f64 {
        10f64.powf((self.tx_power_dbm - self.noise_dbm) / 10.0)
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

/// Worst case over `dy` of the sum-SNR (dB) for each speed and slope.
///
/// Columns: `reference_db` (zero-loss reference, lowest over `dy`), then
/// `<label>_exact_db` and/or `<label>_affine_db` per slope. Affine points
/// whose fits are invalid become NaN with a warning in the metadata.
pub fn speed_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.template.validate()?;
    let iso = AntennaPattern::isotropic();
    let (p0, p1) = match &cfg.patterns {
        Some((a, b)) => (a, b),
        None => (&iso, &iso),
    };
    let phi_min = worst_case_aoa(p0, p1);

    let mut r = SweepResult::new("delta_v_kmh", cfg.speeds_kmh.clone());
    r.meta("mode", cfg.mode.name());
    r.meta("dx_m", cfg.template.dx);
    r.meta("dy_set_m", fmt_list(&cfg.dy_set));
    r.meta("delta_a_m", cfg.template.delta_a);
    r.meta("lambda_m", cfg.template.lambda);
    r.meta("K", cfg.template.k);
    r.meta("T_s", cfg.template.t);
    r.meta("y_search", format!("{:?}", cfg.y_search));
    if cfg.affine {
        r.meta("fit", format!("{:?}", cfg.fit));
        r.meta(
            "affine",
            "approximation: first-order fits per factor with closed-form loss",
        );
    }
    match cfg.mode {
        Mode::Combined => {
            r.meta("units", "dB absolute, P_t/sigma^2 applied");
            r.meta("tx_power_dbm", cfg.tx_power_dbm);
            r.meta("noise_dbm", cfg.noise_dbm);
        }
        _ => r.meta("units", "dB relative to the zero-loss static reference"),
    }
    if matches!(cfg.mode, Mode::Pathgain | Mode::Combined) {
        r.meta("pathloss", format!("{:?}", cfg.model.to_config()));
    }
    if matches!(cfg.mode, Mode::Antenna | Mode::Combined) {
        r.meta(
            "patterns",
            if cfg.patterns.is_some() {
                "custom"
            } else {
                "isotropic"
            },
        );
        r.meta("alignment", format!("{:?}", cfg.alignment));
        r.meta("phi_min_deg", phi_min.to_degrees());
    }

    let scale = match cfg.mode {
        Mode::Combined => cfg.link_gain(),
        _ => 1.0,
    };

    let mut horizon_warned = false;
    let n = cfg.speeds_kmh.len();
    let mut reference = vec![f64::INFINITY; n];
    let mut exact: Vec<Vec<f64>> = vec![vec![f64::INFINITY; n]; cfg.slopes.len()];
    let mut affine: Vec<Vec<f64>> = vec![vec![f64::INFINITY; n]; cfg.slopes.len()];
    let mut affine_failures = Vec::new();

    for &dy in &cfg.dy_set {
        let base = cfg.template.with_dy(dy);
        let offset = match cfg.alignment {
            ArrivalAlignment::WorstCase => alignment_offset(&base, phi_min)?,
            ArrivalAlignment::Offset(o) => o,
        };
        let ant = AntennaPair::new(p0, p1, offset);
        for (i, &v) in cfg.speeds_kmh.iter().enumerate() {
            let p = base.with_speed_kmh(v);
            if !horizon_warned
                && matches!(cfg.mode, Mode::Pathgain | Mode::Combined)
                && cfg.model.exceeds_horizon(distance_range(&p).1)
            {
                r.meta(
                    "warning",
                    format!(
                        "distance exceeds the path-loss validity horizon of {} m",
                        cfg.model.validity_horizon()
                    ),
                );
                horizon_warned = true;
            }
            let eval = |alpha: f64, e: Evaluation| -> Result<SumSnr> {
                match cfg.mode {
                    Mode::Omega => sum_snr_omega(&p, alpha, e, &cfg.fit),
                    Mode::Pathgain => sum_snr_pl(&cfg.model, &p, alpha, e, &cfg.fit),
                    Mode::Antenna => sum_snr_phi(&p, &ant, alpha, e),
                    Mode::Combined => sum_snr_combined(&cfg.model, &p, &ant, alpha, e, &cfg.fit),
                }
            };
            for (j, s) in cfg.slopes.iter().enumerate() {
                if cfg.exact {
                    let out = eval(s.alpha, Evaluation::Exact(cfg.y_search))?;
                    exact[j][i] = exact[j][i].min(10.0 * (out.value * scale).log10());
                    reference[i] = reference[i].min(10.0 * (out.reference * scale).log10());
                }
                if cfg.affine {
                    match eval(s.alpha, Evaluation::Affine) {
                        Ok(out) => {
                            affine[j][i] = affine[j][i].min(10.0 * (out.value * scale).log10());
                            if !cfg.exact {
                                reference[i] =
                                    reference[i].min(10.0 * (out.reference * scale).log10());
                            }
                        }
                        Err(e) => {
                            affine[j][i] = f64::NAN;
                            affine_failures.push(format!("dv={v} dy={dy} {}: {e}", s.label));
                        }
                    }
                }
            }
        }
    }
    if !affine_failures.is_empty() {
        r.meta(
            "warning",
            format!(
                "affine model invalid at {} point(s), written as NaN; first: {}",
                affine_failures.len(),
                affine_failures[0]
            ),
        );
    }
    r.push_series("reference_db", reference)?;
    for (j, s) in cfg.slopes.iter().enumerate() {
        if cfg.exact {
            r.push_series(format!("{}_exact_db", s.label), exact[j].clone())?;
        }
        if cfg.affine {
            r.push_series(format!("{}_affine_db", s.label), affine[j].clone())?;
        }
    }
    Ok(r)
}

/// Largest `reference - value` (dB) over the sweep for one series.
pub fn dip_depth(r: &SweepResult, series: &str) -> Option<f64> {
    let reference = r.series("reference_db")?;
    let values = r.series(series)?;
    Some(
        reference
            .iter()
            .zip(values)
            .filter(|(a, b)| a.is_finite() && !b.is_nan())
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Worst-case path-gain losses at `alpha = q 2 pi / (K T)`, `q = 1..K-1`.
///
/// `upper_bound_db` is `10 log10(1 - U(q pi / K))` with `U` the
/// slope-independent upper bound, so it holds for every speed and distance.
/// `loss_db` is the actual worst case for the given scenario under the
/// Taylor path-gain fit.
pub fn pl_slope_losses(model: &PathlossModel, p: &ScenarioParams) -> Result<SweepResult> {
    let qs: Vec<f64> = (1..p.k).map(|q| q as f64).collect();
    let mut r = SweepResult::new("q", qs);
    let fit = taylor_pathgain(model, p, window_centre(p))?;
    let om = taylor_omega(p, window_centre(p))?;
    let (c1, c2) = fit.coefficients(p.k, p.t);
    let alphas = optimal_slope_set(p.k, p.t);
    let mut bound = Vec::new();
    let mut actual = Vec::new();
    for &a in &alphas {
        let x_nominal = a * p.t / 2.0;
        bound.push(loss_to_db(loss_bounds(p.k, x_nominal).1));
        let x = (a - om.slope) * p.t / 2.0;
        actual.push(loss_to_db(loss(p.k, x, c1, c2)?));
    }
    r.meta("K", p.k);
    r.meta("T_s", p.t);
    r.meta("dx_m", p.dx);
    r.meta("dy_m", p.dy);
    r.meta("delta_v_kmh", ms_to_kmh(p.delta_v));
    r.meta("pathloss", format!("{:?}", model.to_config()));
    r.push_series("alpha_rad_s", alphas)?;
    r.push_series("upper_bound_db", bound)?;
    r.push_series("loss_db", actual)?;
    Ok(r)
}

/// Exact and fitted curves of Omega, arrival angle and path gain over the
/// burst window.
pub fn exact_curves(
    model: &PathlossModel,
    p: &ScenarioParams,
    step: Option<f64>,
) -> Result<SweepResult> {
    let times = curve_times(p, step);
    let mut r = SweepResult::new("t_s", times.clone());
    let om_t = taylor_omega(p, window_centre(p))?;
    let om_ls = ls_omega(p)?;
    let omega: Vec<f64> = times.iter().map(|&t| omega_exact(p, t)).collect();
    let aoa: Vec<f64> = times
        .iter()
        .map(|&t| aoa_exact(p, t).map(f64::to_degrees))
        .collect::<Result<_>>()?;
    let gain: Vec<f64> = times
        .iter()
        .map(|&t| model.mean_path_gain(distance_at(p, t)))
        .collect::<Result<_>>()?;
    r.meta("dx_m", p.dx);
    r.meta("dy_m", p.dy);
    r.meta("delta_v_kmh", ms_to_kmh(p.delta_v));
    r.meta(
        "omega_taylor_max_dev_rad",
        om_t.max_deviation(&times, |t| omega_exact(p, t)),
    );
    r.meta(
        "omega_ls_max_dev_rad",
        om_ls.max_deviation(&times, |t| omega_exact(p, t)),
    );
    r.push_series("omega_rad", omega)?;
    r.push_series(
        "omega_taylor_rad",
        times.iter().map(|&t| om_t.at(t)).collect(),
    )?;
    r.push_series("omega_ls_rad", times.iter().map(|&t| om_ls.at(t)).collect())?;
    r.push_series("aoa_deg", aoa)?;
    r.push_series("path_gain", gain)?;
    match (
        taylor_pathgain(model, p, window_centre(p)),
        ls_pathgain(model, p),
    ) {
        (Ok(pt), Ok(pl)) => {
            let g = |t: f64| model.mean_path_gain(distance_at(p, t)).unwrap_or(f64::NAN);
            r.meta("pl_taylor_max_dev", pt.max_deviation(&times, g));
            r.meta("pl_ls_max_dev", pl.max_deviation(&times, g));
            r.push_series(
                "path_gain_taylor",
                times.iter().map(|&t| pt.at(t)).collect(),
            )?;
            r.push_series("path_gain_ls", times.iter().map(|&t| pl.at(t)).collect())?;
        }
        (Err(e), _) | (_, Err(e)) => r.meta("warning", format!("path-gain fit unavailable: {e}")),
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn csv_layout() {
        let mut r = SweepResult::new("x", vec![0.0, 0.5]);
        r.meta("K", 10);
        r.push_series("a", vec![1.0, 2.0]).unwrap();
        r.push_series("b", vec![f64::NAN, -0.25]).unwrap();
        assert_eq!(r.to_csv_string(), "# K: 10\nx,a,b\n0,1,NaN\n0.5,2,-0.25\n");
        assert!(r.push_series("c", vec![1.0]).is_err());
    }

    #[test]
    fn atomic_save_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("out.csv");
        let mut r = SweepResult::new("x", vec![1.0]);
        r.push_series("y", vec![2.0]).unwrap();
        r.save(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x,y\n1,2\n");
        let names: Vec<_> = std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn grids() {
        let g = default_speed_grid();
        assert_eq!(g.len(), 121);
        assert_eq!(g[0], -60.0);
        assert_eq!(g[120], 60.0);
        assert_relative_eq!(g[60], 0.0, epsilon = 1e-12);
        assert_eq!(default_x_grid().len(), 3143);
    }

    #[test]
    fn k5_curve_peaks_on_pole_set() {
        let r = loss_curve(5, 1.0, 0.0, &default_x_grid()).unwrap();
        let l = r.series("loss").unwrap();
        assert_eq!(l[0], 1.0);
        assert_eq!(*l.last().unwrap(), 1.0);
        assert_eq!(r.series("lower_bound").unwrap(), l);
    }

    #[test]
    fn omega_mode_static_is_zero_db() {
        let mut cfg = SweepConfig::new(Mode::Omega);
        cfg.speeds_kmh = vec![0.0];
        let r = speed_sweep(&cfg).unwrap();
        for s in &r.series {
            assert!(s.values[0].abs() < 1e-10, "{}: {}", s.name, s.values[0]);
        }
    }

    #[test]
    fn pl_losses_are_symmetric() {
        let p = ScenarioParams::highway().with_dy(0.0);
        let r = pl_slope_losses(&PathlossModel::winner_b1(), &p).unwrap();
        let b = r.series("upper_bound_db").unwrap();
        for q in 1..p.k {
            assert!((b[q - 1] - b[p.k - q - 1]).abs() < 1e-10);
        }
    }

    #[test]
    fn safe_distance_scan() {
        let mut r = SweepResult::new("dx_m", vec![1.0, 2.0, 3.0, 4.0]);
        r.push_series("max_abs_half_shift_rad", vec![0.1, 2.0, 0.5, 0.4])
            .unwrap();
        assert_eq!(min_safe_distance(&r, 1.0), Some(3.0));
        assert_eq!(min_safe_distance(&r, 0.3), None);
    }

    #[test]
    fn curves_cover_window() {
        let p = ScenarioParams::highway();
        let r = exact_curves(&PathlossModel::winner_b1(), &p, None).unwrap();
        assert_eq!(r.independent.len(), 91);
        assert!(r.series("path_gain_ls").is_some());
    }
}
