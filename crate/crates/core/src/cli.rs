//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `validate` finds a failing property, 2 on
//! usage or input errors. CSV output goes to `--out`, else to
//! `$ACN_OUT_DIR/<subcommand>.csv` when that variable is set, else stdout.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::antenna::{back_to_back_patches, cardioid_pair, AntennaPattern};
use crate::error::{Error, Result};
use crate::experiments::{
    a_omega_range, default_x_grid, loss_curve, min_safe_distance, pathgain_loss_curves,
    pl_slope_losses, speed_sweep, stepped_grid, ArrivalAlignment, LabelledSlope, Mode, SweepConfig,
    SweepResult, TaylorPoint, DEFAULT_NOISE_DBM, DEFAULT_TX_POWER_DBM,
};
use crate::geometry::{wavelength, ScenarioParams, CARRIER_5_9_GHZ};
use crate::pathloss::PathlossModel;
use crate::snr::{design_rule_alpha_star, design_rule_indices, FitKind, FitOptions, YSearch};
use crate::validate::{run_suite, SuiteConfig};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ACN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "acn",
    version,
    about = "Worst-case sum-SNR of a two-antenna analog combiner"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Loss function and its bounds over x in [0, pi].
    LossCurve(LossCurveArgs),
    /// Range of a_Omega T/2 against the longitudinal distance.
    AOmegaRange(AOmegaArgs),
    /// Worst-case sum-SNR against the speed difference.
    SpeedSweep(SpeedSweepArgs),
    /// Path-gain losses per slope in the optimal set.
    PlLosses(PlLossesArgs),
    /// Print the robust slope(s) alpha*.
    DesignRule(BurstArgs),
    /// Run the randomized invariant suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BurstArgs {
    /// Burst length.
    #[arg(long = "K", default_value_t = 10)]
    pub k: usize,
    /// Packet repetition interval (s).
    #[arg(long = "T", default_value_t = 0.1)]
    pub t: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script to this path.
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
    /// Record the run time in the CSV metadata.
    #[arg(long)]
    pub stamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    /// Initial longitudinal offset (m).
    #[arg(long, default_value_t = 30.0)]
    pub dx: f64,
    /// Antenna separation in wavelengths.
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
    /// Carrier frequency (Hz).
    #[arg(long, default_value_t = CARRIER_5_9_GHZ)]
    pub carrier: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SpeedGridArgs {
    /// Lowest speed difference (km/h).
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    pub speed_min: f64,
    /// Highest speed difference (km/h).
    #[arg(long, default_value_t = 60.0, allow_hyphen_values = true)]
    pub speed_max: f64,
    /// Speed step (km/h).
    #[arg(long, default_value_t = 1.0)]
    pub speed_step: f64,
}

impl SpeedGridArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        if !(self.speed_step > 0.0) || self.speed_max < self.speed_min {
            return Err(usage(
                "speed grid needs speed-min <= speed-max and a positive step",
            ));
        }
        Ok(stepped_grid(
            self.speed_min,
            self.speed_max,
            self.speed_step,
        ))
    }
}

#[derive(Debug, Clone, Args)]
pub struct LossCurveArgs {
    #[command(flatten)]
    pub burst: BurstArgs,
    /// Weight intercept coefficient.
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    /// Weight slope coefficient.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c2: f64,
    /// Instead of (c1, c2), plot path-gain curves for these speeds (km/h).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub pathgain_speeds: Vec<f64>,
    /// Longitudinal offset for the path-gain curves (m).
    #[arg(long, default_value_t = 30.0)]
    pub dx: f64,
    /// Lateral offset for the path-gain curves (m).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dy: f64,
    /// Path-loss model JSON.
    #[arg(long)]
    pub pathloss: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaylorArg {
    Start,
    Centre,
}

#[derive(Debug, Clone, Args)]
pub struct AOmegaArgs {
    #[command(flatten)]
    pub burst: BurstArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub speeds: SpeedGridArgs,
    /// Lateral offsets (m).
    #[arg(long, value_delimiter = ',', default_values_t = [-4.0, 4.0], allow_hyphen_values = true)]
    pub dy: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub dx_min: f64,
    #[arg(long, default_value_t = 150.0)]
    pub dx_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dx_step: f64,
    /// Taylor expansion point of Omega.
    #[arg(long, value_enum, default_value_t = TaylorArg::Centre)]
    pub taylor_point: TaylorArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Omega,
    Pl,
    Phi,
    Combined,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Omega => Mode::Omega,
            ModeArg::Pl => Mode::Pathgain,
            ModeArg::Phi => Mode::Antenna,
            ModeArg::Combined => Mode::Combined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitArg {
    Taylor,
    Ls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyntheticArg {
    Patch,
    Cardioid,
}

#[derive(Debug, Clone, Args)]
pub struct SpeedSweepArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Omega)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub burst: BurstArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub speeds: SpeedGridArgs,
    /// Lateral offsets (m); defaults to -4,4 (0 in pl mode).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub dy: Vec<f64>,
    /// Slope indices q (alpha = q 2 pi / (K T)); defaults to 1..K/2.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<usize>,
    /// Only the exact evaluation.
    #[arg(long, conflicts_with = "affine_only")]
    pub exact_only: bool,
    /// Only the affine evaluation.
    #[arg(long)]
    pub affine_only: bool,
    /// Take the infimum over y on an n-point grid instead of analytically.
    #[arg(long)]
    pub y_grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = FitArg::Taylor)]
    pub fit: FitArg,
    /// Path-loss model JSON.
    #[arg(long)]
    pub pathloss: Option<PathBuf>,
    /// Pattern CSV for antenna 0 (used for both if only one is given).
    #[arg(long)]
    pub pattern0: Option<PathBuf>,
    /// Pattern CSV for antenna 1.
    #[arg(long)]
    pub pattern1: Option<PathBuf>,
    /// Use isotropic antennas.
    #[arg(long, conflicts_with_all = ["pattern0", "pattern1", "synthetic"])]
    pub isotropic: bool,
    /// Use a bundled synthetic back-to-back pair.
    #[arg(long, value_enum, conflicts_with_all = ["pattern0", "pattern1"])]
    pub synthetic: Option<SyntheticArg>,
    /// Fixed arrival-angle offset (deg) instead of worst-case alignment.
    #[arg(long, allow_hyphen_values = true)]
    pub phi0_offset: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TX_POWER_DBM, allow_hyphen_values = true)]
    pub tx_power_dbm: f64,
    #[arg(long, default_value_t = DEFAULT_NOISE_DBM, allow_hyphen_values = true)]
    pub noise_dbm: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PlLossesArgs {
    #[command(flatten)]
    pub burst: BurstArgs,
    #[arg(long, default_value_t = 30.0)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dy: f64,
    /// Speed difference (km/h).
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    pub speed: f64,
    /// Path-loss model JSON.
    #[arg(long)]
    pub pathloss: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Random cases per property.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub burst: BurstArgs,
    /// CSV report of the results.
    #[command(flatten)]
    pub output: OutputArgs,
}

fn usage(msg: &str) -> Error {
    Error::InvalidScenario(msg.to_string())
}

fn load_model(path: &Option<PathBuf>) -> Result<PathlossModel> {
    match path {
        Some(p) => PathlossModel::load(p),
        None => Ok(PathlossModel::winner_b1()),
    }
}

fn scenario(burst: &BurstArgs, g: &GeometryArgs) -> Result<ScenarioParams> {
    if !(g.carrier > 0.0) {
        return Err(usage("carrier frequency must be positive"));
    }
    let lambda = wavelength(g.carrier);
    ScenarioParams::new(
        g.dx,
        0.0,
        0.0,
        g.separation * lambda,
        lambda,
        burst.k,
        burst.t,
    )
}

fn emit(
    result: &mut SweepResult,
    output: &OutputArgs,
    name: &str,
    stdout: &mut dyn Write,
) -> Result<()> {
    if output.stamp {
        result.stamp();
    }
    let target = output.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{name}.csv")))
    });
    match &target {
        Some(path) => {
            result.save(path)?;
            writeln!(stdout, "wrote {}", path.display()).map_err(|e| Error::io("<stdout>", e))?;
        }
        None => {
            result.write_csv(&mut *stdout)?;
        }
    }
    if let Some(script) = &output.gnuplot {
        let csv = target
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| format!("{name}.csv"));
        std::fs::write(script, result.gnuplot_script(&csv)).map_err(|e| Error::io(script, e))?;
    }
    Ok(())
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn cmd_loss_curve(a: &LossCurveArgs, stdout: &mut dyn Write) -> Result<i32> {
    let x = default_x_grid();
    let mut r = if a.pathgain_speeds.is_empty() {
        loss_curve(a.burst.k, a.c1, a.c2, &x)?
    } else {
        let lambda = wavelength(CARRIER_5_9_GHZ);
        let p = ScenarioParams::new(a.dx, a.dy, 0.0, 10.0 * lambda, lambda, a.burst.k, a.burst.t)?;
        pathgain_loss_curves(&load_model(&a.pathloss)?, &p, &a.pathgain_speeds, &x)?
    };
    emit(&mut r, &a.output, "loss-curve", stdout)?;
    Ok(0)
}

fn cmd_a_omega(a: &AOmegaArgs, stdout: &mut dyn Write) -> Result<i32> {
    if !(a.dx_step > 0.0) || a.dx_max < a.dx_min {
        return Err(usage("dx grid needs dx-min <= dx-max and a positive step"));
    }
    let p = scenario(&a.burst, &a.geometry)?;
    let at = match a.taylor_point {
        TaylorArg::Start => TaylorPoint::Start,
        TaylorArg::Centre => TaylorPoint::Centre,
    };
    let dx = stepped_grid(a.dx_min, a.dx_max, a.dx_step);
    let mut r = a_omega_range(&p, &dx, &a.speeds.grid()?, &a.dy, at)?;
    let half = min_safe_distance(&r, PI / 2.0);
    let pik = min_safe_distance(&r, PI / p.k as f64);
    let show = |d: Option<f64>| d.map_or("none on grid".to_string(), |v| format!("{v:.1} m"));
    r.meta("min_dx_below_half_pi_m", show(half));
    r.meta("min_dx_below_pi_over_k_m", show(pik));
    emit(&mut r, &a.output, "a-omega-range", stdout)?;
    Ok(0)
}

fn pattern_pair(
    a: &SpeedSweepArgs,
    lambda: f64,
) -> Result<Option<(AntennaPattern, AntennaPattern)>> {
    if let Some(s) = a.synthetic {
        return Ok(Some(match s {
            SyntheticArg::Patch => back_to_back_patches(lambda)?,
            SyntheticArg::Cardioid => cardioid_pair(lambda)?,
        }));
    }
    match (&a.pattern0, &a.pattern1) {
        (None, None) => Ok(None),
        (Some(p), None) | (None, Some(p)) => {
            let g = AntennaPattern::load(p)?;
            Ok(Some((g.clone(), g)))
        }
        (Some(p0), Some(p1)) => Ok(Some((AntennaPattern::load(p0)?, AntennaPattern::load(p1)?))),
    }
}

fn cmd_speed_sweep(a: &SpeedSweepArgs, stdout: &mut dyn Write) -> Result<i32> {
    let mode: Mode = a.mode.into();
    let template = scenario(&a.burst, &a.geometry)?;
    let patterns = pattern_pair(a, template.lambda)?;
    if matches!(mode, Mode::Antenna | Mode::Combined) && patterns.is_none() && !a.isotropic {
        return Err(usage(
            "phi and combined modes need --pattern0/--pattern1, --synthetic or --isotropic",
        ));
    }
    let mut cfg = SweepConfig::new(mode);
    cfg.template = template;
    cfg.speeds_kmh = a.speeds.grid()?;
    if !a.dy.is_empty() {
        cfg.dy_set = a.dy.clone();
    }
    let qs: Vec<usize> = if a.q.is_empty() {
        (1..=a.burst.k / 2).collect()
    } else {
        a.q.clone()
    };
    if let Some(&bad) = qs.iter().find(|&&q| q == 0 || q >= a.burst.k) {
        return Err(usage(&format!("slope index q = {bad} outside 1..K-1")));
    }
    cfg.slopes = qs
        .iter()
        .map(|&q| LabelledSlope::indexed(q, a.burst.k, a.burst.t))
        .collect();
    cfg.exact = !a.affine_only;
    cfg.affine = !a.exact_only;
    cfg.y_search = a.y_grid.map_or(YSearch::Analytic, YSearch::Grid);
    cfg.fit = FitOptions {
        kind: match a.fit {
            FitArg::Taylor => FitKind::Taylor,
            FitArg::Ls => FitKind::LeastSquares,
        },
        ..FitOptions::default()
    };
    cfg.model = load_model(&a.pathloss)?;
    cfg.patterns = patterns;
    if let Some(deg) = a.phi0_offset {
        cfg.alignment = ArrivalAlignment::Offset(deg.to_radians());
    }
    cfg.tx_power_dbm = a.tx_power_dbm;
    cfg.noise_dbm = a.noise_dbm;
    let mut r = speed_sweep(&cfg)?;
    emit(&mut r, &a.output, "speed-sweep", stdout)?;
    Ok(0)
}

fn cmd_pl_losses(a: &PlLossesArgs, stdout: &mut dyn Write) -> Result<i32> {
    let lambda = wavelength(CARRIER_5_9_GHZ);
    let p = ScenarioParams::new(a.dx, a.dy, 0.0, 10.0 * lambda, lambda, a.burst.k, a.burst.t)?
        .with_speed_kmh(a.speed);
    let mut r = pl_slope_losses(&load_model(&a.pathloss)?, &p)?;
    if a.output.out.is_some() || std::env::var_os(OUT_DIR_ENV).is_some() {
        emit(&mut r, &a.output, "pl-losses", stdout)?;
    }
    let bound = r.series("upper_bound_db").expect("series present");
    let actual = r.series("loss_db").expect("series present");
    writeln!(
        stdout,
        "q  alpha (rad/s)  upper-bound loss (dB)  loss at scenario (dB)"
    )
    .map_err(out_err)?;
    for (i, q) in r.independent.iter().enumerate() {
        let alpha = r.series("alpha_rad_s").expect("series present")[i];
        writeln!(
            stdout,
            "{q:<2} {alpha:<14.4} {:<22.2} {:.2}",
            bound[i], actual[i]
        )
        .map_err(out_err)?;
    }
    Ok(0)
}

fn cmd_design_rule(a: &BurstArgs, stdout: &mut dyn Write) -> Result<i32> {
    if a.k < 2 || !(a.t > 0.0) {
        return Err(usage("need K >= 2 and T > 0"));
    }
    let qs = design_rule_indices(a.k);
    let alphas = design_rule_alpha_star(a.k, a.t);
    for (q, alpha) in qs.iter().zip(&alphas) {
        let half = alpha * a.t / 2.0;
        writeln!(
            stdout,
            "alpha* = {q}*2pi/(KT) = {alpha:.6} rad/s, alpha*T/2 = {:.6} rad = {}pi/{}",
            half, q, a.k
        )
        .map_err(out_err)?;
    }
    if a.k.is_multiple_of(2) {
        writeln!(stdout, "alpha*T/2 = pi/2").map_err(out_err)?;
    }
    Ok(0)
}

fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<i32> {
    if a.burst.k < 3 || !(a.burst.t > 0.0) || a.samples == 0 {
        return Err(usage(
            "validate needs K >= 3, T > 0 and at least one sample",
        ));
    }
    let cfg = SuiteConfig {
        samples: a.samples,
        k: a.burst.k,
        t: a.burst.t,
        ..SuiteConfig::new(a.seed)
    };
    let results = run_suite(&cfg);
    let mut all = true;
    for r in &results {
        all &= r.passed;
        writeln!(
            stdout,
            "{} {} ({} cases): {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.detail
        )
        .map_err(out_err)?;
    }
    if a.output.out.is_some() || std::env::var_os(OUT_DIR_ENV).is_some() {
        let idx: Vec<f64> = (0..results.len()).map(|i| i as f64).collect();
        let mut rep = SweepResult::new("property", idx);
        rep.meta("seed", a.seed);
        rep.meta("samples", a.samples);
        for (i, r) in results.iter().enumerate() {
            rep.meta(format!("property_{i}"), r.name);
        }
        rep.push_series(
            "passed",
            results
                .iter()
                .map(|r| f64::from(u8::from(r.passed)))
                .collect(),
        )?;
        rep.push_series("cases", results.iter().map(|r| r.cases as f64).collect())?;
        emit(&mut rep, &a.output, "validate", stdout)?;
    }
    Ok(if all { 0 } else { 1 })
}

/// Execute a parsed command. Returns the process exit code for success or a
/// validation failure; errors are for the caller to report.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::LossCurve(a) => cmd_loss_curve(a, stdout),
        Command::AOmegaRange(a) => cmd_a_omega(a, stdout),
        Command::SpeedSweep(a) => cmd_speed_sweep(a, stdout),
        Command::PlLosses(a) => cmd_pl_losses(a, stdout),
        Command::DesignRule(a) => cmd_design_rule(a, stdout),
        Command::Validate(a) => cmd_validate(a, stdout),
    }
}

/// Parse `args` (including the program name), run, and map the outcome to an
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
