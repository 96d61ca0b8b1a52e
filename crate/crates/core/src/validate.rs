//! Seeded randomized checks of the analytical invariants.
//!
//! Each property draws its samples from a ChaCha stream seeded with the run
//! seed, so a given seed always exercises the same points.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::{least_squares_fit, residual_sum_squares};
use crate::snr::{
    affine_weights, design_rule_alpha_star, f1, f2, grid_error_bound, in_optimal_set, in_pole_set,
    j_closed, j_weighted, loss, loss_bounds, loss_omega, max_loss_over_shift, optimal_slope_set,
    worst_case_y, YGrid,
};

/// Outcome of one property.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

/// Sample counts and the burst geometry used by the suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub y_grid: usize,
    pub k: usize,
    pub t: f64,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            samples: 1000,
            y_grid: 100_000,
            k: 10,
            t: 0.1,
        }
    }
}

struct Check {
    name: &'static str,
    cases: usize,
    worst: f64,
    failure: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            worst: 0.0,
            failure: None,
        }
    }

    /// Record a case whose error is `err` against tolerance `tol`.
    fn within(&mut self, err: f64, tol: f64, ctx: impl FnOnce() -> String) {
        self.cases += 1;
        self.worst = self.worst.max(err);
        if !(err <= tol) && self.failure.is_none() {
            self.failure = Some(format!("error {err:.3e} > {tol:.1e} at {}", ctx()));
        }
    }

    fn holds(&mut self, ok: bool, ctx: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(ctx());
        }
    }

    fn finish(self) -> PropertyResult {
        let passed = self.failure.is_none();
        let detail = self
            .failure
            .unwrap_or_else(|| format!("worst error {:.3e}", self.worst));
        PropertyResult {
            name: self.name,
            passed,
            cases: self.cases,
            detail,
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `x` uniform in `(0, pi)` outside the pole band.
fn sample_x(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x = rng.gen_range(0.0..PI);
        if !in_pole_set(x) {
            return x;
        }
    }
}

/// `(c1, c2)` with positive weights at every packet: `|c2| (K - 1) < c1`.
fn sample_coefficients(rng: &mut ChaCha8Rng, k: usize) -> (f64, f64) {
    let c1 = 10f64.powf(rng.gen_range(-2.0..2.0));
    let r = rng.gen_range(-1.0..1.0) / (k - 1) as f64;
    (c1, r * c1)
}

pub fn periodicity(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("periodicity");
    let mut rng = rng_for(cfg.seed, 1);
    for _ in 0..cfg.samples {
        let x = sample_x(&mut rng);
        let (c1, c2) = sample_coefficients(&mut rng, cfg.k);
        let a = loss(cfg.k, x, c1, c2).expect("c1 > 0");
        let b = loss(cfg.k, x + PI, c1, c2).expect("c1 > 0");
        c.within((a - b).abs(), 1e-12, || format!("x={x}, c1={c1}, c2={c2}"));
    }
    c.finish()
}

pub fn symmetry(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("symmetry");
    let mut rng = rng_for(cfg.seed, 2);
    for _ in 0..cfg.samples {
        let u = rng.gen_range(0.0..PI / 2.0 - 1e-6);
        let (c1, c2) = sample_coefficients(&mut rng, cfg.k);
        let a = loss(cfg.k, PI / 2.0 + u, c1, c2).expect("c1 > 0");
        let b = loss(cfg.k, PI / 2.0 - u, c1, c2).expect("c1 > 0");
        c.within((a - b).abs(), 1e-12, || format!("u={u}, c1={c1}, c2={c2}"));
    }
    c.finish()
}

pub fn range(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("range");
    let mut rng = rng_for(cfg.seed, 3);
    for _ in 0..cfg.samples {
        let x = rng.gen_range(-2.0 * PI..2.0 * PI);
        let (c1, c2) = sample_coefficients(&mut rng, cfg.k);
        let l = loss(cfg.k, x, c1, c2).expect("c1 > 0");
        c.holds((0.0..=1.0 + 1e-12).contains(&l), || {
            format!("loss {l} outside [0, 1] at x={x}, c1={c1}, c2={c2}")
        });
        if c2 != 0.0 {
            c.holds(l > 0.0, || format!("loss vanishes with c2={c2} at x={x}"));
        }
    }
    c.finish()
}

pub fn zeros(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("zeros");
    let k = cfg.k;
    for q in 1..4 * k {
        let x = q as f64 * PI / k as f64;
        if in_pole_set(x) {
            continue;
        }
        let l = loss_omega(k, x);
        c.within(l, 1e-12, || format!("x = {q} pi / K"));
    }
    let mut rng = rng_for(cfg.seed, 4);
    for _ in 0..cfg.samples {
        let x = sample_x(&mut rng);
        if in_optimal_set(k, x) {
            continue;
        }
        let l = loss_omega(k, x);
        c.holds(l > 0.0, || format!("zero off X* at x={x}"));
    }
    c.finish()
}

pub fn derivative_identity(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("f2 = f1'");
    let mut rng = rng_for(cfg.seed, 5);
    let h = 1e-6;
    let mut done = 0;
    while done < cfg.samples {
        let x = sample_x(&mut rng);
        // keep the difference stencil off the pole band
        if (x - h).sin().abs() < 1e-3 || (x + h).sin().abs() < 1e-3 {
            continue;
        }
        let d = f2(cfg.k, x).expect("off X");
        let fd = (f1(cfg.k, x + h).expect("off X") - f1(cfg.k, x - h).expect("off X")) / (2.0 * h);
        // relative error, floored at unit scale where f2 passes through zero
        let err = (d - fd).abs() / d.abs().max(1.0);
        c.within(err, 1e-5, || format!("x={x}"));
        done += 1;
    }
    c.finish()
}

pub fn oracle_equivalence(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("closed-form J = direct sum");
    let mut rng = rng_for(cfg.seed, 6);
    for _ in 0..cfg.samples {
        let x = sample_x(&mut rng);
        let y = rng.gen_range(0.0..2.0 * PI);
        let (c1, c2) = sample_coefficients(&mut rng, cfg.k);
        let w = affine_weights(cfg.k, c1, c2);
        let err = (j_closed(cfg.k, x, y, c1, c2) - j_weighted(&w, x, y)).abs();
        c.within(err, 1e-10, || format!("x={x}, y={y}, c1={c1}, c2={c2}"));
    }
    c.finish()
}

pub fn worst_case_y_matches_grid(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("worst-case y = grid scan");
    let mut rng = rng_for(cfg.seed, 7);
    let grid = YGrid::new(cfg.y_grid);
    for _ in 0..cfg.samples {
        let x = sample_x(&mut rng);
        let (c1, c2) = sample_coefficients(&mut rng, cfg.k);
        let (_, j) = worst_case_y(cfg.k, x, c1, c2).expect("c1 > 0");
        let (_, g) = grid.minimise_weighted(&affine_weights(cfg.k, c1, c2), x);
        let tol = grid_error_bound(cfg.y_grid, c1, cfg.k);
        // the grid can only overestimate the minimum
        let err = if g >= j - 1e-12 { g - j } else { f64::INFINITY };
        c.within(err, tol, || {
            format!("x={x}, c1={c1}, c2={c2}, closed={j}, grid={g}")
        });
    }
    c.finish()
}

pub fn bound_ordering(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("lower <= loss <= upper");
    let mut rng = rng_for(cfg.seed, 8);
    for _ in 0..cfg.samples {
        let x = sample_x(&mut rng);
        let (c1, c2) = sample_coefficients(&mut rng, cfg.k);
        let l = loss(cfg.k, x, c1, c2).expect("c1 > 0");
        let (lo, hi) = loss_bounds(cfg.k, x);
        let err = (lo - l).max(l - hi).max(0.0);
        c.within(err, 1e-12, || format!("x={x}, c1={c1}, c2={c2}"));
    }
    c.finish()
}

/// Loss as a function of `w = a / b` at fixed `x`, unit intercept.
fn loss_of_ratio(k: usize, t: f64, x: f64, w: f64) -> f64 {
    let c2 = w * t / 2.0;
    let c1 = 1.0 + c2 * (k - 1) as f64;
    loss(k, x, c1, c2).expect("w > -A keeps c1 positive")
}

pub fn ratio_monotonicity(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("g(w) monotonicity");
    let mut rng = rng_for(cfg.seed, 9);
    let a = 1.0 / ((cfg.k - 1) as f64 * cfg.t);
    let steps = 50;
    for _ in 0..cfg.samples / 10 {
        let x = sample_x(&mut rng);
        let mut prev = f64::INFINITY;
        for i in 0..=steps {
            let w = -a * (1.0 - 1e-6) * (1.0 - i as f64 / steps as f64);
            let l = loss_of_ratio(cfg.k, cfg.t, x, w);
            c.holds(l <= prev + 1e-12, || {
                format!("increase on (-A, 0] at x={x}, w={w}")
            });
            prev = l;
        }
        let mut prev = loss_of_ratio(cfg.k, cfg.t, x, 0.0);
        for i in 1..=steps {
            let w = a * 10f64.powf(-3.0 + 6.0 * i as f64 / steps as f64);
            let l = loss_of_ratio(cfg.k, cfg.t, x, w);
            c.holds(l >= prev - 1e-12, || {
                format!("decrease on [0, inf) at x={x}, w={w}")
            });
            prev = l;
        }
    }
    c.finish()
}

pub fn design_rule_dominance(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("design-rule dominance");
    let half = PI / 2.0 - 0.01;
    let n = 2001;
    for k in 3..=12 {
        let t = cfg.t;
        let best = design_rule_alpha_star(k, t)
            .into_iter()
            .map(|a| max_loss_over_shift(k, a * t / 2.0, -half, half, n))
            .fold(f64::INFINITY, f64::min);
        for a in optimal_slope_set(k, t) {
            let other = max_loss_over_shift(k, a * t / 2.0, -half, half, n);
            c.holds(best <= other + 1e-12, || {
                format!("K={k}: alpha*={best} beaten by {a} with {other}")
            });
        }
    }
    c.finish()
}

pub fn ls_optimality(cfg: &SuiteConfig) -> PropertyResult {
    let mut c = Check::new("LS optimality");
    let mut rng = rng_for(cfg.seed, 10);
    for _ in 0..cfg.samples / 10 {
        let samples: Vec<(f64, f64)> = (0..cfg.k)
            .map(|i| (i as f64 * cfg.t, rng.gen_range(-5.0..5.0)))
            .collect();
        let fit = least_squares_fit(&samples).expect("distinct times");
        let base = residual_sum_squares(fit.slope, fit.intercept, &samples);
        for eps in [1e-3, -1e-3] {
            let da = residual_sum_squares(fit.slope + eps, fit.intercept, &samples);
            let db = residual_sum_squares(fit.slope, fit.intercept + eps, &samples);
            c.holds(da >= base - 1e-12 && db >= base - 1e-12, || {
                format!("perturbation by {eps} lowered the residual")
            });
        }
    }
    c.finish()
}

/// Every property, in a fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<PropertyResult> {
    vec![
        periodicity(cfg),
        symmetry(cfg),
        range(cfg),
        zeros(cfg),
        derivative_identity(cfg),
        oracle_equivalence(cfg),
        worst_case_y_matches_grid(cfg),
        bound_ordering(cfg),
        ratio_monotonicity(cfg),
        design_rule_dominance(cfg),
        ls_optimality(cfg),
    ]
}
