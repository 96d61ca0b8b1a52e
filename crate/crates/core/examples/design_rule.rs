//! The optimal slope set and the robust design rule.
//!
//! For each slope in A* the worst loss is reported when the Omega slope
//! shifts x over [-(pi/2 - 0.01), pi/2 - 0.01].

use std::f64::consts::PI;

use acn::snr::{
    check_optimality, design_rule_alpha_star, max_loss_over_shift, most_robust_slopes,
    optimal_slope_set,
};

fn main() {
    let (k, t) = (10usize, 0.1);
    let half = PI / 2.0 - 0.01;
    println!("A* for K={k}, T={t} s:");
    for (q, a) in optimal_slope_set(k, t).into_iter().enumerate() {
        let shifted = |lo: f64, hi: f64| max_loss_over_shift(k, a * t / 2.0, lo, hi, 4001);
        println!(
            "  q={} alpha={:7.3} rad/s  worst loss |shift|<pi/4: {:.3}  |shift|<pi/2: {:.4}",
            q + 1,
            a,
            shifted(-PI / 4.0, PI / 4.0),
            shifted(-half, half)
        );
    }
    for k in [5usize, 10, 11] {
        let star = design_rule_alpha_star(k, t);
        let robust = most_robust_slopes(k, t, PI / 4.0, 4001, 1e-12);
        println!("K={k:>2}: alpha* = {star:.4?}, most robust for |shift|<pi/4 = {robust:.4?}");
    }
    let two = [0.0, design_rule_alpha_star(k, t)[0]];
    println!("pair (0, alpha*) optimal: {}", check_optimality(&two, k, t));
}
