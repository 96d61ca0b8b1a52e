use std::f64::consts::PI;

use acn::snr::{
    affine_weights, f1, f2, in_pole_set, j_closed, j_weighted, loss, loss_bounds, loss_omega,
    worst_case_y,
};
use proptest::prelude::*;

const K: usize = 10;

fn off_pole() -> impl Strategy<Value = f64> {
    (1e-6..PI - 1e-6).prop_filter("pole band", |x: &f64| !in_pole_set(*x))
}

fn coefficients() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..2.0f64, -0.999..0.999f64).prop_map(|(e, r)| {
        let c1 = 10f64.powf(e);
        (c1, r * c1 / (K - 1) as f64)
    })
}

proptest! {
    #[test]
    fn loss_is_pi_periodic_and_even(x in off_pole(), (c1, c2) in coefficients()) {
        let l = loss(K, x, c1, c2).unwrap();
        prop_assert!((loss(K, x + PI, c1, c2).unwrap() - l).abs() < 1e-12);
        prop_assert!((loss(K, -x, c1, c2).unwrap() - l).abs() < 1e-12);
    }

    #[test]
    fn loss_stays_in_unit_interval(x in off_pole(), (c1, c2) in coefficients()) {
        let l = loss(K, x, c1, c2).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&l));
    }

    #[test]
    fn bounds_bracket_loss(x in off_pole(), (c1, c2) in coefficients()) {
        let l = loss(K, x, c1, c2).unwrap();
        let (lo, hi) = loss_bounds(K, x);
        prop_assert!(lo <= l + 1e-12 && l <= hi + 1e-12);
        prop_assert!((lo - loss_omega(K, x)).abs() < 1e-15);
    }

    #[test]
    fn f2_is_derivative_of_f1(x in 0.05..PI - 0.05) {
        let h = 1e-6;
        let fd = (f1(K, x + h).unwrap() - f1(K, x - h).unwrap()) / (2.0 * h);
        prop_assert!((f2(K, x).unwrap() - fd).abs() < 1e-5 * fd.abs().max(1.0));
    }

    #[test]
    fn closed_form_matches_sum(x in off_pole(), y in 0.0..2.0 * PI, (c1, c2) in coefficients()) {
        let w = affine_weights(K, c1, c2);
        prop_assert!((j_closed(K, x, y, c1, c2) - j_weighted(&w, x, y)).abs() < 1e-10);
    }

    #[test]
    fn worst_case_y_is_a_lower_bound(x in off_pole(), y in 0.0..2.0 * PI, (c1, c2) in coefficients()) {
        let (_, j) = worst_case_y(K, x, c1, c2).unwrap();
        prop_assert!(j <= j_closed(K, x, y, c1, c2) + 1e-10);
        prop_assert!((-j / (c1 * K as f64) - loss(K, x, c1, c2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn constant_weights_reduce_to_omega_loss(x in off_pole(), c1 in 0.01..100.0f64) {
        prop_assert!((loss(K, x, c1, 0.0).unwrap() - loss_omega(K, x)).abs() < 1e-14);
    }
}
