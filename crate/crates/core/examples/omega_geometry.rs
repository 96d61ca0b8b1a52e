//! Omega over the burst and the distance beyond which its slope is harmless.

use std::f64::consts::PI;
use std::path::PathBuf;

use acn::experiments::{
    a_omega_range, default_speed_grid, exact_curves, min_safe_distance, stepped_grid, TaylorPoint,
};
use acn::{PathlossModel, ScenarioParams};

fn main() -> acn::Result<()> {
    let out = std::env::var_os("ACN_OUT_DIR").map_or_else(|| PathBuf::from("out"), PathBuf::from);
    let dx = stepped_grid(1.0, 150.0, 0.1);
    let speeds = default_speed_grid();
    for sep in [10.0, 0.5] {
        let p = ScenarioParams::highway().with_separation_wavelengths(sep);
        let r = a_omega_range(&p, &dx, &speeds, &[-4.0, 4.0], TaylorPoint::Centre)?;
        let show = |d: Option<f64>| d.map_or("-".into(), |v| format!("{v:.1} m"));
        println!(
            "separation {sep:>4} lambda: |a_Omega|T/2 < pi/2 from {}, < pi/K from {}",
            show(min_safe_distance(&r, PI / 2.0)),
            show(min_safe_distance(&r, PI / p.k as f64))
        );
        r.save(out.join(format!("a_omega_range_{sep}lambda.csv")))?;
    }
    for dx in [10.0, 30.0, 100.0] {
        let p = ScenarioParams::highway().with_dx(dx);
        let c = exact_curves(&PathlossModel::winner_b1(), &p, None)?;
        println!(
            "dx={dx:>5} m: max |Omega - Taylor| = {} rad, max |Omega - LS| = {} rad",
            c.metadata_value("omega_taylor_max_dev_rad").unwrap(),
            c.metadata_value("omega_ls_max_dev_rad").unwrap()
        );
        c.save(out.join(format!("curves_dx{dx}.csv")))?;
    }
    Ok(())
}
