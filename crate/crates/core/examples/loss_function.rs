//! Loss function L(x) for constant and affinely varying weights, with bounds.
//!
//! Run with `cargo run --example loss_function`. CSVs land in `$ACN_OUT_DIR`
//! (default `out/`).

use std::f64::consts::PI;
use std::path::PathBuf;

use acn::experiments::{default_x_grid, loss_curve, pathgain_loss_curves};
use acn::snr::{interval_bound, loss_omega, loss_to_db};
use acn::{PathlossModel, ScenarioParams};

fn out_dir() -> PathBuf {
    std::env::var_os("ACN_OUT_DIR").map_or_else(|| PathBuf::from("out"), PathBuf::from)
}

fn main() -> acn::Result<()> {
    let x = default_x_grid();
    for k in [5usize, 10] {
        let curve = loss_curve(k, 1.0, 0.0, &x)?;
        let inner = |v: f64| v >= PI / k as f64 && v <= (k - 1) as f64 * PI / k as f64;
        let peak = x
            .iter()
            .zip(curve.series("loss").unwrap())
            .filter(|(v, _)| inner(**v))
            .map(|(_, l)| *l)
            .fold(0.0, f64::max);
        println!(
            "K={k:>2}: sidelobe max {peak:.3}, bound 1/(K sin(pi/K)) = {:.3} ({:.2} dB)",
            interval_bound(k),
            loss_to_db(interval_bound(k))
        );
        curve.save(out_dir().join(format!("loss_omega_k{k}.csv")))?;
    }
    println!(
        "L_Omega at x = pi/2, K=10: {:.2e}",
        loss_omega(10, PI / 2.0)
    );

    let p = ScenarioParams::highway().with_dy(0.0);
    let curves = pathgain_loss_curves(&PathlossModel::winner_b1(), &p, &[-60.0, 60.0], &x)?;
    let path = out_dir().join("loss_pathgain_k10.csv");
    curves.save(&path)?;
    println!("path-gain loss curves written to {}", path.display());
    Ok(())
}
