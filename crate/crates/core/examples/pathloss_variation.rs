//! Path-gain variation: per-slope loss bounds and a same-lane speed sweep.

use std::path::PathBuf;

use acn::experiments::{dip_depth, pl_slope_losses, speed_sweep, Mode, SweepConfig};
use acn::{PathlossModel, ScenarioParams};

fn main() -> acn::Result<()> {
    let out = std::env::var_os("ACN_OUT_DIR").map_or_else(|| PathBuf::from("out"), PathBuf::from);
    let model = PathlossModel::winner_b1();
    println!("mu_X = {:.4} for sigma = {} dB", model.mu_x, model.sigma_sh);

    let p = ScenarioParams::highway().with_dy(0.0);
    let table = pl_slope_losses(&model, &p)?;
    let bound = table.series("upper_bound_db").unwrap();
    let actual = table.series("loss_db").unwrap();
    for q in 1..p.k {
        println!(
            "q={q}: bound {:6.2} dB, at 30 m / -60 km/h {:6.3} dB",
            bound[q - 1],
            actual[q - 1]
        );
    }

    let cfg = SweepConfig::new(Mode::Pathgain);
    let r = speed_sweep(&cfg)?;
    for s in &cfg.slopes {
        let e = dip_depth(&r, &format!("{}_exact_db", s.label)).unwrap();
        let a = dip_depth(&r, &format!("{}_affine_db", s.label)).unwrap();
        println!("{}: deepest dip exact {e:.3} dB, affine {a:.3} dB", s.label);
    }
    r.save(out.join("speed_sweep_pl.csv"))?;
    Ok(())
}
