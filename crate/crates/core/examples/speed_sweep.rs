//! Worst-case sum-SNR against speed in every mode at the headline geometry.

use std::path::PathBuf;

use acn::antenna::back_to_back_patches;
use acn::experiments::{dip_depth, speed_sweep, Mode, SweepConfig};
use acn::ScenarioParams;

fn main() -> acn::Result<()> {
    let out = std::env::var_os("ACN_OUT_DIR").map_or_else(|| PathBuf::from("out"), PathBuf::from);
    let lambda = ScenarioParams::highway().lambda;
    for mode in [Mode::Omega, Mode::Pathgain, Mode::Antenna, Mode::Combined] {
        for dx in [10.0, 30.0, 100.0] {
            let mut cfg = SweepConfig::new(mode);
            cfg.template = cfg.template.with_dx(dx);
            if matches!(mode, Mode::Antenna | Mode::Combined) {
                cfg.patterns = Some(back_to_back_patches(lambda)?);
            }
            let r = match speed_sweep(&cfg) {
                Ok(r) => r,
                Err(e) => {
                    println!("{:<8} dx={dx:>5}: skipped ({e})", mode.name());
                    continue;
                }
            };
            let worst = |label: &str| {
                let e = dip_depth(&r, &format!("{label}_exact_db")).unwrap();
                let a = dip_depth(&r, &format!("{label}_affine_db")).unwrap();
                format!("{label} {e:5.2}/{a:5.2}")
            };
            println!(
                "{:<8} dx={dx:>5}: dip exact/affine dB  {}  {}",
                mode.name(),
                worst("q1"),
                worst("q5")
            );
            for w in r.warnings() {
                println!("  warning: {w}");
            }
            r.save(out.join(format!("speed_sweep_{}_dx{dx}.csv", mode.name())))?;
        }
    }
    Ok(())
}
