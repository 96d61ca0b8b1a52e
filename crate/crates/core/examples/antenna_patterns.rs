//! Synthetic antenna patterns: tabulate, save, reload and sweep.
//!
//! `cargo run --example antenna_patterns -- <dir>` regenerates the bundled
//! CSVs (default `crates/core/patterns`).

use std::path::PathBuf;

use acn::antenna::{worst_case_aoa, AntennaPattern, SyntheticElement};
use acn::experiments::{dip_depth, speed_sweep, Mode, SweepConfig};
use acn::geometry::{wavelength, CARRIER_5_9_GHZ};

fn main() -> acn::Result<()> {
    let dir = std::env::args_os().nth(1).map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("patterns"),
        PathBuf::from,
    );
    std::fs::create_dir_all(&dir).map_err(|e| acn::Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    let lambda = wavelength(CARRIER_5_9_GHZ);
    let pi = std::f64::consts::PI;
    let elements = [
        ("patch_front", SyntheticElement::patch(0.0, lambda)),
        ("patch_back", SyntheticElement::patch(pi, lambda)),
        ("cardioid_front", SyntheticElement::cardioid(0.0, lambda)),
        ("cardioid_back", SyntheticElement::cardioid(pi, lambda)),
    ];
    for (name, e) in &elements {
        let path = dir.join(format!("{name}.csv"));
        e.tabulate(360)?.save(&path)?;
        println!("wrote {}", path.display());
    }

    let front = AntennaPattern::load(dir.join("patch_front.csv"))?;
    let back = AntennaPattern::load(dir.join("patch_back.csv"))?;
    let phi_min = worst_case_aoa(&front, &back);
    println!("worst-case arrival angle {:.2} deg", phi_min.to_degrees());

    for mode in [Mode::Antenna, Mode::Combined] {
        for dx in [10.0, 30.0] {
            let mut cfg = SweepConfig::new(mode);
            cfg.template = cfg.template.with_dx(dx);
            cfg.patterns = Some((front.clone(), back.clone()));
            cfg.affine = false;
            let r = speed_sweep(&cfg)?;
            let dips: Vec<String> = cfg
                .slopes
                .iter()
                .map(|s| {
                    format!(
                        "{} {:.2}",
                        s.label,
                        dip_depth(&r, &format!("{}_exact_db", s.label)).unwrap()
                    )
                })
                .collect();
            println!("{} dx={dx}: dip dB {}", mode.name(), dips.join(", "));
        }
    }
    Ok(())
}
