use anyhow::{bail, Result};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use shg_core::hilbert::{build_initial_state, Mode};
use shg_core::observables::{pump_purity, reduce_pump};
use shg_core::propagator::{uniform_grid, BlockPropagator};

use crate::config::{Format, QuantumConfig};
use crate::formats::{
    sibling, write_csv_columns, write_json, ConfigEcho, QuantumJson, StateFile,
};

pub fn run(config: QuantumConfig) -> Result<()> {
    let mut echo = ConfigEcho::new("quantum");
    echo.push("n", config.n);
    echo.push("gt_max", config.gt_max);
    echo.push("step", config.step);
    echo.push("cutoff", config.cutoff);
    match config.snapshot {
        Some(gt) => echo.push("snapshot", gt),
        None => echo.push("snapshot", "none"),
    }
    echo.push("format", config.format.name());

    let alpha = C64::new(config.n.sqrt(), 0.0);
    let state = build_initial_state(alpha, config.cutoff)?;
    let times = uniform_grid(config.gt_max, config.step);
    if let Some(gt) = config.snapshot {
        if gt < 0.0 || gt > config.gt_max {
            bail!("--snapshot {gt} lies outside [0, {}]", config.gt_max);
        }
    }

    let propagator = BlockPropagator::new(&state);
    let rows: Vec<(f64, f64, f64)> = times
        .par_iter()
        .map(|&gt| {
            let snapshot = propagator.state_at(gt);
            let n1 = snapshot.mean_photon(Mode::Pump);
            let n2 = snapshot.mean_photon(Mode::Harmonic);
            (n1, n2, pump_purity(&snapshot))
        })
        .collect();
    let n1: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let n2: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let purity: Vec<f64> = rows.iter().map(|r| r.2).collect();

    match config.format {
        Format::Csv => write_csv_columns(
            &config.out,
            &echo,
            &[
                ("gt", &times),
                ("n1", &n1),
                ("n2", &n2),
                ("purity", &purity),
            ],
        )?,
        Format::Json => write_json(
            &config.out,
            &QuantumJson {
                config: echo.json_value(),
                gt: times.clone(),
                n1: n1.clone(),
                n2,
                purity,
            },
        )?,
    }
    println!("quantum: wrote {} ({} time points)", config.out.display(), times.len());

    if let Some(gt) = config.snapshot {
        let snapshot = propagator.state_at(gt);
        let path = sibling(&config.out, "state", "json");
        write_json(&path, &StateFile::from_state(&snapshot, gt, echo.json_value()))?;
        let rho = reduce_pump(&snapshot);
        println!(
            "quantum: snapshot at gt = {gt} -> {} (purity {:.4}, <n1> {:.4})",
            path.display(),
            shg_core::observables::purity(&rho),
            rho.mean_photon()
        );
    }
    Ok(())
}
