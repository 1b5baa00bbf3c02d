use std::fmt::Write as _;

use anyhow::Result;
use num_complex::Complex64 as C64;
use shg_core::twigner::{default_dt, integrate_ensemble, EnsembleConfig};

use crate::config::{Format, TwignerConfig};
use crate::formats::{
    complex_pair, sibling, write_csv_columns, write_json, write_text, ConfigEcho, ScatterJson,
    TwignerJson,
};

pub fn run(config: TwignerConfig) -> Result<()> {
    let alpha = C64::new(config.n.sqrt(), 0.0);
    let dt = config.dt.unwrap_or_else(|| default_dt(alpha));
    let record_every = ((config.gt_max / config.record_points as f64 / dt).round() as usize).max(1);

    let mut echo = ConfigEcho::new("twigner");
    echo.push("n", config.n);
    echo.push("trajectories", config.trajectories);
    echo.push("gt_max", config.gt_max);
    echo.push("dt", dt);
    echo.push("seed", config.seed);
    echo.push("record_every", record_every);
    match config.scatter {
        Some(gt) => echo.push("scatter", gt),
        None => echo.push("scatter", "none"),
    }
    echo.push("format", config.format.name());

    let ensemble_config = EnsembleConfig {
        seed: config.seed,
        alpha,
        n_traj: config.trajectories,
        dt,
        gt_end: config.gt_max,
        record_every,
        keep_states: config.scatter.is_some(),
    };
    let ensemble = integrate_ensemble(&ensemble_config)?;
    let corrected = ensemble.mean_photon();
    let raw = ensemble.mean_photon_raw();
    let max_drift = ensemble.max_drift();
    let mut full_echo = echo.clone();
    full_echo.push("max_invariant_drift", max_drift);

    match config.format {
        Format::Csv => write_csv_columns(
            &config.out,
            &full_echo,
            &[
                ("gt", &ensemble.times),
                ("n1_corrected", &corrected),
                ("n1_raw", &raw),
            ],
        )?,
        Format::Json => write_json(
            &config.out,
            &TwignerJson {
                config: echo.json_value(),
                gt: ensemble.times.clone(),
                mean_corrected: corrected,
                mean_raw: raw,
                max_invariant_drift: max_drift,
            },
        )?,
    }
    println!(
        "twigner: wrote {} ({} trajectories, {} recorded times, max invariant drift {max_drift:.3e})",
        config.out.display(),
        config.trajectories,
        ensemble.times.len(),
    );

    if let Some(gt) = config.scatter {
        let points = ensemble.final_scatter(gt)?;
        let path = sibling(&config.out, "scatter", config.format.name());
        match config.format {
            Format::Csv => {
                let mut out = full_echo.csv_comments();
                out.push_str("re_a1,im_a1,invariant_drift\n");
                for (p, drift) in points.iter().zip(&ensemble.invariant_drift) {
                    writeln!(out, "{},{},{drift}", p.re, p.im).unwrap();
                }
                write_text(&path, &out)?;
            }
            Format::Json => write_json(
                &path,
                &ScatterJson {
                    config: echo.json_value(),
                    gt,
                    a1: points.iter().map(|&p| complex_pair(p)).collect(),
                    invariant_drift: ensemble.invariant_drift.clone(),
                },
            )?,
        }
        println!("twigner: scatter at gt = {gt} -> {}", path.display());
    }
    Ok(())
}
