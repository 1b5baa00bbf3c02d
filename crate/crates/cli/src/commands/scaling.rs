use anyhow::Result;
use num_complex::Complex64 as C64;
use shg_core::analysis::{conversion_ratio, find_gt_max, fit_power_law};
use shg_core::twigner::{integrate_ensemble, EnsembleConfig};

use crate::config::{Format, ScalingConfig};
use crate::formats::{
    sibling, write_csv_columns, write_json, ConfigEcho, FitJson, ScalingJson, ScalingRowDto,
};

pub fn run(config: ScalingConfig) -> Result<()> {
    let mut echo = ConfigEcho::new("scaling");
    echo.push(
        "n_values",
        config
            .n_values
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    echo.push("trajectories", config.trajectories);
    echo.push("seed", config.seed);
    echo.push("format", config.format.name());

    // each ensemble is integrated over ~10 depletion times of its own scale
    let rows: Vec<ScalingRowDto> = config
        .n_values
        .iter()
        .map(|&n| -> Result<ScalingRowDto> {
            let alpha = C64::new(n.sqrt(), 0.0);
            let ensemble_config =
                EnsembleConfig::new(config.seed, alpha, config.trajectories, 10.0 / n.sqrt());
            let ensemble = integrate_ensemble(&ensemble_config)?;
            let mean = ensemble.mean_photon();
            let report = find_gt_max(&ensemble.times, &mean)?;
            println!(
                "scaling: n = {n}: gt_max = {:.6}, ratio = {:.4}",
                report.gt_max,
                conversion_ratio(&report, n)
            );
            Ok(ScalingRowDto {
                n,
                gt_min: report.gt_min,
                gt_max: report.gt_max,
                n_at_max: report.n_at_max,
                ratio: conversion_ratio(&report, n),
            })
        })
        .collect::<Result<_>>()?;

    match config.format {
        Format::Csv => {
            let n: Vec<f64> = rows.iter().map(|r| r.n).collect();
            let gt_min: Vec<f64> = rows.iter().map(|r| r.gt_min).collect();
            let gt_max: Vec<f64> = rows.iter().map(|r| r.gt_max).collect();
            let n_at_max: Vec<f64> = rows.iter().map(|r| r.n_at_max).collect();
            let ratio: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
            write_csv_columns(
                &config.out,
                &echo,
                &[
                    ("n", &n),
                    ("gt_min", &gt_min),
                    ("gt_max", &gt_max),
                    ("n_at_max", &n_at_max),
                    ("ratio", &ratio),
                ],
            )?;
        }
        Format::Json => write_json(
            &config.out,
            &ScalingJson { config: echo.json_value(), rows: rows.clone() },
        )?,
    }

    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n, r.gt_max)).collect();
    let fit = fit_power_law(&points)?;
    let fit_path = sibling(&config.out, "fit", "json");
    write_json(
        &fit_path,
        &FitJson {
            config: echo.json_value(),
            coefficient: fit.coefficient,
            exponent: fit.exponent,
            coeff_stderr: fit.coeff_stderr,
            exp_stderr: fit.exp_stderr,
            points: fit.points.clone(),
        },
    )?;
    println!(
        "scaling: wrote {} and {}; fit gt_max = {:.3}(±{:.3}) / n^{:.4}(±{:.4})",
        config.out.display(),
        fit_path.display(),
        fit.coefficient,
        fit.coeff_stderr,
        fit.exponent,
        fit.exp_stderr
    );
    Ok(())
}
