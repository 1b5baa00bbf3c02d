use std::fmt::Write as _;

use anyhow::Result;
use num_complex::Complex64 as C64;
use shg_core::hilbert::build_initial_state;
use shg_core::observables::reduce_pump;
use shg_core::propagator::evolve;
use shg_core::wigner::{linear_axis, marginals, negativity, wigner_grid};

use crate::config::{Format, WignerConfig, WignerSource};
use crate::formats::{
    sibling, write_json, write_text, ConfigEcho, MarginalsJson, StateFile, WignerJson,
};

pub fn run(config: WignerConfig) -> Result<()> {
    let mut echo = ConfigEcho::new("wigner");
    let (rho, mean_n) = match &config.source {
        WignerSource::Snapshot(path) => {
            echo.push("snapshot_file", path.display());
            let state = StateFile::load(path)?.to_state()?;
            let rho = reduce_pump(&state);
            let mean = rho.mean_photon();
            (rho, mean)
        }
        WignerSource::Evolve { n, gt } => {
            echo.push("n", n);
            echo.push("gt", gt);
            echo.push("cutoff", config.cutoff);
            let state = build_initial_state(C64::new(n.sqrt(), 0.0), config.cutoff)?;
            let evolved = evolve(&state, *gt)?;
            let rho = reduce_pump(&evolved);
            let mean = rho.mean_photon();
            (rho, mean)
        }
    };
    let span = config.grid_span.unwrap_or(mean_n.max(0.0).sqrt() + 4.0);
    echo.push("grid_points", config.grid_points);
    echo.push("grid_span", span);
    echo.push("format", config.format.name());

    let axis = linear_axis(-span, span, config.grid_points);
    let grid = wigner_grid(&rho, &axis, &axis)?;
    let (min_value, negative_volume) = negativity(&grid);
    let m = marginals(&grid);

    let mut grid_echo = echo.clone();
    grid_echo.push("min_value", min_value);
    grid_echo.push("negative_volume", negative_volume);

    match config.format {
        Format::Csv => {
            // row-major X, Y, W triples
            let mut out = grid_echo.csv_comments();
            out.push_str("X,Y,W\n");
            for (i, &x) in grid.x_axis.iter().enumerate() {
                for (j, &y) in grid.y_axis.iter().enumerate() {
                    writeln!(out, "{x},{y},{}", grid.value(i, j)).unwrap();
                }
            }
            write_text(&config.out, &out)?;

            let mpath = sibling(&config.out, "marginals", "csv");
            let mut mout = echo.csv_comments();
            mout.push_str("axis,coordinate,density\n");
            for (x, p) in grid.x_axis.iter().zip(&m.p_x) {
                writeln!(mout, "x,{x},{p}").unwrap();
            }
            for (y, p) in grid.y_axis.iter().zip(&m.p_y) {
                writeln!(mout, "y,{y},{p}").unwrap();
            }
            write_text(&mpath, &mout)?;
        }
        Format::Json => {
            write_json(
                &config.out,
                &WignerJson {
                    config: echo.json_value(),
                    x_axis: grid.x_axis.clone(),
                    y_axis: grid.y_axis.clone(),
                    values: grid.values.clone(),
                    cell_area: grid.cell_area,
                    min_value,
                    negative_volume,
                },
            )?;
            let mpath = sibling(&config.out, "marginals", "json");
            write_json(
                &mpath,
                &MarginalsJson {
                    config: echo.json_value(),
                    x: grid.x_axis.clone(),
                    p_x: m.p_x.clone(),
                    y: grid.y_axis.clone(),
                    p_y: m.p_y.clone(),
                },
            )?;
        }
    }
    println!(
        "wigner: wrote {} ({}x{} grid); negativity: min_value = {min_value:.6}, negative_volume = {negative_volume:.6}",
        config.out.display(),
        grid.x_axis.len(),
        grid.y_axis.len(),
    );
    Ok(())
}
