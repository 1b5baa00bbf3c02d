use std::fmt::Write as _;

use anyhow::Result;
use num_complex::Complex64 as C64;
use shg_core::propagator::{kerr_cat_overlap, kerr_evolve};

use crate::config::{Format, KerrConfig};
use crate::formats::{complex_pair, write_json, write_text, ConfigEcho, KerrJson};

pub fn run(config: KerrConfig) -> Result<()> {
    let alpha = C64::new(config.alpha, 0.0);
    let mean_n = alpha.norm_sqr();

    let mut echo = ConfigEcho::new("kerr");
    echo.push("alpha", config.alpha);
    echo.push("phi_nl", config.phi_nl);
    echo.push("cutoff", config.cutoff);
    echo.push("format", config.format.name());

    let state = kerr_evolve(alpha, config.phi_nl, config.cutoff)?;
    // the cat-formation point is Phi_NL = pi <n>, independent of the
    // requested phase
    let at_cat_point = kerr_evolve(alpha, std::f64::consts::PI * mean_n, config.cutoff)?;
    let overlap = kerr_cat_overlap(&at_cat_point, alpha);
    let probabilities = state.photon_distribution();

    let mut full_echo = echo.clone();
    full_echo.push("mean_n", mean_n);
    full_echo.push("cat_overlap_at_pi_mean", overlap);

    match config.format {
        Format::Csv => {
            let mut out = full_echo.csv_comments();
            out.push_str("n,re_c,im_c,probability\n");
            for (n, (coeff, prob)) in state.coeffs.iter().zip(&probabilities).enumerate() {
                writeln!(out, "{n},{},{},{prob}", coeff.re, coeff.im).unwrap();
            }
            write_text(&config.out, &out)?;
        }
        Format::Json => write_json(
            &config.out,
            &KerrJson {
                config: echo.json_value(),
                mean_n,
                phi_nl: config.phi_nl,
                cat_overlap_at_pi_mean: overlap,
                coeffs: state.coeffs.iter().map(|&z| complex_pair(z)).collect(),
                probabilities,
            },
        )?,
    }
    println!(
        "kerr: wrote {} ({} Fock levels); cat overlap at phi_nl = pi*<n> is {overlap:.12}",
        config.out.display(),
        state.coeffs.len(),
    );
    Ok(())
}
