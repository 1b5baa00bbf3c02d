//! Command-line driver: one subcommand per experiment, file outputs with a
//! resolved-configuration header so every run can be reproduced exactly.

pub mod commands;
pub mod config;
pub mod formats;

use clap::Parser;

use config::Cli;

/// Exit code for configuration and input errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical-quality-gate failures.
pub const EXIT_NUMERICAL: i32 = 3;

pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // results do not depend on the worker count; this only caps CPU use
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure thread pool: {err}");
            return EXIT_CONFIG;
        }
    }
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err
                .downcast_ref::<shg_core::Error>()
                .is_some_and(|e| e.is_numerical_gate())
            {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}
