mod kerr;
mod quantum;
mod scaling;
mod twigner;
mod wigner;

use anyhow::Result;

use crate::config::{Cli, Command};

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Quantum(args) => quantum::run(args.resolve()?),
        Command::Wigner(args) => wigner::run(args.resolve()?),
        Command::Twigner(args) => twigner::run(args.resolve()?),
        Command::Scaling(args) => scaling::run(args.resolve()?),
        Command::Kerr(args) => kerr::run(args.resolve()?),
    }
}
