mod args;
mod commands;
mod output;

use clap::Parser;

use args::{Cli, Command};

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Grover(a) => commands::grover(a),
        Command::Fit(a) => commands::fit(a),
    }
}
