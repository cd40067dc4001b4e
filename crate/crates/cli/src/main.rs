//! `delaylab`: command-line front end for the delay differential equation
//! toolkit. One invocation handles one job; machine-readable output goes to
//! stdout (or `--out`), diagnostics to stderr. Exit codes: 0 success, 2
//! configuration error, 3 numeric failure.

mod args;
mod commands;
mod emit;
mod fail;
mod modelfile;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    let result = match &cli.command {
        args::Command::Simulate(a) => commands::simulate::run(a),
        args::Command::Analyze(a) => commands::analyze::run(a),
        args::Command::Hopf(a) => commands::hopf::run(a),
        args::Command::Sweep(a) => commands::sweep::run(a),
        args::Command::Reduce(a) => commands::reduce::run(a),
        args::Command::Check(a) => commands::check::run(a),
        args::Command::Oscillation(a) => commands::oscillation::run(a),
    };
    if let Err(f) = result {
        eprintln!("delaylab: {}: {}", f.location, f.message);
        std::process::exit(f.code);
    }
}
