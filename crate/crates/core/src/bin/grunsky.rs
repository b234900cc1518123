use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use grunsky_core::cli::{run, Command, Overrides, RunConfig};
use grunsky_core::grunsky::Route;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Compute,
    Norm,
    Invariance,
    Recover,
    Holomorphy,
    Sweep,
    ZooList,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Series,
    Quadrature,
}

/// Grunsky operators of non-overlapping disk maps.
#[derive(Debug, Parser)]
#[command(name = "grunsky", version)]
struct Args {
    command: Cmd,
    /// JSON run configuration (not needed for zoo-list).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Truncation order N.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum)]
    route: Option<RouteArg>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Compute => Command::Compute,
        Cmd::Norm => Command::Norm,
        Cmd::Invariance => Command::Invariance,
        Cmd::Recover => Command::Recover,
        Cmd::Holomorphy => Command::Holomorphy,
        Cmd::Sweep => Command::Sweep,
        Cmd::ZooList => Command::ZooList,
    };
    let overrides = Overrides {
        out: args.out,
        order: args.order,
        route: args.route.map(|r| match r {
            RouteArg::Series => Route::Series,
            RouteArg::Quadrature => Route::Quadrature,
        }),
    };
    let result = match &args.config {
        Some(path) => RunConfig::load(path).and_then(|c| run(command, Some(&c), &overrides)),
        None => run(command, None, &overrides),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
