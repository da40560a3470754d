//! `solgrowth`: experiment runner for product-set growth in solvable matrix
//! groups over finite fields.
//!
//! Every subcommand except `generate` prints one JSON report. The exit
//! status is 0 when every verdict in the report passes, 1 when one fails and
//! 2 on an error.

mod commands;
mod report;
mod settings;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{
    DescentArgs, DichotomyArgs, ExplogArgs, FuzzArgs, GenerateArgs, GrowthArgs, PivotArgs, RootsArgs,
};
use settings::{CommonArgs, Settings, CAP_ENV};

#[derive(Parser, Debug)]
#[command(name = "solgrowth", version, about = "Growth and structure of sets in solvable matrix groups")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded instance as a matrix-set file.
    Generate(GenerateArgs),
    /// Product-set sizes of A and one lemma check.
    Growth(GrowthArgs),
    /// exp/log bijection suite on the unitriangular group.
    Explog(ExplogArgs),
    /// Weight decomposition of U under a diagonal torus.
    Roots(RootsArgs),
    /// Pivot argument on a synthetic action.
    Pivot(PivotArgs),
    /// Capture U_R inside a bounded product set of A.
    Descent(DescentArgs),
    /// Growth or structure certificate for A, with verification.
    Dichotomy(DichotomyArgs),
    /// Seeded batches of lemma and driver checks.
    Fuzz(FuzzArgs),
}

fn run(cli: &Cli) -> Result<bool> {
    let env_cap = std::env::var(CAP_ENV).ok();
    let s = Settings::resolve(&cli.common, env_cap.as_deref())?;
    let (name, run) = match &cli.command {
        Command::Generate(args) => {
            report::write_text(&commands::generate(&s, args)?, s.out())?;
            return Ok(true);
        }
        Command::Growth(args) => ("growth", commands::growth(&s, args)?),
        Command::Explog(args) => ("explog", commands::explog(&s, args)?),
        Command::Roots(args) => ("roots", commands::roots(&s, args)?),
        Command::Pivot(args) => ("pivot", commands::pivot(&s, args)?),
        Command::Descent(args) => ("descent", commands::descent(&s, args)?),
        Command::Dichotomy(args) => ("dichotomy", commands::dichotomy(&s, args)?),
        Command::Fuzz(args) => ("fuzz", commands::fuzz(&s, args)?),
    };
    let rep = report::report(name, s.to_json(), run.result, run.passed);
    report::emit(&rep, s.out())?;
    Ok(run.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
