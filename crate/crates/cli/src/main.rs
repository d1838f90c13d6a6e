//! `dissent`: runs one scenario of the team production model and writes a
//! report. Exit status 0 when every check passes, 1 when a check fails and 2
//! on configuration or I/O errors.

mod commands;
mod config;
mod report;

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{Outcome, Runner};
use config::{resolve, Format, Overrides};

#[derive(Parser)]
#[command(name = "dissent", version, about = "Team production under heterogeneous priors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Equilibrium efforts of a team, checked against a grid best response
    Effort,
    /// Decompose expected output into the like-minded baseline and the dividend
    Dividend,
    /// Expected output by closed form, enumeration and Monte Carlo
    Output,
    /// Optimal pairing of a workforce into two-member teams
    Match,
    /// Competition of ideas against like-minded teams with two technologies
    TwoTech,
    /// Monte Carlo estimate of expected output
    Simulate,
    /// Run the full invariant suite
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Effort => "effort",
            Command::Dividend => "dividend",
            Command::Output => "output",
            Command::Match => "match",
            Command::TwoTech => "two-tech",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }

    fn runner(self) -> Runner {
        match self {
            Command::Effort => commands::effort::run,
            Command::Dividend => commands::dividend::run,
            Command::Output => commands::output::run,
            Command::Match => commands::matching::run,
            Command::TwoTech => commands::two_tech::run,
            Command::Simulate => commands::simulate::run,
            Command::Verify => commands::verify::run,
        }
    }
}

fn emit(outcome: &Outcome, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&outcome.report.to_json())? + "\n",
        Format::Text => outcome.report.to_text(),
        Format::Csv => match (outcome.files.first(), outcome.report.tables.first()) {
            (Some((_, csv)), _) => csv.clone(),
            (None, Some(table)) => table.to_csv()?,
            (None, None) => {
                let mut t = report::Table::new("values", &["name", "value"]);
                for (k, v) in &outcome.report.values {
                    t.row(vec![k.as_str().into(), v.clone()]);
                }
                t.to_csv()?
            }
        },
    };
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = resolve(cli.command.name(), &cli.flags)?;
    let start = Instant::now();
    let outcome = (cli.command.runner())(&cfg)?;
    if matches!(cli.command, Command::Verify) {
        eprintln!("verify finished in {:.2} s", start.elapsed().as_secs_f64());
    }
    if let Some(dir) = &cfg.out {
        outcome.report.write(dir)?;
        for (name, content) in &outcome.files {
            let path = dir.join(name);
            fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    emit(&outcome, cfg.format)?;
    Ok(outcome.report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
