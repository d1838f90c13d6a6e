use anyhow::Result;
use dissent_core::oracle::{exact_expected_output, simulate_game};

use super::Outcome;
use crate::config::Resolved;
use crate::report::{Check, Report};

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let params = cfg.params()?;
    let team = cfg.team()?;
    let p_star = cfg.p_star();
    let sim = simulate_game(&team, p_star, &params, &cfg.sim)?;
    let exact = exact_expected_output(&team, p_star, &params)?;
    let mut report = Report::new("simulate", cfg)?;
    report.rng = Some((sim.algorithm.to_string(), sim.seed));
    report.value("mean", sim.mean);
    report.value("std_error", sim.std_error);
    report.value("samples", sim.samples as usize);
    report.value("exact", exact);
    let z = if sim.std_error > 0.0 {
        (sim.mean - exact).abs() / sim.std_error
    } else if sim.mean == exact {
        0.0
    } else {
        f64::INFINITY
    };
    report.value("z_score", z);
    report.checks.push(Check::at_most("within_four_sigma", z, 4.0, "|mean − exact| / std error"));
    Ok(Outcome::report_only(report))
}
