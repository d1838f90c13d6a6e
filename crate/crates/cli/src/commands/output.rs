use anyhow::Result;
use dissent_core::oracle::{exact_expected_output, simulate_game};
use dissent_core::single_tech::expected_output;

use super::Outcome;
use crate::config::Resolved;
use crate::report::{Check, Report};

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let params = cfg.params()?;
    let team = cfg.team()?;
    let p_star = cfg.p_star();
    let closed = expected_output(&team, p_star, &params)?;
    let enumerated = exact_expected_output(&team, p_star, &params)?;
    let sim = simulate_game(&team, p_star, &params, &cfg.sim)?;
    let mut report = Report::new("output", cfg)?;
    report.rng = Some((sim.algorithm.to_string(), sim.seed));
    report.value("closed_form", closed);
    report.value("enumeration", enumerated);
    report.value("monte_carlo_mean", sim.mean);
    report.value("monte_carlo_std_error", sim.std_error);
    report.checks.push(Check::at_most(
        "enumeration_agreement",
        (closed - enumerated).abs(),
        1e-12,
        "|closed form − enumeration|",
    ));
    report.checks.push(Check::at_most(
        "monte_carlo_agreement",
        (sim.mean - enumerated).abs(),
        4.0 * sim.std_error,
        "|simulated mean − enumeration| within 4 standard errors",
    ));
    Ok(Outcome::report_only(report))
}
