use anyhow::Result;
use dissent_core::oracle::best_response_first_period;
use dissent_core::single_tech::{aggregate_first_effort, EquilibriumProfile};
use dissent_core::{team_disagreement, team_optimism, Belief};

use super::Outcome;
use crate::config::Resolved;
use crate::report::{Check, Report, Table};

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let params = cfg.params()?;
    let team = cfg.team()?;
    params.check_team(&team)?;
    let profile = EquilibriumProfile::solve(&team, &params)?;
    let mut report = Report::new("effort", cfg)?;

    let mut table = Table::new(
        "efforts",
        &["player", "prior", "first_period", "second_period", "oracle", "gap"],
    );
    let mut worst_gap = 0.0_f64;
    for (i, &prior) in team.priors().iter().enumerate() {
        let others: Vec<f64> = profile
            .first_period
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &e)| e)
            .collect();
        let oracle = best_response_first_period(i, &team, &others, &params, cfg.grid_step)?;
        let gap = (oracle - profile.first_period[i]).abs();
        worst_gap = worst_gap.max(gap);
        table.row(vec![
            (i + 1).into(),
            prior.into(),
            profile.first_period[i].into(),
            profile.second_period(Belief::new(prior)?).into(),
            oracle.into(),
            gap.into(),
        ]);
    }
    report.tables.push(table);

    let closed = aggregate_first_effort(&team, &params)?;
    report.value("aggregate_first", profile.aggregate_first);
    report.value("aggregate_closed_form", closed);
    report.value("optimism", team_optimism(&team));
    report.value("disagreement", team_disagreement(&team));
    let bound = EquilibriumProfile::effort_bound(&params);
    report.value("effort_bound", bound);

    report.checks.push(Check::at_most(
        "oracle_best_response",
        worst_gap,
        2.0 * cfg.grid_step,
        "max |grid best response − closed form|",
    ));
    report.checks.push(Check::at_most(
        "aggregate_consistency",
        (closed - profile.aggregate_first).abs(),
        1e-12,
        "aggregate formula vs sum of efforts",
    ));
    let excess = profile.first_period.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e - bound));
    report.checks.push(Check::at_most("effort_bound", excess, 0.0, "max effort − bound"));
    report.checks.push(Check::at_most(
        "aggregate_below_one",
        profile.aggregate_first,
        1.0 - f64::EPSILON,
        "aggregate first-period effort",
    ));
    Ok(Outcome::report_only(report))
}
