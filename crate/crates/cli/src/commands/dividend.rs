use anyhow::Result;
use dissent_core::single_tech::dividend_decomposition;
use dissent_core::{team_disagreement, team_optimism, Team};

use super::Outcome;
use crate::config::Resolved;
use crate::report::{Check, Report, Table};

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let params = cfg.params()?;
    let team = cfg.team()?;
    let p_star = cfg.p_star();
    let d = dividend_decomposition(&team, p_star, &params)?;
    let mut report = Report::new("dividend", cfg)?;
    report.value("output", d.output);
    report.value("like_minded_baseline", d.like_minded_baseline);
    report.value("kappa", d.kappa);
    report.value("disagreement", d.disagreement);
    report.value("dividend", d.dividend());
    report.value("residual", d.residual());
    report.checks.push(Check::at_most(
        "identity_residual",
        d.residual().abs(),
        1e-12,
        "|output − baseline − κ·D|",
    ));
    report.checks.push(Check::above("kappa_positive", d.kappa, 0.0, "κ"));

    // Shrink the team toward its mean: optimism fixed, disagreement scaled by t².
    let o = team_optimism(&team);
    let mut sweep = Table::new("disagreement_sweep", &["t", "disagreement", "output", "baseline_plus_dividend"]);
    let mut max_drop = 0.0_f64;
    let mut last = f64::NEG_INFINITY;
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let shrunk = Team::new(team.priors().iter().map(|p| o + t * (p - o)).collect())?;
        let r = dividend_decomposition(&shrunk, p_star, &params)?;
        max_drop = max_drop.max(last - r.output);
        last = r.output;
        sweep.row(vec![
            t.into(),
            team_disagreement(&shrunk).into(),
            r.output.into(),
            (r.like_minded_baseline + r.dividend()).into(),
        ]);
    }
    report.tables.push(sweep);
    report.checks.push(Check::at_most(
        "sweep_monotone",
        max_drop,
        0.0,
        "largest output decrease as disagreement grows",
    ));
    Ok(Outcome::report_only(report))
}
