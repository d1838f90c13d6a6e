use anyhow::{bail, Result};
use dissent_core::matching::{
    optimal_pairing, workforce_disagreement, workforce_value, write_pairs_csv, PairingMode, Workforce, EXACT_LIMIT,
};

use super::Outcome;
use crate::config::Resolved;
use crate::report::{fmt9, Check, Report, Table};

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let params = cfg.params()?;
    if params.n() != 2 {
        bail!("match forms two-member teams; use --n 2 (got N = {})", params.n());
    }
    let p_star = cfg.p_star();
    let workforce = cfg.workforce.load()?;
    let sample = if workforce.is_analytic() {
        workforce.discretize(cfg.workers)?
    } else {
        workforce.clone()
    };
    let Workforce::Empirical { sorted } = &sample else {
        unreachable!("discretize returns an empirical workforce")
    };
    let mode = if sorted.len() <= EXACT_LIMIT {
        PairingMode::Exact
    } else {
        PairingMode::TwoOpt
    };
    let plan = optimal_pairing(&sample, p_star, &params, mode)?;
    let countermonotone = plan.is_countermonotone(sorted);

    let mut report = Report::new("match", cfg)?;
    report.value("workers", sorted.len());
    report.value("mode", if mode == PairingMode::Exact { "exact" } else { "two_opt" });
    report.value("total_value", plan.total_value);
    report.value("value_per_worker", plan.value_per_worker());
    report.value("sample_disagreement", workforce_disagreement(&sample)?);
    report.value("countermonotone", if countermonotone { "yes" } else { "no" });
    if workforce.is_analytic() {
        let v = workforce_value(&workforce, p_star, &params)?;
        report.value("workforce_value", v);
        report.value("workforce_disagreement", workforce_disagreement(&workforce)?);
        report.checks.push(Check::at_most(
            "discrete_value_agreement",
            (plan.value_per_worker() - v).abs(),
            1e-3,
            "|discrete value per worker − continuum value|",
        ));
    }
    report.checks.push(Check::at_most(
        "countermonotone",
        if countermonotone { 0.0 } else { 1.0 },
        0.0,
        "optimal pairing matches ranks k and n+1−k",
    ));

    let mut table = Table::new("pairs", &["worker_a", "worker_b", "pair_value"]);
    for p in &plan.pairs {
        table.row(vec![p.prior_a.into(), p.prior_b.into(), p.value.into()]);
    }
    report.tables.push(table);

    let mut csv = Vec::new();
    write_pairs_csv(&mut csv, &plan, fmt9)?;
    Ok(Outcome {
        report,
        files: vec![("pairs.csv", String::from_utf8(csv)?)],
    })
}
