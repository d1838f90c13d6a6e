use anyhow::Result;
use dissent_core::oracle::two_tech::{best_response, evaluate};
use dissent_core::rng::ALGORITHM_ID;
use dissent_core::two_tech::{
    case_effort_bound, comparison_curve, competition_efforts, competition_gap, output_competition, slack_scan,
    threshold_by_bisection, threshold_pbar, welfare, TeamKind, Threshold,
};
use dissent_core::{CaseId, CaseProfile, Params, TechBelief};

use super::Outcome;
use crate::config::Resolved;
use crate::report::{Check, Report, Table};

/// How far a case profile sits above its effort bound; the pair sum must
/// also stay below one. Case 2 is bounded by its own larger closed form.
pub fn case_bound_excess(profile: &CaseProfile, params: &Params) -> f64 {
    let d = params.derived();
    let beta = params.beta();
    let bound = match profile.case {
        CaseId::Two => d.r_high * (1.0 + beta * d.delta) / (1.0 - beta * d.r_low * d.delta),
        _ => case_effort_bound(params),
    };
    let worst = profile.efforts.iter().fold(f64::NEG_INFINITY, |m, &e| m.max(e - bound));
    worst.max(profile.aggregate() - 1.0 + f64::EPSILON)
}

/// Number of points of a `p` grid where the sign of the competition gap
/// disagrees with the claimed threshold.
pub fn threshold_mismatches(params: &Params, threshold: Threshold, steps: usize) -> Result<usize> {
    let mut bad = 0;
    for k in 0..=steps {
        let p = k as f64 / steps as f64;
        let gap = competition_gap(p, params)?;
        let ok = match threshold {
            Threshold::None => gap > 0.0,
            Threshold::At(pbar) if (p - pbar).abs() <= 1e-9 => gap.abs() <= 1e-12,
            Threshold::At(pbar) => (gap > 0.0) == (p > pbar),
        };
        if !ok {
            bad += 1;
        }
    }
    Ok(bad)
}

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let params = cfg.params()?;
    let p_star = cfg.p_star;
    let mut report = Report::new("two-tech", cfg)?;
    report.rng = Some((ALGORITHM_ID.to_string(), cfg.sim.seed));

    let mut cases = Table::new(
        "case_efforts",
        &["case", "d1", "d2", "e1", "e2", "aggregate", "oracle_gap", "output"],
    );
    let mut worst_gap = 0.0_f64;
    let mut worst_enum = 0.0_f64;
    let weights = TechBelief::symmetric(p_star)?;
    for case in CaseId::ALL {
        let profile = competition_efforts(case, &params);
        let play = profile.play();
        let mut gap = 0.0_f64;
        for i in 0..2 {
            gap = gap.max((best_response(i, &play, &params, cfg.grid_step)? - profile.efforts[i]).abs());
        }
        worst_gap = worst_gap.max(gap);
        let y = output_competition(p_star, &profile, &params)?;
        worst_enum = worst_enum.max((evaluate(&play, weights, &params)?.output - y).abs());
        let d = profile.switches;
        cases.row(vec![
            (case.number() as usize).into(),
            (d[0] as usize).into(),
            (d[1] as usize).into(),
            profile.efforts[0].into(),
            profile.efforts[1].into(),
            profile.aggregate().into(),
            gap.into(),
            y.into(),
        ]);
    }
    report.tables.push(cases);
    report.checks.push(Check::at_most(
        "case_oracle",
        worst_gap,
        2.0 * cfg.grid_step,
        "max |grid best response − case effort|",
    ));
    report.checks.push(Check::at_most(
        "case_enumeration",
        worst_enum,
        1e-12,
        "max |closed-form output − enumeration|",
    ));
    let excess = CaseId::ALL
        .iter()
        .map(|&c| case_bound_excess(&competition_efforts(c, &params), &params))
        .fold(f64::NEG_INFINITY, f64::max);
    report.checks.push(Check::at_most(
        "case_effort_bound",
        excess,
        0.0,
        "max case effort − its bound, or pair sum − 1",
    ));

    let steps = (1.0 / cfg.curve_step).round().max(1.0) as usize;
    let curve = comparison_curve(&params, steps)?;
    let mut table = Table::new("curves", &["p", "y_competition", "y_likeminded"]);
    let mut cases_used = Table::new("curve_cases", &["p", "case"]);
    for pt in &curve {
        table.row(vec![pt.p.into(), pt.y_competition.into(), pt.y_likeminded.into()]);
        cases_used.row(vec![pt.p.into(), (pt.case.number() as usize).into()]);
    }
    let curves_csv = table.to_csv()?;
    report.tables.push(table);
    report.tables.push(cases_used);

    let threshold = threshold_pbar(&params);
    match threshold {
        Threshold::None => report.value("p_bar", "none"),
        Threshold::At(p) => report.value("p_bar", p),
    }
    let bisect = threshold_by_bisection(&params, 1e-13)?;
    match bisect {
        Some(p) => report.value("p_bar_bisection", p),
        None => report.value("p_bar_bisection", "none"),
    }
    if let (Threshold::At(a), Some(b)) = (threshold, bisect) {
        report.checks.push(Check::at_most(
            "threshold_bisection",
            (a - b).abs(),
            1e-10,
            "|quadratic root − bisection root|",
        ));
    }
    report.checks.push(Check::at_most(
        "threshold_sign_pattern",
        threshold_mismatches(&params, threshold, steps)? as f64,
        0.0,
        "curve points on the wrong side of the threshold",
    ));

    let w_c = welfare(TeamKind::Competition, &params)?;
    let w_o = welfare(TeamKind::Optimists, &params)?;
    report.value("welfare_competition", w_c);
    report.value("welfare_optimists", w_o);
    report.value("welfare_like_minded_half", welfare(TeamKind::LikeMinded { p: 0.5, q: 0.5 }, &params)?);
    report.checks.push(Check::above(
        "welfare_competition_wins",
        w_c - w_o,
        0.0,
        "competition welfare − optimists welfare at p★ = (1,1)",
    ));

    let scan = slack_scan(cfg.slack_scan.random, cfg.slack_scan.grid, cfg.sim.seed);
    report.value("slack_points", scan.points as usize);
    report.value("slack_min_n", scan.min_n);
    report.value("slack_min_m", scan.min_m);
    report.value("slack_max_abs_b", scan.max_abs_b);
    report.checks.push(Check::at_least(
        "slack_slack",
        scan.min(),
        -1e-12,
        "smallest slack of the cross-technology best responses",
    ));

    Ok(Outcome {
        report,
        files: vec![("curves.csv", curves_csv)],
    })
}
