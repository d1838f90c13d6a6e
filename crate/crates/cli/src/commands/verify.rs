//! The full deterministic invariant suite.

use anyhow::Result;
use dissent_core::matching::{optimal_pairing, workforce_disagreement, workforce_value, PairingMode, Workforce};
use dissent_core::oracle::search::maximize;
use dissent_core::oracle::two_tech::{best_response, evaluate};
use dissent_core::oracle::{best_response_first_period, cross_difference, exact_expected_output, simulate_game, SimConfig};
use dissent_core::rng::{stream_rng, ALGORITHM_ID};
use dissent_core::single_tech::{
    aggregate_first_effort, dividend_coefficient, dividend_decomposition, expected_output, first_period_effort,
    second_period_effort, EquilibriumProfile,
};
use dissent_core::two_tech::{
    competition_efforts, competition_gap, split_bound_g, split_bound_h, output_competition,
    output_like_minded, output_like_minded_optimists, slack_scan, threshold_by_bisection, threshold_pbar, welfare,
    TeamKind, Threshold,
};
use dissent_core::{validate_params, Belief, CaseId, ParamSpec, Params, Team, TechBelief};
use rand::Rng;

use super::two_tech::{case_bound_excess, threshold_mismatches};
use super::Outcome;
use crate::config::Resolved;
use crate::report::{Check, Report, Table};

/// Same ratios as `base`, with the returns shrunk if needed so that teams of
/// size `n` are admissible.
fn sized(base: &Params, n: usize) -> Result<Params> {
    if let Ok(p) = base.with_team_size(n) {
        return Ok(p);
    }
    let s = 0.9 / (2.0 * n as f64 * base.r_high());
    Ok(validate_params(ParamSpec {
        r_high: base.r_high() * s,
        r_low: base.r_low() * s,
        n,
        ..base.spec()
    })?)
}

fn preset(r_high: f64, r_low: f64, beta: f64) -> Result<Params> {
    Ok(validate_params(ParamSpec {
        r_high,
        r_low,
        alpha: 1.0,
        beta,
        n: 2,
    })?)
}

fn grid(k: usize) -> Vec<f64> {
    (0..k).map(|i| i as f64 / (k - 1) as f64).collect()
}

fn without(v: &[f64], i: usize) -> Vec<f64> {
    v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect()
}

/// Random streams used by the suite; one per family of checks.
mod stream {
    pub const DIVIDEND: u64 = 1;
    pub const ENUMERATION: u64 = 2;
    pub const PAIRING: u64 = 3;
}

fn efforts(cfg: &Resolved, base: &Params, report: &mut Report) -> Result<()> {
    let g = grid(10);
    let mut worst = 0.0_f64;
    let mut teams = 0usize;
    for n in [2usize, 3] {
        let params = sized(base, n)?;
        let mut profiles: Vec<Vec<f64>> = g.iter().map(|&a| vec![a]).collect();
        for _ in 1..n {
            profiles = profiles
                .iter()
                .flat_map(|p| g.iter().map(move |&b| [p.as_slice(), &[b]].concat()))
                .collect();
        }
        for priors in profiles {
            let team = Team::new(priors)?;
            let eq = EquilibriumProfile::solve(&team, &params)?;
            for i in 0..n {
                let br = best_response_first_period(i, &team, &without(&eq.first_period, i), &params, cfg.grid_step)?;
                worst = worst.max((br - eq.first_period[i]).abs());
            }
            teams += 1;
        }
    }
    report.value("effort_teams", teams);
    report.checks.push(Check::at_most(
        "first_period_oracle",
        worst,
        2e-5,
        "max |grid best response − closed-form effort| over N ∈ {2,3} prior grids",
    ));

    let d = base.derived();
    let mut worst2 = 0.0_f64;
    for k in 0..=100 {
        let pi = k as f64 / 100.0;
        let value = d.expected(pi);
        let best = maximize(|e| value * e - 0.5 * e * e, 0.0, 1.0, cfg.grid_step).argmax;
        worst2 = worst2.max((best - second_period_effort(Belief::new(pi)?, d)).abs());
    }
    report.checks.push(Check::at_most(
        "second_period_oracle",
        worst2,
        2e-5,
        "max |grid best response − closed-form second-period effort|",
    ));
    Ok(())
}

fn monotonicity(base: &Params, report: &mut Report) -> Result<()> {
    let g = grid(10);
    let mut violations = 0usize;
    let mut comparisons = 0usize;
    let p2 = sized(base, 2)?;
    for &own in &g {
        let s: Vec<f64> = g
            .iter()
            .map(|&q| first_period_effort(0, &Team::new(vec![own, q])?, &p2))
            .collect::<dissent_core::Result<_>>()?;
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                comparisons += 1;
                if s[a] <= s[b] {
                    violations += 1;
                }
            }
        }
    }
    let p3 = sized(base, 3)?;
    for &own in &g {
        let mut rows = Vec::new();
        for &q in &g {
            for &r in &g {
                rows.push((q + r, first_period_effort(0, &Team::new(vec![own, q, r])?, &p3)?));
            }
        }
        for x in 0..rows.len() {
            for y in x + 1..rows.len() {
                let ((ox, sx), (oy, sy)) = (rows[x], rows[y]);
                if (ox - oy).abs() < 1e-12 {
                    continue;
                }
                comparisons += 1;
                if (ox < oy) != (sx > sy) || sx == sy {
                    violations += 1;
                }
            }
        }
    }
    report.value("monotonicity_comparisons", comparisons);
    report.checks.push(Check::at_most(
        "effort_falls_with_coworker_optimism",
        violations as f64,
        0.0,
        "grid pairs where more optimistic coworkers do not strictly lower effort",
    ));
    Ok(())
}

fn dividend(cfg: &Resolved, base: &Params, report: &mut Report) -> Result<()> {
    let mut rng = stream_rng(cfg.sim.seed, stream::DIVIDEND);
    let mut worst = 0.0_f64;
    let mut min_kappa = f64::INFINITY;
    let mut worst_agg = 0.0_f64;
    let mut max_excess = f64::NEG_INFINITY;
    for k in 0..1000 {
        let n = [2usize, 3, 5][k % 3];
        let params = sized(base, n)?;
        let team = Team::new((0..n).map(|_| rng.random::<f64>()).collect())?;
        let p_star = Belief::new(rng.random())?;
        let r = dividend_decomposition(&team, p_star, &params)?;
        worst = worst.max(r.residual().abs());
        min_kappa = min_kappa.min(r.kappa);
        let eq = EquilibriumProfile::solve(&team, &params)?;
        worst_agg = worst_agg.max((aggregate_first_effort(&team, &params)? - eq.aggregate_first).abs());
        let bound = EquilibriumProfile::effort_bound(&params);
        for e in &eq.first_period {
            max_excess = max_excess.max(e - bound);
        }
    }
    report.checks.push(Check::at_most(
        "dividend_identity",
        worst,
        1e-12,
        "max |Y − baseline − κ·D| over 1000 random teams, N ∈ {2,3,5}",
    ));
    report.checks.push(Check::above("kappa_positive", min_kappa, 0.0, "smallest κ"));
    report.checks.push(Check::at_most(
        "aggregate_consistency",
        worst_agg,
        1e-12,
        "max |aggregate formula − sum of efforts|",
    ));
    report.checks.push(Check::at_most("effort_bound", max_excess, 0.0, "max effort − bound"));
    Ok(())
}

fn output(cfg: &Resolved, base: &Params, report: &mut Report) -> Result<()> {
    let mut rng = stream_rng(cfg.sim.seed, stream::ENUMERATION);
    let mut worst = 0.0_f64;
    for k in 0..300 {
        let n = [2usize, 3, 5][k % 3];
        let params = sized(base, n)?;
        let team = Team::new((0..n).map(|_| rng.random::<f64>()).collect())?;
        let p_star = Belief::new(rng.random())?;
        worst = worst.max((expected_output(&team, p_star, &params)? - exact_expected_output(&team, p_star, &params)?).abs());
    }
    report.checks.push(Check::at_most(
        "output_enumeration",
        worst,
        1e-12,
        "max |closed-form Y − enumerated Y| over 300 random instances",
    ));

    let defaults = validate_params(ParamSpec::default())?;
    let team = Team::new(vec![1.0, 0.0])?;
    let half = Belief::new(0.5)?;
    let sim = simulate_game(
        &team,
        half,
        &defaults,
        &SimConfig {
            n_paths: cfg.sim.n_paths,
            seed: cfg.sim.seed,
            antithetic: cfg.sim.antithetic,
        },
    )?;
    report.value("mc_mean", sim.mean);
    report.value("mc_std_error", sim.std_error);
    report.checks.push(Check::at_most(
        "monte_carlo_brackets_reference",
        (sim.mean - 0.069013).abs(),
        4.0 * sim.std_error,
        "team (1,0), p★ = 0.5: |mean − 0.069013| within 4 standard errors",
    ));
    let exact = exact_expected_output(&team, half, &defaults)?;
    report.checks.push(Check::at_most(
        "monte_carlo_vs_enumeration",
        (sim.mean - exact).abs(),
        4.0 * sim.std_error,
        "|mean − enumerated Y| within 4 standard errors",
    ));

    // Complementarity signs of the aggregate effort and of output.
    let p2 = sized(base, 2)?;
    let d = p2.derived();
    let h = 1e-2;
    let mut worst_cross = 0.0_f64;
    let mut max_y_cross = f64::NEG_INFINITY;
    for &x in &grid(9)[1..8] {
        for &y in &grid(9)[1..8] {
            let agg = |a: f64, b: f64| aggregate_first_effort(&Team::new(vec![a, b]).unwrap(), &p2).unwrap();
            let c = cross_difference(agg, x, y, h)?;
            worst_cross = worst_cross.max((c + 2.0 * p2.beta() * d.delta * d.delta * h * h).abs());
            let out = |a: f64, b: f64| expected_output(&Team::new(vec![a, b]).unwrap(), half, &p2).unwrap();
            max_y_cross = max_y_cross.max(cross_difference(out, x, y, h)?);
        }
    }
    report.checks.push(Check::at_most(
        "effort_cross_difference",
        worst_cross,
        1e-15,
        "max |cross difference of aggregate effort + 2βΔ²h²|",
    ));
    report.checks.push(Check::at_most(
        "output_submodular",
        max_y_cross,
        0.0,
        "largest cross difference of Y in the two priors",
    ));
    Ok(())
}

fn matching(cfg: &Resolved, report: &mut Report) -> Result<()> {
    let defaults = validate_params(ParamSpec::default())?;
    let half = Belief::new(0.5)?;
    let mut rng = stream_rng(cfg.sim.seed, stream::PAIRING);
    let mut bad = 0usize;
    for k in 0..50 {
        let n = 2 * (1 + k % 6);
        let w = Workforce::empirical((0..n).map(|_| rng.random::<f64>()).collect())?;
        let Workforce::Empirical { sorted } = &w else { unreachable!() };
        if !optimal_pairing(&w, half, &defaults, PairingMode::Exact)?.is_countermonotone(sorted) {
            bad += 1;
        }
    }
    report.checks.push(Check::at_most(
        "exact_pairing_countermonotone",
        bad as f64,
        0.0,
        "random samples (n ≤ 12) whose optimum is not countermonotone",
    ));
    let mut bad = 0usize;
    for n in [50usize, 200] {
        let w = Workforce::empirical((0..n).map(|_| rng.random::<f64>()).collect())?;
        let Workforce::Empirical { sorted } = &w else { unreachable!() };
        if !optimal_pairing(&w, half, &defaults, PairingMode::TwoOpt)?.is_countermonotone(sorted) {
            bad += 1;
        }
    }
    report.checks.push(Check::at_most(
        "two_opt_countermonotone",
        bad as f64,
        0.0,
        "samples of 50 and 200 whose 2-opt fixed point is not countermonotone",
    ));

    let kappa = dividend_coefficient(half, half, &defaults);
    let forces = [
        ("uniform", Workforce::Uniform),
        ("beta(2,2)", Workforce::symmetric_beta(2.0)?),
        ("beta(5,5)", Workforce::symmetric_beta(5.0)?),
    ];
    let mut table = Table::new("workforces", &["workforce", "value", "disagreement"]);
    let mut vd = Vec::new();
    for (name, w) in &forces {
        let v = workforce_value(w, half, &defaults)?;
        let dbar = workforce_disagreement(w)?;
        table.row(vec![(*name).into(), v.into(), dbar.into()]);
        vd.push((v, dbar));
    }
    report.tables.push(table);
    let mut worst = 0.0_f64;
    for a in 0..vd.len() {
        for b in 0..vd.len() {
            worst = worst.max(((vd[a].0 - vd[b].0) - kappa * (vd[a].1 - vd[b].1)).abs());
        }
    }
    report.checks.push(Check::at_most(
        "workforce_dividend_identity",
        worst,
        1e-6,
        "max |ΔV − κ·ΔD̄| over uniform, beta(2,2), beta(5,5)",
    ));
    report.checks.push(Check::at_most(
        "uniform_value_quadrature",
        (vd[0].0 - 0.034443).abs(),
        1e-3,
        "|V(uniform) − 0.034443| by quadrature",
    ));
    let base = expected_output(&Team::new(vec![0.5, 0.5])?, half, &defaults)?;
    report.checks.push(Check::at_most(
        "uniform_value_closed_form",
        (vd[0].0 - (0.5 * base + kappa / 6.0)).abs(),
        1e-8,
        "|V(uniform) − (Y(½,½)/2 + κ/6)|",
    ));
    let sample = Workforce::Uniform.discretize(200)?;
    let v200 = optimal_pairing(&sample, half, &defaults, PairingMode::TwoOpt)?.value_per_worker();
    report.value("uniform_value_n200", v200);
    report.checks.push(Check::at_most(
        "uniform_value_discrete",
        (v200 - 0.034443).abs(),
        1e-3,
        "|discrete value of 200 uniform workers − 0.034443|",
    ));
    Ok(())
}

fn two_tech(cfg: &Resolved, base: &Params, report: &mut Report) -> Result<()> {
    let scan = slack_scan(cfg.slack_scan.random, cfg.slack_scan.grid, cfg.sim.seed);
    report.value("slack_points", scan.points as usize);
    report.checks.push(Check::at_least(
        "slack_slack",
        scan.min(),
        -1e-12,
        "smallest slack N, M of the cross-technology best responses",
    ));

    let mut gap = 0.0_f64;
    let mut enum_gap = 0.0_f64;
    let mut excess = f64::NEG_INFINITY;
    let p2 = sized(base, 2)?;
    for case in CaseId::ALL {
        let profile = competition_efforts(case, &p2);
        let play = profile.play();
        for i in 0..2 {
            gap = gap.max((best_response(i, &play, &p2, cfg.grid_step)? - profile.efforts[i]).abs());
        }
        for p in grid(11) {
            let y = output_competition(p, &profile, &p2)?;
            enum_gap = enum_gap.max((evaluate(&play, TechBelief::symmetric(p)?, &p2)?.output - y).abs());
        }
        excess = excess.max(case_bound_excess(&profile, &p2));
    }
    report.checks.push(Check::at_most("case_oracle", gap, 2e-5, "max |grid best response − case effort|"));
    report.checks.push(Check::at_most(
        "case_enumeration",
        enum_gap,
        1e-12,
        "max |closed-form competition output − enumeration|",
    ));
    report.checks.push(Check::at_most(
        "case_effort_bound",
        excess,
        0.0,
        "max case effort − its bound, or pair sum − 1",
    ));

    // Threshold presets.
    let no_threshold = preset(0.2, 0.1, 0.5)?;
    let below = (0..=100)
        .map(|k| competition_gap(k as f64 / 100.0, &no_threshold))
        .collect::<dissent_core::Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    report.checks.push(Check::above(
        "competition_always_wins",
        below,
        0.0,
        "min over a 0.01 grid of Y^C − Y^L with r̃/Δ = 1",
    ));
    let crossing = preset(0.24, 0.04, 0.5)?;
    let quad = threshold_pbar(&crossing);
    let bis = threshold_by_bisection(&crossing, 1e-13)?;
    let pbar = match quad {
        Threshold::At(p) => p,
        Threshold::None => f64::NAN,
    };
    report.value("p_bar", pbar);
    report.checks.push(Check::at_most(
        "threshold_roots_agree",
        bis.map_or(f64::INFINITY, |b| (b - pbar).abs()),
        1e-10,
        "|quadratic p̄ − bisection p̄| for R = 0.24, r = 0.04, β = 0.5",
    ));
    report.checks.push(Check::at_most(
        "threshold_unique_crossing",
        threshold_mismatches(&crossing, quad, 100)? as f64,
        0.0,
        "grid points on the wrong side of p̄",
    ));
    let knife = preset(0.2, 0.1, 1.0)?;
    report.checks.push(Check::at_most(
        "threshold_knife_edge",
        competition_gap(0.0, &knife)?.abs(),
        1e-12,
        "|Y^C(0) − Y^L(0)| with β = r̃/Δ",
    ));

    // Welfare.
    let defaults = validate_params(ParamSpec::default())?;
    let w_c = welfare(TeamKind::Competition, &defaults)?;
    let w_o = welfare(TeamKind::Optimists, &defaults)?;
    report.value("welfare_competition", w_c);
    report.value("welfare_optimists", w_o);
    report.checks.push(Check::at_most(
        "welfare_optimists_reference",
        (w_o - 0.09).abs(),
        1e-9,
        "|optimists welfare − 0.09| at defaults",
    ));
    report.checks.push(Check::at_most(
        "welfare_competition_reference",
        (w_c - 0.092150).abs(),
        5e-7,
        "|competition welfare − 0.092150| at defaults",
    ));
    let mut min_diff = f64::INFINITY;
    let mut points = 0usize;
    for beta in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for rh in [0.05, 0.1, 0.15, 0.2, 0.24] {
            for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let Ok(p) = preset(rh, rh * frac, beta) else { continue };
                min_diff = min_diff.min(welfare(TeamKind::Competition, &p)? - welfare(TeamKind::Optimists, &p)?);
                points += 1;
            }
        }
    }
    report.value("welfare_grid_points", points);
    report.checks.push(Check::above(
        "welfare_competition_wins",
        if points >= 100 { min_diff } else { f64::NAN },
        0.0,
        "min competition − optimists welfare over the β × R̃ × r̃ grid",
    ));
    let mut worst = f64::NEG_INFINITY;
    for &p in &grid(21) {
        for &q in &grid(21) {
            worst = worst.max(welfare(TeamKind::LikeMinded { p, q }, &defaults)? - w_o);
        }
    }
    report.checks.push(Check::at_most(
        "optimists_beat_like_minded",
        worst,
        1e-15,
        "max like-minded − optimists welfare on a 21 × 21 grid",
    ));

    // Like-minded bound.
    let mut sym = 0.0_f64;
    let mut min_second = f64::INFINITY;
    let mut lm = f64::NEG_INFINITY;
    let xs: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
    for &x in &xs {
        for k in 1..=10 {
            let e1 = 0.09 * k as f64;
            sym = sym.max((split_bound_h(e1, 0.0, x, &defaults)? - split_bound_h(e1, e1, x, &defaults)?).abs());
            for j in 0..10 {
                let h = e1 / 20.0;
                let a = h + j as f64 * (e1 - 2.0 * h) / 9.0;
                let second = split_bound_h(e1, (a + h).min(e1), x, &defaults)? - 2.0 * split_bound_h(e1, a, x, &defaults)?
                    + split_bound_h(e1, (a - h).max(0.0), x, &defaults)?;
                min_second = min_second.min(second);
            }
        }
        for &p in &grid(11) {
            for &q in &grid(11) {
                lm = lm.max(output_like_minded(p, q, x, &defaults)? - output_like_minded_optimists(x, &defaults)?);
            }
        }
    }
    let mut linear = 0.0_f64;
    for k in 1..=9 {
        let e1 = 0.1 * k as f64;
        for j in 0..=10 {
            let a = e1 * j as f64 / 10.0;
            linear = linear.max((split_bound_h(e1, a, 1.0, &defaults)? - split_bound_g(e1, &defaults)).abs());
        }
    }
    report.checks.push(Check::at_most(
        "bound_collapses_at_one",
        linear,
        1e-12,
        "max |H(e₁, e_A1) − G(e₁)| at x = 1",
    ));
    report.checks.push(Check::at_most("bound_symmetric", sym, 1e-12, "max |H(e₁,0) − H(e₁,e₁)|"));
    report.checks.push(Check::above(
        "bound_convex",
        min_second,
        0.0,
        "smallest second difference of H in the split",
    ));
    report.checks.push(Check::at_most(
        "optimists_most_productive",
        lm,
        1e-15,
        "max like-minded output − optimists output at (x,x)",
    ));
    Ok(())
}

pub fn run(cfg: &Resolved) -> Result<Outcome> {
    let base = cfg.params()?;
    let mut report = Report::new("verify", cfg)?;
    report.rng = Some((ALGORITHM_ID.to_string(), cfg.sim.seed));
    efforts(cfg, &base, &mut report)?;
    monotonicity(&base, &mut report)?;
    dividend(cfg, &base, &mut report)?;
    output(cfg, &base, &mut report)?;
    matching(cfg, &mut report)?;
    two_tech(cfg, &base, &mut report)?;
    Ok(Outcome::report_only(report))
}
