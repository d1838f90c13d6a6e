//! Closed forms against the brute-force engines on random instances.

use dissent_core::oracle::two_tech::{best_response, TwoTechPlay};
use dissent_core::oracle::{best_response_first_period, enumerate_outcomes, exact_expected_output};
use dissent_core::single_tech::{expected_output, first_period_effort, EquilibriumProfile};
use dissent_core::two_tech::cross_tech_best_response;
use dissent_core::{validate_params, Belief, ParamSpec, Params, Tech, TechBelief, Team};
use proptest::prelude::*;

fn params(n: usize, beta: f64) -> Params {
    // Keep 2NR below one for every team size drawn here.
    let scale = 0.9 / (2.0 * n as f64 * 0.2);
    validate_params(ParamSpec {
        r_high: 0.2 * scale.min(1.0),
        r_low: 0.1 * scale.min(1.0),
        alpha: 1.0,
        beta,
        n,
    })
    .unwrap()
}

fn team_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 2..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn output_matches_enumeration(priors in team_strategy(), p_star in 0.0f64..=1.0, beta in 0.05f64..=1.0) {
        let p = params(priors.len(), beta);
        let team = Team::new(priors).unwrap();
        let b = Belief::new(p_star).unwrap();
        let closed = expected_output(&team, b, &p).unwrap();
        let exact = exact_expected_output(&team, b, &p).unwrap();
        prop_assert!((closed - exact).abs() <= 1e-12, "{closed} vs {exact}");
    }

    #[test]
    fn branches_form_a_distribution(priors in team_strategy(), p_star in 0.0f64..=1.0) {
        let p = params(priors.len(), 0.5);
        let team = Team::new(priors).unwrap();
        let eq = EquilibriumProfile::solve(&team, &p).unwrap();
        let dist = enumerate_outcomes(&team, &eq.first_period, Belief::new(p_star).unwrap(), &p).unwrap();
        prop_assert!((dist.total_probability() - 1.0).abs() <= 1e-12);
        prop_assert!(dist.branches.iter().all(|b| b.probability >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn efforts_are_best_responses(priors in team_strategy(), beta in 0.05f64..=1.0) {
        let p = params(priors.len(), beta);
        let team = Team::new(priors).unwrap();
        let eq = EquilibriumProfile::solve(&team, &p).unwrap();
        for i in 0..team.len() {
            let others: Vec<f64> = eq.first_period.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e).collect();
            let br = best_response_first_period(i, &team, &others, &p, 1e-5).unwrap();
            prop_assert!((br - eq.first_period[i]).abs() <= 2e-5);
        }
    }

    #[test]
    fn cross_tech_efforts_are_best_responses(a in 0.0f64..=1.0, b in 0.0f64..=1.0, beta in 0.05f64..=1.0) {
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        let p = params(2, beta);
        let (_, e) = cross_tech_best_response(hi, lo, &p).unwrap();
        let play = TwoTechPlay {
            priors: [TechBelief::new(hi, lo).unwrap(); 2],
            techs: [Tech::A, Tech::B],
            efforts: e,
            switch_when_indifferent: [true; 2],
        };
        for i in 0..2 {
            let br = best_response(i, &play, &p, 1e-5).unwrap();
            prop_assert!((br - e[i]).abs() <= 2e-5, "player {i}: {br} vs {}", e[i]);
        }
    }
}

#[test]
fn corner_teams_match_enumeration() {
    let p = params(2, 0.5);
    for priors in [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]] {
        let team = Team::new(priors.to_vec()).unwrap();
        for p_star in [0.0, 0.5, 1.0] {
            let b = Belief::new(p_star).unwrap();
            let gap = (expected_output(&team, b, &p).unwrap() - exact_expected_output(&team, b, &p).unwrap()).abs();
            assert!(gap <= 1e-12, "{priors:?} at {p_star}: {gap}");
        }
    }
    // Like-minded optimists at the defaults work at R̃ in both periods.
    let s = first_period_effort(0, &Team::like_minded(1.0, 2).unwrap(), &p).unwrap();
    assert!((s - 0.2).abs() < 1e-12);
}
