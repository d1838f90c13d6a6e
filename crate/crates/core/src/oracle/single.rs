use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::maximize;
use crate::error::{ModelError, Result};
use crate::model::{Belief, Params, Team};
use crate::rng::{stream_rng, ALGORITHM_ID};
use crate::single_tech::{first_period_effort, second_period_effort};

/// Success probability of aggregate effort `e`.
#[inline]
fn success(e: f64) -> f64 {
    e.clamp(0.0, 1.0)
}

/// Second-period value of player `i` at posterior profile `posteriors` when
/// everybody plays the second-period rule:
/// `Vⁱ = E_{πⁱ}[ω̃]·P(Σ_j e₂*(πʲ)) − ½·e₂*(πⁱ)²`.
pub fn continuation_value(i: usize, posteriors: &Team, params: &Params) -> Result<f64> {
    params.check_team(posteriors)?;
    let own = posteriors.belief(i).ok_or(ModelError::PlayerOutOfRange {
        index: i,
        len: posteriors.len(),
    })?;
    let d = params.derived();
    let efforts: f64 = posteriors
        .priors()
        .iter()
        .map(|&p| second_period_effort(Belief::new(p).expect("team entries are beliefs"), d))
        .sum();
    let own_effort = second_period_effort(own, d);
    Ok(d.expected(own.value()) * success(efforts) - 0.5 * own_effort * own_effort)
}

/// Numerical best response of player `i` in the first period.
///
/// Maximizes, over own effort `e` on `[0,1]`, the subjective objective
/// `E_i[ω̃]·P(e+S) − e²/2 + β·[P(e+S)·E_i[Vⁱ | y₁>0] + (1−P(e+S))·Vⁱ(p)]`
/// where `S` is the opponents' total effort and the success branch weights
/// `ω = R` by player `i`'s own prior. `opponent_efforts` lists the other
/// players' efforts in team order with `i` skipped.
pub fn best_response_first_period(
    i: usize,
    team: &Team,
    opponent_efforts: &[f64],
    params: &Params,
    grid_step: f64,
) -> Result<f64> {
    params.check_team(team)?;
    let n = team.len();
    let own = team.belief(i).ok_or(ModelError::PlayerOutOfRange { index: i, len: n })?;
    if opponent_efforts.len() + 1 != n {
        return Err(ModelError::Precondition(format!(
            "expected {} opponent efforts, got {}",
            n - 1,
            opponent_efforts.len()
        )));
    }
    if !(grid_step > 0.0) {
        return Err(ModelError::Precondition(format!("grid step {grid_step} must be positive")));
    }
    let d = params.derived();
    let others: f64 = opponent_efforts.iter().sum();
    let headroom = 1.0 - d.r_high * (1.0 + (n as f64 - 1.0) * params.beta() * d.delta);
    if opponent_efforts.iter().any(|&e| e < 0.0) || others >= headroom {
        return Err(ModelError::Precondition(format!(
            "opponent effort {others} must be non-negative and below {headroom}"
        )));
    }
    let all = |p: f64| Team::like_minded(p, n);
    let v_high = continuation_value(i, &all(1.0)?, params)?;
    let v_low = continuation_value(i, &all(0.0)?, params)?;
    let v_fail = continuation_value(i, team, params)?;
    let p = own.value();
    let after_success = p * v_high + (1.0 - p) * v_low;
    let current = d.expected(p);
    let beta = params.beta();
    let objective = |e: f64| {
        let s = success(e + others);
        current * s - 0.5 * e * e + beta * (s * after_success + (1.0 - s) * v_fail)
    };
    Ok(maximize(objective, 0.0, 1.0, grid_step).argmax)
}

/// First-period outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    HighReturn,
    LowReturn,
    Failure,
}

/// One first-period branch as seen by an evaluator holding belief `p★`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub outcome: Outcome,
    pub probability: f64,
    /// Players' posteriors entering the second period.
    pub posteriors: Vec<f64>,
    /// Evaluator's probability of `ω = R` on this branch.
    pub state_belief: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub branches: Vec<Branch>,
}

impl OutcomeDistribution {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

/// First-period branches `{R-success, r-success, failure}` under `p★`, with
/// posteriors following the updating rule: a success reveals `ω` to everybody,
/// a failure leaves priors unchanged.
pub fn enumerate_outcomes(
    team: &Team,
    efforts: &[f64],
    p_star: Belief,
    params: &Params,
) -> Result<OutcomeDistribution> {
    params.check_team(team)?;
    if efforts.len() != team.len() || efforts.iter().any(|&e| !(e >= 0.0)) {
        return Err(ModelError::Precondition(
            "one non-negative effort per team member required".into(),
        ));
    }
    let s = success(efforts.iter().sum());
    let ps = p_star.value();
    let n = team.len();
    Ok(OutcomeDistribution {
        branches: vec![
            Branch {
                outcome: Outcome::HighReturn,
                probability: s * ps,
                posteriors: vec![1.0; n],
                state_belief: 1.0,
            },
            Branch {
                outcome: Outcome::LowReturn,
                probability: s * (1.0 - ps),
                posteriors: vec![0.0; n],
                state_belief: 0.0,
            },
            Branch {
                outcome: Outcome::Failure,
                probability: 1.0 - s,
                posteriors: team.priors().to_vec(),
                state_belief: ps,
            },
        ],
    })
}

/// `Y_{p★}(p)` by summing over first-period branches and evaluating
/// second-period play on each.
pub fn exact_expected_output(team: &Team, p_star: Belief, params: &Params) -> Result<f64> {
    let efforts = (0..team.len())
        .map(|i| first_period_effort(i, team, params))
        .collect::<Result<Vec<_>>>()?;
    let dist = enumerate_outcomes(team, &efforts, p_star, params)?;
    let d = params.derived();
    let mut total = 0.0;
    for b in &dist.branches {
        let first = match b.outcome {
            Outcome::HighReturn => params.r_high(),
            Outcome::LowReturn => params.r_low(),
            Outcome::Failure => 0.0,
        };
        let second_effort: f64 = b
            .posteriors
            .iter()
            .map(|&p| d.expected(p))
            .sum::<f64>();
        let second = params.expected_raw_return(b.state_belief) * success(second_effort);
        total += b.probability * (first + params.beta() * second);
    }
    Ok(total)
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_paths: u64,
    pub seed: u64,
    /// Pair each path with the one driven by `1 − u` for every uniform draw.
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_paths: 1_000_000,
            seed: 42,
            antithetic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Number of independent samples behind the standard error (paths, or
    /// antithetic pairs).
    pub samples: u64,
    pub algorithm: &'static str,
    pub seed: u64,
}

const CHUNK: u64 = 1 << 16;

/// Simulates the game path by path: draws `ω ~ p★`, first-period success,
/// posteriors, second-period success, and averages `y₁ + β·y₂`.
///
/// Paths are grouped in fixed-size chunks; chunk `c` draws from stream `c`
/// of the seeded generator and chunk sums are combined in chunk order, so
/// the estimate is bit-identical for a given seed.
pub fn simulate_game(team: &Team, p_star: Belief, params: &Params, cfg: &SimConfig) -> Result<SimEstimate> {
    if cfg.n_paths == 0 {
        return Err(ModelError::Precondition("n_paths must be at least 1".into()));
    }
    params.check_team(team)?;
    let d = params.derived();
    let n = team.len() as f64;
    let first: f64 = (0..team.len())
        .map(|i| first_period_effort(i, team, params))
        .sum::<Result<f64>>()?;
    let s1 = success(first);
    let s2_high = success(n * d.r_high);
    let s2_low = success(n * d.r_low);
    let s2_fail = success(team.priors().iter().map(|&p| d.expected(p)).sum());
    let ps = p_star.value();
    let (big, small, beta) = (params.r_high(), params.r_low(), params.beta());

    let path = |u_state: f64, u1: f64, u2: f64| -> f64 {
        let omega = if u_state < ps { big } else { small };
        let (y1, s2) = if u1 < s1 {
            (omega, if omega == big { s2_high } else { s2_low })
        } else {
            (0.0, s2_fail)
        };
        let y2 = if u2 < s2 { omega } else { 0.0 };
        y1 + beta * y2
    };

    let samples = if cfg.antithetic {
        cfg.n_paths.div_ceil(2)
    } else {
        cfg.n_paths
    };
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(cfg.seed, c);
            let count = CHUNK.min(samples - c * CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let (a, b, e): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
                let x = if cfg.antithetic {
                    0.5 * (path(a, b, e) + path(1.0 - a, 1.0 - b, 1.0 - e))
                } else {
                    path(a, b, e)
                };
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial
        .iter()
        .fold((0.0, 0.0), |(s, q), &(a, b)| (s + a, q + b));
    let m = samples as f64;
    let mean = sum / m;
    let var = if samples > 1 {
        ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimEstimate {
        mean,
        std_error: (var / m).sqrt(),
        samples,
        algorithm: ALGORITHM_ID,
        seed: cfg.seed,
    })
}

/// `f(x+h, y+h) − f(x+h, y) − f(x, y+h) + f(x, y)`.
pub fn cross_difference<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> Result<f64> {
    let inside = |v: f64| (0.0..=1.0).contains(&v);
    if !(inside(x) && inside(y) && inside(x + h) && inside(y + h)) {
        return Err(ModelError::Domain(format!(
            "cross difference at ({x}, {y}) with step {h} leaves [0,1]²"
        )));
    }
    Ok(f(x + h, y + h) - f(x + h, y) - f(x, y + h) + f(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, ParamSpec};
    use crate::single_tech::{aggregate_first_effort, expected_output};

    fn defaults() -> Params {
        validate_params(ParamSpec::default()).unwrap()
    }

    fn team(v: &[f64]) -> Team {
        Team::new(v.to_vec()).unwrap()
    }

    fn b(p: f64) -> Belief {
        Belief::new(p).unwrap()
    }

    #[test]
    fn continuation_examples() {
        let p = defaults();
        assert!((continuation_value(0, &team(&[1.0, 1.0]), &p).unwrap() - 0.06).abs() < 1e-12);
        assert!((continuation_value(0, &team(&[0.0, 0.0]), &p).unwrap() - 0.015).abs() < 1e-12);
        assert!((continuation_value(0, &team(&[1.0, 0.0]), &p).unwrap() - 0.04).abs() < 1e-12);
    }

    #[test]
    fn best_response_examples() {
        let p = defaults();
        let t = team(&[1.0, 0.0]);
        let e1 = best_response_first_period(0, &t, &[0.095], &p, 1e-5).unwrap();
        let e2 = best_response_first_period(1, &t, &[0.21], &p, 1e-5).unwrap();
        assert!((e1 - 0.21).abs() < 1e-5, "{e1}");
        assert!((e2 - 0.095).abs() < 1e-5, "{e2}");
    }

    #[test]
    fn myopic_best_response() {
        let p = defaults().with_beta(1e-9).unwrap();
        let t = team(&[0.3, 0.9]);
        let e = best_response_first_period(0, &t, &[0.17], &p, 1e-4).unwrap();
        assert!((e - p.derived().expected(0.3)).abs() < 1e-4);
    }

    #[test]
    fn best_response_preconditions() {
        let p = defaults();
        let t = team(&[0.5, 0.5]);
        assert!(best_response_first_period(0, &t, &[0.9], &p, 1e-3).is_err());
        assert!(best_response_first_period(0, &t, &[0.1], &p, 0.0).is_err());
        assert!(best_response_first_period(0, &t, &[0.1, 0.1], &p, 1e-3).is_err());
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let p = defaults();
        let t = team(&[0.2, 0.7]);
        for &e in &[0.0, 0.1, 0.3, 0.45] {
            let dist = enumerate_outcomes(&t, &[e, e], b(0.4), &p).unwrap();
            assert!((dist.total_probability() - 1.0).abs() < 1e-12);
            assert!(dist.branches.iter().all(|b| b.probability >= 0.0));
        }
    }

    #[test]
    fn enumeration_examples() {
        let p = defaults();
        let y = exact_expected_output(&team(&[0.5, 0.5]), b(0.5), &p).unwrap();
        assert!((y - 0.068821875).abs() < 1e-12);
        let y = exact_expected_output(&team(&[1.0, 0.0]), b(0.5), &p).unwrap();
        assert!((y - 0.0690125).abs() < 1e-12);
    }

    #[test]
    fn enumeration_myopic_limit() {
        let p = defaults().with_beta(1e-9).unwrap();
        let t = team(&[0.4, 0.8]);
        let y = exact_expected_output(&t, b(0.3), &p).unwrap();
        let first = aggregate_first_effort(&t, &p).unwrap() * p.expected_raw_return(0.3);
        assert!((y - first).abs() < 1e-9);
    }

    #[test]
    fn enumeration_matches_closed_form() {
        let p = validate_params(ParamSpec {
            r_high: 0.05,
            r_low: 0.02,
            alpha: 0.7,
            beta: 0.9,
            n: 5,
        })
        .unwrap();
        let t = team(&[0.1, 0.95, 0.33, 0.5, 0.0]);
        for &ps in &[0.0, 0.2, 0.77, 1.0] {
            let a = exact_expected_output(&t, b(ps), &p).unwrap();
            let c = expected_output(&t, b(ps), &p).unwrap();
            assert!((a - c).abs() < 1e-12, "{a} {c}");
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let p = defaults();
        let t = team(&[1.0, 0.0]);
        let cfg = SimConfig {
            n_paths: 200_000,
            seed: 7,
            antithetic: false,
        };
        let a = simulate_game(&t, b(0.5), &p, &cfg).unwrap();
        let c = simulate_game(&t, b(0.5), &p, &cfg).unwrap();
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), c.std_error.to_bits());
        let exact = exact_expected_output(&t, b(0.5), &p).unwrap();
        assert!((a.mean - exact).abs() < 4.0 * a.std_error);
    }

    #[test]
    fn simulation_degenerate_state() {
        let p = defaults();
        let t = team(&[0.0, 0.0]);
        let cfg = SimConfig {
            n_paths: 200_000,
            seed: 11,
            antithetic: true,
        };
        let est = simulate_game(&t, b(0.0), &p, &cfg).unwrap();
        let exact = expected_output(&t, b(0.0), &p).unwrap();
        assert!((est.mean - exact).abs() < 4.0 * est.std_error);
        assert_eq!(est.samples, 100_000);
    }

    #[test]
    fn cross_difference_examples() {
        let p = defaults();
        let d = *p.derived();
        let agg = |x: f64, y: f64| aggregate_first_effort(&team(&[x, y]), &p).unwrap();
        for &(x, y) in &[(0.1, 0.2), (0.5, 0.5), (0.7, 0.05)] {
            let c = cross_difference(agg, x, y, 0.01).unwrap();
            assert!((c + 2.0 * p.beta() * d.delta * d.delta * 1e-4).abs() < 1e-15, "{c}");
            let out = |x: f64, y: f64| expected_output(&team(&[x, y]), b(0.5), &p).unwrap();
            assert!(cross_difference(out, x, y, 0.01).unwrap() < 0.0);
        }
        assert_eq!(cross_difference(|_, _| 3.0, 0.2, 0.2, 0.1).unwrap(), 0.0);
        assert!(cross_difference(|_, _| 0.0, 0.95, 0.2, 0.1).is_err());
    }
}
