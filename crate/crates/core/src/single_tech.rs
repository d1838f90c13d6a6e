//! Closed-form Markov-perfect equilibrium of the one-technology game, the
//! team performance functional and its disagreement-dividend decomposition.
//!
//! Efforts are probabilities of success per unit (aggregate effort is the
//! period success probability). Outputs are in raw return units: the
//! discounted expected sum `E[y₁ + βy₂]` evaluated at an outside belief `p★`.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::{team_disagreement, team_optimism, Belief, DerivedReturns, Params, Team};

/// Second-period effort `e₂*(π) = πΔ + r̃`; it does not depend on others' posteriors.
pub fn second_period_effort(posterior: Belief, d: &DerivedReturns) -> f64 {
    d.expected(posterior.value())
}

/// First-period equilibrium effort of player `i`:
///
/// `s¹ᵢ(p) = E_i[ω̃] + β·[E_i[ω̃]·Σ_j (e₂*(pⁱ) − e₂*(pʲ)) + (2N−1)/2·Var_i(ω̃)]`.
///
/// The first term is the current gain, the sum is the persuasion gain from
/// moving coworkers' beliefs to one's own, and the variance term is the value
/// of learning the technology type.
pub fn first_period_effort(i: usize, team: &Team, params: &Params) -> Result<f64> {
    params.check_team(team)?;
    let priors = team.priors();
    let own = *priors.get(i).ok_or(ModelError::PlayerOutOfRange {
        index: i,
        len: priors.len(),
    })?;
    Ok(first_period_effort_unchecked(own, priors, params))
}

fn first_period_effort_unchecked(own: f64, priors: &[f64], params: &Params) -> f64 {
    let d = params.derived();
    let n = priors.len() as f64;
    let own_mean = d.expected(own);
    let persuasion: f64 = priors
        .iter()
        .map(|&pj| d.expected(own) - d.expected(pj))
        .sum();
    own_mean + params.beta() * (own_mean * persuasion + 0.5 * (2.0 * n - 1.0) * d.variance(own))
}

/// Aggregate first-period effort from optimism and disagreement alone:
///
/// `ē₁(p) = N·e₂*(p̄) + (βNΔ²/2)·[(2N−1)·p̄(1−p̄) + (N−1)/(2N)·D(p)]`.
pub fn aggregate_first_effort(team: &Team, params: &Params) -> Result<f64> {
    params.check_team(team)?;
    Ok(aggregate_from_metrics(
        team_optimism(team),
        team_disagreement(team),
        params,
    ))
}

fn aggregate_from_metrics(o_bar: f64, disagreement: f64, params: &Params) -> f64 {
    let d = params.derived();
    let n = params.n() as f64;
    n * d.expected(o_bar)
        + 0.5 * params.beta() * n * d.delta * d.delta
            * ((2.0 * n - 1.0) * o_bar * (1.0 - o_bar) + (n - 1.0) / (2.0 * n) * disagreement)
}

/// Marginal output value of first-period aggregate effort at `p★`, per unit of α:
/// `E★[ω̃] + Nβ·E★[ω̃]·(e₂*(p★) − e₂*(p̄)) + Nβ·Var★(ω̃)`.
fn effort_multiplier(p_star: f64, o_bar: f64, params: &Params) -> f64 {
    let d = params.derived();
    let n = params.n() as f64;
    let beta = params.beta();
    let e_star = d.expected(p_star);
    e_star + n * beta * e_star * (d.expected(p_star) - d.expected(o_bar)) + n * beta * d.variance(p_star)
}

/// Team performance `Y_{p★}(p)`: expected discounted aggregate output of the
/// team at equilibrium, with expectations taken under `p★`.
pub fn expected_output(team: &Team, p_star: Belief, params: &Params) -> Result<f64> {
    let aggregate = aggregate_first_effort(team, params)?;
    let o_bar = team_optimism(team);
    Ok(output_from_aggregate(aggregate, o_bar, p_star.value(), params))
}

fn output_from_aggregate(aggregate: f64, o_bar: f64, p_star: f64, params: &Params) -> f64 {
    let d = params.derived();
    let n = params.n() as f64;
    let scaled = aggregate * effort_multiplier(p_star, o_bar, params)
        + n * params.beta() * d.expected(p_star) * d.expected(o_bar);
    scaled / params.alpha()
}

/// Disagreement dividend coefficient `κ`, which depends only on `p★` and the
/// team optimism `p̄`.
pub fn dividend_coefficient(p_star: Belief, o_bar: Belief, params: &Params) -> f64 {
    let d = params.derived();
    let n = params.n() as f64;
    effort_multiplier(p_star.value(), o_bar.value(), params) * params.beta() * d.delta * d.delta * (n - 1.0)
        / (4.0 * params.alpha())
}

/// Team output split into the like-minded baseline and the dividend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DividendReport {
    pub output: f64,
    pub like_minded_baseline: f64,
    pub kappa: f64,
    pub disagreement: f64,
}

impl DividendReport {
    pub fn dividend(&self) -> f64 {
        self.kappa * self.disagreement
    }

    /// `output − (baseline + κ·D)`; zero up to rounding.
    pub fn residual(&self) -> f64 {
        self.output - (self.like_minded_baseline + self.dividend())
    }
}

/// Computes `Y(p)` directly and, independently, the output of the like-minded
/// team `(p̄, …, p̄)` plus `κ·D(p)`.
pub fn dividend_decomposition(team: &Team, p_star: Belief, params: &Params) -> Result<DividendReport> {
    let output = expected_output(team, p_star, params)?;
    let o_bar = team_optimism(team);
    let baseline_team = Team::like_minded(o_bar, team.len())?;
    let like_minded_baseline = expected_output(&baseline_team, p_star, params)?;
    let kappa = dividend_coefficient(p_star, Belief::new(o_bar)?, params);
    Ok(DividendReport {
        output,
        like_minded_baseline,
        kappa,
        disagreement: team_disagreement(team),
    })
}

/// Equilibrium play of a given team.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumProfile {
    pub first_period: Vec<f64>,
    pub aggregate_first: f64,
    #[serde(skip)]
    returns: DerivedReturns,
}

impl EquilibriumProfile {
    pub fn solve(team: &Team, params: &Params) -> Result<EquilibriumProfile> {
        params.check_team(team)?;
        let first_period: Vec<f64> = team
            .priors()
            .iter()
            .map(|&p| first_period_effort_unchecked(p, team.priors(), params))
            .collect();
        let aggregate_first = first_period.iter().sum();
        Ok(EquilibriumProfile {
            first_period,
            aggregate_first,
            returns: *params.derived(),
        })
    }

    /// Second-period rule `π ↦ e₂*(π)`.
    pub fn second_period(&self, posterior: Belief) -> f64 {
        second_period_effort(posterior, &self.returns)
    }

    /// Upper bound `R̃(1 + (N−1)βΔ)` on any single first-period effort.
    pub fn effort_bound(params: &Params) -> f64 {
        let d = params.derived();
        d.r_high * (1.0 + (params.n() as f64 - 1.0) * params.beta() * d.delta)
    }
}
