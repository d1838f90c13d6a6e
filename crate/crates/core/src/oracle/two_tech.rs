//! Brute-force evaluation of the two-player, two-technology game.
//!
//! The state `(ω_A, ω_B)` is drawn from a weighting belief with independent
//! components. Given the state, each technology operated in the first period
//! succeeds independently with probability `P(aggregate effort on it)`; a
//! success reveals that technology's return to both players. In the second
//! period every player moves to the technology with the highest posterior and
//! exerts `max_k π_k·Δ + r̃`.
//!
//! Ties in the second-period technology choice: if exactly one of the tied
//! technologies was revealed high, the player takes it; otherwise a player
//! flagged `switch_when_indifferent` leaves the first-period technology and
//! the others stay.

use super::search::maximize;
use crate::error::{ModelError, Result};
use crate::model::Params;
use crate::two_tech::{Tech, TechBelief};

/// A first-period play profile together with the continuation convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTechPlay {
    pub priors: [TechBelief; 2],
    pub techs: [Tech; 2],
    pub efforts: [f64; 2],
    pub switch_when_indifferent: [bool; 2],
}

/// Expected output `E[y₁ + β·y₂]` (raw units) and each player's expected
/// payoff `α·y₁ − e₁²/2 + β·(α·y₂ − e₂²/2)`, all under one weighting belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTechEvaluation {
    pub output: f64,
    pub payoffs: [f64; 2],
}

fn second_period_tech(posterior: [f64; 2], revealed: [Option<bool>; 2], current: Tech, switch: bool) -> Tech {
    if posterior[0] > posterior[1] {
        return Tech::A;
    }
    if posterior[1] > posterior[0] {
        return Tech::B;
    }
    match (revealed[0] == Some(true), revealed[1] == Some(true)) {
        (true, false) => Tech::A,
        (false, true) => Tech::B,
        _ if switch => current.other(),
        _ => current,
    }
}

/// Evaluates `play` with the state weighted by `weights`.
pub fn evaluate(play: &TwoTechPlay, weights: TechBelief, params: &Params) -> Result<TwoTechEvaluation> {
    if play.efforts.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
        return Err(ModelError::Precondition(format!(
            "efforts {:?} must lie in [0,1]",
            play.efforts
        )));
    }
    let d = params.derived();
    let alpha = params.alpha();
    let beta = params.beta();
    let mut first_agg = [0.0; 2];
    for i in 0..2 {
        first_agg[play.techs[i].index()] += play.efforts[i];
    }
    let first_success = first_agg.map(|e| e.clamp(0.0, 1.0));

    let mut output = 0.0;
    let mut payoffs = [0.0; 2];
    let w = weights.as_array();
    for state in [[true, true], [true, false], [false, true], [false, false]] {
        let weight: f64 = (0..2).map(|k| if state[k] { w[k] } else { 1.0 - w[k] }).product();
        if weight == 0.0 {
            continue;
        }
        let ret = state.map(|high| if high { params.r_high() } else { params.r_low() });
        let y1: f64 = (0..2).map(|k| first_success[k] * ret[k]).sum();
        let mut y2 = 0.0;
        let mut second_cost = [0.0; 2];
        for seen in [[true, true], [true, false], [false, true], [false, false]] {
            let prob: f64 = (0..2)
                .map(|k| if seen[k] { first_success[k] } else { 1.0 - first_success[k] })
                .product();
            if prob == 0.0 {
                continue;
            }
            let revealed: [Option<bool>; 2] = [0, 1].map(|k| seen[k].then_some(state[k]));
            let mut agg = [0.0; 2];
            let mut cost = [0.0; 2];
            for i in 0..2 {
                let prior = play.priors[i].as_array();
                let posterior = [0, 1].map(|k| match revealed[k] {
                    Some(true) => 1.0,
                    Some(false) => 0.0,
                    None => prior[k],
                });
                let tech = second_period_tech(posterior, revealed, play.techs[i], play.switch_when_indifferent[i]);
                let effort = d.expected(posterior[0].max(posterior[1]));
                agg[tech.index()] += effort;
                cost[i] = 0.5 * effort * effort;
            }
            let out: f64 = (0..2).map(|k| agg[k].clamp(0.0, 1.0) * ret[k]).sum();
            y2 += prob * out;
            for i in 0..2 {
                second_cost[i] += prob * cost[i];
            }
        }
        output += weight * (y1 + beta * y2);
        for i in 0..2 {
            let e = play.efforts[i];
            payoffs[i] += weight * (alpha * y1 - 0.5 * e * e + beta * (alpha * y2 - second_cost[i]));
        }
    }
    Ok(TwoTechEvaluation { output, payoffs })
}

/// Numerical best response of player `i` on its first-period technology,
/// holding the other player's effort and everybody's continuation fixed. The
/// objective is player `i`'s payoff weighted by its own prior.
pub fn best_response(i: usize, play: &TwoTechPlay, params: &Params, grid_step: f64) -> Result<f64> {
    if i > 1 {
        return Err(ModelError::PlayerOutOfRange { index: i, len: 2 });
    }
    if !(grid_step > 0.0) {
        return Err(ModelError::Precondition(format!("grid step {grid_step} must be positive")));
    }
    let other = play.efforts[1 - i];
    if !(0.0..1.0).contains(&other) {
        return Err(ModelError::Precondition(format!("opponent effort {other} must lie in [0,1)")));
    }
    let own_prior = play.priors[i];
    let objective = |e: f64| {
        let mut trial = *play;
        trial.efforts[i] = e;
        evaluate(&trial, own_prior, params)
            .map(|v| v.payoffs[i])
            .unwrap_or(f64::NEG_INFINITY)
    };
    Ok(maximize(objective, 0.0, 1.0 - other, grid_step).argmax)
}
