//! Independent verification engines.
//!
//! Nothing here reuses the closed-form algebra it is meant to check. The
//! engines enumerate outcome branches, search best responses numerically and
//! simulate play path by path.
//!
//! Two weighting conventions coexist and must not be mixed:
//! * best-response objectives weight the technology type by the deciding
//!   player's own prior;
//! * output (and welfare) evaluations weight it by the evaluator's belief `p★`.

pub mod search;
mod single;
pub mod two_tech;

pub use single::{
    best_response_first_period, continuation_value, cross_difference, enumerate_outcomes,
    exact_expected_output, simulate_game, Branch, Outcome, OutcomeDistribution, SimConfig,
    SimEstimate,
};
