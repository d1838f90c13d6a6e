//! Equilibria, output decompositions, optimal team matching and
//! two-technology comparisons for a two-period team production game whose
//! members hold heterogeneous priors, with brute-force and Monte Carlo
//! oracles for every closed form.

pub mod error;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod single_tech;
pub mod two_tech;

pub use error::{ModelError, Result};
pub use model::{
    expected_return, return_variance, team_disagreement, team_optimism, validate_params, Belief,
    DerivedReturns, ParamSpec, Params, Team,
};
pub use single_tech::{DividendReport, EquilibriumProfile};
pub use two_tech::{CaseId, CaseProfile, Tech, TechBelief};
