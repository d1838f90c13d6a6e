//! Game primitives: returns, payoff share, discounting, team size, beliefs
//! and the two team metrics (optimism and disagreement).

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Unvalidated parameter tuple, as read from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    /// High return `R`.
    pub r_high: f64,
    /// Low return `r`.
    pub r_low: f64,
    /// Payoff share of team output accruing to each member.
    pub alpha: f64,
    /// Discount factor on second-period payoffs.
    pub beta: f64,
    /// Team size.
    pub n: usize,
}

impl Default for ParamSpec {
    fn default() -> Self {
        ParamSpec {
            r_high: 0.2,
            r_low: 0.1,
            alpha: 1.0,
            beta: 0.5,
            n: 2,
        }
    }
}

/// Per-member returns `R̃ = αR`, `r̃ = αr` and their gap `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedReturns {
    pub r_high: f64,
    pub r_low: f64,
    pub delta: f64,
}

impl DerivedReturns {
    /// Per-member expected return under belief `p`: `pΔ + r̃`.
    #[inline]
    pub fn expected(&self, p: f64) -> f64 {
        p * self.delta + self.r_low
    }

    /// Variance of the per-member return under belief `p`: `p(1−p)Δ²`.
    #[inline]
    pub fn variance(&self, p: f64) -> f64 {
        p * (1.0 - p) * self.delta * self.delta
    }
}

/// Validated game parameters. Construct through [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    r_high: f64,
    r_low: f64,
    alpha: f64,
    beta: f64,
    n: usize,
    derived: DerivedReturns,
}

/// Checks the parameter region `R > r > 0`, `2NR < 1`, `α ∈ (0,1]`,
/// `β ∈ (0,1]`, `N ≥ 2` and populates the derived returns.
pub fn validate_params(spec: ParamSpec) -> Result<Params> {
    let ParamSpec {
        r_high,
        r_low,
        alpha,
        beta,
        n,
    } = spec;
    let all_finite = [r_high, r_low, alpha, beta].iter().all(|x| x.is_finite());
    if !all_finite {
        return Err(invalid("finite", format!("non-finite input in {spec:?}")));
    }
    if r_low <= 0.0 {
        return Err(invalid("r>0", format!("r = {r_low}")));
    }
    if r_high <= r_low {
        return Err(invalid("R>r", format!("R = {r_high}, r = {r_low}")));
    }
    if n < 2 {
        return Err(invalid("N>=2", format!("N = {n}")));
    }
    if 2.0 * n as f64 * r_high >= 1.0 {
        return Err(invalid(
            "2NR<1",
            format!("2·{n}·{r_high} = {}", 2.0 * n as f64 * r_high),
        ));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid("alpha in (0,1]", format!("alpha = {alpha}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid("beta in (0,1]", format!("beta = {beta}")));
    }
    let derived = DerivedReturns {
        r_high: alpha * r_high,
        r_low: alpha * r_low,
        delta: alpha * r_high - alpha * r_low,
    };
    Ok(Params {
        r_high,
        r_low,
        alpha,
        beta,
        n,
        derived,
    })
}

fn invalid(constraint: &'static str, detail: String) -> ModelError {
    ModelError::InvalidParams { constraint, detail }
}

impl Params {
    pub fn r_high(&self) -> f64 {
        self.r_high
    }
    pub fn r_low(&self) -> f64 {
        self.r_low
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn derived(&self) -> &DerivedReturns {
        &self.derived
    }

    /// Raw tuple this value was validated from.
    pub fn spec(&self) -> ParamSpec {
        ParamSpec {
            r_high: self.r_high,
            r_low: self.r_low,
            alpha: self.alpha,
            beta: self.beta,
            n: self.n,
        }
    }

    /// Same primitives with a different team size, revalidated.
    pub fn with_team_size(&self, n: usize) -> Result<Params> {
        validate_params(ParamSpec { n, ..self.spec() })
    }

    /// Same primitives with a different discount factor, revalidated.
    pub fn with_beta(&self, beta: f64) -> Result<Params> {
        validate_params(ParamSpec { beta, ..self.spec() })
    }

    /// Expected raw return `E_p[ω] = pR + (1−p)r`.
    #[inline]
    pub fn expected_raw_return(&self, p: f64) -> f64 {
        p * self.r_high + (1.0 - p) * self.r_low
    }

    /// Errors unless the team has exactly `N` members.
    pub fn check_team(&self, team: &Team) -> Result<()> {
        if team.len() != self.n {
            return Err(ModelError::TeamSizeMismatch {
                team: team.len(),
                params: self.n,
            });
        }
        Ok(())
    }
}

/// Probability that the technology is the high-return type.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Belief(f64);

impl Belief {
    pub fn new(p: f64) -> Result<Belief> {
        if (0.0..=1.0).contains(&p) {
            Ok(Belief(p))
        } else {
            Err(ModelError::InvalidBelief { value: p })
        }
    }

    pub const CERTAIN_HIGH: Belief = Belief(1.0);
    pub const CERTAIN_LOW: Belief = Belief(0.0);

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Belief {
    type Error = ModelError;

    fn try_from(p: f64) -> Result<Belief> {
        Belief::new(p)
    }
}

/// Ordered prior profile of a team.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Team {
    priors: Vec<f64>,
}

impl Team {
    pub fn new(priors: Vec<f64>) -> Result<Team> {
        if priors.is_empty() {
            return Err(ModelError::EmptyTeam);
        }
        for (index, &p) in priors.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::InvalidPrior { index, value: p });
            }
        }
        Ok(Team { priors })
    }

    /// Team of `n` members all holding prior `p`.
    pub fn like_minded(p: f64, n: usize) -> Result<Team> {
        Team::new(vec![p; n])
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.priors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priors.is_empty()
    }

    pub fn belief(&self, i: usize) -> Option<Belief> {
        self.priors.get(i).map(|&p| Belief(p))
    }
}

/// `E_p[ω̃] = pΔ + r̃`.
pub fn expected_return(b: Belief, d: &DerivedReturns) -> f64 {
    d.expected(b.value())
}

/// `Var_p(ω̃) = p(1−p)Δ²`.
pub fn return_variance(b: Belief, d: &DerivedReturns) -> f64 {
    d.variance(b.value())
}

/// Mean prior of the team.
pub fn team_optimism(t: &Team) -> f64 {
    t.priors.iter().sum::<f64>() / t.len() as f64
}

/// Mean squared prior gap over unordered member pairs. Zero for singletons.
pub fn team_disagreement(t: &Team) -> f64 {
    let n = t.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = t.priors[i] - t.priors[j];
            acc += gap * gap;
        }
    }
    2.0 * acc / (n * (n - 1)) as f64
}
