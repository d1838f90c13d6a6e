use serde::Serialize;
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{ModelError, Result};
use crate::model::{Belief, Params, Team};
use crate::quadrature::integrate_pieces;
use crate::single_tech::expected_output;

/// Absolute tolerance of the workforce-value quadrature.
pub const VALUE_TOLERANCE: f64 = 1e-8;
const QUANTILE_TOL: f64 = 1e-13;

/// Distribution of priors in the workforce.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Workforce {
    Uniform,
    /// `Beta(a, a)`.
    SymmetricBeta { a: f64 },
    /// Continuous CDF through the knots `(p, F(p))`, linear in between.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// A finite sample, kept sorted ascending.
    Empirical { sorted: Vec<f64> },
}

impl Workforce {
    pub fn symmetric_beta(a: f64) -> Result<Workforce> {
        if !(a.is_finite() && a > 0.0) {
            return Err(ModelError::InvalidWorkforce(format!("beta shape {a} must be positive")));
        }
        Ok(Workforce::SymmetricBeta { a })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Workforce> {
        let ok_ends = knots.first() == Some(&(0.0, 0.0)) && knots.last() == Some(&(1.0, 1.0));
        let increasing = knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
        if !ok_ends || !increasing {
            return Err(ModelError::InvalidWorkforce(
                "knots must run from (0,0) to (1,1), strictly increasing in both coordinates".into(),
            ));
        }
        Ok(Workforce::PiecewiseLinear { knots })
    }

    pub fn empirical(mut priors: Vec<f64>) -> Result<Workforce> {
        if priors.is_empty() {
            return Err(ModelError::InvalidWorkforce("empty sample".into()));
        }
        if let Some((index, &value)) = priors.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(ModelError::InvalidPrior { index, value });
        }
        priors.sort_by(f64::total_cmp);
        Ok(Workforce::Empirical { sorted: priors })
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Workforce::Empirical { .. })
    }

    /// Number of workers of a sample; `None` for a continuum.
    pub fn sample_size(&self) -> Option<usize> {
        match self {
            Workforce::Empirical { sorted } => Some(sorted.len()),
            _ => None,
        }
    }

    /// `F(p)`.
    pub fn cdf(&self, p: f64) -> Result<f64> {
        Belief::new(p)?;
        match self {
            Workforce::Uniform => Ok(p),
            Workforce::SymmetricBeta { a } => Ok(beta_reg(*a, *a, p)),
            Workforce::PiecewiseLinear { knots } => Ok(interpolate(knots, p, |k| k.0, |k| k.1)),
            Workforce::Empirical { .. } => Err(ModelError::NotAnalytic),
        }
    }

    /// `F⁻¹(u)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(ModelError::Domain(format!("quantile level {u} outside [0,1]")));
        }
        match self {
            Workforce::Uniform => Ok(u),
            Workforce::SymmetricBeta { a } => Ok(bisect_cdf(|x| beta_reg(*a, *a, x), u)),
            Workforce::PiecewiseLinear { knots } => Ok(interpolate(knots, u, |k| k.1, |k| k.0)),
            Workforce::Empirical { .. } => Err(ModelError::NotAnalytic),
        }
    }

    /// Density `F'(p)`; at a knot of a piecewise-linear CDF the right slope.
    pub fn density(&self, p: f64) -> Result<f64> {
        Belief::new(p)?;
        match self {
            Workforce::Uniform => Ok(1.0),
            Workforce::SymmetricBeta { a } => {
                if p == 0.0 || p == 1.0 {
                    return Ok(if *a > 1.0 {
                        0.0
                    } else if *a == 1.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    });
                }
                Ok(((a - 1.0) * (p.ln() + (1.0 - p).ln()) - ln_beta(*a, *a)).exp())
            }
            Workforce::PiecewiseLinear { knots } => {
                let k = knots.partition_point(|k| k.0 <= p).clamp(1, knots.len() - 1);
                let (lo, hi) = (knots[k - 1], knots[k]);
                Ok((hi.1 - lo.1) / (hi.0 - lo.0))
            }
            Workforce::Empirical { .. } => Err(ModelError::NotAnalytic),
        }
    }

    /// `F(1−p) = 1 − F(p)`, checked at the knots or sample points.
    pub fn is_symmetric(&self) -> bool {
        match self {
            Workforce::Uniform | Workforce::SymmetricBeta { .. } => true,
            Workforce::PiecewiseLinear { knots } => knots.iter().all(|&(p, f)| {
                (interpolate(knots, 1.0 - p, |k| k.0, |k| k.1) - (1.0 - f)).abs() < 1e-12
            }),
            Workforce::Empirical { sorted } => {
                let n = sorted.len();
                (0..n).all(|i| (sorted[i] + sorted[n - 1 - i] - 1.0).abs() < 1e-12)
            }
        }
    }

    /// `n` workers placed at the quantile midpoints `(2k−1)/(2n)`.
    pub fn discretize(&self, n: usize) -> Result<Workforce> {
        if n == 0 {
            return Err(ModelError::InvalidWorkforce("cannot discretize into 0 workers".into()));
        }
        let priors = (1..=n)
            .map(|k| self.quantile((2 * k - 1) as f64 / (2 * n) as f64))
            .collect::<Result<Vec<_>>>()?;
        Workforce::empirical(priors)
    }

    /// Points where the integrand of the workforce value may have kinks.
    fn breakpoints(&self) -> Result<Vec<f64>> {
        let mut breaks = vec![0.0, 1.0];
        if let Workforce::PiecewiseLinear { knots } = self {
            for &(p, _) in knots {
                breaks.push(p);
                breaks.push(closed_form_match(self, p)?);
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        Ok(breaks)
    }
}

/// Linear interpolation through `knots` reading `x` with `from` and returning `to`.
fn interpolate<X, Y>(knots: &[(f64, f64)], x: f64, from: X, to: Y) -> f64
where
    X: Fn(&(f64, f64)) -> f64,
    Y: Fn(&(f64, f64)) -> f64,
{
    let k = knots.partition_point(|k| from(k) <= x).clamp(1, knots.len() - 1);
    let (lo, hi) = (&knots[k - 1], &knots[k]);
    let t = (x - from(lo)) / (from(hi) - from(lo));
    to(lo) + t * (to(hi) - to(lo))
}

/// Inverse of an increasing CDF on `[0,1]` by bisection.
fn bisect_cdf<F: Fn(f64) -> f64>(cdf: F, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > QUANTILE_TOL {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Partner of a worker with prior `p` in the countermonotone plan,
/// `T_F(p) = F⁻¹(1 − F(p))`. For a sample, the worker ranked `k` of `n` is
/// matched with the one ranked `n+1−k`; `p` must then be a sample point.
pub fn closed_form_match(w: &Workforce, p: f64) -> Result<f64> {
    match w {
        Workforce::Empirical { sorted } => {
            let k = sorted
                .iter()
                .position(|&v| v == p)
                .ok_or_else(|| ModelError::Domain(format!("{p} is not in the sample")))?;
            Ok(sorted[sorted.len() - 1 - k])
        }
        _ => w.quantile(1.0 - w.cdf(p)?),
    }
}

/// `D̄(F) = E[(p−p′)²] = 2·Var_F(p)` for independent draws.
pub fn workforce_disagreement(w: &Workforce) -> Result<f64> {
    match w {
        Workforce::Uniform => Ok(1.0 / 6.0),
        Workforce::SymmetricBeta { a } => Ok(1.0 / (2.0 * (2.0 * a + 1.0))),
        Workforce::PiecewiseLinear { knots } => {
            let breaks: Vec<f64> = knots.iter().map(|k| k.0).collect();
            let density = |p: f64| w.density(p).expect("p in [0,1]");
            let mean = integrate_pieces(|p| p * density(p), &breaks, 1e-14);
            let second = integrate_pieces(|p| p * p * density(p), &breaks, 1e-14);
            Ok(2.0 * (second - mean * mean))
        }
        Workforce::Empirical { sorted } => {
            let n = sorted.len() as f64;
            let mean = sorted.iter().sum::<f64>() / n;
            Ok(2.0 * sorted.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n)
        }
    }
}

/// `V(F) = ½∫ Y_{p★}(p, T_F(p)) dF(p)` by quadrature to [`VALUE_TOLERANCE`].
pub fn workforce_value(w: &Workforce, p_star: Belief, params: &Params) -> Result<f64> {
    if !w.is_analytic() {
        return Err(ModelError::NotAnalytic);
    }
    if params.n() != 2 {
        return Err(ModelError::Precondition(format!(
            "workforce value needs two-member teams, parameters declare N = {}",
            params.n()
        )));
    }
    let breaks = w.breakpoints()?;
    let integrand = |p: f64| -> f64 {
        let density = w.density(p).expect("p in [0,1]");
        if density == 0.0 {
            return 0.0;
        }
        let partner = closed_form_match(w, p).expect("analytic workforce");
        let team = Team::new(vec![p, partner]).expect("priors in [0,1]");
        expected_output(&team, p_star, params).expect("validated team") * density
    };
    Ok(0.5 * integrate_pieces(integrand, &breaks, VALUE_TOLERANCE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, ParamSpec};
    use crate::single_tech::dividend_coefficient;

    fn defaults() -> Params {
        validate_params(ParamSpec::default()).unwrap()
    }

    fn half() -> Belief {
        Belief::new(0.5).unwrap()
    }

    fn tent() -> Workforce {
        Workforce::piecewise_linear(vec![(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)]).unwrap()
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(Workforce::Uniform.quantile(0.25).unwrap(), 0.25);
        let b = Workforce::symmetric_beta(2.0).unwrap();
        assert!((b.quantile(0.5).unwrap() - 0.5).abs() < 1e-10);
        assert!((tent().quantile(0.4).unwrap() - 0.25).abs() < 1e-15);
        let e = Workforce::empirical(vec![0.3, 0.1]).unwrap();
        assert!(matches!(e.quantile(0.5), Err(ModelError::NotAnalytic)));
    }

    #[test]
    fn match_examples() {
        assert!((closed_form_match(&Workforce::Uniform, 0.3).unwrap() - 0.7).abs() < 1e-15);
        let b = Workforce::symmetric_beta(5.0).unwrap();
        assert!((closed_form_match(&b, 0.5).unwrap() - 0.5).abs() < 1e-10);
        let e = Workforce::empirical(vec![0.9, 0.1, 0.6, 0.4]).unwrap();
        assert_eq!(closed_form_match(&e, 0.4).unwrap(), 0.6);
        assert_eq!(closed_form_match(&e, 0.1).unwrap(), 0.9);
    }

    #[test]
    fn involution_and_measure_preservation() {
        for w in [Workforce::Uniform, Workforce::symmetric_beta(2.0).unwrap(), Workforce::symmetric_beta(0.7).unwrap(), tent()] {
            for k in 1..20 {
                let p = k as f64 / 20.0;
                let t = closed_form_match(&w, p).unwrap();
                assert!((closed_form_match(&w, t).unwrap() - p).abs() < 1e-9, "{w:?} {p}");
                let u = w.cdf(p).unwrap();
                let image = w.cdf(closed_form_match(&w, w.quantile(u).unwrap()).unwrap()).unwrap();
                assert!((image - (1.0 - u)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn disagreement_examples() {
        assert!((workforce_disagreement(&Workforce::Uniform).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let narrow = Workforce::symmetric_beta(1e6).unwrap();
        assert!(workforce_disagreement(&narrow).unwrap() < 1e-6);
        let two = Workforce::empirical(vec![0.0, 1.0]).unwrap();
        assert!((workforce_disagreement(&two).unwrap() - 0.5).abs() < 1e-15);
        let flat = Workforce::piecewise_linear(vec![(0.0, 0.0), (0.3, 0.3), (1.0, 1.0)]).unwrap();
        assert!((workforce_disagreement(&flat).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let b = Workforce::symmetric_beta(2.0).unwrap();
        let sample = b.discretize(4000).unwrap();
        assert!((workforce_disagreement(&sample).unwrap() - 0.1).abs() < 1e-4);
    }

    #[test]
    fn value_examples() {
        let p = defaults();
        let v = workforce_value(&Workforce::Uniform, half(), &p).unwrap();
        assert!((v - 0.034_442_71).abs() < 1e-8, "{v}");
        let narrow = Workforce::symmetric_beta(1e4).unwrap();
        let v0 = workforce_value(&narrow, half(), &p).unwrap();
        let y = expected_output(&Team::new(vec![0.5, 0.5]).unwrap(), half(), &p).unwrap();
        let kappa = dividend_coefficient(half(), half(), &p);
        assert!((v0 - 0.5 * y - kappa / (2.0 * (2e4 + 1.0))).abs() < 1e-8);
        assert!((0.5 * y - 0.034_410_94).abs() < 1e-8);
        assert!((v - v0 - kappa * (1.0 / 6.0 - workforce_disagreement(&narrow).unwrap())).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(Workforce::symmetric_beta(0.0).is_err());
        assert!(Workforce::piecewise_linear(vec![(0.0, 0.0), (0.5, 0.5)]).is_err());
        assert!(matches!(
            Workforce::empirical(vec![0.2, 1.2]),
            Err(ModelError::InvalidPrior { index: 1, .. })
        ));
        assert!(!tent().is_symmetric());
        assert!(Workforce::Uniform.discretize(4).unwrap().is_symmetric());
    }
}
