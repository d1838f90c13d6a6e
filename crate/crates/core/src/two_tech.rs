//! The two-player, two-technology game: competition-of-ideas equilibria
//! (Cases 1–3), like-minded teams, output and welfare comparisons, the
//! threshold `p̄`, the H upper bound and the cross-technology best-response
//! scanner.
//!
//! Efforts and `R̃, r̃, Δ` are in payoff units as elsewhere; outputs are raw
//! expected discounted output (the α-scaled expressions divided by α).

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::Params;
use crate::oracle::two_tech::TwoTechPlay;
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Tech {
    A,
    B,
}

impl Tech {
    pub fn index(self) -> usize {
        match self {
            Tech::A => 0,
            Tech::B => 1,
        }
    }

    pub fn other(self) -> Tech {
        match self {
            Tech::A => Tech::B,
            Tech::B => Tech::A,
        }
    }
}

/// Probabilities that technology A and technology B are high-return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TechBelief {
    pub p_a: f64,
    pub p_b: f64,
}

impl TechBelief {
    pub fn new(p_a: f64, p_b: f64) -> Result<TechBelief> {
        for v in [p_a, p_b] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::InvalidBelief { value: v });
            }
        }
        Ok(TechBelief { p_a, p_b })
    }

    pub fn symmetric(p: f64) -> Result<TechBelief> {
        TechBelief::new(p, p)
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.p_a, self.p_b]
    }
}

/// Continuation convention of a competition-of-ideas team: what the player
/// does after its own technology returned `r̃` and the other produced nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseId {
    /// Both switch, `d = (1,1)`.
    One,
    /// Both stay, `d = (0,0)`.
    Two,
    /// Player 2 switches, player 1 stays, `d = (0,1)`.
    Three,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [CaseId::One, CaseId::Two, CaseId::Three];

    pub fn number(self) -> u8 {
        match self {
            CaseId::One => 1,
            CaseId::Two => 2,
            CaseId::Three => 3,
        }
    }

    pub fn switches(self) -> [bool; 2] {
        match self {
            CaseId::One => [true, true],
            CaseId::Two => [false, false],
            CaseId::Three => [false, true],
        }
    }
}

impl TryFrom<u8> for CaseId {
    type Error = ModelError;

    fn try_from(v: u8) -> Result<CaseId> {
        match v {
            1 => Ok(CaseId::One),
            2 => Ok(CaseId::Two),
            3 => Ok(CaseId::Three),
            _ => Err(ModelError::Precondition(format!("case id {v} is not one of 1, 2, 3"))),
        }
    }
}

/// Equilibrium of the team `((1,0),(0,1))`: player 1 on A, player 2 on B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseProfile {
    pub case: CaseId,
    pub switches: [bool; 2],
    pub efforts: [f64; 2],
    pub techs: [Tech; 2],
}

impl CaseProfile {
    pub fn aggregate(&self) -> f64 {
        self.efforts[0] + self.efforts[1]
    }

    /// The same play as an input to the enumeration oracle.
    pub fn play(&self) -> TwoTechPlay {
        TwoTechPlay {
            priors: [
                TechBelief { p_a: 1.0, p_b: 0.0 },
                TechBelief { p_a: 0.0, p_b: 1.0 },
            ],
            techs: self.techs,
            efforts: self.efforts,
            switch_when_indifferent: self.switches,
        }
    }
}

/// First-period effort of each player when both operate the technology they
/// believe high with probability `p`, the other one being believed high with
/// probability `q`:
/// `e = pΔ + r̃ + (3β/2)·[pR̃² + (1−p)(qΔ+r̃)² − (max{p,q}Δ+r̃)²]`.
pub fn same_tech_first_effort(p: f64, q: f64, params: &Params) -> Result<f64> {
    TechBelief::new(p, q)?;
    let d = params.derived();
    let m = d.expected(p.max(q));
    let other = d.expected(q);
    Ok(d.expected(p)
        + 1.5 * params.beta() * (p * d.r_high * d.r_high + (1.0 - p) * other * other - m * m))
}

/// Closed-form first-period efforts of the competition-of-ideas team.
pub fn competition_efforts(case: CaseId, params: &Params) -> CaseProfile {
    let d = params.derived();
    let beta = params.beta();
    let base = d.r_high * (1.0 + beta * d.delta);
    let spill = beta * d.r_low * d.delta;
    let efforts = match case {
        CaseId::One => [base, base],
        CaseId::Two => [base / (1.0 - spill); 2],
        CaseId::Three => [base, base * (1.0 + spill)],
    };
    CaseProfile {
        case,
        switches: case.switches(),
        efforts,
        techs: [Tech::A, Tech::B],
    }
}

/// `R̃(1+βΔ)(1+βr̃Δ)`, the largest Case 1 or Case 3 effort.
pub fn case_effort_bound(params: &Params) -> f64 {
    let d = params.derived();
    let beta = params.beta();
    d.r_high * (1.0 + beta * d.delta) * (1.0 + beta * d.r_low * d.delta)
}

/// Linear best responses `e¹ = A¹ + B¹e²`, `e² = A² + B²e¹` of a like-minded
/// team whose members operate different technologies in the first period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrCoefficients {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    r_high: f64,
}

impl BrCoefficients {
    /// Coefficients at priors `p ≥ q` from the payoff-unit returns `R̃`, `r̃`
    /// and discount `β` directly.
    pub fn from_raw(p: f64, q: f64, r_high: f64, r_low: f64, beta: f64) -> BrCoefficients {
        let delta = r_high - r_low;
        let ep = p * delta + r_low;
        let eq = q * delta + r_low;
        let rr = r_high * r_high;
        let k = 1.5 * beta;
        BrCoefficients {
            a1: ep + k * (p * rr + (1.0 - p) * eq * eq - ep * ep),
            b1: k * ((1.0 - q) * delta * delta * p * (1.0 - p) - p * rr - (1.0 - p) * eq * eq + ep * ep),
            a2: eq + k * (q * rr + (1.0 - q) * ep * ep - ep * ep),
            b2: k * ((1.0 - p) * delta * delta * q * (1.0 - q) - q * rr - (1.0 - q) * ep * ep + ep * ep),
            r_high,
        }
    }

    pub fn b(&self) -> f64 {
        self.b1
    }

    /// Solution of the best-response system.
    pub fn efforts(&self) -> [f64; 2] {
        let b = self.b();
        let det = 1.0 - b * b;
        [(self.a1 + b * self.a2) / det, (self.a2 + b * self.a1) / det]
    }

    /// `N = R̃(1−B²) − (A¹+BA²)`.
    pub fn slack_n(&self) -> f64 {
        let b = self.b();
        self.r_high * (1.0 - b * b) - (self.a1 + b * self.a2)
    }

    /// `M = R̃(1−B²) − (A²+BA¹)`.
    pub fn slack_m(&self) -> f64 {
        let b = self.b();
        self.r_high * (1.0 - b * b) - (self.a2 + b * self.a1)
    }
}

/// Best-response coefficients and equilibrium efforts when player 1 operates
/// the technology believed high with probability `p` and player 2 the other
/// one (`q`). Requires `p ≥ q`.
pub fn cross_tech_best_response(p: f64, q: f64, params: &Params) -> Result<(BrCoefficients, [f64; 2])> {
    TechBelief::new(p, q)?;
    if p < q {
        return Err(ModelError::Precondition(format!(
            "expected p ≥ q, got p = {p}, q = {q}; swap the technology labels"
        )));
    }
    let d = params.derived();
    let c = BrCoefficients::from_raw(p, q, d.r_high, d.r_low, params.beta());
    Ok((c, c.efforts()))
}

/// Feasible point `(p, q, R̃, r̃, β)` of the best-response inequality scan.
pub type ScanPoint = [f64; 5];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackScanReport {
    pub points: u64,
    pub min_n: f64,
    pub argmin_n: ScanPoint,
    pub min_m: f64,
    pub argmin_m: ScanPoint,
    pub max_abs_b: f64,
}

impl SlackScanReport {
    pub fn min(&self) -> f64 {
        self.min_n.min(self.min_m)
    }

    fn empty() -> SlackScanReport {
        SlackScanReport {
            points: 0,
            min_n: f64::INFINITY,
            argmin_n: [f64::NAN; 5],
            min_m: f64::INFINITY,
            argmin_m: [f64::NAN; 5],
            max_abs_b: 0.0,
        }
    }

    fn visit(&mut self, x: ScanPoint) {
        let c = BrCoefficients::from_raw(x[0], x[1], x[2], x[3], x[4]);
        let (n, m) = (c.slack_n(), c.slack_m());
        self.points += 1;
        if n < self.min_n {
            self.min_n = n;
            self.argmin_n = x;
        }
        if m < self.min_m {
            self.min_m = m;
            self.argmin_m = x;
        }
        self.max_abs_b = self.max_abs_b.max(c.b().abs());
    }

    fn merge(mut self, other: SlackScanReport) -> SlackScanReport {
        self.points += other.points;
        if other.min_n < self.min_n {
            self.min_n = other.min_n;
            self.argmin_n = other.argmin_n;
        }
        if other.min_m < self.min_m {
            self.min_m = other.min_m;
            self.argmin_m = other.argmin_m;
        }
        self.max_abs_b = self.max_abs_b.max(other.max_abs_b);
        self
    }
}

const SCAN_CHUNK: u64 = 1 << 15;

/// Evaluates `N` and `M` on `n_random` uniformly drawn feasible points and on
/// a `grid_per_axis`⁵ grid of the feasible set
/// `0 ≤ q ≤ p ≤ 1, 0 ≤ r̃ ≤ R̃ ≤ ¼, 0 ≤ β ≤ 1`.
pub fn slack_scan(n_random: u64, grid_per_axis: usize, seed: u64) -> SlackScanReport {
    let random = (0..n_random.div_ceil(SCAN_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let mut rep = SlackScanReport::empty();
            for _ in 0..SCAN_CHUNK.min(n_random - c * SCAN_CHUNK) {
                let p: f64 = rng.random();
                let q = p * rng.random::<f64>();
                let r_high = 0.25 * rng.random::<f64>();
                let r_low = r_high * rng.random::<f64>();
                rep.visit([p, q, r_high, r_low, rng.random()]);
            }
            rep
        })
        .collect::<Vec<_>>();
    let g = grid_per_axis;
    let at = |k: usize| if g > 1 { k as f64 / (g - 1) as f64 } else { 0.0 };
    let grid = (0..g)
        .into_par_iter()
        .map(|i| {
            let mut rep = SlackScanReport::empty();
            let p = at(i);
            for j in 0..g {
                for k in 0..g {
                    let r_high = 0.25 * at(k);
                    for l in 0..g {
                        for m in 0..g {
                            rep.visit([p, p * at(j), r_high, r_high * at(l), at(m)]);
                        }
                    }
                }
            }
            rep
        })
        .collect::<Vec<_>>();
    random
        .into_iter()
        .chain(grid)
        .fold(SlackScanReport::empty(), SlackScanReport::merge)
}

/// `Y_{(p,p)}` of the competition-of-ideas team playing `case`.
pub fn output_competition(p: f64, case: &CaseProfile, params: &Params) -> Result<f64> {
    TechBelief::symmetric(p)?;
    let d = params.derived();
    let (rh, rl) = (d.r_high, d.r_low);
    let [e1, e2] = case.efforts;
    let ep = d.expected(p);
    let q = 1.0 - p;
    let branch = |switch: bool| {
        let di = if switch { 1.0 } else { 0.0 };
        p * 2.0 * rh * rh + q * ep * (rh + di * rl) + q * (1.0 - di) * rl * rl
    };
    let scaled = ep * (e1 + e2)
        + params.beta()
            * (2.0 * e1 * e2 * (p * (2.0 - p) * rh * rh + q * q * rl * rl)
                + e1 * (1.0 - e2) * branch(case.switches[0])
                + e2 * (1.0 - e1) * branch(case.switches[1])
                + 2.0 * (1.0 - e1) * (1.0 - e2) * ep * rh);
    Ok(scaled / params.alpha())
}

/// `Y_{(p,p)}` of the optimists `((1,1),(1,1))`:
/// `αY = 2R̃(pΔ+r̃)(1+β) + 4βR̃²p(1−p)Δ`.
pub fn output_like_minded_optimists(p: f64, params: &Params) -> Result<f64> {
    TechBelief::symmetric(p)?;
    let d = params.derived();
    let beta = params.beta();
    let scaled = 2.0 * d.r_high * d.expected(p) * (1.0 + beta)
        + 4.0 * beta * d.r_high * d.r_high * p * (1.0 - p) * d.delta;
    Ok(scaled / params.alpha())
}

/// `Y_{(x,x)}` of the like-minded team `((p,q),(p,q))` in its same-technology
/// equilibrium on the technology with the higher prior.
pub fn output_like_minded(p: f64, q: f64, x: f64, params: &Params) -> Result<f64> {
    TechBelief::new(p, q)?;
    TechBelief::symmetric(x)?;
    let (hi, lo) = (p.max(q), p.min(q));
    let d = params.derived();
    let e = same_tech_first_effort(hi, lo, params)?;
    let ex = d.expected(x);
    let after_success = x * 2.0 * d.r_high * d.r_high + (1.0 - x) * 2.0 * d.expected(lo) * ex;
    let after_failure = 2.0 * d.expected(hi) * ex;
    let scaled = 2.0 * e * ex + params.beta() * (2.0 * e * after_success + (1.0 - 2.0 * e) * after_failure);
    Ok(scaled / params.alpha())
}

/// Output of the most productive competition equilibrium at `(p,p)` and the
/// case achieving it; ties go to Case 2.
pub fn most_productive_output(p: f64, params: &Params) -> Result<(f64, CaseId)> {
    let mut best = (
        output_competition(p, &competition_efforts(CaseId::Two, params), params)?,
        CaseId::Two,
    );
    for case in [CaseId::One, CaseId::Three] {
        let y = output_competition(p, &competition_efforts(case, params), params)?;
        if y > best.0 {
            best = (y, case);
        }
    }
    Ok(best)
}

/// Threshold on the evaluator's belief above which competition beats the
/// best like-minded team.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Threshold {
    /// Competition wins at every `p`.
    None,
    At(f64),
}

/// Coefficients `[c, b, a]` of `δ(p) = Y^C(p) − Y^O(p)` for one case. Both
/// outputs are quadratics in `p`, so three evaluations pin them down.
pub fn gap_quadratic(case: CaseId, params: &Params) -> [f64; 3] {
    let profile = competition_efforts(case, params);
    let f = |p: f64| {
        output_competition(p, &profile, params).expect("p in [0,1]")
            - output_like_minded_optimists(p, params).expect("p in [0,1]")
    };
    let (f0, fh, f1) = (f(0.0), f(0.5), f(1.0));
    let a = 2.0 * (f0 - 2.0 * fh + f1);
    [f0, f1 - f0 - a, a]
}

/// Roots of `c + b·x + a·x²` that are real, computed without cancellation.
fn quadratic_roots([c, b, a]: [f64; 3]) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// `p̄`: `None` when `β < r̃/Δ`, `0` when `β = r̃/Δ`, otherwise the smallest
/// root in `[0,1]` of the three gap quadratics.
pub fn threshold_pbar(params: &Params) -> Threshold {
    let d = params.derived();
    let ratio = d.r_low / d.delta;
    let beta = params.beta();
    if (beta - ratio).abs() <= 1e-12 {
        return Threshold::At(0.0);
    }
    if beta < ratio {
        return Threshold::None;
    }
    let eps = 1e-12;
    let root = CaseId::ALL
        .iter()
        .flat_map(|&case| {
            let coef = gap_quadratic(case, params);
            quadratic_roots(coef)
                .into_iter()
                .filter(|r| (-eps..=1.0 + eps).contains(r))
                .map(|r| r.clamp(0.0, 1.0))
        })
        .fold(f64::INFINITY, f64::min);
    if root.is_finite() {
        Threshold::At(root)
    } else {
        Threshold::None
    }
}

/// `Y^C(p) − Y^O(p)` with the most productive competition equilibrium.
pub fn competition_gap(p: f64, params: &Params) -> Result<f64> {
    Ok(most_productive_output(p, params)?.0 - output_like_minded_optimists(p, params)?)
}

/// Root of [`competition_gap`] by bisection, if it changes sign on `[0,1]`.
pub fn threshold_by_bisection(params: &Params, tol: f64) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (g_lo, g_hi) = (competition_gap(lo, params)?, competition_gap(hi, params)?);
    if g_lo >= 0.0 || g_hi <= 0.0 {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if competition_gap(mid, params)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// `H(e₁, e_{A1})`: upper bound on the expected output at `(x,x)` of a
/// like-minded team splitting first-period effort `e₁` as `e_{A1}` on A and
/// the rest on B. Written in raw returns `R`, `r` and the share `α`.
pub fn split_bound_h(e1: f64, ea1: f64, x: f64, params: &Params) -> Result<f64> {
    if !(0.0 <= ea1 && ea1 <= e1 && e1 < 1.0) || !(0.0..=1.0).contains(&x) {
        return Err(ModelError::Domain(format!(
            "H needs 0 ≤ e_A1 ≤ e1 < 1 and x in [0,1], got e1 = {e1}, e_A1 = {ea1}, x = {x}"
        )));
    }
    let (big, small) = (params.r_high(), params.r_low());
    let ex = x * big - x * small + small;
    let both = x * (2.0 - x) * big * big + (1.0 - x) * (1.0 - x) * small * small;
    let one = x * big * big + (1.0 - x) * ex * big;
    let eb1 = e1 - ea1;
    let curly = ea1 * eb1 * both
        + ea1 * (1.0 + ea1 - e1) * one
        + eb1 * (1.0 - ea1) * one
        + (1.0 - ea1) * (1.0 + ea1 - e1) * ex * big;
    Ok(ex * e1 + 2.0 * params.alpha() * params.beta() * curly)
}

/// `G(e₁) = R·e₁ + 2αβR²`, the bound at `x = 1`.
pub fn split_bound_g(e1: f64, params: &Params) -> f64 {
    let big = params.r_high();
    big * e1 + 2.0 * params.alpha() * params.beta() * big * big
}

/// `∂²H/∂e_{A1}² = 4αβ(R−r)(1−x)[x(R−r)+r]`.
pub fn split_bound_curvature(x: f64, params: &Params) -> f64 {
    let (big, small) = (params.r_high(), params.r_low());
    4.0 * params.alpha() * params.beta() * (big - small) * (1.0 - x) * (x * (big - small) + small)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TeamKind {
    Competition,
    Optimists,
    LikeMinded { p: f64, q: f64 },
}

/// Expected payoff of one (symmetric) player when the technologies are
/// known to be high-return, `p★ = (1,1)`.
pub fn welfare(kind: TeamKind, params: &Params) -> Result<f64> {
    let d = params.derived();
    let rh = d.r_high;
    let beta = params.beta();
    let second_certain = 1.5 * rh * rh;
    match kind {
        TeamKind::Optimists => Ok(second_certain * (1.0 + beta)),
        TeamKind::Competition => {
            let (_, case) = most_productive_output(1.0, params)?;
            let profile = competition_efforts(case, params);
            let e = profile.efforts[0];
            Ok(rh * profile.aggregate() - 0.5 * e * e + beta * second_certain)
        }
        TeamKind::LikeMinded { p, q } => {
            TechBelief::new(p, q)?;
            let hi = p.max(q);
            let e = same_tech_first_effort(hi, p.min(q), params)?;
            let stay = d.expected(hi);
            let after_failure = 2.0 * rh * stay - 0.5 * stay * stay;
            Ok(2.0 * rh * e - 0.5 * e * e + beta * (2.0 * e * second_certain + (1.0 - 2.0 * e) * after_failure))
        }
    }
}

/// One row of the output comparison curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub y_competition: f64,
    pub y_likeminded: f64,
    pub case: CaseId,
}

/// `Y^C` and `Y^O` on `p = 0, 1/steps, …, 1`.
pub fn comparison_curve(params: &Params, steps: usize) -> Result<Vec<CurvePoint>> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            let p = k as f64 / steps as f64;
            let (y_competition, case) = most_productive_output(p, params)?;
            Ok(CurvePoint {
                p,
                y_competition,
                y_likeminded: output_like_minded_optimists(p, params)?,
                case,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, ParamSpec};
    use crate::oracle::two_tech::{best_response, evaluate};
    use crate::single_tech::first_period_effort;
    use crate::model::Team;

    fn params(r_high: f64, r_low: f64, beta: f64) -> Params {
        validate_params(ParamSpec {
            r_high,
            r_low,
            alpha: 1.0,
            beta,
            n: 2,
        })
        .unwrap()
    }

    fn defaults() -> Params {
        params(0.2, 0.1, 0.5)
    }

    fn preset() -> Params {
        params(0.24, 0.04, 0.5)
    }

    fn like_minded_play(p: f64, q: f64, params: &Params) -> TwoTechPlay {
        let e = same_tech_first_effort(p.max(q), p.min(q), params).unwrap();
        let tech = if p >= q { Tech::A } else { Tech::B };
        TwoTechPlay {
            priors: [TechBelief::new(p, q).unwrap(); 2],
            techs: [tech; 2],
            efforts: [e; 2],
            switch_when_indifferent: [true; 2],
        }
    }

    #[test]
    fn same_tech_examples() {
        let p = defaults();
        assert!((same_tech_first_effort(1.0, 1.0, &p).unwrap() - 0.2).abs() < 1e-12);
        let myopic = defaults().with_beta(1e-9).unwrap();
        assert!((same_tech_first_effort(0.3, 0.8, &myopic).unwrap() - 0.13).abs() < 1e-9);
        for &x in &[0.0, 0.25, 0.5, 0.9] {
            let single = first_period_effort(0, &Team::like_minded(x, 2).unwrap(), &p).unwrap();
            assert!((same_tech_first_effort(x, 0.0, &p).unwrap() - single).abs() < 1e-12);
            assert!(same_tech_first_effort(x, x, &p).unwrap() >= single - 1e-15);
        }
    }

    #[test]
    fn same_tech_matches_best_response() {
        let p = defaults();
        for &(a, b) in &[(0.7, 0.2), (0.5, 0.5), (1.0, 0.0), (0.3, 0.0)] {
            let play = like_minded_play(a, b, &p);
            let br = best_response(0, &play, &p, 1e-5).unwrap();
            assert!((br - play.efforts[0]).abs() < 1e-6, "{a} {b}: {br} vs {}", play.efforts[0]);
        }
    }

    #[test]
    fn case_efforts_examples() {
        let p = defaults();
        let one = competition_efforts(CaseId::One, &p);
        let two = competition_efforts(CaseId::Two, &p);
        let three = competition_efforts(CaseId::Three, &p);
        assert!((one.efforts[0] - 0.21).abs() < 1e-12 && (one.efforts[1] - 0.21).abs() < 1e-12);
        assert!((two.efforts[0] - 0.211_055_276).abs() < 1e-9);
        assert!((three.efforts[0] - 0.21).abs() < 1e-12);
        assert!((three.efforts[1] - 0.21 * 1.005).abs() < 1e-12);
        assert!(CaseId::try_from(4).is_err());
    }

    #[test]
    fn case_efforts_are_mutual_best_responses() {
        for p in [defaults(), preset(), params(0.1, 0.01, 1.0)] {
            for case in CaseId::ALL {
                let play = competition_efforts(case, &p).play();
                for i in 0..2 {
                    let br = best_response(i, &play, &p, 1e-5).unwrap();
                    assert!((br - play.efforts[i]).abs() < 1e-6, "{case:?} player {i}: {br}");
                }
            }
        }
    }

    #[test]
    fn case_ordering_and_bounds() {
        for p in [defaults(), preset(), params(0.12, 0.11, 1.0)] {
            let [one, two, three] = CaseId::ALL.map(|c| competition_efforts(c, &p));
            assert!(two.efforts[0] > three.efforts[1] && three.efforts[1] > one.efforts[0]);
            let bound = case_effort_bound(&p);
            assert!(one.efforts[0] <= bound && three.efforts[1] <= bound + 1e-15);
            for c in [one, two, three] {
                assert!(c.aggregate() < 1.0);
            }
        }
    }

    #[test]
    fn cross_tech_examples() {
        let p = defaults();
        let (c, e) = cross_tech_best_response(1.0, 1.0, &p).unwrap();
        assert!((e[0] - e[1]).abs() < 1e-15);
        assert!((c.b1 - c.b2).abs() < 1e-15);
        assert!(e[0] <= p.derived().r_high + 1e-15);
        assert!(cross_tech_best_response(0.2, 0.3, &p).is_err());
        for i in 0..=20 {
            for j in 0..=i {
                let (c, e) = cross_tech_best_response(i as f64 / 20.0, j as f64 / 20.0, &p).unwrap();
                assert!((c.b1 - c.b2).abs() < 1e-15 && c.b().abs() < 1.0);
                assert!(e[0] <= 0.2 + 1e-15 && e[1] <= 0.2 + 1e-15);
            }
        }
    }

    #[test]
    fn cross_tech_matches_best_response() {
        let p = defaults();
        for &(a, b) in &[(0.8, 0.3), (1.0, 0.5), (0.6, 0.6)] {
            let (_, e) = cross_tech_best_response(a, b, &p).unwrap();
            let play = TwoTechPlay {
                priors: [TechBelief::new(a, b).unwrap(); 2],
                techs: [Tech::A, Tech::B],
                efforts: e,
                switch_when_indifferent: [true; 2],
            };
            for i in 0..2 {
                let br = best_response(i, &play, &p, 1e-5).unwrap();
                assert!((br - e[i]).abs() < 1e-6, "({a},{b}) player {i}: {br} vs {}", e[i]);
            }
        }
    }

    #[test]
    fn slack_boundary_point() {
        let c = BrCoefficients::from_raw(0.0, 0.0, 0.2, 0.0, 0.5);
        assert!((c.slack_n() - c.slack_m()).abs() < 1e-15);
        assert!(c.slack_n() >= 0.0);
    }

    #[test]
    fn slack_small_scan() {
        let a = slack_scan(50_000, 6, 3);
        let b = slack_scan(50_000, 6, 3);
        assert_eq!(a, b);
        assert_eq!(a.points, 50_000 + 6u64.pow(5));
        assert!(a.min() >= -1e-12);
        assert!(a.max_abs_b < 1.0);
    }

    #[test]
    fn output_competition_examples() {
        let p = preset();
        let one = competition_efforts(CaseId::One, &p);
        let two = competition_efforts(CaseId::Two, &p);
        let y1 = output_competition(0.0, &one, &p).unwrap();
        assert!((y1 - 0.028608).abs() < 1e-12, "{y1}");
        let y2 = output_competition(0.0, &two, &p).unwrap();
        let want = 2.0 * 0.24 * 0.04 * ((1.0 - 0.25 * 0.04) / (1.0 - 0.5 * 0.04 * 0.2) + 0.5);
        assert!((y2 - want).abs() < 1e-12);
        assert!((y2 - 0.02868434).abs() < 1e-8);
        for case in CaseId::ALL {
            let c = competition_efforts(case, &p);
            let y = output_competition(1.0, &c, &p).unwrap();
            assert!((y - (c.aggregate() * 0.24 + 2.0 * 0.5 * 0.24 * 0.24)).abs() < 1e-12);
        }
    }

    #[test]
    fn outputs_match_enumeration() {
        for p in [defaults(), preset(), params(0.1, 0.02, 0.9)] {
            for k in 0..=10 {
                let x = k as f64 / 10.0;
                let w = TechBelief::symmetric(x).unwrap();
                for case in CaseId::ALL {
                    let c = competition_efforts(case, &p);
                    let exact = evaluate(&c.play(), w, &p).unwrap().output;
                    assert!((output_competition(x, &c, &p).unwrap() - exact).abs() < 1e-12);
                }
                let opt = like_minded_play(1.0, 1.0, &p);
                let exact = evaluate(&opt, w, &p).unwrap().output;
                assert!((output_like_minded_optimists(x, &p).unwrap() - exact).abs() < 1e-12);
                for &(a, b) in &[(0.3, 0.1), (0.6, 0.6), (0.2, 0.9), (1.0, 0.0)] {
                    let exact = evaluate(&like_minded_play(a, b, &p), w, &p).unwrap().output;
                    assert!((output_like_minded(a, b, x, &p).unwrap() - exact).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn optimists_examples() {
        let p = preset();
        assert!((output_like_minded_optimists(0.0, &p).unwrap() - 0.0288).abs() < 1e-12);
        assert!((output_like_minded_optimists(1.0, &p).unwrap() - 2.0 * 0.0576 * 1.5).abs() < 1e-12);
        let myopic = params(0.24, 0.04, 1e-9);
        let y = output_like_minded_optimists(0.3, &myopic).unwrap();
        assert!((y - 2.0 * 0.24 * 0.1).abs() < 1e-9);
    }

    #[test]
    fn most_productive_cases() {
        let p = preset();
        assert_eq!(most_productive_output(0.0, &p).unwrap().1, CaseId::Two);
        assert_eq!(most_productive_output(1.0, &p).unwrap().1, CaseId::Two);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_pbar(&defaults()), Threshold::None);
        assert_eq!(threshold_pbar(&params(0.24, 0.04, 0.2)), Threshold::At(0.0));
        let p = preset();
        let Threshold::At(root) = threshold_pbar(&p) else {
            panic!("expected a threshold");
        };
        assert!(root > 0.0 && root < 1.0);
        let bis = threshold_by_bisection(&p, 1e-14).unwrap().unwrap();
        assert!((root - bis).abs() < 1e-10, "{root} {bis}");
    }

    #[test]
    fn h_bound_properties() {
        let p = defaults();
        for &e1 in &[0.1, 0.3, 0.6] {
            for &x in &[0.0, 0.4, 0.9] {
                let h0 = split_bound_h(e1, 0.0, x, &p).unwrap();
                let h1 = split_bound_h(e1, e1, x, &p).unwrap();
                assert!((h0 - h1).abs() < 1e-12);
                let h = e1 / 4.0;
                let mid = e1 / 2.0;
                let second = split_bound_h(e1, mid + h, x, &p).unwrap() - 2.0 * split_bound_h(e1, mid, x, &p).unwrap()
                    + split_bound_h(e1, mid - h, x, &p).unwrap();
                assert!((second - split_bound_curvature(x, &p) * h * h).abs() < 1e-14);
            }
            let at_one = split_bound_h(e1, e1 / 3.0, 1.0, &p).unwrap();
            assert!((at_one - split_bound_g(e1, &p)).abs() < 1e-14);
        }
        assert!(split_bound_h(0.2, 0.3, 0.5, &p).is_err());
    }

    #[test]
    fn welfare_examples() {
        let p = defaults();
        assert!((welfare(TeamKind::Optimists, &p).unwrap() - 0.09).abs() < 1e-12);
        let c = welfare(TeamKind::Competition, &p).unwrap();
        assert!((c - 0.092_149_95).abs() < 1e-8, "{c}");
        let lm = welfare(TeamKind::LikeMinded { p: 1.0, q: 1.0 }, &p).unwrap();
        assert!((lm - 0.09).abs() < 1e-12);
    }

    #[test]
    fn welfare_matches_enumeration() {
        let p = defaults();
        let certain = TechBelief::symmetric(1.0).unwrap();
        let comp = competition_efforts(CaseId::Two, &p).play();
        let v = evaluate(&comp, certain, &p).unwrap();
        let w = welfare(TeamKind::Competition, &p).unwrap();
        assert!((v.payoffs[0] - w).abs() < 1e-12 && (v.payoffs[1] - w).abs() < 1e-12);
        for &(a, b) in &[(0.4, 0.1), (0.9, 0.9), (0.0, 0.7)] {
            let v = evaluate(&like_minded_play(a, b, &p), certain, &p).unwrap();
            let w = welfare(TeamKind::LikeMinded { p: a, q: b }, &p).unwrap();
            assert!((v.payoffs[0] - w).abs() < 1e-12, "{a} {b}");
        }
    }
}
