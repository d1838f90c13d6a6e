use rayon::prelude::*;
use serde::Serialize;

use super::Workforce;
use crate::error::{ModelError, Result};
use crate::model::{Belief, Params, Team};
use crate::single_tech::expected_output;

/// Largest sample solved by the subset dynamic program.
pub const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMode {
    /// Dynamic programming over subsets; at most [`EXACT_LIMIT`] workers.
    Exact,
    /// Pairwise exchanges from the input-order pairing until none improves.
    TwoOpt,
}

/// A two-member team. Workers are indices into the sorted sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pair {
    pub worker_a: usize,
    pub worker_b: usize,
    pub prior_a: f64,
    pub prior_b: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingPlan {
    /// Sorted by `worker_a`, with `worker_a < worker_b`.
    pub pairs: Vec<Pair>,
    pub total_value: f64,
}

impl PairingPlan {
    fn from_indices(mut idx: Vec<(usize, usize)>, sorted: &[f64], values: &ValueTable) -> PairingPlan {
        for pair in idx.iter_mut() {
            if pair.0 > pair.1 {
                *pair = (pair.1, pair.0);
            }
        }
        idx.sort_unstable();
        let pairs: Vec<Pair> = idx
            .into_iter()
            .map(|(a, b)| Pair {
                worker_a: a,
                worker_b: b,
                prior_a: sorted[a],
                prior_b: sorted[b],
                value: values.get(a, b),
            })
            .collect();
        let total_value = pairs.iter().map(|p| p.value).sum();
        PairingPlan { pairs, total_value }
    }

    /// Whether the plan pairs the same prior values as the countermonotone
    /// plan (ranks `k` and `n+1−k`). Duplicated priors may swap partners.
    pub fn is_countermonotone(&self, sorted: &[f64]) -> bool {
        let key = |a: f64, b: f64| if a <= b { (a, b) } else { (b, a) };
        let mut mine: Vec<(f64, f64)> = self.pairs.iter().map(|p| key(p.prior_a, p.prior_b)).collect();
        let mut reference: Vec<(f64, f64)> = countermonotone_pairs(sorted.len())
            .into_iter()
            .map(|(a, b)| key(sorted[a], sorted[b]))
            .collect();
        let cmp = |x: &(f64, f64), y: &(f64, f64)| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1));
        mine.sort_by(cmp);
        reference.sort_by(cmp);
        mine == reference
    }

    /// Discrete workforce value `Σ Y(pair) / n`.
    pub fn value_per_worker(&self) -> f64 {
        self.total_value / (2 * self.pairs.len()) as f64
    }
}

/// Rank pairs `(k, n−1−k)` of a sorted sample of even size `n`.
pub fn countermonotone_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n / 2).map(|k| (k, n - 1 - k)).collect()
}

struct ValueTable {
    n: usize,
    v: Vec<f64>,
}

impl ValueTable {
    fn build(sorted: &[f64], p_star: Belief, params: &Params) -> Result<ValueTable> {
        let n = sorted.len();
        let v = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                expected_output(&Team::new(vec![sorted[i], sorted[j]])?, p_star, params)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ValueTable { n, v })
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.n + j]
    }
}

fn sample_of(w: &Workforce, params: &Params) -> Result<Vec<f64>> {
    let Workforce::Empirical { sorted } = w else {
        return Err(ModelError::Precondition("pairing needs an empirical workforce".into()));
    };
    if sorted.len() % 2 == 1 {
        return Err(ModelError::OddWorkforce(sorted.len()));
    }
    if params.n() != 2 {
        return Err(ModelError::Precondition(format!(
            "pairing forms two-member teams, parameters declare N = {}",
            params.n()
        )));
    }
    Ok(sorted.clone())
}

/// Perfect matching of the sample maximizing `Σ Y_{p★}(pair)`.
pub fn optimal_pairing(w: &Workforce, p_star: Belief, params: &Params, mode: PairingMode) -> Result<PairingPlan> {
    let sorted = sample_of(w, params)?;
    let n = sorted.len();
    if mode == PairingMode::Exact && n > EXACT_LIMIT {
        return Err(ModelError::TooManyForExact(n));
    }
    let values = ValueTable::build(&sorted, p_star, params)?;
    let idx = match mode {
        PairingMode::Exact => subset_dp(&values),
        PairingMode::TwoOpt => two_opt(&values),
    };
    Ok(PairingPlan::from_indices(idx, &sorted, &values))
}

fn subset_dp(values: &ValueTable) -> Vec<(usize, usize)> {
    let n = values.n;
    let full = (1usize << n) - 1;
    // best[m]: optimum over the workers in `m` left unmatched.
    let mut best = vec![f64::NEG_INFINITY; 1 << n];
    let mut choice = vec![usize::MAX; 1 << n];
    best[0] = 0.0;
    for m in 1..=full {
        if m.count_ones() % 2 == 1 {
            continue;
        }
        let i = m.trailing_zeros() as usize;
        let rest = m & !(1 << i);
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let cand = values.get(i, j) + best[rest & !(1 << j)];
            if cand > best[m] {
                best[m] = cand;
                choice[m] = j;
            }
        }
    }
    let mut pairs = Vec::with_capacity(n / 2);
    let mut m = full;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        let j = choice[m];
        pairs.push((i, j));
        m &= !(1 << i) & !(1 << j);
    }
    pairs
}

fn two_opt(values: &ValueTable) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..values.n / 2).map(|k| (2 * k, 2 * k + 1)).collect();
    let v = |a: usize, b: usize| values.get(a, b);
    loop {
        let mut improved = false;
        for x in 0..pairs.len() {
            for y in x + 1..pairs.len() {
                let ((a, b), (c, d)) = (pairs[x], pairs[y]);
                let now = v(a, b) + v(c, d);
                let cross = v(a, c) + v(b, d);
                let swap = v(a, d) + v(b, c);
                let margin = 1e-15 * now.abs().max(1e-300);
                if cross > now + margin && cross >= swap {
                    pairs[x] = (a, c);
                    pairs[y] = (b, d);
                    improved = true;
                } else if swap > now + margin {
                    pairs[x] = (a, d);
                    pairs[y] = (b, c);
                    improved = true;
                }
            }
        }
        if !improved {
            return pairs;
        }
    }
}

/// Best pairing by enumerating every perfect matching, with the value gap to
/// the runner-up (`∞` when only one matching exists).
pub fn exhaustive_pairing(w: &Workforce, p_star: Belief, params: &Params) -> Result<(PairingPlan, f64)> {
    let sorted = sample_of(w, params)?;
    if sorted.len() > 12 {
        return Err(ModelError::TooManyForExact(sorted.len()));
    }
    let values = ValueTable::build(&sorted, p_star, params)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut second = f64::NEG_INFINITY;
    let mut current = Vec::new();
    enumerate(&values, (1usize << sorted.len()) - 1, 0.0, &mut current, &mut |total, pairs| {
        if total > best.0 {
            second = best.0;
            best = (total, pairs.to_vec());
        } else if total > second {
            second = total;
        }
    });
    let gap = best.0 - second;
    Ok((PairingPlan::from_indices(best.1, &sorted, &values), gap))
}

fn enumerate<F: FnMut(f64, &[(usize, usize)])>(
    values: &ValueTable,
    left: usize,
    acc: f64,
    current: &mut Vec<(usize, usize)>,
    visit: &mut F,
) {
    if left == 0 {
        visit(acc, current);
        return;
    }
    let i = left.trailing_zeros() as usize;
    let rest = left & !(1 << i);
    let mut bits = rest;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        current.push((i, j));
        enumerate(values, rest & !(1 << j), acc + values.get(i, j), current, visit);
        current.pop();
    }
}
