//! One-dimensional maximization by uniform grid plus golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
}

/// Maximizes `f` on `[lo, hi]`: scans a uniform grid with spacing `step`,
/// then runs golden-section search on the bracket around the best grid point.
/// The refinement assumes `f` is unimodal on that bracket.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Maximum {
    assert!(hi >= lo && step > 0.0);
    let cells = ((hi - lo) / step).ceil() as usize;
    let at = |k: usize| (lo + k as f64 * step).min(hi);
    let mut best_k = 0;
    let mut best = f(at(0));
    for k in 1..=cells {
        let v = f(at(k));
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut a = at(best_k.saturating_sub(1));
    let mut b = at((best_k + 1).min(cells));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx >= best {
        Maximum { argmax: x, value: fx }
    } else {
        Maximum {
            argmax: at(best_k),
            value: best,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_concave_peak() {
        let m = maximize(|x| -(x - 0.123456789).powi(2), 0.0, 1.0, 1e-3);
        assert!((m.argmax - 0.123456789).abs() < 1e-7);
    }

    #[test]
    fn boundary_peak() {
        let m = maximize(|x| x, 0.0, 1.0, 0.01);
        assert!((m.argmax - 1.0).abs() < 1e-12);
        let m = maximize(|x| -x, 0.0, 1.0, 0.01);
        assert!(m.argmax.abs() < 1e-12);
    }
}
