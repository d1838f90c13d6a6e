//! Composite Simpson quadrature with Richardson refinement.

const MIN_PANELS: usize = 16;
const MAX_PANELS: usize = 1 << 22;

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..panels {
        let v = f(a + k as f64 * h);
        if k % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// `∫_a^b f`, doubling the panel count until the Richardson error estimate
/// `|S₂ₙ − Sₙ|/15` drops below `tol`. Returns the extrapolated value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut panels = MIN_PANELS;
    let mut coarse = composite_simpson(&f, a, b, panels);
    loop {
        panels *= 2;
        let fine = composite_simpson(&f, a, b, panels);
        let err = (fine - coarse) / 15.0;
        if err.abs() < tol || panels >= MAX_PANELS {
            return fine + err;
        }
        coarse = fine;
    }
}

/// Sum of [`integrate`] over consecutive intervals `[x_k, x_{k+1}]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> f64 {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    breaks
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], tol / pieces))
        .sum()
}
