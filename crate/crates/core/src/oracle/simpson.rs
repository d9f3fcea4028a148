//! Adaptive Simpson quadrature with Richardson correction.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub value: Complex64,
    pub err: f64,
    pub evals: usize,
    pub converged: bool,
}

const MAX_DEPTH: u32 = 48;
/// Evaluation budget per call; past it refinement stops and the result is
/// flagged as not converged.
const MAX_EVALS: usize = 4_000_000;

/// Integrate over `[a, b]` split into `panels` equal pieces, each refined
/// until the Richardson difference meets its share of `tol`.
pub(crate) fn integrate<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, panels: usize, tol: f64) -> Outcome {
    let mut total = Outcome {
        value: Complex64::new(0.0, 0.0),
        err: 0.0,
        evals: 0,
        converged: true,
    };
    let width = (b - a) / panels as f64;
    let share = tol / panels as f64;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let hi = if p + 1 == panels { b } else { lo + width };
        let fa = f(lo);
        let fm = f(0.5 * (lo + hi));
        let fb = f(hi);
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        let mut part = Outcome {
            value: Complex64::new(0.0, 0.0),
            err: 0.0,
            evals: 3,
            converged: true,
        };
        refine(f, lo, hi, fa, fm, fb, whole, share, MAX_DEPTH, &mut part);
        total.value += part.value;
        total.err += part.err;
        total.evals += part.evals;
        total.converged &= part.converged;
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    out: &mut Outcome,
) {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    out.evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let converged = delta.norm() <= 15.0 * tol;
    // the tolerance cannot drop below the rounding level of the panel
    let floor = 1e-15 * (left.norm() + right.norm());
    if converged || delta.norm() <= floor {
        out.value += left + right + delta / 15.0;
        out.err += delta.norm() / 15.0;
        return;
    }
    if depth == 0 || m <= a || m >= b || out.evals > MAX_EVALS {
        out.value += left + right + delta / 15.0;
        out.err += delta.norm() / 15.0;
        out.converged = false;
        return;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, out);
    refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, out);
}
