use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dd::Dd;

/// Gauss-Laguerre rule for `int_0^inf f(u) e^(-u) du`.
///
/// Nodes start from the eigenvalues of the Jacobi matrix and are polished
/// by Newton iteration on `L_m` in double-double; weights use `w = u / (m L_{m-1}(u))^2`,
/// which keeps full relative accuracy for the tiny weights at large nodes.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "a Gauss-Laguerre rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            jacobi[(k, k)] = (2 * k + 1) as f64;
            if k + 1 < m {
                let off = (k + 1) as f64;
                jacobi[(k, k + 1)] = off;
                jacobi[(k + 1, k)] = off;
            }
        }
        let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|a, b| a.total_cmp(b));

        // polish in double-double so the weights keep full f64 accuracy
        let mut weights = Vec::with_capacity(m);
        for u in nodes.iter_mut() {
            let mut ud = Dd::from_f64(*u);
            for _ in 0..10 {
                let (lm, lm1) = laguerre_pair(m, ud);
                let deriv = (lm - lm1).mul_f64(m as f64) / ud;
                let step = lm / deriv;
                if !step.hi.is_finite() {
                    // L_m overflows at the largest nodes, whose weights underflow anyway
                    break;
                }
                ud = ud - step;
                if step.hi.abs() <= 1e-30 * ud.hi.abs() {
                    break;
                }
            }
            let (_, lm1) = laguerre_pair(m, ud);
            let denom = lm1.mul_f64(m as f64);
            let w = (ud / (denom * denom)).to_f64();
            weights.push(if w.is_finite() { w } else { 0.0 });
            *u = ud.to_f64();
        }
        GaussLaguerre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum w_i f(u_i)`, skipping nodes whose weight underflowed to zero.
    /// Returns `None` if `f` is non-finite at a contributing node.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&u, &w) in self.nodes.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let v = f(u);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return None;
            }
            acc += v * w;
        }
        Some(acc)
    }
}

/// `(L_m(u), L_{m-1}(u))` by the three-term recurrence.
fn laguerre_pair(m: usize, u: Dd) -> (Dd, Dd) {
    let mut prev = Dd::ONE;
    if m == 0 {
        return (prev, Dd::ZERO);
    }
    let mut cur = Dd::ONE - u;
    for k in 1..m {
        let k = k as f64;
        let next = ((Dd::from_f64(2.0 * k + 1.0) - u) * cur - prev.mul_f64(k)) / Dd::from_f64(k + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Node counts used by the doubling scheme.
pub(crate) const DOUBLING_SIZES: [usize; 5] = [16, 32, 64, 128, 256];

/// Cached rule for one of [`DOUBLING_SIZES`].
pub(crate) fn cached_rule(m: usize) -> &'static GaussLaguerre {
    static RULES: [OnceLock<GaussLaguerre>; DOUBLING_SIZES.len()] = [const { OnceLock::new() }; DOUBLING_SIZES.len()];
    let idx = DOUBLING_SIZES
        .iter()
        .position(|&s| s == m)
        .expect("rule size outside the doubling ladder");
    RULES[idx].get_or_init(|| GaussLaguerre::new(m))
}
