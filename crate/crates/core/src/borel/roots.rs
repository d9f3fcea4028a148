//! Roots of complex polynomials via the companion matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cplx::horner;

/// Roots of `sum c[k] t^k`. Trailing coefficients that are negligible
/// against the largest one are dropped first (they would put roots at
/// infinity). Eigenvalues of the companion matrix are polished by a few
/// Newton steps on the polynomial itself.
pub(crate) fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let c = &coeffs[..=deg];
    let lead = c[deg];
    let mut companion = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -c[i] / lead;
    }
    let deriv: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect();
    let start = match nalgebra::linalg::Schur::try_new(companion, 1e-15, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..deg).map(|i| t[(i, i)]).collect()
        }
        // QR iteration can stall on very symmetric root sets (e.g. roots of unity)
        None => aberth(c, &deriv),
    };
    start
        .into_iter()
        .map(|z0| {
            let mut z: Complex64 = z0;
            let mut best = horner(c, z).norm();
            for _ in 0..4 {
                let d = horner(&deriv, z);
                if d.norm() == 0.0 {
                    break;
                }
                let cand = z - horner(c, z) / d;
                let val = horner(c, cand).norm();
                if !(val < best) {
                    break;
                }
                z = cand;
                best = val;
            }
            z
        })
        .collect()
}

/// Simultaneous Aberth-Ehrlich iteration from a perturbed circle.
fn aberth(c: &[Complex64], deriv: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    let lead = c[deg].norm();
    // Cauchy-type radius bound for the starting circle
    let radius = c[..deg]
        .iter()
        .enumerate()
        .map(|(k, a)| (a.norm() / lead).powf(1.0 / (deg - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let ratio = horner(c, z[i]) / horner(deriv, z[i]);
            let repulsion: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if crate::cplx::is_finite(step) {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic() {
        // (t - 2)(t + 3) = t^2 + t - 6
        let mut r = poly_roots(&[c(-6.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(-3.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn complex_roots_and_trailing_zeros() {
        // t^2 + 1, stored with a spurious zero leading coefficient
        let r = poly_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(r.len(), 2);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-14 && z.re.abs() < 1e-14);
        }
    }

    #[test]
    fn constants_have_no_roots() {
        assert!(poly_roots(&[c(2.0, 0.0)]).is_empty());
        assert!(poly_roots(&[c(0.0, 0.0), c(0.0, 0.0)]).is_empty());
    }

    #[test]
    fn roots_of_unity() {
        let mut p = vec![c(0.0, 0.0); 13];
        p[0] = c(-1.0, 0.0);
        p[12] = c(1.0, 0.0);
        let r = poly_roots(&p);
        assert_eq!(r.len(), 12);
        for z in r {
            assert!((z.powu(12) - c(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
