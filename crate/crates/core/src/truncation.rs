//! Optimal truncation of the Euler series.
//!
//! The partial sums `f_k(x) = sum_{n<k} (-1)^n n! x^(n+1)` differ from the
//! exact solution by a remainder bounded by the first neglected term
//! `k! x^(k+1)`. Stopping at the smallest such term leaves an error of
//! order `sqrt(2 pi x) e^(-1/x)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd::{gauss_legendre, Dd};
use crate::error::{Error, Result};
use crate::oracle::{euler_exact, EulerMethod};
use crate::series::MAX_FACTORIAL_ORDER;

/// Quadrature tolerance used for the reference value `f(x)`.
const ORACLE_TOL: f64 = 1e-13;

/// Relative slack under which two bounds count as tied.
const TIE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub k: usize,
    #[serde(with = "crate::cplx")]
    pub partial_sum: Complex64,
    /// `k! x^(k+1)`.
    pub bound: f64,
    /// `|f(x) - f_k(x)|` against the quadrature oracle.
    pub actual_error: Option<f64>,
    /// `sqrt(2 pi x) e^(-1/x)`.
    pub superasymptotic: f64,
    /// `R_k(x) = (-1)^k int_0^inf zeta^k e^(-zeta/x) / (1 + zeta) dzeta`,
    /// by its own quadrature.
    pub remainder_integral: f64,
    /// `|R_k(x) - (f(x) - f_k(x))|`.
    pub identity_residual: f64,
}

/// `k! x^(k+1)`, the first neglected term of the Euler series.
pub fn remainder_bound(k: usize, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Precondition(format!("x must be positive, got {x}")));
    }
    if k > MAX_FACTORIAL_ORDER {
        return Err(Error::Overflow { order: k });
    }
    // interleave the factors so neither k! nor x^k over/underflows early
    Ok((1..=k).fold(x, |acc, n| acc * (n as f64 * x)))
}

/// The order `k` minimizing `k! x^(k+1)`; ties go to the smaller `k`.
///
/// Consecutive bounds have ratio `(k+1) x`, so the scan stops at the first
/// `k` where that ratio reaches 1. Ratios within `1e-12` of 1 count as ties,
/// which keeps the answer stable when `1/x` is an integer that is not
/// exactly representable.
pub fn optimal_k(x: f64) -> Result<usize> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Precondition(format!("optimal_k needs 0 < x <= 1, got {x}")));
    }
    let mut k = 0usize;
    while (k as f64 + 1.0) * x < 1.0 - TIE_SLACK {
        k += 1;
    }
    Ok(k)
}

/// `sqrt(2 pi x) e^(-1/x)`: the size of the error left by optimal truncation.
pub fn superasymptotic_estimate(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Precondition(format!(
            "superasymptotic estimate needs 0 < x <= 1, got {x}"
        )));
    }
    Ok((2.0 * PI * x).sqrt() * (-1.0 / x).exp())
}

/// Stirling's approximation `sqrt(2 pi) k^(k+1/2) e^(-k)` to `k!`.
pub fn stirling_approx(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Precondition("Stirling's formula needs k >= 1".into()));
    }
    if k > MAX_FACTORIAL_ORDER {
        return Err(Error::Overflow { order: k });
    }
    let k = k as f64;
    Ok((0.5 * (2.0 * PI).ln() + (k + 0.5) * k.ln() - k).exp())
}

/// Partial sums, bounds, oracle errors and remainder integrals for
/// `k = 0..=k_max`.
pub fn truncation_sweep(x: f64, k_max: usize) -> Result<Vec<TruncationReport>> {
    if !(x > 0.0 && x <= 0.5) {
        return Err(Error::Precondition(format!(
            "truncation sweep needs 0 < x <= 0.5, got {x}"
        )));
    }
    if k_max > MAX_FACTORIAL_ORDER {
        return Err(Error::Overflow { order: k_max });
    }
    let exact = euler_exact(Complex64::new(x, 0.0), EulerMethod::Laplace, ORACLE_TOL)?
        .value
        .re;
    let superasymptotic = superasymptotic_estimate(x)?;
    (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let f_k = euler_partial_sum_dd(x, k);
            let r_k = euler_remainder_dd(x, k);
            let diff = Dd::from_f64(exact) - f_k;
            Ok(TruncationReport {
                k,
                partial_sum: Complex64::new(f_k.to_f64(), 0.0),
                bound: remainder_bound(k, x)?,
                actual_error: Some(diff.abs().to_f64()),
                superasymptotic,
                remainder_integral: r_k.to_f64(),
                identity_residual: (r_k - diff).abs().to_f64(),
            })
        })
        .collect()
}

/// `R_k(x)` for real `x > 0`, integrated independently of the oracle.
pub fn remainder_integral(x: f64, k: usize) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Precondition(format!("x must be positive, got {x}")));
    }
    if k > MAX_FACTORIAL_ORDER {
        return Err(Error::Overflow { order: k });
    }
    Ok(euler_remainder_dd(x, k).to_f64())
}

/// `f_k(x)` summed in double-double.
fn euler_partial_sum_dd(x: f64, k: usize) -> Dd {
    let xd = Dd::from_f64(x);
    let mut term = xd;
    let mut sum = Dd::ZERO;
    for n in 0..k {
        sum = sum + term;
        term = (term * xd).mul_f64(-(n as f64 + 1.0));
    }
    sum
}

/// With `zeta = x u`,
/// `R_k = (-1)^k x^(k+1) int_0^inf u^k e^(-u) / (1 + x u) du`,
/// integrated by composite Gauss-Legendre on unit panels until the panels
/// past the peak at `u = k` stop contributing.
fn euler_remainder_dd(x: f64, k: usize) -> Dd {
    let (nodes, weights) = gauss_legendre();
    let xd = Dd::from_f64(x);
    let half = Dd::from_f64(0.5);
    let mut total = Dd::ZERO;
    let mut lo = 0.0;
    loop {
        let mid = Dd::from_f64(lo + 0.5);
        let mut panel = Dd::ZERO;
        for (&t, &w) in nodes.iter().zip(weights) {
            let u = mid + t * half;
            let integrand = u.powi(k as u32) * (-u).exp() / (Dd::ONE + xd * u);
            panel = panel + w * integrand;
        }
        panel = panel * half;
        total = total + panel;
        lo += 1.0;
        if lo > k as f64 + 2.0 && panel.hi.abs() <= 1e-34 * total.hi.abs() {
            break;
        }
        if lo > 4000.0 {
            break;
        }
    }
    let scaled = total * xd.powi(k as u32 + 1);
    if k % 2 == 1 {
        -scaled
    } else {
        scaled
    }
}

/// CSV with header `k,partial_sum_re,partial_sum_im,bound,actual_error,remainder_integral`.
pub fn write_truncation_csv<W: Write>(reports: &[TruncationReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "k",
        "partial_sum_re",
        "partial_sum_im",
        "bound",
        "actual_error",
        "remainder_integral",
    ])
    .map_err(io)?;
    for r in reports {
        w.write_record([
            r.k.to_string(),
            format!("{:e}", r.partial_sum.re),
            format!("{:e}", r.partial_sum.im),
            format!("{:e}", r.bound),
            r.actual_error.map(|e| format!("{e:e}")).unwrap_or_default(),
            format!("{:e}", r.remainder_integral),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        assert!((remainder_bound(3, 0.1).unwrap() - 6e-4).abs() < 1e-18);
        assert_eq!(remainder_bound(0, 0.37).unwrap(), 0.37);
        assert!((remainder_bound(10, 0.1).unwrap() / 3.6288e-5 - 1.0).abs() < 1e-12);
        assert!(matches!(remainder_bound(171, 0.1), Err(Error::Overflow { order: 171 })));
        assert!(remainder_bound(2, 0.0).is_err());
    }

    #[test]
    fn optimal_k_examples() {
        // bound(9) = bound(10) at x = 0.1; the tie goes to the smaller order
        assert_eq!(optimal_k(0.1).unwrap(), 9);
        assert_eq!(optimal_k(1.0).unwrap(), 0);
        assert_eq!(optimal_k(0.5).unwrap(), 1);
        assert_eq!(optimal_k(0.3).unwrap(), 3);
        assert!(optimal_k(0.0).is_err());
        assert!(optimal_k(1.5).is_err());
    }

    #[test]
    fn optimal_k_minimizes_bound() {
        // from x = 0.01 up: below ~1/171 the optimal order overflows the bound
        for i in 2..=200 {
            let x = i as f64 / 200.0;
            let k = optimal_k(x).unwrap();
            assert!((k as f64 - 1.0 / x).abs() <= 1.0, "x={x} k={k}");
            let b = remainder_bound(k, x).unwrap();
            for j in 0..(k + 5) {
                assert!(remainder_bound(j, x).unwrap() >= b * (1.0 - 1e-12), "x={x} j={j}");
            }
        }
    }

    #[test]
    fn superasymptotic_examples() {
        let s = superasymptotic_estimate(0.1).unwrap();
        assert!((s / 3.599e-5 - 1.0).abs() < 1e-3, "{s}");
        assert!((superasymptotic_estimate(1.0).unwrap() - 0.9221).abs() < 1e-4);
        assert!(superasymptotic_estimate(0.01).unwrap() < 1e-40);
    }

    #[test]
    fn stirling_examples() {
        assert!((stirling_approx(10).unwrap() - 3598695.6).abs() < 0.1);
        assert!((stirling_approx(1).unwrap() - 0.9221).abs() < 1e-4);
        let mut prev = 0.0;
        let mut fact = 1.0;
        for k in 1..=50usize {
            fact *= k as f64;
            let ratio = stirling_approx(k).unwrap() / fact;
            assert!(ratio > prev && ratio < 1.0, "k={k}");
            prev = ratio;
        }
        assert!(stirling_approx(0).is_err());
        assert!(stirling_approx(171).is_err());
    }

    #[test]
    fn remainder_integral_reference() {
        // 50-digit reference values at x = 0.2
        let cases = [
            (0usize, 0.17042217628473222),
            (10, 0.024223648284732217),
            (30, 8103764107.633487),
        ];
        for (k, want) in cases {
            let got = remainder_integral(0.2, k).unwrap();
            assert!(((got - want) / want).abs() < 1e-15, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn sweep_at_one_tenth() {
        let rows = truncation_sweep(0.1, 20).unwrap();
        assert_eq!(rows.len(), 21);
        assert_eq!(rows[0].partial_sum, Complex64::new(0.0, 0.0));
        assert!(rows[0].actual_error.unwrap() <= 0.1);
        assert!((rows[2].partial_sum.re - 0.09).abs() < 1e-16);
        assert!((rows[4].partial_sum.re - 0.0914).abs() < 1e-16);
        let r10 = &rows[10];
        assert!(r10.actual_error.unwrap() <= 3.63e-5);
        assert!(r10.identity_residual <= 1e-9);
        for r in &rows {
            assert!(r.actual_error.unwrap() <= r.bound + 1e-10, "k={}", r.k);
        }
    }

    #[test]
    fn sweep_rejects_large_x() {
        assert!(truncation_sweep(0.7, 5).is_err());
    }

    #[test]
    fn csv_header() {
        let rows = truncation_sweep(0.1, 1).unwrap();
        let mut buf = Vec::new();
        write_truncation_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,partial_sum_re,partial_sum_im,bound,actual_error,remainder_integral"
        );
        assert_eq!(lines.count(), 2);
    }
}
