use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pade::{pade_fit_robust, taylor_defect, PadeApproximant};
use super::stokes::{detect_stokes, StokesReport};
use crate::error::{Error, Result};
use crate::oracle::{laplace_along_ray, Ray, WithPoles};
use crate::series::{BorelSeries, FormalSeries};

/// Rays closer than this (radians) to an exceptional direction are refused.
pub const DIRECTION_CLEARANCE: f64 = 0.05;

/// Rank tolerance of the first, aggressively reduced continuation attempt.
const REDUCED_RANK_TOL: f64 = 1e-14;
/// Rank tolerance of the fallback continuation. It only drops exactly
/// rank-deficient directions, so entire transforms keep their full degree.
const FULL_RANK_TOL: f64 = 1e-18;
/// A reduced fit is accepted when it reproduces every coefficient to this
/// componentwise accuracy.
const ACCEPT_DEFECT: f64 = 1e-10;

/// Outcome of a directional Borel-Laplace sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummationResult {
    #[serde(with = "crate::cplx")]
    pub value: Complex64,
    pub direction: Ray,
    /// `max(quadrature error, |S_N - S_(N-2)|)`.
    pub err_estimate: f64,
    /// Pade degrees `(L, M)` requested for the continuation.
    pub pade_order: (usize, usize),
    pub diagnostics: String,
}

/// Continue the Borel transform `b_0..b_order` by a near-diagonal Pade
/// approximant `[order - M, M]`, with `M` the largest even number not above
/// `order/2`. (Odd denominator degrees put a real pole on the positive axis
/// in the approximants of `e^(r zeta)`, blocking the most common ray.)
///
/// The reduced (rank-revealing) fit is exact for rational transforms and
/// free of Froissart doublets, but it throws away the small singular values
/// that carry an entire transform far from the origin. It is used when it
/// reproduces the coefficients; otherwise the unreduced fit is used.
pub fn continuation(b: &BorelSeries, order: usize) -> Result<PadeApproximant> {
    continuation_with(b, order, (order / 2) & !1)
}

fn continuation_with(b: &BorelSeries, order: usize, m: usize) -> Result<PadeApproximant> {
    let l = order - m;
    let coeffs = &b.coeffs()[..=order.min(b.order())];
    let reduced = pade_fit_robust(b, l, m, REDUCED_RANK_TOL)?;
    if taylor_defect(&reduced, coeffs) <= ACCEPT_DEFECT {
        return Ok(reduced);
    }
    pade_fit_robust(b, l, m, FULL_RANK_TOL)
}

/// Pade poles closer than this to the integration ray push the quadrature
/// off Gauss-Laguerre; a continuation without such poles is preferred.
const RAY_POLE_DISTANCE: f64 = 0.5;

/// [`continuation`], but when the default fit puts a pole next to `theta`
/// that is not a detected singularity (an approximation artifact, typical of
/// entire transforms far from the origin), neighbouring even denominator
/// degrees are tried and the first one that keeps the ray clear is used.
fn continuation_along(b: &BorelSeries, order: usize, theta: Ray, report: &StokesReport) -> Result<PadeApproximant> {
    let blocking = |pa: &PadeApproximant| {
        pa.poles().iter().any(|&p| {
            theta.distance_to(p) < RAY_POLE_DISTANCE
                && !report
                    .singularities
                    .iter()
                    .any(|&s| (s - p).norm() < 1e-3 * s.norm().max(1.0))
        })
    };
    let m0 = (order / 2) & !1;
    let first = continuation_with(b, order, m0)?;
    if !blocking(&first) {
        return Ok(first);
    }
    for k in 1..=m0 / 2 + 1 {
        for m in [m0.checked_sub(2 * k), Some(m0 + 2 * k)].into_iter().flatten() {
            if m > order {
                continue;
            }
            if let Ok(pa) = continuation_with(b, order, m) {
                if !blocking(&pa) {
                    return Ok(pa);
                }
            }
        }
    }
    Ok(first)
}

fn laplace_of(pa: &PadeApproximant, theta: Ray, x: Complex64, tol: f64) -> Result<crate::oracle::QuadratureResult> {
    let b = WithPoles {
        f: |z: Complex64| pa.eval(z),
        poles: pa.poles().to_vec(),
    };
    laplace_along_ray(&b, theta, x, tol)
}

/// Borel sum `int_theta B(zeta) e^(-zeta/x) dzeta` of an offset-1 series,
/// with `B` the Pade continuation of its Borel transform through `a_order`.
pub fn borel_sum(s: &FormalSeries, x: Complex64, theta: Ray, order: usize, tol: f64) -> Result<SummationResult> {
    if s.offset() != 1 {
        return Err(Error::OffsetMismatch {
            expected: 1,
            found: s.offset(),
        });
    }
    if order > s.order() {
        return Err(Error::OutOfRange {
            index: order,
            max: s.order(),
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let w = theta.direction() / x;
    if !(w.re > 1e-14 * w.norm() && w.re.is_finite()) {
        return Err(Error::Domain(format!(
            "Re(e^(i theta)/x) must be positive (theta={}, x={x})",
            theta.theta()
        )));
    }
    let b = s.truncate(order)?.borel_transform()?;
    let report = detect_stokes(&b, order)?;
    check_clearance(&report, theta)?;

    let pa = continuation_along(&b, order, theta, &report)?;
    let q = laplace_of(&pa, theta, x, tol)?;
    let (l, m) = pa.degrees();
    let mut diagnostics = format!(
        "pade [{l}/{m}] (requested {:?}), {} pole(s), {} spurious, {} quadrature evals",
        pa.requested_degrees(),
        pa.poles().len(),
        pa.spurious_poles().len(),
        q.n_evals
    );
    let mut err = q.err_estimate;
    if order >= 2 {
        let lower = continuation_along(&b, order - 2, theta, &report).and_then(|p| laplace_of(&p, theta, x, tol));
        match lower {
            Ok(v) => {
                let drift = (v.value - q.value).norm();
                diagnostics.push_str(&format!("; order-2 drift {drift:e}"));
                err = err.max(drift);
            }
            Err(e) => diagnostics.push_str(&format!("; order-2 refit failed: {e}")),
        }
    }
    Ok(SummationResult {
        value: q.value,
        direction: theta,
        err_estimate: err,
        pade_order: pa.requested_degrees(),
        diagnostics,
    })
}

fn check_clearance(report: &StokesReport, theta: Ray) -> Result<()> {
    for d in &report.exceptional_directions {
        if theta.angular_distance(*d) < DIRECTION_CLEARANCE {
            return Err(Error::StokesDirection {
                theta: theta.theta(),
                exceptional: d.theta(),
                clearance: DIRECTION_CLEARANCE,
            });
        }
    }
    Ok(())
}

/// Borel sum of an offset-0 power series `sum c_n x^n`: the constant term
/// plus the offset-1 sum of `sum c_(n+1) x^(n+1)`. `order` counts
/// coefficients of the original series.
pub fn borel_sum_power_series(
    s: &FormalSeries,
    x: Complex64,
    theta: Ray,
    order: usize,
    tol: f64,
) -> Result<SummationResult> {
    if s.offset() != 0 {
        return Err(Error::OffsetMismatch {
            expected: 0,
            found: s.offset(),
        });
    }
    if order > s.order() {
        return Err(Error::OutOfRange {
            index: order,
            max: s.order(),
        });
    }
    let c0 = s.coeffs()[0];
    if order == 0 {
        return Ok(SummationResult {
            value: c0,
            direction: theta,
            err_estimate: 0.0,
            pade_order: (0, 0),
            diagnostics: "constant series".into(),
        });
    }
    let tail = FormalSeries::new(1, s.coeffs()[1..=order].to_vec(), s.label())?;
    let mut r = borel_sum(&tail, x, theta, order - 1, tol)?;
    r.value += c0;
    Ok(r)
}

/// Difference of the sums on the two sides of an exceptional direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesJump {
    /// `S_(theta+)(x) - S_(theta-)(x)`.
    #[serde(with = "crate::cplx")]
    pub value: Complex64,
    pub err_estimate: f64,
    /// The exceptional direction crossed, if the transform has one.
    pub exceptional_direction: Option<Ray>,
    pub minus: SummationResult,
    pub plus: SummationResult,
}

/// `borel_sum(theta_plus) - borel_sum(theta_minus)`, where sweeping
/// counterclockwise from `theta_minus` to `theta_plus` must cross exactly one
/// exceptional direction. A transform without any singularity is accepted
/// (its jump vanishes).
pub fn stokes_jump(
    s: &FormalSeries,
    x: Complex64,
    theta_minus: Ray,
    theta_plus: Ray,
    order: usize,
    tol: f64,
) -> Result<StokesJump> {
    if s.offset() != 1 {
        return Err(Error::OffsetMismatch {
            expected: 1,
            found: s.offset(),
        });
    }
    if order > s.order() {
        return Err(Error::OutOfRange {
            index: order,
            max: s.order(),
        });
    }
    let span = (theta_plus.theta() - theta_minus.theta()).rem_euclid(2.0 * PI);
    if span == 0.0 {
        return Err(Error::Configuration("the two rays coincide".into()));
    }
    let b = s.truncate(order)?.borel_transform()?;
    let report = detect_stokes(&b, order)?;
    let between: Vec<Ray> = report
        .exceptional_directions
        .iter()
        .copied()
        .filter(|d| {
            let a = (d.theta() - theta_minus.theta()).rem_euclid(2.0 * PI);
            a > 0.0 && a < span
        })
        .collect();
    let crossed = match (between.len(), report.singularities.is_empty()) {
        (1, _) => Some(between[0]),
        (0, true) => None,
        (0, false) => {
            return Err(Error::Configuration(format!(
                "no exceptional direction between theta-={} and theta+={}",
                theta_minus.theta(),
                theta_plus.theta()
            )))
        }
        (n, _) => {
            return Err(Error::Configuration(format!(
                "{n} exceptional directions between theta-={} and theta+={}",
                theta_minus.theta(),
                theta_plus.theta()
            )))
        }
    };
    let minus = borel_sum(s, x, theta_minus, order, tol)?;
    let plus = borel_sum(s, x, theta_plus, order, tol)?;
    Ok(StokesJump {
        value: plus.value - minus.value,
        err_estimate: plus.err_estimate + minus.err_estimate,
        exceptional_direction: crossed,
        minus,
        plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{euler_exact, EulerMethod};
    use crate::series::euler_formal_coeffs;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn euler_sum_matches_oracle() {
        let s = euler_formal_coeffs(24).unwrap();
        let r = borel_sum(&s, c(0.1), Ray::new(0.0), 24, 1e-12).unwrap();
        let want = euler_exact(c(0.1), EulerMethod::Laplace, 1e-13).unwrap().value;
        assert!((r.value - want).norm() < 1e-8);
        assert!(r.err_estimate.is_finite());
        assert_eq!(r.pade_order, (12, 12));
    }

    #[test]
    fn polynomial_series_sums_to_itself() {
        // a_0 = 1, rest 0: the series of f(x) = x
        let s = FormalSeries::polynomial(1, &[c(1.0)], 24, "x").unwrap();
        for theta in [-1.0, 0.0, 0.7] {
            let x = Complex64::from_polar(0.3, theta * 0.5);
            let r = borel_sum(&s, x, Ray::new(theta), 24, 1e-12).unwrap();
            assert!((r.value - x).norm() < 1e-12, "theta={theta}");
        }
    }

    #[test]
    fn two_rays_agree() {
        let s = euler_formal_coeffs(24).unwrap();
        let x = Complex64::from_polar(0.1, PI / 4.0);
        let a = borel_sum(&s, x, Ray::new(PI / 4.0), 24, 1e-12).unwrap();
        let b = borel_sum(&s, x, Ray::new(0.0), 24, 1e-12).unwrap();
        assert!((a.value - b.value).norm() < 1e-7);
    }

    #[test]
    fn refuses_exceptional_direction() {
        let s = euler_formal_coeffs(24).unwrap();
        let err = borel_sum(&s, c(-0.1), Ray::new(PI - 0.01), 24, 1e-10);
        assert!(matches!(err, Err(Error::StokesDirection { .. })), "{err:?}");
        let err = borel_sum(&s, c(-0.1), Ray::new(0.0), 24, 1e-10);
        assert!(matches!(err, Err(Error::Domain(_))));
        let err = borel_sum(&s.derivative(), c(0.1), Ray::new(0.0), 10, 1e-10);
        assert!(matches!(err, Err(Error::OffsetMismatch { .. })));
    }

    #[test]
    fn euler_jump_is_residue() {
        let s = euler_formal_coeffs(24).unwrap();
        let x = c(-0.1);
        let j = stokes_jump(&s, x, Ray::new(PI - 0.3), Ray::new(PI + 0.3), 24, 1e-12).unwrap();
        let want = Complex64::new(0.0, -2.0 * PI) * (1.0 / x).exp();
        assert!((j.value - want).norm() <= 1e-5 * want.norm(), "{} vs {want}", j.value);
        assert!(j.value.norm() > 10.0 * j.err_estimate);
        assert!((j.exceptional_direction.unwrap().theta() - PI).abs() < 1e-9);
    }

    #[test]
    fn entire_transform_has_no_jump() {
        let s = FormalSeries::polynomial(1, &[c(1.0)], 24, "x").unwrap();
        let j = stokes_jump(&s, c(-0.1), Ray::new(PI - 0.3), Ray::new(PI + 0.3), 24, 1e-12).unwrap();
        assert!(j.value.norm() < 1e-10);
        assert!(j.exceptional_direction.is_none());
    }

    #[test]
    fn jump_needs_one_direction_between_rays() {
        let s = euler_formal_coeffs(24).unwrap();
        let err = stokes_jump(&s, c(-0.1), Ray::new(PI - 0.5), Ray::new(PI - 0.2), 24, 1e-10);
        assert!(matches!(err, Err(Error::Configuration(_))));
    }

    #[test]
    fn jump_scales_like_exp_one_over_x() {
        let s = euler_formal_coeffs(24).unwrap();
        let jump = |x: f64| {
            stokes_jump(&s, c(x), Ray::new(PI - 0.3), Ray::new(PI + 0.3), 24, 1e-12)
                .unwrap()
                .value
                .norm()
        };
        let ratio = jump(-0.1) / jump(-0.2);
        assert!((ratio / (-5f64).exp() - 1.0).abs() < 1e-4, "{ratio}");
    }

    #[test]
    fn power_series_sum() {
        // 1 + x + x^2 + ... at x = 0.3
        let s = FormalSeries::from_real(0, &[1.0; 41], "geometric").unwrap();
        let r = borel_sum_power_series(&s, c(0.3), Ray::new(0.0), 40, 1e-12).unwrap();
        assert!((r.value - c(1.0 / 0.7)).norm() < 1e-8, "{}", r.value);
    }
}
