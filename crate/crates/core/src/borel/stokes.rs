use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pade::{pade_fit_robust, PadeApproximant};
use crate::error::{Error, Result};
use crate::oracle::Ray;
use crate::series::BorelSeries;

/// Rank tolerance for the Pade fits used to locate singularities.
pub const DETECTION_TOL: f64 = 1e-14;
/// A pole must move less than this (relative to `max(1, |p|)`) when the
/// order drops by two to count as a genuine singularity.
pub const STABILITY_DRIFT: f64 = 1e-3;

/// Singularities of a Borel transform and the rays through them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesReport {
    #[serde(with = "crate::cplx::vec")]
    pub singularities: Vec<Complex64>,
    pub exceptional_directions: Vec<Ray>,
    /// True when at least one pole was found and it survived the refit.
    pub summable_elsewhere: bool,
    /// Poles of the order-`N` fit that did not reappear at order `N-2`.
    #[serde(with = "crate::cplx::vec")]
    pub unstable_poles: Vec<Complex64>,
    pub pade_order: (usize, usize),
}

/// Diagonal `[order/2, order/2]` and `[order/2 - 1, order/2 - 1]` robust fits.
pub(crate) fn detection_fits(b: &BorelSeries, order: usize) -> Result<(PadeApproximant, Option<PadeApproximant>)> {
    if order > b.order() {
        return Err(Error::OutOfRange {
            index: order,
            max: b.order(),
        });
    }
    let h = order / 2;
    let top = pade_fit_robust(b, h, h, DETECTION_TOL)?;
    let lower = if h >= 1 {
        Some(pade_fit_robust(b, h - 1, h - 1, DETECTION_TOL)?)
    } else {
        None
    };
    Ok((top, lower))
}

/// The root-test radius must grow by at least this factor between the two
/// halves of the coefficient tail for the transform to count as entire.
pub const ENTIRE_GROWTH: f64 = 1.2;

/// Least-squares radius `exp(-slope)` of `ln|c_n|` over `range`, skipping
/// zero coefficients; `None` with fewer than three points.
fn window_radius(c: &[Complex64], range: std::ops::Range<usize>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = range
        .filter(|&n| c[n].norm() > 0.0)
        .map(|n| (n as f64, c[n].norm().ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mean_n = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_l = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_n).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_n) * (p.1 - mean_l)).sum();
    Some((-sxy / sxx).exp())
}

/// Coefficients decaying faster than any geometric sequence (the apparent
/// radius keeps growing along the tail) belong to an entire function, whose
/// Pade poles are approximation artifacts however stable they look.
pub(crate) fn looks_entire(b: &BorelSeries, order: usize) -> bool {
    let c = &b.coeffs()[..=order.min(b.order())];
    let n = c.len();
    if n < 12 {
        return false;
    }
    let (a, m) = (n / 2, 3 * n / 4);
    match (window_radius(c, a..m), window_radius(c, m..n)) {
        (Some(r1), Some(r2)) => r2 > ENTIRE_GROWTH * r1,
        _ => false,
    }
}

/// Poles of `top` matched by a pole of `lower` within the drift tolerance.
pub(crate) fn stable_poles(top: &PadeApproximant, lower: Option<&PadeApproximant>) -> (Vec<Complex64>, Vec<Complex64>) {
    let Some(lower) = lower else {
        return (Vec::new(), top.poles().to_vec());
    };
    top.poles().iter().partition(|&&p| {
        lower
            .poles()
            .iter()
            .any(|&q| (p - q).norm() < STABILITY_DRIFT * p.norm().max(1.0))
    })
}

/// Locate the singularities of the Borel transform from Pade poles that are
/// stable under lowering the order by two.
pub fn detect_stokes(b: &BorelSeries, order: usize) -> Result<StokesReport> {
    let (top, lower) = detection_fits(b, order)?;
    let (mut stable, mut unstable) = stable_poles(&top, lower.as_ref());
    if looks_entire(b, order) {
        unstable.append(&mut stable);
    }
    // a real singularity should sit on the real axis, not a rounding error off it
    for p in stable.iter_mut() {
        if p.im.abs() <= 1e-13 * p.norm() {
            p.im = 0.0;
        }
    }
    let mut directions: Vec<Ray> = Vec::new();
    for &p in &stable {
        let ray = Ray::through(p);
        if !directions.iter().any(|r| r.angular_distance(ray) < 1e-9) {
            directions.push(ray);
        }
    }
    directions.sort_by(|a, b| a.theta().total_cmp(&b.theta()));
    Ok(StokesReport {
        summable_elsewhere: !stable.is_empty(),
        singularities: stable,
        exceptional_directions: directions,
        unstable_poles: unstable,
        pade_order: top.requested_degrees(),
    })
}

/// CSV with header `re,im,theta`, one row per singularity.
pub fn write_stokes_csv<W: Write>(report: &StokesReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["re", "im", "theta"]).map_err(io)?;
    for p in &report.singularities {
        w.write_record([
            format!("{:e}", p.re),
            format!("{:e}", p.im),
            format!("{:e}", Ray::through(*p).theta()),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
