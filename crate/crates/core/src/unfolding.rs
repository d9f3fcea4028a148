//! The unfolded equation `(x^2 - eps) y' + y = g(x)`, `eps > 0`.
//!
//! The double singular point of `x^2 y' + y = g` splits into two simple ones,
//! `x1 = sqrt(eps)` and `x2 = -sqrt(eps)`. Writing `s = sqrt(eps)`, the
//! homogeneous solution is `W(x) = ((x + s)/(x - s))^(1/(2s))`, and
//!
//! * at `x1` (`u = x - s`, `x^2 - eps = u (u + 2s)`) the coefficients of a
//!   power series solution obey `(1 + 2sn) h_n = g~_n - (n-1) h_(n-1)`, so
//!   there is exactly one solution `h1` analytic at `x1`;
//! * at `x2` (`v = x + s`) they obey `(1 - 2sn) h_n = g~_n - (n-1) h_(n-1)`,
//!   which breaks down when `1/(2s)` is a positive integer (a resonance).
//!
//! Continuing `h1` to a neighbourhood of `x2` gives `h2 + C2 W`; the
//! connection coefficient `C2` is what this module computes.

use std::f64::consts::PI;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cplx::{horner, is_finite};
use crate::error::{Error, Result};
use crate::oracle::{ode_trace, ContinuationOptions, Path};
use crate::series::{radius_from_tail, FormalSeries};

/// `1/(2 sqrt(eps))` closer than this to a positive integer is resonant.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Relative size below which the numerator at a resonant order counts as
/// zero (the analytic case).
pub const RESONANT_NUMERATOR_TOL: f64 = 1e-10;
/// Largest acceptable relative misfit of the `C2` fit.
pub const MAX_FIT_RESIDUAL: f64 = 1e-4;
/// Landing points on the circle around `x2` sit at these angles (below the
/// axis; mirrored for the path above).
const LANDING_ANGLES: [f64; 5] = [-PI / 6.0, -PI / 3.0, -PI / 2.0, -2.0 * PI / 3.0, -5.0 * PI / 6.0];
/// Chords per landing-angle step when following the circle around `x2`.
const ARC_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingConfig {
    pub eps: f64,
    /// Right-hand side, a polynomial in `x` (offset 0).
    pub g: FormalSeries,
    /// Order `N` of the local series.
    pub order: usize,
    /// Minimum distance between the continuation path and `+-sqrt(eps)`.
    pub path_clearance: f64,
    /// Local ODE error per unit path length.
    pub tol: f64,
}

impl UnfoldingConfig {
    /// Order 60, clearance `0.1 sqrt(eps)`, tolerance `1e-12`.
    pub fn new(eps: f64, g: FormalSeries) -> Result<Self> {
        let cfg = UnfoldingConfig {
            eps,
            g,
            order: 60,
            path_clearance: 0.1 * eps.sqrt(),
            tol: 1e-12,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Precondition(format!("eps must be positive, got {}", self.eps)));
        }
        if self.g.offset() != 0 {
            return Err(Error::OffsetMismatch {
                expected: 0,
                found: self.g.offset(),
            });
        }
        if self.order < 2 {
            return Err(Error::Precondition(format!(
                "order must be at least 2, got {}",
                self.order
            )));
        }
        if !(self.path_clearance > 0.0 && self.path_clearance.is_finite()) {
            return Err(Error::Precondition(format!(
                "path clearance must be positive, got {}",
                self.path_clearance
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    fn s(&self) -> f64 {
        self.eps.sqrt()
    }

    fn g_at(&self, x: Complex64) -> Complex64 {
        horner(self.g.coeffs(), x)
    }
}

/// `sum h_n (x - center)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSolution {
    pub center: f64,
    #[serde(with = "crate::cplx::vec")]
    pub coeffs: Vec<Complex64>,
    pub radius_estimate: f64,
    /// Resonant order at which the numerator vanished and `h_n := 0` was
    /// chosen.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub free_order: Option<usize>,
}

impl LocalSolution {
    pub fn eval(&self, x: Complex64) -> Complex64 {
        horner(&self.coeffs, x - self.center)
    }
}

/// Coefficients of `g` re-expanded at `c`, padded with zeros to `len`.
fn recentre(g: &FormalSeries, c: f64, len: usize) -> Vec<Complex64> {
    let mut a = g.coeffs().to_vec();
    // repeated synthetic division by (x - c)
    let d = a.len() - 1;
    for i in 0..d {
        for j in (i..d).rev() {
            let next = a[j + 1];
            a[j] += next * c;
        }
    }
    a.resize(len.max(a.len()), Complex64::new(0.0, 0.0));
    a
}

/// The resonant order `n = 1/(2 sqrt(eps))`, if it is a positive integer.
pub fn resonance_order(eps: f64) -> Option<usize> {
    if !(eps > 0.0) {
        return None;
    }
    let k = 0.5 / eps.sqrt();
    let n = k.round();
    (n >= 1.0 && (k - n).abs() <= RESONANCE_TOL).then_some(n as usize)
}

/// `{1/(4n^2) : n = 1..=n_max, 1/(4n^2) <= eps_max}`, largest first.
pub fn resonance_set(eps_max: f64, n_max: usize) -> Vec<f64> {
    (1..=n_max)
        .map(|n| 0.25 / (n as f64 * n as f64))
        .filter(|&e| e <= eps_max)
        .collect()
}

/// Distance from `eps` to the nearest resonant value `1/(4n^2)`.
pub fn nearest_resonance(eps: f64) -> f64 {
    let k = 0.5 / eps.sqrt();
    let lo = (k.floor() as usize).max(1);
    [lo, lo + 1]
        .iter()
        .map(|&n| (eps - 0.25 / (n as f64 * n as f64)).abs())
        .fold(f64::INFINITY, f64::min)
}

/// `h1`, the solution analytic at `+sqrt(eps)`.
pub fn local_series_plus(cfg: &UnfoldingConfig) -> Result<LocalSolution> {
    cfg.validate()?;
    let s = cfg.s();
    let gt = recentre(&cfg.g, s, cfg.order + 1);
    let mut h = vec![gt[0]];
    for n in 1..=cfg.order {
        let num = gt[n] - h[n - 1] * (n as f64 - 1.0);
        h.push(num / (1.0 + 2.0 * s * n as f64));
    }
    finish(s, h, None)
}

/// `h2`, the solution analytic at `-sqrt(eps)`.
///
/// At a resonance `n = 1/(2 sqrt(eps))` the recurrence reads
/// `0 * h_n = g~_n - (n-1) h_(n-1)`. A nonzero right side means the local
/// solution carries `(x + sqrt(eps))^n ln(x + sqrt(eps))` and
/// [`Error::Resonance`] is returned. A vanishing one leaves `h_n` free; it is
/// set to 0 and every solution is analytic there.
pub fn local_series_minus(cfg: &UnfoldingConfig) -> Result<LocalSolution> {
    cfg.validate()?;
    let s = cfg.s();
    let resonant = resonance_order(cfg.eps);
    let last = cfg.order.max(resonant.unwrap_or(0));
    let gt = recentre(&cfg.g, -s, last + 1);
    let scale = gt.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut h = vec![gt[0]];
    let mut free_order = None;
    for n in 1..=last {
        let num = gt[n] - h[n - 1] * (n as f64 - 1.0);
        if Some(n) == resonant {
            let size = scale + (n as f64 - 1.0) * h[n - 1].norm();
            if num.norm() > RESONANT_NUMERATOR_TOL * size {
                return Err(Error::Resonance { order: n, eps: cfg.eps });
            }
            free_order = Some(n);
            h.push(Complex64::new(0.0, 0.0));
        } else {
            h.push(num / (1.0 - 2.0 * s * n as f64));
        }
    }
    h.truncate(cfg.order + 1);
    finish(-s, h, free_order)
}

fn finish(center: f64, coeffs: Vec<Complex64>, free_order: Option<usize>) -> Result<LocalSolution> {
    if let Some(n) = coeffs.iter().position(|&c| !is_finite(c)) {
        return Err(Error::Overflow { order: n });
    }
    Ok(LocalSolution {
        center,
        radius_estimate: radius_from_tail(&coeffs),
        coeffs,
        free_order,
    })
}

/// Which side of the segment `[-sqrt(eps), sqrt(eps)]` the path passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathSide {
    Below,
    Above,
}

impl PathSide {
    fn sign(self) -> f64 {
        match self {
            PathSide::Below => 1.0,
            PathSide::Above => -1.0,
        }
    }
}

/// `((x + s)/(x - s))^(1/(2s))` with principal logarithms, `s = sqrt(eps)`.
///
/// Off the real axis both logarithms are continuous along any path that
/// stays in one half-plane, so this is the branch continued along a path
/// entirely below (or entirely above) the segment between the singular
/// points.
pub fn homogeneous(eps: f64, x: Complex64) -> Complex64 {
    let s = eps.sqrt();
    (((x + s).ln() - (x - s).ln()) / (2.0 * s)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub eps: f64,
    pub x1: f64,
    pub x2: f64,
    /// Multiple of `W` in the solution continued from `x1`: zero, since the
    /// continuation starts from the analytic solution there.
    #[serde(rename = "C1", with = "crate::cplx")]
    pub c1: Complex64,
    #[serde(rename = "C2", with = "crate::cplx")]
    pub c2: Complex64,
    /// Largest misfit of `y - h2 = C2 W` over the landing points, relative to
    /// the size of `y` there.
    pub fit_residual: f64,
    pub resonance: bool,
    pub resonance_order: Option<usize>,
    pub branch_note: String,
    pub side: PathSide,
    pub approach_radius: f64,
    pub h1: LocalSolution,
    pub h2: LocalSolution,
}

/// `C2` along the default path (below the segment).
pub fn connection_coefficient(cfg: &UnfoldingConfig, approach_radius: f64) -> Result<ConnectionReport> {
    connection_coefficient_on(cfg, approach_radius, PathSide::Below)
}

/// Continue `h1` from `sqrt(eps) -+ i r` to the circle of radius `r` around
/// `-sqrt(eps)`, passing on the given side, and fit `y - h2 = C2 W` at five
/// points of that circle by least squares.
pub fn connection_coefficient_on(
    cfg: &UnfoldingConfig,
    approach_radius: f64,
    side: PathSide,
) -> Result<ConnectionReport> {
    cfg.validate()?;
    let s = cfg.s();
    let r = approach_radius;
    let h1 = local_series_plus(cfg)?;
    let h2 = local_series_minus(cfg)?;
    let limit = h1
        .radius_estimate
        .min(h2.radius_estimate)
        .min(2.0 * s - cfg.path_clearance);
    if !(r >= cfg.path_clearance && r < limit) {
        return Err(Error::Precondition(format!(
            "approach radius {r} must lie in [{}, {limit})",
            cfg.path_clearance
        )));
    }

    let x1 = Complex64::new(s, 0.0);
    let x2 = Complex64::new(-s, 0.0);
    // mirror: angles are taken below the axis and conjugated for Above
    let at = |phi: f64| {
        let z = x2 + Complex64::from_polar(r, phi);
        if side == PathSide::Below {
            z
        } else {
            z.conj()
        }
    };
    let start = x1 + Complex64::new(0.0, -side.sign() * r);
    let mut points = vec![start, at(LANDING_ANGLES[0])];
    let mut landing_idx = vec![1];
    for w in LANDING_ANGLES.windows(2) {
        for k in 1..=ARC_STEPS {
            points.push(at(w[0] + (w[1] - w[0]) * k as f64 / ARC_STEPS as f64));
        }
        landing_idx.push(points.len() - 1);
    }
    let path = Path::new(points)?;
    let opts = ContinuationOptions::new(cfg.tol).with_clearance(cfg.path_clearance);
    let trace = ode_trace(cfg.eps, |x| cfg.g_at(x), h1.eval(start), &path, &opts)?;

    let pts = path.points();
    let samples: Vec<(Complex64, Complex64, Complex64)> = landing_idx
        .iter()
        .map(|&i| (trace[i], trace[i] - h2.eval(pts[i]), homogeneous(cfg.eps, pts[i])))
        .collect();
    let den: f64 = samples.iter().map(|(_, _, w)| w.norm_sqr()).sum();
    let c2 = samples.iter().map(|(_, d, w)| w.conj() * d).sum::<Complex64>() / den;
    let fit_residual = samples
        .iter()
        .map(|(y, d, w)| (d - c2 * w).norm() / y.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if !(fit_residual <= MAX_FIT_RESIDUAL) {
        return Err(Error::Fit {
            residual: fit_residual,
            limit: MAX_FIT_RESIDUAL,
        });
    }

    let resonant = resonance_order(cfg.eps);
    let side_word = match side {
        PathSide::Below => "below",
        PathSide::Above => "above",
    };
    let mut branch_note = format!(
        "principal logarithms of x+sqrt(eps) and x-sqrt(eps), continued along a path {side_word} the segment; \
         C2 for the opposite side is C2 * exp({}2 pi i/(2 sqrt(eps)))",
        if side == PathSide::Below { "" } else { "-" }
    );
    if let Some(n) = h2.free_order {
        branch_note.push_str(&format!(
            "; resonant order {n} with vanishing numerator: h_{n} := 0 and W is analytic at -sqrt(eps)"
        ));
    }
    Ok(ConnectionReport {
        eps: cfg.eps,
        x1: s,
        x2: -s,
        c1: Complex64::new(0.0, 0.0),
        c2,
        fit_residual,
        resonance: resonant.is_some(),
        resonance_order: resonant,
        branch_note,
        side,
        approach_radius: r,
        h1,
        h2,
    })
}

/// How the approach radius is chosen for each `eps` of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ApproachRule {
    /// `r = c sqrt(eps)`.
    SqrtScaled(f64),
    /// The same `r` for every `eps`.
    Fixed(f64),
}

impl Default for ApproachRule {
    fn default() -> Self {
        ApproachRule::SqrtScaled(0.5)
    }
}

impl ApproachRule {
    pub fn radius(&self, eps: f64) -> f64 {
        match *self {
            ApproachRule::SqrtScaled(c) => c * eps.sqrt(),
            ApproachRule::Fixed(r) => r,
        }
    }
}

/// Accepts `"<c>*sqrt(eps)"`, `"sqrt(eps)"` or a plain number.
impl FromStr for ApproachRule {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || {
            Error::Configuration(format!(
                "approach radius rule '{text}' is not '<c>*sqrt(eps)' or a number"
            ))
        };
        let parse = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .ok()
                .filter(|c| *c > 0.0 && c.is_finite())
                .ok_or_else(bad)
        };
        if t == "sqrt(eps)" {
            Ok(ApproachRule::SqrtScaled(1.0))
        } else if let Some(c) = t.strip_suffix("*sqrt(eps)") {
            Ok(ApproachRule::SqrtScaled(parse(c)?))
        } else {
            Ok(ApproachRule::Fixed(parse(&t)?))
        }
    }
}

/// One `eps` of a sweep; failed rows carry the error text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    #[serde(rename = "C2", with = "crate::cplx::option")]
    pub c2: Option<Complex64>,
    #[serde(rename = "abs_C2")]
    pub abs_c2: Option<f64>,
    pub fit_residual: Option<f64>,
    pub nearest_resonance: f64,
    pub error: Option<String>,
}

/// `C2` over a list of `eps`; `g` builds the right side for each `eps`.
/// Rows are computed in parallel and returned in input order.
pub fn unfolding_sweep<G>(g: G, eps_list: &[f64], rule: ApproachRule, order: usize) -> Vec<SweepRow>
where
    G: Fn(f64) -> Result<FormalSeries> + Sync,
{
    eps_list
        .par_iter()
        .map(|&eps| {
            let report = g(eps)
                .and_then(|g| UnfoldingConfig::new(eps, g))
                .and_then(|cfg| connection_coefficient(&cfg.with_order(order), rule.radius(eps)));
            let nearest = if eps > 0.0 { nearest_resonance(eps) } else { f64::NAN };
            match report {
                Ok(r) => SweepRow {
                    eps,
                    c2: Some(r.c2),
                    abs_c2: Some(r.c2.norm()),
                    fit_residual: Some(r.fit_residual),
                    nearest_resonance: nearest,
                    error: None,
                },
                Err(e) => SweepRow {
                    eps,
                    c2: None,
                    abs_c2: None,
                    fit_residual: None,
                    nearest_resonance: nearest,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// CSV with header `eps,C2_re,C2_im,abs_C2,fit_residual,nearest_resonance`;
/// the fields of a failed row are left empty.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["eps", "C2_re", "C2_im", "abs_C2", "fit_residual", "nearest_resonance"])
        .map_err(io)?;
    let f = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            format!("{:e}", r.eps),
            f(r.c2.map(|c| c.re)),
            f(r.c2.map(|c| c.im)),
            f(r.abs_c2),
            f(r.fit_residual),
            format!("{:e}", r.nearest_resonance),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
