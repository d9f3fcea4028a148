use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polyline of complex waypoints; serialized as `[[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(#[serde(with = "crate::cplx::vec")] Vec<Complex64>);

impl Path {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Precondition("a path needs at least one waypoint".into()));
        }
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Precondition("path waypoints must be finite".into()));
        }
        Ok(Path(points))
    }

    pub fn points(&self) -> &[Complex64] {
        &self.0
    }

    pub fn start(&self) -> Complex64 {
        self.0[0]
    }

    pub fn end(&self) -> Complex64 {
        self.0[self.0.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.0.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Smallest distance from the polyline to `p`.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        if self.0.len() == 1 {
            return (self.0[0] - p).norm();
        }
        self.0
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], p))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    (a + d * t.clamp(0.0, 1.0) - p).norm()
}

/// Singular points `+-sqrt(eps)` of `(x^2 - eps) y' + y = g` (just `0` when `eps = 0`).
pub fn singular_points(eps: f64) -> Vec<Complex64> {
    if eps == 0.0 {
        vec![Complex64::new(0.0, 0.0)]
    } else {
        let s = eps.sqrt();
        vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Local error allowed per unit of path length.
    pub tol: f64,
    /// Minimum distance between the path and a singular point. `None`
    /// selects `0.1 sqrt(eps)` (or `0.01` when `eps = 0`).
    pub clearance: Option<f64>,
}

impl ContinuationOptions {
    pub fn new(tol: f64) -> Self {
        ContinuationOptions { tol, clearance: None }
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = Some(clearance);
        self
    }

    fn resolved_clearance(&self, eps: f64) -> f64 {
        self.clearance
            .unwrap_or(if eps > 0.0 { 0.1 * eps.sqrt() } else { 0.01 })
    }
}

/// Integrate `y' = (g(x) - y)/(x^2 - eps)` along `path` from `y(path[0]) = y_start`
/// and return `y` at the last waypoint.
pub fn ode_continue<G: Fn(Complex64) -> Complex64>(
    eps: f64,
    g: G,
    y_start: Complex64,
    path: &Path,
    opts: &ContinuationOptions,
) -> Result<Complex64> {
    let trace = ode_trace(eps, g, y_start, path, opts)?;
    Ok(trace[trace.len() - 1])
}

/// Like [`ode_continue`] but returns `y` at every waypoint.
pub fn ode_trace<G: Fn(Complex64) -> Complex64>(
    eps: f64,
    g: G,
    y_start: Complex64,
    path: &Path,
    opts: &ContinuationOptions,
) -> Result<Vec<Complex64>> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Precondition(format!("eps must be finite and >= 0, got {eps}")));
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::Precondition(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let clearance = opts.resolved_clearance(eps);
    for p in singular_points(eps) {
        if path.distance_to(p) < clearance {
            return Err(Error::Path { point: p, clearance });
        }
    }
    let rhs = |x: Complex64, y: Complex64| (g(x) - y) / (x * x - eps);
    let mut y = y_start;
    let mut out = Vec::with_capacity(path.points().len());
    out.push(y);
    for seg in path.points().windows(2) {
        y = integrate_segment(&rhs, seg[0], seg[1], y, opts.tol)?;
        out.push(y);
    }
    Ok(out)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 2_000_000;

fn integrate_segment<F: Fn(Complex64, Complex64) -> Complex64>(
    rhs: &F,
    a: Complex64,
    b: Complex64,
    y0: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let delta = b - a;
    let len = delta.norm();
    if len == 0.0 {
        return Ok(y0);
    }
    // dy/ds = delta * rhs(a + s delta, y) on s in [0, 1]
    let f = |s: f64, y: Complex64| delta * rhs(a + delta * s, y);
    let mut s = 0.0;
    let mut y = y0;
    let mut h = (0.05 / len).min(0.25);
    let h_min = 1e-13;
    let mut k = [Complex64::new(0.0, 0.0); 7];
    k[0] = f(s, y);
    for _ in 0..MAX_STEPS {
        if s >= 1.0 {
            return Ok(y);
        }
        let last = s + h >= 1.0;
        if last {
            h = 1.0 - s;
        }
        for i in 1..7 {
            let mut acc = y;
            for j in 0..i {
                acc += k[j] * (h * A[i][j]);
            }
            k[i] = f(s + C[i] * h, acc);
        }
        let y_new = y + (0..6).map(|j| k[j] * (h * A[6][j])).sum::<Complex64>();
        let err = (0..7).map(|j| k[j] * E[j]).sum::<Complex64>().norm() * h;
        let scale = y.norm().max(y_new.norm()).max(1.0);
        let allowed = (tol * h * len).max(64.0 * f64::EPSILON) * scale;
        if !(err.is_finite() && y_new.re.is_finite() && y_new.im.is_finite()) {
            h *= 0.25;
        } else if err <= allowed {
            s = if last { 1.0 } else { s + h };
            y = y_new;
            k[0] = k[6];
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 5.0)
            };
            h *= grow;
            continue;
        } else {
            h *= (0.9 * (allowed / err).powf(0.2)).clamp(0.1, 0.9);
        }
        if h < h_min {
            return Err(Error::Stiffness { at: a + delta * s });
        }
    }
    Err(Error::Stiffness { at: a + delta * s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{euler_exact, EulerMethod};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn euler_equation_along_positive_axis() {
        let y0 = euler_exact(c(0.05), EulerMethod::Laplace, 1e-13).unwrap().value;
        let path = Path::new(vec![c(0.05), c(0.5)]).unwrap();
        let y = ode_continue(0.0, |x| x, y0, &path, &ContinuationOptions::new(1e-12)).unwrap();
        let want = euler_exact(c(0.5), EulerMethod::Laplace, 1e-13).unwrap().value;
        assert!((y - want).norm() < 1e-7, "{y} vs {want}");
    }

    #[test]
    fn polynomial_solution_is_reproduced() {
        // y = x solves (x^2 - eps) y' + y = x + x^2 - eps
        let eps = 0.04;
        let g = move |x: Complex64| x + x * x - eps;
        let path = Path::new(vec![
            Complex64::new(0.3, -0.1),
            Complex64::new(0.0, -0.15),
            Complex64::new(-0.3, -0.05),
            Complex64::new(-0.5, 0.2),
        ])
        .unwrap();
        let y = ode_continue(eps, g, path.start(), &path, &ContinuationOptions::new(1e-12)).unwrap();
        assert!((y - path.end()).norm() < 1e-10);
    }

    #[test]
    fn zero_length_path_is_identity() {
        let y0 = Complex64::new(0.3, -0.2);
        let path = Path::new(vec![c(0.7)]).unwrap();
        let y = ode_continue(0.04, |x| x, y0, &path, &ContinuationOptions::new(1e-10)).unwrap();
        assert_eq!(y, y0);
        let path = Path::new(vec![c(0.7), c(0.7)]).unwrap();
        let y = ode_continue(0.04, |x| x, y0, &path, &ContinuationOptions::new(1e-10)).unwrap();
        assert_eq!(y, y0);
    }

    #[test]
    fn path_through_singular_point_rejected() {
        let path = Path::new(vec![c(0.5), c(0.1)]).unwrap();
        let err = ode_continue(0.04, |x| x, c(0.0), &path, &ContinuationOptions::new(1e-10));
        assert!(matches!(err, Err(Error::Path { .. })));
        // clearance is configurable
        let path = Path::new(vec![c(0.5), c(0.21)]).unwrap();
        assert!(ode_continue(0.04, |x| x, c(0.0), &path, &ContinuationOptions::new(1e-10)).is_err());
        assert!(ode_continue(
            0.04,
            |x| x,
            c(0.0),
            &path,
            &ContinuationOptions::new(1e-10).with_clearance(0.005)
        )
        .is_ok());
    }

    #[test]
    fn path_json() {
        let p = Path::new(vec![Complex64::new(1.0, -0.5), c(0.0)]).unwrap();
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, "[[1.0,-0.5],[0.0,0.0]]");
        assert_eq!(serde_json::from_str::<Path>(&j).unwrap(), p);
    }

    #[test]
    fn empty_path_rejected() {
        assert!(Path::new(vec![]).is_err());
    }
}
