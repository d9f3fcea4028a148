//! Ground-truth numerics: quadrature of the closed-form Euler solution,
//! Laplace integrals along rays of the Borel plane, and complex-path
//! integration of `(x^2 - eps) y' + y = g(x)`.

mod euler;
mod gauss_laguerre;
mod laplace;
mod ode;
pub(crate) mod simpson;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use euler::{euler_exact, EulerMethod};
pub use gauss_laguerre::GaussLaguerre;
pub use laplace::{laplace_along_ray, laplace_along_ray_with, LaplaceOptions};
pub use ode::{ode_continue, ode_trace, singular_points, ContinuationOptions, Path};

/// A half-line `{t e^(i theta) : t >= 0}` with `theta` normalized to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "f64", from = "f64")]
pub struct Ray {
    theta: f64,
}

impl Ray {
    pub fn new(theta: f64) -> Self {
        Ray {
            theta: normalize_angle(theta),
        }
    }

    /// The ray through `z` (`z != 0`).
    pub fn through(z: Complex64) -> Self {
        Ray::new(z.arg())
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    /// Smallest angle between the two directions, in `[0, pi]`.
    pub fn angular_distance(&self, other: Ray) -> f64 {
        normalize_angle(self.theta - other.theta).abs()
    }

    /// Euclidean distance from `z` to the half-line.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let rotated = z * self.direction().conj();
        if rotated.re <= 0.0 {
            z.norm()
        } else {
            rotated.im.abs()
        }
    }
}

impl From<Ray> for f64 {
    fn from(r: Ray) -> f64 {
        r.theta
    }
}

impl From<f64> for Ray {
    fn from(theta: f64) -> Ray {
        Ray::new(theta)
    }
}

/// Map an angle into `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    // rem_euclid can land on exactly 2*pi for tiny negative inputs
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    #[serde(with = "crate::cplx")]
    pub value: Complex64,
    #[serde(rename = "err")]
    pub err_estimate: f64,
    pub n_evals: usize,
}

/// Something that can be integrated against `e^(-zeta/x)` along a ray.
pub trait BorelFunction: Sync {
    fn eval(&self, zeta: Complex64) -> Complex64;

    /// Known singularities. Laplace integration refuses rays that pass
    /// through one of these and switches quadrature when one is close.
    fn poles(&self) -> Vec<Complex64> {
        Vec::new()
    }
}

impl<F> BorelFunction for F
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, zeta: Complex64) -> Complex64 {
        self(zeta)
    }
}

/// A closure paired with the list of its poles.
pub struct WithPoles<F> {
    pub f: F,
    pub poles: Vec<Complex64>,
}

impl<F> BorelFunction for WithPoles<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn eval(&self, zeta: Complex64) -> Complex64 {
        (self.f)(zeta)
    }

    fn poles(&self) -> Vec<Complex64> {
        self.poles.clone()
    }
}
