use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{laplace_along_ray, simpson, QuadratureResult, Ray, WithPoles};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EulerMethod {
    /// `e^(1/x) int_0^x e^(-1/z)/z dz` along the segment `[0, x]`.
    Direct,
    /// `int_0^inf e^(-zeta/x)/(1+zeta) dzeta`.
    Laplace,
}

/// The solution of `x^2 y' + y = x` that tends to 0 as `x -> 0` inside the
/// half-plane `Re(1/x) > 0`.
pub fn euler_exact(x: Complex64, method: EulerMethod, tol: f64) -> Result<QuadratureResult> {
    if !(1e-14..=1e-3).contains(&tol) {
        return Err(Error::Precondition(format!("tol must lie in [1e-14, 1e-3], got {tol}")));
    }
    let w = x.inv();
    if !(w.re > 0.0 && w.re.is_finite()) {
        return Err(Error::Domain(format!("Re(1/x) must be positive, x = {x}")));
    }
    match method {
        EulerMethod::Laplace => {
            let b = WithPoles {
                f: |z: Complex64| 1.0 / (1.0 + z),
                poles: vec![Complex64::new(-1.0, 0.0)],
            };
            laplace_along_ray(&b, Ray::new(0.0), x, tol)
        }
        EulerMethod::Direct => {
            // z = x s: the integrand becomes e^((1 - 1/s)/x) / s on (0, 1]
            let mut f = |s: f64| {
                if s <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                (w * (1.0 - 1.0 / s)).exp() / s
            };
            let out = simpson::integrate(&mut f, 0.0, 1.0, 16, tol);
            if !out.converged {
                return Err(Error::Accuracy {
                    best: out.value,
                    err: out.err,
                });
            }
            Ok(QuadratureResult {
                value: out.value,
                err_estimate: out.err,
                n_evals: out.evals,
            })
        }
    }
}
