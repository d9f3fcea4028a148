//! Numerical tools for divergent power series.
//!
//! The running example is `x^2 y' + y = x`, whose formal solution
//! `sum (-1)^n n! x^(n+1)` diverges for every `x != 0` yet determines the
//! true solution. The crate provides
//!
//! * [`series`]: truncated formal series, the Borel transform and the
//!   recurrences that generate formal solutions;
//! * [`oracle`]: closed-form quadrature of the exact solution, Laplace
//!   integrals along rays, and complex-path integration of
//!   `(x^2 - eps) y' + y = g(x)`;
//! * [`truncation`]: optimal truncation and its exponentially small error;
//! * [`borel`]: Pade continuation of the Borel transform, directional
//!   Borel-Laplace sums, singularity detection and Stokes jumps;
//! * [`axioms`]: Borel sums of numeric series and checks of the properties
//!   of a good resummation method;
//! * [`unfolding`]: the two simple singular points `+-sqrt(eps)` of the
//!   unfolded equation and the connection coefficient between them.

// `!(a < b)` is deliberate throughout: NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod borel;
mod cplx;
mod dd;
pub mod error;
pub mod oracle;
pub mod series;
pub mod truncation;
pub mod unfolding;

pub use error::{Error, Result};
pub use oracle::{euler_exact, EulerMethod, Ray};
pub use series::{euler_formal_coeffs, BorelSeries, FormalSeries};
