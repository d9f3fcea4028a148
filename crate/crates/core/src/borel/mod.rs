//! Directional Borel-Laplace summation: Pade continuation of the Borel
//! transform, Laplace integrals along rays, singularity detection and the
//! jump across an exceptional direction.

mod pade;
mod roots;
mod stokes;
mod sum;

pub use pade::{pade_fit, pade_fit_robust, PadeApproximant, DOUBLET_DISTANCE, MAX_CONDITION, MIN_RESIDUE};
pub use stokes::{detect_stokes, write_stokes_csv, StokesReport, DETECTION_TOL, ENTIRE_GROWTH, STABILITY_DRIFT};
pub use sum::{
    borel_sum, borel_sum_power_series, continuation, stokes_jump, StokesJump, SummationResult, DIRECTION_CLEARANCE,
};
