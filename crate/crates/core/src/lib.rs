//! Finite-aperture linear array design.
//!
//! * [`geometry`]: feasible port placements, ULA / scaled-MRA generators and
//!   the feasibility projection.
//! * [`spacing`]: minimum-gap statistics of uniformly random ports.
//! * [`signal`]: steering vectors, snapshots, covariances and the difference
//!   co-array codebook.
//! * [`bounds`]: closed-form angle CRB and the AoA-MSE upper bound.
//! * [`optimizer`]: the `ln γ_max − ln λ̄²` objective, its gradient and the
//!   projected gradient descent that minimises it.
//!
//! Positions are in wavelengths (`λ = 1`) and angles in radians.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod optimizer;
pub mod quadrature;
pub mod signal;
pub mod spacing;

pub use bounds::{aoamse_upper_bound, crb_theta, db_to_linear, fim_theta, BoundParams, CrbParams};
pub use error::{Error, Result};
pub use geometry::{
    default_min_spacing, effective_squared_aperture, geometric_variance, make_scaled_mra, make_ula,
    project_feasible, ArrayGeometry, PlacementSpec,
};
pub use optimizer::{pgd_optimize, ConvergenceTrace, GramSpectrum, OptimizerConfig, UpdateRule};
pub use signal::{build_codebook, AngleGrid, Codebook};
pub use spacing::SpacingDistribution;

/// Formats a value with 12 significant digits in scientific notation.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}
