//! Numerical toolkit for the free-boundary isoperimetric problem inside the
//! unit-volume n-ball.
//!
//! The crate computes, at desk scale:
//!
//! - exact n-ball, sphere, and spherical-cap measures ([`geometry`]),
//! - the orthogonal-lens family (second ball meeting ∂U at right angles),
//!   its closed-form volume and free-surface area, and the inversion from a
//!   target volume ([`lens`]),
//! - a discretized solver for the reduced variational problem: minimal free
//!   lateral area of a body of revolution at fixed volume ([`profile`],
//!   [`optimize`]),
//! - the isoperimetric profile M(ε, n) and the distance bound
//!   D(ε, n) = 2 ∫ dv / M(v, n), with independent quadrature and growth-ODE
//!   routes ([`bound`]),
//! - a discrete 2-D/3-D verification bench for the symmetrization lemma
//!   chain: halving planes, perpendicular incidence, quarters, and dyadic
//!   sectors ([`symmetry`]).
//!
//! Everything is deterministic: Monte Carlo and the voxel reductions produce
//! bit-identical results for a fixed seed regardless of thread count. The
//! `parallel` feature (default) runs the data-parallel loops on rayon; with
//! `--no-default-features` the same code paths run sequentially.

pub mod bound;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod lens;
pub mod montecarlo;
pub mod ode;
pub mod optimize;
pub mod profile;
pub mod quad;
pub mod special;
pub mod symmetry;

pub use bound::{
    dimension_scan, distance_bound, distance_curve, growth_ode, iso_profile, DimensionScan,
    DistanceCurve, IsoPoint,
};
pub use error::{Error, Result};
pub use geometry::{
    ball_volume, cap_area, cap_volume, sphere_area, unit_volume_radius, BallGeometry, CapSpec,
};
pub use lens::{
    flat_cut_free_area, general_cap_free_area_at_volume, solve_rho_for_volume, Candidate,
    GeneralCap, LensShape,
};
pub use montecarlo::{mc_volume_estimate, McEstimate};
pub use optimize::{minimize_profile, minimize_profile_with, MinimizeOptions, Minimized};
pub use profile::{euler_lagrange_residual, Profile};
