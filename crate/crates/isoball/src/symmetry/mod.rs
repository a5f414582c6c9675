//! Discrete 2-D/3-D verification bench for the symmetrization lemma chain:
//! halving planes through the center, perpendicular incidence at the free
//! surface, reflect-and-glue symmetrization, quarters, and dyadic sectors.
//!
//! Bodies are polygons (2-D, exact edge arithmetic) or voxel occupancy grids
//! (3-D). Free boundary is the part of a body's boundary farther than a
//! 1.5 h band from ∂U; cut faces from splitting planes are never counted.
//! Voxel surface measures weight each exposed face by the inverse l1-norm of
//! a locally estimated unit normal, which removes the staircase bias that
//! plain face counting would put on rotated sectors.

mod body;
mod io;
mod measure;
mod ops;
mod suite;

pub use body::{CentralPlane, DiscreteBody, Pivot, Side};
pub use io::{read_loop_csv, read_voxels, write_loop_csv, write_voxels};
pub use measure::SplitMeasures;
pub use ops::{
    dyadic_sector_check, dyadic_sector_check_at, find_halving_plane, perpendicular_incidence,
    quarters_check, rebuild_from_sector, reflect_glue, split_measures,
};
pub use suite::{run_lemma_suite, LemmaCheck, LemmaReport, SuiteConfig};

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Mirror a point across the central plane with the given unit normal.
pub(crate) fn reflect3(p: [f64; 3], normal: [f64; 3]) -> [f64; 3] {
    let s = 2.0 * dot3(p, normal);
    [
        p[0] - s * normal[0],
        p[1] - s * normal[1],
        p[2] - s * normal[2],
    ]
}

/// Complete a unit vector to an orthonormal pair spanning its complement.
pub(crate) fn orthonormal_complement(u: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if u[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = dot3(pick, u);
    let mut e1 = sub3(pick, scale3(u, d));
    let n = norm3(e1);
    e1 = scale3(e1, 1.0 / n);
    let e2 = [
        u[1] * e1[2] - u[2] * e1[1],
        u[2] * e1[0] - u[0] * e1[2],
        u[0] * e1[1] - u[1] * e1[0],
    ];
    (e1, e2)
}
