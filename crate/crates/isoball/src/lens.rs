//! The one-parameter extremal family: intersections of U with a second ball
//! whose boundary sphere meets ∂U at right angles.
//!
//! For the orthogonal configuration d² = R² + ρ² the two boundary spheres
//! intersect along an (n−2)-sphere in the radical plane; the lens U ∩ B is
//! the union of the two caps cut off by that plane, and its free surface is
//! exactly the cap of ∂B inside U. `GeneralCap` drops the orthogonality
//! constraint and is used to probe stationarity of the orthogonal member.

use crate::error::{Error, Result};
use crate::geometry::{
    ball_volume, cap_colatitude_for_volume, unit_volume_radius, BallGeometry, CapSpec,
};

/// Default volume tolerance for `solve_rho_for_volume`.
pub const DEFAULT_VOLUME_TOL: f64 = 1e-12;

/// ρ/R beyond which the solver reports the flat-cut limit instead.
const FLAT_CUT_RHO_FACTOR: f64 = 1e10;

/// Targets this close to 1/2 are the flat cut for every practical purpose:
/// the lens volume saturates at 1/2 in f64 before ρ reaches the bracket cap.
const FLAT_CUT_EPS_BAND: f64 = 1e-9;

/// Orthogonal lens U ∩ B(c, ρ) with all derived quantities cached.
#[derive(Debug, Clone, Copy)]
pub struct LensShape {
    ambient: BallGeometry,
    rho: f64,
    center_dist: f64,
    plane_offset_u: f64,
    plane_offset_b: f64,
    theta_u: f64,
    theta_b: f64,
}

impl LensShape {
    /// Build the orthogonal lens of the unit-volume ball U_n with second
    /// radius ρ. All fields follow from d² = R² + ρ².
    pub fn from_rho(n: u32, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("lens requires n >= 2, got {n}")));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("rho must be positive, got {rho}")));
        }
        let ambient = BallGeometry::unit_volume(n)?;
        let r = ambient.radius();
        let d = r.hypot(rho);
        Ok(Self {
            ambient,
            rho,
            center_dist: d,
            plane_offset_u: r * r / d,
            plane_offset_b: rho * rho / d,
            theta_u: (r / d).acos(),
            theta_b: (rho / d).acos(),
        })
    }

    pub fn ambient(&self) -> &BallGeometry {
        &self.ambient
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// d = |OO'|.
    pub fn center_dist(&self) -> f64 {
        self.center_dist
    }

    /// Radical-plane distance a from O.
    pub fn plane_offset_u(&self) -> f64 {
        self.plane_offset_u
    }

    /// Radical-plane distance b from O'.
    pub fn plane_offset_b(&self) -> f64 {
        self.plane_offset_b
    }

    /// Colatitude of U's cap beyond the radical plane.
    pub fn theta_u(&self) -> f64 {
        self.theta_u
    }

    /// Colatitude of B's cap toward O.
    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }

    /// Radius of the rim (n−2)-sphere: Rρ/d.
    pub fn rim_radius(&self) -> f64 {
        self.ambient.radius() * self.rho / self.center_dist
    }

    /// sin²/cos² of the two cap colatitudes, exact in R and ρ: going through
    /// acos would wipe out θ_b once ρ/d rounds to 1 near the flat-cut limit.
    fn angle_squares(&self) -> (f64, f64) {
        let r2 = self.ambient.radius() * self.ambient.radius();
        let rho2 = self.rho * self.rho;
        let d2 = r2 + rho2;
        (rho2 / d2, r2 / d2)
    }

    /// Volume of the lens: the U-cap and B-cap joined along the radical
    /// plane. Strictly in (0, 1/2).
    pub fn volume(&self) -> f64 {
        let (sin_sq_u, cos_sq_u) = self.angle_squares();
        let n = self.ambient.dim();
        // the B-cap swaps the roles: sin²θ_b = cos²θ_u
        crate::geometry::cap_volume_acute(n, self.ambient.radius(), sin_sq_u, cos_sq_u)
            + crate::geometry::cap_volume_acute(n, self.rho, cos_sq_u, sin_sq_u)
    }

    /// Free surface area: the cap of ∂B inside U.
    pub fn free_area(&self) -> f64 {
        let (sin_sq_u, cos_sq_u) = self.angle_squares();
        crate::geometry::cap_area_acute(self.ambient.dim(), self.rho, cos_sq_u, sin_sq_u)
    }
}

/// A member of the extremal family: either a genuine lens or the flat-cut
/// limit (the half-space competitor), kept as a distinguished member so
/// M(1/2, n) stays finite and exact.
#[derive(Debug, Clone, Copy)]
pub enum Candidate {
    Lens(LensShape),
    FlatCut { ambient: BallGeometry },
}

impl Candidate {
    pub fn volume(&self) -> f64 {
        match self {
            Candidate::Lens(l) => l.volume(),
            Candidate::FlatCut { .. } => 0.5,
        }
    }

    pub fn free_area(&self) -> f64 {
        match self {
            Candidate::Lens(l) => l.free_area(),
            Candidate::FlatCut { ambient } => central_disk_area(ambient),
        }
    }

    pub fn is_flat_cut(&self) -> bool {
        matches!(self, Candidate::FlatCut { .. })
    }

    pub fn lens(&self) -> Option<&LensShape> {
        match self {
            Candidate::Lens(l) => Some(l),
            Candidate::FlatCut { .. } => None,
        }
    }
}

/// Area of the flat central disk of U: κ_{n−1} R^{n−1}.
fn central_disk_area(ambient: &BallGeometry) -> f64 {
    ball_volume(ambient.dim() - 1, ambient.radius())
        .expect("ambient dimension >= 2 at construction")
}

/// Invert the family for a target volume: bracketed bisection in ln ρ.
///
/// Monotonicity of the lens volume in ρ makes the bracket trivial. If the
/// bracket expansion runs past ρ = 10^10 R while the volume still falls
/// short, the target is numerically indistinguishable from 1/2 and the
/// flat-cut limit member is returned instead.
pub fn solve_rho_for_volume(n: u32, eps: f64, tol: f64) -> Result<Candidate> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!(
            "target volume must lie in (0, 1/2), got {eps}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if eps >= 0.5 - FLAT_CUT_EPS_BAND {
        return Ok(Candidate::FlatCut {
            ambient: BallGeometry::unit_volume(n)?,
        });
    }
    let r = unit_volume_radius(n)?;
    let vol_at = |ln_rho: f64| -> Result<f64> {
        Ok(LensShape::from_rho(n, ln_rho.exp())?.volume())
    };

    let mut lo = r.ln();
    let mut steps = 0;
    while vol_at(lo)? > eps {
        lo -= 2.0;
        steps += 1;
        if steps > 600 {
            return Err(Error::Convergence(format!(
                "lower bracket expansion failed for eps = {eps}"
            )));
        }
    }
    let ln_flat_cut = (FLAT_CUT_RHO_FACTOR * r).ln();
    let mut hi = r.ln();
    while vol_at(hi)? < eps {
        hi += 2.0;
        if hi > ln_flat_cut {
            return Ok(Candidate::FlatCut {
                ambient: BallGeometry::unit_volume(n)?,
            });
        }
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = vol_at(mid)?;
        if (v - eps).abs() <= tol {
            return Ok(Candidate::Lens(LensShape::from_rho(n, mid.exp())?));
        }
        if v < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "rho bisection did not reach volume tolerance {tol} for eps = {eps} (pathological tol?)"
    )))
}

/// (n−1)-volume of the flat disk cutting volume eps off U.
pub fn flat_cut_free_area(n: u32, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Domain(format!(
            "flat cut volume must lie in (0, 1/2], got {eps}"
        )));
    }
    let ambient = BallGeometry::unit_volume(n)?;
    let theta = cap_colatitude_for_volume(&ambient, eps)?;
    ball_volume(n - 1, ambient.radius() * theta.sin())
}

/// Intersection of U with a ball B(O', ρ) at center distance d, without the
/// orthogonality constraint. Perturbation family for the stationarity test.
#[derive(Debug, Clone, Copy)]
pub struct GeneralCap {
    ambient: BallGeometry,
    rho: f64,
    center_dist: f64,
}

impl GeneralCap {
    /// Requires a proper intersection: |R − ρ| < d < R + ρ.
    pub fn new(n: u32, rho: f64, center_dist: f64) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(n)?;
        let r = ambient.radius();
        if !(rho > 0.0) || !(center_dist > 0.0) {
            return Err(Error::Domain(
                "rho and center distance must be positive".into(),
            ));
        }
        if !((r - rho).abs() < center_dist && center_dist < r + rho) {
            return Err(Error::Domain(format!(
                "B must intersect U properly: |R - rho| < d < R + rho (R = {r}, rho = {rho}, d = {center_dist})"
            )));
        }
        Ok(Self {
            ambient,
            rho,
            center_dist,
        })
    }

    /// Radical-plane offsets (a from O, b from O'); either may be negative.
    pub fn plane_offsets(&self) -> (f64, f64) {
        let r = self.ambient.radius();
        let d = self.center_dist;
        let a = (d * d + r * r - self.rho * self.rho) / (2.0 * d);
        (a, d - a)
    }

    fn caps(&self) -> (CapSpec, CapSpec) {
        let (a, b) = self.plane_offsets();
        let r = self.ambient.radius();
        let theta_u = (a / r).clamp(-1.0, 1.0).acos();
        let theta_b = (b / self.rho).clamp(-1.0, 1.0).acos();
        let b_geom = BallGeometry::with_radius(self.ambient.dim(), self.rho)
            .expect("validated at construction");
        (
            CapSpec {
                geometry: self.ambient,
                colatitude: theta_u,
            },
            CapSpec {
                geometry: b_geom,
                colatitude: theta_b,
            },
        )
    }

    /// Volume of U ∩ B from the two radical-plane caps.
    pub fn volume(&self) -> f64 {
        let (u_cap, b_cap) = self.caps();
        u_cap.volume() + b_cap.volume()
    }

    /// Area of the inner cap of ∂B (the free surface).
    pub fn free_area(&self) -> f64 {
        self.caps().1.area()
    }
}

/// For fixed center distance d, solve for the ρ giving volume eps and return
/// the free area of the resulting (generally non-orthogonal) cap.
pub fn general_cap_free_area_at_volume(n: u32, eps: f64, d: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!(
            "target volume must lie in (0, 1), got {eps}"
        )));
    }
    let r = unit_volume_radius(n)?;
    if !(d > 0.0) {
        return Err(Error::Domain(format!("center distance must be positive, got {d}")));
    }
    let rho_lo = (d - r).abs() * (1.0 + 1e-12) + 1e-300;
    let rho_hi = (d + r) * (1.0 - 1e-12);
    if rho_lo >= rho_hi {
        return Err(Error::NoSolution(format!(
            "no proper intersection exists at d = {d}"
        )));
    }
    let vol = |rho: f64| GeneralCap::new(n, rho, d).map(|c| c.volume());
    let (v_lo, v_hi) = (vol(rho_lo)?, vol(rho_hi)?);
    if !(v_lo <= eps && eps <= v_hi) {
        return Err(Error::NoSolution(format!(
            "center distance d = {d} admits volumes [{v_lo:.3e}, {v_hi:.3e}], not {eps}"
        )));
    }
    let mut lo = rho_lo;
    let mut hi = rho_hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if vol(mid)? < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    GeneralCap::new(n, 0.5 * (lo + hi), d).map(|c| c.free_area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn symmetric_lens_in_the_plane() {
        // rho = R: right isosceles configuration
        let r2 = unit_volume_radius(2).unwrap();
        let lens = LensShape::from_rho(2, r2).unwrap();
        assert!((lens.center_dist() - r2 * 2.0f64.sqrt()).abs() < 1e-14);
        assert!((lens.theta_u() - FRAC_PI_4).abs() < 1e-14);
        assert!((lens.theta_b() - FRAC_PI_4).abs() < 1e-14);
        // free arc length 2 ρ θ_b
        let arc = 2.0 * r2 * FRAC_PI_4;
        assert!((lens.free_area() - arc).abs() < 1e-12);
    }

    #[test]
    fn constructor_invariants_roundtrip() {
        let lens = LensShape::from_rho(3, 0.3).unwrap();
        let (r, rho, d) = (lens.ambient().radius(), lens.rho(), lens.center_dist());
        assert!((d * d - (r * r + rho * rho)).abs() < 1e-12 * d * d);
        assert!((lens.plane_offset_u() - r * r / d).abs() < 1e-14);
        assert!((lens.plane_offset_b() - rho * rho / d).abs() < 1e-14);
        assert!((lens.plane_offset_u() + lens.plane_offset_b() - d).abs() < 1e-14);
        assert!((lens.theta_u().cos() - r / d).abs() < 1e-14);
        assert!((lens.theta_b().cos() - rho / d).abs() < 1e-14);
        let rim = lens.rim_radius();
        assert!((rim - r * lens.theta_u().sin()).abs() < 1e-14);
        assert!((rim - rho * lens.theta_b().sin()).abs() < 1e-14);
        assert!(lens.theta_u() > 0.0 && lens.theta_u() < PI / 2.0);
        assert!(lens.theta_b() > 0.0 && lens.theta_b() < PI / 2.0);
    }

    #[test]
    fn rim_normals_orthogonal() {
        // rim point in the OO' plane: (a, rim); normals (p-O)/R and (p-O')/ρ
        for &(n, rho) in &[(2u32, 0.7), (3, 0.3), (10, 2.0), (5, 0.9)] {
            let lens = LensShape::from_rho(n, rho).unwrap();
            let (a, rim) = (lens.plane_offset_u(), lens.rim_radius());
            let d = lens.center_dist();
            let r = lens.ambient().radius();
            let dot = (a * (a - d) + rim * rim) / (r * lens.rho());
            assert!(dot.abs() < 1e-10, "n={n} rho={rho}: normal dot {dot}");
        }
    }

    #[test]
    fn huge_rho_approaches_half_ball() {
        let lens = LensShape::from_rho(10, 1e6).unwrap();
        assert!(lens.theta_u() > PI / 2.0 - 1e-5);
        assert!((lens.volume() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn tiny_rho_vanishes() {
        let lens = LensShape::from_rho(3, 1e-6).unwrap();
        assert!(lens.volume() < 1e-17);
        assert!(lens.volume() > 0.0);
    }

    #[test]
    fn solve_roundtrip() {
        let c = solve_rho_for_volume(3, 0.1, DEFAULT_VOLUME_TOL).unwrap();
        assert!((c.volume() - 0.1).abs() <= DEFAULT_VOLUME_TOL);
        assert!(!c.is_flat_cut());
    }

    #[test]
    fn solve_near_half_reports_flat_cut() {
        let c = solve_rho_for_volume(4, 0.5 - 1e-13, 1e-15).unwrap();
        assert!(c.is_flat_cut());
        assert_eq!(c.volume(), 0.5);
        let flat = flat_cut_free_area(4, 0.5).unwrap();
        assert!((c.free_area() - flat).abs() < 1e-12 * flat);
    }

    #[test]
    fn solve_domain_errors() {
        assert!(solve_rho_for_volume(3, 0.0, 1e-12).is_err());
        assert!(solve_rho_for_volume(3, 0.5, 1e-12).is_err());
        assert!(solve_rho_for_volume(3, 0.7, 1e-12).is_err());
        assert!(solve_rho_for_volume(3, 0.1, 0.0).is_err());
    }

    #[test]
    fn flat_cut_known_values() {
        // n = 2: the central cut is a diameter of the unit-area disk
        let v2 = flat_cut_free_area(2, 0.5).unwrap();
        assert!((v2 - 2.0 / PI.sqrt()).abs() < 1e-12, "got {v2}");
        // n = 3: central disk π R₃²
        let r3 = unit_volume_radius(3).unwrap();
        let v3 = flat_cut_free_area(3, 0.5).unwrap();
        assert!((v3 - PI * r3 * r3).abs() < 1e-12, "got {v3}");
        // eps → 0 shrinks the disk away (area ~ √eps in 3-D)
        assert!(flat_cut_free_area(3, 1e-9).unwrap() < 1e-4);
        assert!(flat_cut_free_area(3, 1e-9).unwrap() < flat_cut_free_area(3, 1e-6).unwrap());
    }

    #[test]
    fn general_cap_matches_lens_at_orthogonal_distance() {
        for &(n, eps) in &[(2u32, 0.25), (3, 0.1), (5, 0.05)] {
            let lens = *solve_rho_for_volume(n, eps, 1e-13).unwrap().lens().unwrap();
            let free = general_cap_free_area_at_volume(n, eps, lens.center_dist()).unwrap();
            assert!(
                (free - lens.free_area()).abs() < 1e-9,
                "n={n} eps={eps}: {free} vs {}",
                lens.free_area()
            );
        }
    }

    #[test]
    fn general_cap_rejects_incompatible_distance() {
        // with O' near O every proper intersection contains the inner
        // tangent ball, so small target volumes are unreachable
        let r = unit_volume_radius(3).unwrap();
        let err = general_cap_free_area_at_volume(3, 0.1, 0.1 * r);
        assert!(matches!(err, Err(Error::NoSolution(_))), "{err:?}");
    }

    #[test]
    fn general_cap_degenerate_contact_guard() {
        // d → R + ρ with vanishing eps: the free area goes to zero too
        let free = general_cap_free_area_at_volume(3, 1e-10, 1.2).unwrap();
        assert!(free < 1e-4, "got {free}");
    }

    #[test]
    fn lens_measures_monotone_in_rho() {
        for n in [2u32, 3, 5, 10, 20, 50] {
            let mut prev_v = 0.0;
            let mut prev_a = 0.0;
            for k in 0..200 {
                let rho = (1e-2f64.ln() + k as f64 * (1e2f64.ln() - 1e-2f64.ln()) / 199.0).exp();
                let lens = LensShape::from_rho(n, rho).unwrap();
                let (v, a) = (lens.volume(), lens.free_area());
                assert!(v > prev_v, "volume not increasing: n={n} rho={rho}");
                assert!(a > prev_a, "area not increasing: n={n} rho={rho}");
                prev_v = v;
                prev_a = a;
            }
        }
    }

    #[test]
    fn lens_never_beats_flat_cut() {
        for n in [2u32, 3, 5, 10, 20, 50] {
            for &eps in &[0.01, 0.05, 0.1, 0.25, 0.4, 0.49] {
                let lens = solve_rho_for_volume(n, eps, 1e-12).unwrap().free_area();
                let flat = flat_cut_free_area(n, eps).unwrap();
                assert!(
                    lens <= flat * (1.0 + 1e-12),
                    "n={n} eps={eps}: lens {lens} > flat {flat}"
                );
            }
        }
    }
}
