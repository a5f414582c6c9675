//! Discretized revolution profiles r(x) inside U and their measures.
//!
//! A profile on a grid x₀ < … < x_m describes the body of revolution
//! {(x, y) : |y| ≤ r(x)} about the x-axis. Volume is the trapezoid composite
//! of κ_{n−1} r^{n−1} plus the residual v₀ pressed flush against ∂U. Free
//! lateral area integrates σ_{n−2} r^{n−2} √(1 + r'²) over unclipped
//! segments, evaluated in the frustum-exact form (the lateral area of the
//! piecewise-linear body, exact per segment), so near-vertical transitions
//! are charged the correct disk measure. End faces with r > 0 always carry
//! the flat-disk term κ_{n−1} r^{n−1}: an end disk interior never lies on
//! ∂U, and charging it keeps zero-cost truncation out of the optimizer.

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, cap_colatitude_for_volume, BallGeometry};
use crate::lens::LensShape;
use std::io::{BufRead, Write};

/// Clip detection tolerance as a fraction of R.
pub const TOL_CLIP_REL: f64 = 1e-9;

/// Interior nodes with |r'| above this are skipped by the Euler–Lagrange
/// residual: the x-parametrization degenerates at vertical tangents and
/// finite differences there measure nothing but the parametrization.
const EL_SLOPE_CAP: f64 = 5.0;

/// Discretized revolution profile with clipping against ∂U.
#[derive(Debug, Clone)]
pub struct Profile {
    ambient: BallGeometry,
    grid: Vec<f64>,
    radii: Vec<f64>,
    clip_mask: Vec<bool>,
    v0: f64,
}

impl Profile {
    /// Validate and build a profile. Radii are clamped onto [0, bound(x)]
    /// provided they never exceed the bound by more than 1e-10.
    pub fn new(ambient: BallGeometry, grid: Vec<f64>, radii: Vec<f64>, v0: f64) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::Domain("profile needs at least two grid nodes".into()));
        }
        if grid.len() != radii.len() {
            return Err(Error::Domain(format!(
                "grid and radii lengths differ: {} vs {}",
                grid.len(),
                radii.len()
            )));
        }
        let r_amb = ambient.radius();
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        if grid[0] < -r_amb - 1e-12 || *grid.last().unwrap() > r_amb + 1e-12 {
            return Err(Error::Domain("grid must lie within [-R, R]".into()));
        }
        if !(v0 >= 0.0) {
            return Err(Error::Domain(format!("v0 must be nonnegative, got {v0}")));
        }
        let mut clamped = radii;
        for (x, r) in grid.iter().zip(clamped.iter_mut()) {
            let bound = node_bound(r_amb, *x);
            if *r < 0.0 || *r > bound + 1e-10 {
                return Err(Error::Domain(format!(
                    "radius {r} at x = {x} violates the box [0, {bound}]"
                )));
            }
            *r = r.min(bound);
        }
        let tol_clip = TOL_CLIP_REL * r_amb;
        let clip_mask: Vec<bool> = grid
            .iter()
            .zip(clamped.iter())
            .map(|(x, r)| node_bound(r_amb, *x) - r <= tol_clip)
            .collect();
        if v0 > 0.0 && !clip_mask.iter().any(|&c| c) {
            return Err(Error::Precondition(
                "v0 > 0 requires at least one clipped node (the residual is pressed against ∂U)"
                    .into(),
            ));
        }
        Ok(Self {
            ambient,
            grid,
            radii: clamped,
            clip_mask,
            v0,
        })
    }

    /// Profile of the orthogonal lens (free B-cap, then the clipped U-cap).
    pub fn lens(shape: &LensShape, m: usize, x_lo: Option<f64>) -> Result<Self> {
        let ambient = *shape.ambient();
        let r_amb = ambient.radius();
        let tip = shape.center_dist() - shape.rho();
        let lo = x_lo.unwrap_or(tip).max(-r_amb);
        if lo > tip {
            return Err(Error::Domain(format!(
                "x_lo = {lo} truncates the lens (tip at {tip})"
            )));
        }
        let grid = linspace(lo, r_amb, m + 1);
        let d = shape.center_dist();
        let rho = shape.rho();
        let a = shape.plane_offset_u();
        let radii = grid
            .iter()
            .map(|&x| {
                if x < tip {
                    0.0
                } else if x <= a {
                    (rho * rho - (x - d) * (x - d)).max(0.0).sqrt()
                } else {
                    node_bound(r_amb, x)
                }
            })
            .collect();
        Self::new(ambient, grid, radii, 0.0)
    }

    /// Profile of the flat cut holding volume eps against the +x pole.
    pub fn flat_cut(n: u32, eps: f64, m: usize) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(n)?;
        let theta = cap_colatitude_for_volume(&ambient, eps)?;
        let x_c = ambient.radius() * theta.cos();
        let grid = linspace(x_c, ambient.radius(), m + 1);
        let radii = grid
            .iter()
            .map(|&x| node_bound(ambient.radius(), x))
            .collect();
        Self::new(ambient, grid, radii, 0.0)
    }

    /// The whole ball U as a fully clipped profile.
    pub fn full_ball(n: u32, m: usize) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(n)?;
        let r = ambient.radius();
        let grid = linspace(-r, r, m + 1);
        let radii = grid.iter().map(|&x| node_bound(r, x)).collect();
        Self::new(ambient, grid, radii, 0.0)
    }

    pub fn ambient(&self) -> &BallGeometry {
        &self.ambient
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn clip_mask(&self) -> &[bool] {
        &self.clip_mask
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// Trapezoid-composite volume plus the residual v₀.
    pub fn volume(&self) -> f64 {
        let vals = eval(
            self.ambient.dim(),
            self.ambient.radius(),
            &self.grid,
            &self.radii,
        );
        vals.volume + self.v0
    }

    /// Free lateral area; clipped segments contribute nothing.
    pub fn free_area(&self) -> f64 {
        eval(
            self.ambient.dim(),
            self.ambient.radius(),
            &self.grid,
            &self.radii,
        )
        .area
    }

    /// Serialize as CSV with columns x, r, clipped.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,r,clipped")?;
        for i in 0..self.grid.len() {
            writeln!(
                w,
                "{},{},{}",
                self.grid[i],
                self.radii[i],
                u8::from(self.clip_mask[i])
            )?;
        }
        Ok(())
    }

    /// Parse a profile written by `write_csv`.
    pub fn read_csv<R: BufRead>(ambient: BallGeometry, r: R) -> Result<Self> {
        let mut grid = Vec::new();
        let mut radii = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
                continue;
            }
            let mut parts = line.split(',');
            let x: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad x on line {}", ln + 1)))?;
            let rad: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad r on line {}", ln + 1)))?;
            grid.push(x);
            radii.push(rad);
        }
        Self::new(ambient, grid, radii, 0.0)
    }
}

/// Upper box bound √(R² − x²) at a node.
pub(crate) fn node_bound(ambient_radius: f64, x: f64) -> f64 {
    (ambient_radius * ambient_radius - x * x).max(0.0).sqrt()
}

pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

/// Values of the discrete functionals at a radii vector.
#[derive(Debug, Clone)]
pub(crate) struct FunctionalValues {
    pub volume: f64,
    pub area: f64,
}

/// Values plus analytic gradients, for the optimizer.
#[derive(Debug, Clone)]
pub(crate) struct FunctionalGradients {
    pub volume: f64,
    pub area: f64,
    pub grad_volume: Vec<f64>,
    pub grad_area: Vec<f64>,
    pub clip: Vec<bool>,
}

/// κ_{n−1} and σ_{n−2} = (n−1) κ_{n−1} for the ambient dimension.
fn section_constants(n: u32) -> (f64, f64) {
    let kappa = ball_volume(n - 1, 1.0).expect("n >= 2 everywhere in this module");
    (kappa, f64::from(n - 1) * kappa)
}

/// Mean of r^{n−2} over a linear segment, with a Taylor branch for tiny Δr.
/// Returns (g, dg/dr0, dg/dr1).
fn segment_power_mean(n: u32, r0: f64, r1: f64) -> (f64, f64, f64) {
    match n {
        2 => (1.0, 0.0, 0.0),
        3 => (0.5 * (r0 + r1), 0.5, 0.5),
        _ => {
            let p = (n - 2) as i32;
            let dr = r1 - r0;
            let rm = 0.5 * (r0 + r1);
            if dr.abs() > 1e-6 * rm.max(1e-300) {
                let g = (r1.powi(p + 1) - r0.powi(p + 1)) / (f64::from(n - 1) * dr);
                let dg0 = (g - r0.powi(p)) / dr;
                let dg1 = (r1.powi(p) - g) / dr;
                (g, dg0, dg1)
            } else {
                let g = rm.powi(p);
                let dg = 0.5 * f64::from(n - 2) * rm.powi(p - 1);
                (g, dg, dg)
            }
        }
    }
}

/// Evaluate volume and free area (no gradients).
pub(crate) fn eval(n: u32, ambient_radius: f64, grid: &[f64], radii: &[f64]) -> FunctionalValues {
    let (kappa, sigma) = section_constants(n);
    let tol_clip = TOL_CLIP_REL * ambient_radius;
    let p = (n - 1) as i32;
    let m = grid.len() - 1;
    let mut volume = 0.0;
    let mut area = 0.0;
    let clip_at = |i: usize| node_bound(ambient_radius, grid[i]) - radii[i] <= tol_clip;
    let mut clip_prev = clip_at(0);
    for j in 0..m {
        let (r0, r1) = (radii[j], radii[j + 1]);
        let dx = grid[j + 1] - grid[j];
        volume += 0.5 * kappa * (r0.powi(p) + r1.powi(p)) * dx;
        let clip_next = clip_at(j + 1);
        let both_clipped = clip_prev && clip_next;
        let both_zero = r0 <= 0.0 && r1 <= 0.0;
        if !(both_clipped || both_zero) {
            let (g, _, _) = segment_power_mean(n, r0, r1);
            area += sigma * dx.hypot(r1 - r0) * g;
        }
        clip_prev = clip_next;
    }
    for idx in [0, m] {
        if radii[idx] > 0.0 {
            area += kappa * radii[idx].powi(p);
        }
    }
    FunctionalValues { volume, area }
}

/// Evaluate with analytic gradients of both functionals.
pub(crate) fn eval_with_grad(
    n: u32,
    ambient_radius: f64,
    grid: &[f64],
    radii: &[f64],
) -> FunctionalGradients {
    let (kappa, sigma) = section_constants(n);
    let tol_clip = TOL_CLIP_REL * ambient_radius;
    let p = (n - 1) as i32;
    let m = grid.len() - 1;
    let len = grid.len();
    let mut volume = 0.0;
    let mut area = 0.0;
    let mut grad_volume = vec![0.0; len];
    let mut grad_area = vec![0.0; len];
    let clip: Vec<bool> = (0..len)
        .map(|i| node_bound(ambient_radius, grid[i]) - radii[i] <= tol_clip)
        .collect();
    for j in 0..m {
        let (r0, r1) = (radii[j], radii[j + 1]);
        let dx = grid[j + 1] - grid[j];
        volume += 0.5 * kappa * (r0.powi(p) + r1.powi(p)) * dx;
        let dv0 = 0.5 * kappa * f64::from(n - 1) * r0.powi(p - 1) * dx;
        let dv1 = 0.5 * kappa * f64::from(n - 1) * r1.powi(p - 1) * dx;
        grad_volume[j] += dv0;
        grad_volume[j + 1] += dv1;
        let both_clipped = clip[j] && clip[j + 1];
        let both_zero = r0 <= 0.0 && r1 <= 0.0;
        if !(both_clipped || both_zero) {
            let dr = r1 - r0;
            let length = dx.hypot(dr);
            let (g, dg0, dg1) = segment_power_mean(n, r0, r1);
            area += sigma * length * g;
            grad_area[j] += sigma * (-dr / length * g + length * dg0);
            grad_area[j + 1] += sigma * (dr / length * g + length * dg1);
        }
    }
    for idx in [0, m] {
        if radii[idx] > 0.0 {
            area += kappa * radii[idx].powi(p);
            grad_area[idx] += kappa * f64::from(n - 1) * radii[idx].powi(p - 1);
        }
    }
    FunctionalGradients {
        volume,
        area,
        grad_volume,
        grad_area,
        clip,
    }
}

/// Mean curvature (sum of principal curvatures) of the revolution surface at
/// an interior node, by second-order finite differences.
fn mean_curvature(n: u32, hm: f64, hp: f64, r_prev: f64, r: f64, r_next: f64) -> f64 {
    let rp = if (hm - hp).abs() < 1e-12 * hm {
        (r_next - r_prev) / (hm + hp)
    } else {
        -hp / (hm * (hm + hp)) * r_prev + (hp - hm) / (hm * hp) * r + hm / (hp * (hm + hp)) * r_next
    };
    let rpp = 2.0 * (hm * r_next - (hm + hp) * r + hp * r_prev) / (hm * hp * (hm + hp));
    let w = 1.0 + rp * rp;
    -rpp / w.powf(1.5) + f64::from(n - 2) / (r * w.sqrt())
}

/// Max over interior unclipped nodes of |mean curvature − λ|.
///
/// Returns +∞ when fewer than 3 consecutive unclipped nodes exist. Nodes
/// whose centered slope exceeds the cap (vertical-tangent regions) are not
/// evaluated.
pub fn euler_lagrange_residual(p: &Profile, lambda: f64) -> f64 {
    let n = p.ambient().dim();
    let grid = p.grid();
    let radii = p.radii();
    let clip = p.clip_mask();
    let mut worst = f64::NEG_INFINITY;
    let mut evaluated = false;
    for i in 1..grid.len() - 1 {
        if clip[i - 1] || clip[i] || clip[i + 1] {
            continue;
        }
        if radii[i - 1] <= 0.0 || radii[i] <= 0.0 || radii[i + 1] <= 0.0 {
            continue;
        }
        let hm = grid[i] - grid[i - 1];
        let hp = grid[i + 1] - grid[i];
        let slope = (radii[i + 1] - radii[i - 1]) / (hm + hp);
        if slope.abs() > EL_SLOPE_CAP {
            continue;
        }
        let h = mean_curvature(n, hm, hp, radii[i - 1], radii[i], radii[i + 1]);
        worst = worst.max((h - lambda).abs());
        evaluated = true;
    }
    if evaluated {
        worst
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::solve_rho_for_volume;

    #[test]
    fn full_ball_volume_is_one() {
        let p = Profile::full_ball(3, 2000).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-6, "got {}", p.volume());
        assert!(p.clip_mask().iter().all(|&c| c));
    }

    #[test]
    fn fully_clipped_profile_has_no_free_area() {
        let p = Profile::full_ball(3, 500).unwrap();
        assert_eq!(p.free_area(), 0.0);
    }

    #[test]
    fn zero_profile_zero_volume() {
        let ambient = BallGeometry::unit_volume(3).unwrap();
        let grid = linspace(-0.3, 0.3, 101);
        let p = Profile::new(ambient, grid, vec![0.0; 101], 0.0).unwrap();
        assert_eq!(p.volume(), 0.0);
        assert_eq!(p.free_area(), 0.0);
    }

    #[test]
    fn lens_profile_matches_closed_forms() {
        let lens = *solve_rho_for_volume(3, 0.2, 1e-13).unwrap().lens().unwrap();
        let p = Profile::lens(&lens, 2000, None).unwrap();
        assert!(
            (p.volume() - lens.volume()).abs() < 1e-6,
            "volume {} vs {}",
            p.volume(),
            lens.volume()
        );
        let p4 = Profile::lens(&lens, 4000, None).unwrap();
        let rel = (p4.free_area() - lens.free_area()).abs() / lens.free_area();
        assert!(rel < 1e-3, "area {} vs {} (rel {rel})", p4.free_area(), lens.free_area());
    }

    #[test]
    fn flat_cut_profile_matches_closed_form() {
        let p = Profile::flat_cut(3, 0.5, 2000).unwrap();
        let expected = crate::lens::flat_cut_free_area(3, 0.5).unwrap();
        let rel = (p.free_area() - expected).abs() / expected;
        assert!(rel < 1e-3, "area {} vs {expected}", p.free_area());
        assert!((p.volume() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn v0_accounting() {
        let ambient = BallGeometry::unit_volume(3).unwrap();
        let r = ambient.radius();
        // one clipped node so a positive v0 is admissible
        let grid = linspace(0.0, r, 51);
        let radii: Vec<f64> = grid.iter().map(|&x| node_bound(r, x)).collect();
        let base = Profile::new(ambient, grid.clone(), radii.clone(), 0.0).unwrap();
        let with_v0 = Profile::new(ambient, grid.clone(), radii, 0.03).unwrap();
        assert!((with_v0.volume() - base.volume() - 0.03).abs() < 1e-15);
        // v0 without any clipped node is rejected (keep the grid away from
        // the poles, where the box degenerates to a touching point)
        let inner = linspace(0.0, 0.8 * r, 51);
        let low: Vec<f64> = inner.iter().map(|&x| 0.5 * node_bound(r, x)).collect();
        assert!(Profile::new(ambient, inner, low, 0.03).is_err());
    }

    #[test]
    fn frustum_segment_equals_cone_area() {
        // one steep segment from r=0 to r=c measures the full disk
        let ambient = BallGeometry::unit_volume(5).unwrap();
        let vals = eval(5, ambient.radius(), &[0.0, 1e-12], &[0.0, 0.3]);
        let disk = ball_volume(4, 0.3).unwrap();
        // end disk at the right node + the vertical jump
        assert!(
            (vals.area - 2.0 * disk).abs() < 1e-9,
            "got {} vs {}",
            vals.area,
            2.0 * disk
        );
    }

    #[test]
    fn gradients_match_finite_differences() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for &n in &[2u32, 3, 4, 5, 9] {
            let ambient = BallGeometry::unit_volume(n).unwrap();
            let r_amb = ambient.radius();
            for _case in 0..4 {
                let grid = linspace(-0.2 * r_amb, 0.7 * r_amb, 41);
                let radii: Vec<f64> = grid
                    .iter()
                    .map(|&x| {
                        let b = node_bound(r_amb, x);
                        (0.15 + 0.6 * rng.random::<f64>()) * b.min(0.6 * r_amb)
                    })
                    .collect();
                let g = eval_with_grad(n, r_amb, &grid, &radii);
                let h = 1e-7;
                for i in (0..grid.len()).step_by(7) {
                    let mut plus = radii.clone();
                    plus[i] += h;
                    let mut minus = radii.clone();
                    minus[i] -= h;
                    let vp = eval(n, r_amb, &grid, &plus);
                    let vm = eval(n, r_amb, &grid, &minus);
                    let fd_v = (vp.volume - vm.volume) / (2.0 * h);
                    let fd_a = (vp.area - vm.area) / (2.0 * h);
                    let rel_v = (g.grad_volume[i] - fd_v).abs() / fd_v.abs().max(1e-8);
                    let rel_a = (g.grad_area[i] - fd_a).abs() / fd_a.abs().max(1e-8);
                    assert!(rel_v < 1e-5, "n={n} node {i}: volume grad rel {rel_v}");
                    assert!(rel_a < 1e-5, "n={n} node {i}: area grad rel {rel_a}");
                }
            }
        }
    }

    #[test]
    fn el_residual_lens_profile() {
        for &n in &[2u32, 3, 5] {
            let lens = *solve_rho_for_volume(n, 0.1, 1e-13).unwrap().lens().unwrap();
            let p = Profile::lens(&lens, 4000, None).unwrap();
            let lambda = f64::from(n - 1) / lens.rho();
            let res = euler_lagrange_residual(&p, lambda);
            assert!(res <= 1e-3, "n={n}: residual {res}");
        }
    }

    #[test]
    fn el_residual_cylinder_and_cone() {
        let ambient = BallGeometry::unit_volume(3).unwrap();
        let grid = linspace(0.05, 0.45, 2001);
        let cyl = Profile::new(ambient, grid.clone(), vec![0.3; 2001], 0.0).unwrap();
        let res = euler_lagrange_residual(&cyl, 1.0 / 0.3);
        assert!(res <= 1e-6, "cylinder residual {res}");
        // cone: mean curvature varies along the slant, no λ fits
        let radii: Vec<f64> = grid.iter().map(|&x| 0.8 * x + 0.05).collect();
        let cone = Profile::new(ambient, grid, radii, 0.0).unwrap();
        let mid = euler_lagrange_residual(&cone, 2.0);
        assert!(mid >= 0.1, "cone residual {mid}");
    }

    #[test]
    fn el_residual_needs_three_unclipped_nodes() {
        let p = Profile::full_ball(3, 200).unwrap();
        assert!(euler_lagrange_residual(&p, 1.0).is_infinite());
    }

    #[test]
    fn csv_roundtrip() {
        let lens = *solve_rho_for_volume(3, 0.1, 1e-12).unwrap().lens().unwrap();
        let p = Profile::lens(&lens, 200, None).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = Profile::read_csv(*p.ambient(), buf.as_slice()).unwrap();
        assert_eq!(p.grid(), q.grid());
        assert_eq!(p.radii(), q.radii());
        assert_eq!(p.clip_mask(), q.clip_mask());
    }
}
