//! Discrete body representations: polygon loops (2-D) and voxel grids (3-D).

use super::{dot3, norm3, scale3};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::BallGeometry;
use crate::lens::LensShape;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Width of the ∂U detection band in units of h.
pub(crate) const BOUNDARY_BAND: f64 = 1.5;

/// A hyperplane through the center O, stored by its unit normal.
#[derive(Debug, Clone, Copy)]
pub struct CentralPlane {
    normal: [f64; 3],
}

impl CentralPlane {
    /// Normalizes the given normal; rejects near-zero vectors.
    pub fn new(normal: [f64; 3]) -> Result<Self> {
        let n = norm3(normal);
        if !(n > 1e-12) {
            return Err(Error::Domain("plane normal must be nonzero".into()));
        }
        Ok(Self {
            normal: scale3(normal, 1.0 / n),
        })
    }

    /// 2-D central line with normal at angle `alpha` from the x-axis.
    pub fn from_angle_2d(alpha: f64) -> Self {
        Self {
            normal: [alpha.cos(), alpha.sin(), 0.0],
        }
    }

    pub fn normal(&self) -> [f64; 3] {
        self.normal
    }

    /// Signed distance of a point from the plane.
    pub fn signed_dist(&self, p: [f64; 3]) -> f64 {
        dot3(p, self.normal)
    }
}

/// Which side of a plane to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Codimension-2 rotation pivot for the halving-plane search: the center
/// itself in 2-D, a line through the center in 3-D.
#[derive(Debug, Clone, Copy)]
pub enum Pivot {
    Origin,
    Line([f64; 3]),
}

/// Analytic second-ball data carried by lens bodies, for the
/// perpendicular-incidence oracle.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LensMeta {
    pub center: [f64; 3],
    pub rho: f64,
}

#[derive(Debug, Clone)]
pub(crate) enum BodyRep {
    Polygon(Polygon2),
    Voxels(VoxelGrid),
}

/// Discrete surrogate for a body inside U: polygon loop or occupancy grid.
#[derive(Debug, Clone)]
pub struct DiscreteBody {
    pub(crate) ambient: BallGeometry,
    pub(crate) rep: BodyRep,
    /// Revolution axis, when the construction guarantees one.
    pub(crate) axis: Option<[f64; 3]>,
    pub(crate) lens: Option<LensMeta>,
}

/// Closed polygon loop, counterclockwise, with its edge-length scale h.
#[derive(Debug, Clone)]
pub(crate) struct Polygon2 {
    pub vertices: Vec<[f64; 2]>,
    pub h: f64,
}

/// Occupancy grid over [−L, L]³ with cell size h. Bits are packed x-fastest;
/// each z-slab starts on a fresh word so slabs can be filled in parallel.
#[derive(Debug, Clone)]
pub(crate) struct VoxelGrid {
    pub cells: usize,
    pub h: f64,
    /// Coordinate of the center of cell (0, 0, 0) on each axis.
    pub origin: f64,
    pub slab_words: usize,
    pub occ: Vec<u64>,
}

impl VoxelGrid {
    pub fn build<F>(ambient_radius: f64, h: f64, pred: F) -> Self
    where
        F: Fn([f64; 3]) -> bool + Sync + Send,
    {
        let half = ambient_radius + 2.0 * h;
        let cells = (2.0 * half / h).ceil() as usize;
        let origin = -half + 0.5 * h;
        let slab_words = (cells * cells).div_ceil(64);
        let slabs = exec::map_range(cells, |k| {
            let z = origin + h * k as f64;
            let mut words = vec![0u64; slab_words];
            for j in 0..cells {
                let y = origin + h * j as f64;
                for i in 0..cells {
                    let x = origin + h * i as f64;
                    if pred([x, y, z]) {
                        let b = i + cells * j;
                        words[b / 64] |= 1u64 << (b % 64);
                    }
                }
            }
            words
        });
        let mut occ = Vec::with_capacity(slab_words * cells);
        for slab in slabs {
            occ.extend_from_slice(&slab);
        }
        Self {
            cells,
            h,
            origin,
            slab_words,
            occ,
        }
    }

    #[inline]
    pub fn occupied(&self, i: i64, j: i64, k: i64) -> bool {
        if i < 0 || j < 0 || k < 0 {
            return false;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.cells || j >= self.cells || k >= self.cells {
            return false;
        }
        let b = i + self.cells * j;
        self.occ[k * self.slab_words + b / 64] >> (b % 64) & 1 == 1
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin + self.h * i as f64,
            self.origin + self.h * j as f64,
            self.origin + self.h * k as f64,
        ]
    }

    /// Nearest cell indices for a point, or None outside the grid.
    #[inline]
    pub fn locate(&self, p: [f64; 3]) -> Option<(usize, usize, usize)> {
        let f = |c: f64| ((c - self.origin) / self.h).round();
        let (i, j, k) = (f(p[0]), f(p[1]), f(p[2]));
        if i < 0.0 || j < 0.0 || k < 0.0 {
            return None;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.cells || j >= self.cells || k >= self.cells {
            return None;
        }
        Some((i, j, k))
    }

    pub fn occupied_count(&self) -> u64 {
        exec::count_indexed(self.occ.len(), |w| u64::from(self.occ[w].count_ones()))
    }
}

impl DiscreteBody {
    /// Voxelized orthogonal lens (3-D ambient) about the x-axis.
    pub fn lens_3d(lens: &LensShape, h: f64) -> Result<Self> {
        let ambient = *lens.ambient();
        if ambient.dim() != 3 {
            return Err(Error::Domain("lens_3d needs a 3-dimensional lens".into()));
        }
        let r = ambient.radius();
        let d = lens.center_dist();
        let rho2 = lens.rho() * lens.rho();
        let grid = VoxelGrid::build(r, h, |p| {
            let in_u = dot3(p, p) <= r * r;
            let dx = p[0] - d;
            in_u && dx * dx + p[1] * p[1] + p[2] * p[2] <= rho2
        });
        Ok(Self {
            ambient,
            rep: BodyRep::Voxels(grid),
            axis: Some([1.0, 0.0, 0.0]),
            lens: Some(LensMeta {
                center: [d, 0.0, 0.0],
                rho: lens.rho(),
            }),
        })
    }

    /// The whole unit-volume 3-ball.
    pub fn ball_3d(h: f64) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(3)?;
        let r = ambient.radius();
        let grid = VoxelGrid::build(r, h, |p| dot3(p, p) <= r * r);
        Ok(Self {
            ambient,
            rep: BodyRep::Voxels(grid),
            axis: Some([1.0, 0.0, 0.0]),
            lens: None,
        })
    }

    /// Seeded random blob: a union of balls, each containing O, clipped to U.
    pub fn blob_3d(seed: u64, h: f64) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(3)?;
        let r = ambient.radius();
        let balls = seeded_balls_3d(seed, r);
        let grid = VoxelGrid::build(r, h, |p| {
            if dot3(p, p) > r * r {
                return false;
            }
            balls.iter().any(|(c, rad)| {
                let d = sub3_2(p, *c);
                dot3(d, d) <= rad * rad
            })
        });
        Ok(Self {
            ambient,
            rep: BodyRep::Voxels(grid),
            axis: None,
            lens: None,
        })
    }

    /// Polygonal orthogonal lens (2-D ambient) about the x-axis.
    pub fn lens_2d(lens: &LensShape, h: f64) -> Result<Self> {
        let ambient = *lens.ambient();
        if ambient.dim() != 2 {
            return Err(Error::Domain("lens_2d needs a 2-dimensional lens".into()));
        }
        let r = ambient.radius();
        let d = lens.center_dist();
        let rho = lens.rho();
        let (tu, tb) = (lens.theta_u(), lens.theta_b());
        let n_u = ((2.0 * tu * r) / h).ceil().max(8.0) as usize;
        let n_b = ((2.0 * tb * rho) / h).ceil().max(8.0) as usize;
        let mut vertices = Vec::with_capacity(n_u + n_b);
        // U-arc from −θ_u to θ_u (counterclockwise through the +x pole)
        for s in 0..n_u {
            let phi = -tu + 2.0 * tu * s as f64 / n_u as f64;
            vertices.push([r * phi.cos(), r * phi.sin()]);
        }
        // free B-arc from the top rim back to the bottom rim through the tip
        for s in 0..n_b {
            let psi = (std::f64::consts::PI - tb) + 2.0 * tb * s as f64 / n_b as f64;
            vertices.push([d + rho * psi.cos(), rho * psi.sin()]);
        }
        Ok(Self {
            ambient,
            rep: BodyRep::Polygon(Polygon2 { vertices, h }),
            axis: Some([1.0, 0.0, 0.0]),
            lens: Some(LensMeta {
                center: [d, 0.0, 0.0],
                rho,
            }),
        })
    }

    /// The whole unit-area disk as a polygon.
    pub fn disk_2d(h: f64) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(2)?;
        let r = ambient.radius();
        let count = ((std::f64::consts::TAU * r) / h).ceil().max(16.0) as usize;
        let vertices = (0..count)
            .map(|s| {
                let phi = std::f64::consts::TAU * s as f64 / count as f64;
                [r * phi.cos(), r * phi.sin()]
            })
            .collect();
        Ok(Self {
            ambient,
            rep: BodyRep::Polygon(Polygon2 { vertices, h }),
            axis: Some([1.0, 0.0, 0.0]),
            lens: None,
        })
    }

    /// Seeded random star-shaped blob: a union of disks containing O,
    /// clipped to U, sampled as a radial polygon.
    pub fn blob_2d(seed: u64, h: f64) -> Result<Self> {
        let ambient = BallGeometry::unit_volume(2)?;
        let r = ambient.radius();
        let disks = seeded_balls_2d(seed, r);
        let count = ((std::f64::consts::TAU * r) / h).ceil().max(64.0) as usize;
        let vertices = (0..count)
            .map(|s| {
                let phi = std::f64::consts::TAU * s as f64 / count as f64;
                let u = [phi.cos(), phi.sin()];
                let mut reach = 0.0f64;
                for (c, rad) in &disks {
                    let proj = c[0] * u[0] + c[1] * u[1];
                    let c2 = c[0] * c[0] + c[1] * c[1];
                    let disc = rad * rad - c2 + proj * proj;
                    if disc > 0.0 {
                        reach = reach.max(proj + disc.sqrt());
                    }
                }
                let t = reach.min(r);
                [t * u[0], t * u[1]]
            })
            .collect();
        Ok(Self {
            ambient,
            rep: BodyRep::Polygon(Polygon2 { vertices, h }),
            axis: None,
            lens: None,
        })
    }

    pub fn ambient(&self) -> &BallGeometry {
        &self.ambient
    }

    pub fn dim(&self) -> u32 {
        self.ambient.dim()
    }

    /// Discretization scale h.
    pub fn resolution(&self) -> f64 {
        match &self.rep {
            BodyRep::Polygon(p) => p.h,
            BodyRep::Voxels(v) => v.h,
        }
    }

    pub fn revolution_axis(&self) -> Option<[f64; 3]> {
        self.axis
    }
}

fn sub3_2(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn seeded_balls_3d(seed: u64, r: f64) -> Vec<([f64; 3], f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xB0D1E5);
    let count = 3 + (rng.random::<u32>() % 3) as usize;
    (0..count)
        .map(|_| {
            let dir = random_unit_3(&mut rng);
            let dist = 0.45 * r * rng.random::<f64>();
            let center = scale3(dir, dist);
            // radius always exceeds the center distance, so O is inside
            let rad = (dist + (0.15 + 0.45 * rng.random::<f64>()) * r).min(0.95 * r);
            (center, rad)
        })
        .collect()
}

fn seeded_balls_2d(seed: u64, r: f64) -> Vec<([f64; 2], f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xB0D1E5);
    let count = 3 + (rng.random::<u32>() % 3) as usize;
    (0..count)
        .map(|_| {
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            let dist = 0.45 * r * rng.random::<f64>();
            let center = [dist * phi.cos(), dist * phi.sin()];
            let rad = (dist + (0.15 + 0.45 * rng.random::<f64>()) * r).min(0.95 * r);
            (center, rad)
        })
        .collect()
}

fn random_unit_3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        ];
        let n = norm3(v);
        if n > 1e-3 && n <= 1.0 {
            return scale3(v, 1.0 / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::solve_rho_for_volume;

    #[test]
    fn plane_normalizes() {
        let p = CentralPlane::new([3.0, 0.0, 4.0]).unwrap();
        assert!((norm3(p.normal()) - 1.0).abs() < 1e-12);
        assert!(CentralPlane::new([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn voxel_grid_roundtrip_indices() {
        let g = VoxelGrid::build(0.62, 0.05, |p| p[0] > 0.0);
        let (i, j, k) = g.locate([0.3, -0.1, 0.2]).unwrap();
        let c = g.center(i, j, k);
        assert!((c[0] - 0.3).abs() <= 0.026);
        assert!(g.occupied(i as i64, j as i64, k as i64));
        assert!(!g.occupied(-1, 0, 0));
    }

    #[test]
    fn lens_2d_loop_is_counterclockwise_and_closed() {
        let lens = *solve_rho_for_volume(2, 0.2, 1e-12).unwrap().lens().unwrap();
        let body = DiscreteBody::lens_2d(&lens, lens.ambient().radius() / 200.0).unwrap();
        let BodyRep::Polygon(p) = &body.rep else {
            panic!("expected polygon")
        };
        let mut area2 = 0.0;
        for w in 0..p.vertices.len() {
            let a = p.vertices[w];
            let b = p.vertices[(w + 1) % p.vertices.len()];
            area2 += a[0] * b[1] - b[0] * a[1];
        }
        assert!(area2 > 0.0, "loop must be counterclockwise");
        assert!((0.5 * area2 - 0.2).abs() < 2e-4, "area {}", 0.5 * area2);
    }

    #[test]
    fn blob_2d_star_shaped_inside_u() {
        let body = DiscreteBody::blob_2d(5, 0.01).unwrap();
        let r = body.ambient().radius();
        let BodyRep::Polygon(p) = &body.rep else {
            panic!()
        };
        for v in &p.vertices {
            let d = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!(d <= r + 1e-12);
            assert!(d > 0.05 * r, "blob must contain a neighborhood of O");
        }
    }

    #[test]
    fn blob_3d_deterministic() {
        let h = 0.05;
        let a = DiscreteBody::blob_3d(9, h).unwrap();
        let b = DiscreteBody::blob_3d(9, h).unwrap();
        let (BodyRep::Voxels(ga), BodyRep::Voxels(gb)) = (&a.rep, &b.rep) else {
            panic!()
        };
        assert_eq!(ga.occ, gb.occ);
        assert!(ga.occupied_count() > 0);
    }
}
