//! Measurement engine: volumes and free-boundary measures of discrete
//! bodies, whole or split into regions by central cut surfaces.

use super::body::{BodyRep, DiscreteBody, Polygon2, VoxelGrid, BOUNDARY_BAND};
use super::{dot3, norm3};
use crate::exec;

/// Volumes and free-boundary measures of the two sides of a central plane.
#[derive(Debug, Clone, Copy)]
pub struct SplitMeasures {
    pub vol_plus: f64,
    pub vol_minus: f64,
    pub free_plus: f64,
    pub free_minus: f64,
}

impl SplitMeasures {
    pub fn volume_total(&self) -> f64 {
        self.vol_plus + self.vol_minus
    }

    pub fn free_total(&self) -> f64 {
        self.free_plus + self.free_minus
    }
}

/// A decomposition of space into regions by cut surfaces through O. The
/// `near_cut` band flags points whose cell/face needs subsampled attribution.
pub(crate) trait Region: Sync {
    fn count(&self) -> usize;
    fn classify(&self, p: [f64; 3]) -> usize;
    fn near_cut(&self, p: [f64; 3], band: f64) -> bool;
}

pub(crate) struct Whole;

impl Region for Whole {
    fn count(&self) -> usize {
        1
    }
    fn classify(&self, _p: [f64; 3]) -> usize {
        0
    }
    fn near_cut(&self, _p: [f64; 3], _band: f64) -> bool {
        false
    }
}

/// Two regions split by one plane: 0 = plus side, 1 = minus side.
pub(crate) struct HalfSpaces {
    pub normal: [f64; 3],
}

impl Region for HalfSpaces {
    fn count(&self) -> usize {
        2
    }
    fn classify(&self, p: [f64; 3]) -> usize {
        usize::from(dot3(p, self.normal) < 0.0)
    }
    fn near_cut(&self, p: [f64; 3], band: f64) -> bool {
        dot3(p, self.normal).abs() <= band
    }
}

/// Four regions by the sign pair against two planes.
pub(crate) struct Quadrants {
    pub normal_1: [f64; 3],
    pub normal_2: [f64; 3],
}

impl Region for Quadrants {
    fn count(&self) -> usize {
        4
    }
    fn classify(&self, p: [f64; 3]) -> usize {
        usize::from(dot3(p, self.normal_1) < 0.0) | usize::from(dot3(p, self.normal_2) < 0.0) << 1
    }
    fn near_cut(&self, p: [f64; 3], band: f64) -> bool {
        dot3(p, self.normal_1).abs() <= band || dot3(p, self.normal_2).abs() <= band
    }
}

/// Two regions: inside/outside a dihedral sector of azimuth width `angle`
/// about the axis frame (e1, e2), starting at `phi0`.
pub(crate) struct Sector {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub phi0: f64,
    pub angle: f64,
}

impl Sector {
    fn azimuth(&self, p: [f64; 3]) -> (f64, f64) {
        let a = dot3(p, self.e1);
        let b = dot3(p, self.e2);
        ((a * a + b * b).sqrt(), b.atan2(a))
    }
}

impl Region for Sector {
    fn count(&self) -> usize {
        2
    }
    fn classify(&self, p: [f64; 3]) -> usize {
        let (_, psi) = self.azimuth(p);
        let delta = (psi - self.phi0).rem_euclid(std::f64::consts::TAU);
        usize::from(delta >= self.angle)
    }
    fn near_cut(&self, p: [f64; 3], band: f64) -> bool {
        let (radial, psi) = self.azimuth(p);
        for cut in [self.phi0, self.phi0 + self.angle] {
            let d = (psi - cut + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU)
                - std::f64::consts::PI;
            if (radial * d.sin()).abs() <= band {
                return true;
            }
        }
        false
    }
}

/// Subsample offsets (fractions of h) for one axis of a face or cell.
const SUB4: [f64; 4] = [-0.375, -0.125, 0.125, 0.375];

/// Neighborhood offsets for normal estimation: integer points with
/// Euclidean norm ≤ 2.5 cells.
fn normal_offsets() -> Vec<(i64, i64, i64)> {
    let mut v = Vec::new();
    for dk in -2i64..=2 {
        for dj in -2i64..=2 {
            for di in -2i64..=2 {
                if (di * di + dj * dj + dk * dk) as f64 <= 6.25 {
                    v.push((di, dj, dk));
                }
            }
        }
    }
    v
}

const FACE_DIRS: [(i64, i64, i64); 6] = [
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
];

/// Per-region volumes of a voxel grid; cells near a cut are attributed by
/// 4³ subsampling.
pub(crate) fn voxel_volumes<Rg: Region>(grid: &VoxelGrid, region: &Rg) -> Vec<f64> {
    let cells = grid.cells;
    let h = grid.h;
    let cell_vol = h * h * h;
    let band = 0.9 * h;
    let nr = region.count();
    let partials = exec::map_range(cells, |k| {
        let mut acc = vec![0.0f64; nr];
        for j in 0..cells {
            for i in 0..cells {
                if !grid.occupied(i as i64, j as i64, k as i64) {
                    continue;
                }
                let c = grid.center(i, j, k);
                if region.near_cut(c, band) {
                    for &dz in &SUB4 {
                        for &dy in &SUB4 {
                            for &dx in &SUB4 {
                                let p = [c[0] + dx * h, c[1] + dy * h, c[2] + dz * h];
                                acc[region.classify(p)] += cell_vol / 64.0;
                            }
                        }
                    }
                } else {
                    acc[region.classify(c)] += cell_vol;
                }
            }
        }
        acc
    });
    fold_partials(partials, nr)
}

/// A face is on ∂U when it sits inside the detection band and its estimated
/// normal is close to radial. The second test keeps free surface that merely
/// passes near ∂U: at the rim of an orthogonal lens the free cap meets ∂U at
/// a right angle, so its normals are perpendicular to the radial direction.
fn on_ambient_boundary(fc: [f64; 3], normal: [f64; 3], ambient_radius: f64, band: f64) -> bool {
    let r = norm3(fc);
    if (r - ambient_radius).abs() > band {
        return false;
    }
    if r < band {
        return false;
    }
    dot3(fc, normal).abs() / r >= 0.5
}

/// Per-region free-surface measure.
///
/// Every exposed face off ∂U contributes h² weighted by the inverse l1-norm
/// of the locally estimated unit normal; faces near a cut are attributed by
/// 4×4 subsampling.
pub(crate) fn voxel_free_measure<Rg: Region>(
    grid: &VoxelGrid,
    ambient_radius: f64,
    region: &Rg,
) -> Vec<f64> {
    let cells = grid.cells;
    let h = grid.h;
    let face_area = h * h;
    let band_u = BOUNDARY_BAND * h;
    let cut_band = 0.9 * h;
    let nr = region.count();
    let offsets = normal_offsets();
    let partials = exec::map_range(cells, |k| {
        let mut acc = vec![0.0f64; nr];
        for j in 0..cells {
            for i in 0..cells {
                let (ii, jj, kk) = (i as i64, j as i64, k as i64);
                if !grid.occupied(ii, jj, kk) {
                    continue;
                }
                let mut normal: Option<[f64; 3]> = None;
                for (di, dj, dk) in FACE_DIRS {
                    if grid.occupied(ii + di, jj + dj, kk + dk) {
                        continue;
                    }
                    let c = grid.center(i, j, k);
                    let fc = [
                        c[0] + 0.5 * h * di as f64,
                        c[1] + 0.5 * h * dj as f64,
                        c[2] + 0.5 * h * dk as f64,
                    ];
                    let n = *normal.get_or_insert_with(|| {
                        estimate_normal(grid, ii, jj, kk, &offsets)
                            .unwrap_or([di as f64, dj as f64, dk as f64])
                    });
                    if on_ambient_boundary(fc, n, ambient_radius, band_u) {
                        continue; // lies on ∂U, not free
                    }
                    let l1 = n[0].abs() + n[1].abs() + n[2].abs();
                    let w = face_area / l1.max(1.0);
                    if region.near_cut(fc, cut_band) {
                        // spread the face into 16 subpoints in its plane
                        let (ta, tb) = face_tangents(di, dj, dk);
                        for &sa in &SUB4 {
                            for &sb in &SUB4 {
                                let p = [
                                    fc[0] + h * (sa * ta[0] + sb * tb[0]),
                                    fc[1] + h * (sa * ta[1] + sb * tb[1]),
                                    fc[2] + h * (sa * ta[2] + sb * tb[2]),
                                ];
                                acc[region.classify(p)] += w / 16.0;
                            }
                        }
                    } else {
                        acc[region.classify(fc)] += w;
                    }
                }
            }
        }
        acc
    });
    fold_partials(partials, nr)
}

fn face_tangents(di: i64, dj: i64, dk: i64) -> ([f64; 3], [f64; 3]) {
    if di != 0 {
        ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
    } else if dj != 0 {
        ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
    } else {
        let _ = dk;
        ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    }
}

/// Outward unit normal from the occupied-centroid offset over a ball
/// neighborhood; None when the neighborhood is isotropic.
fn estimate_normal(
    grid: &VoxelGrid,
    i: i64,
    j: i64,
    k: i64,
    offsets: &[(i64, i64, i64)],
) -> Option<[f64; 3]> {
    let mut acc = [0.0f64; 3];
    for &(di, dj, dk) in offsets {
        if grid.occupied(i + di, j + dj, k + dk) {
            acc[0] += di as f64;
            acc[1] += dj as f64;
            acc[2] += dk as f64;
        }
    }
    let n = norm3(acc);
    if n < 1e-9 {
        return None;
    }
    Some([-acc[0] / n, -acc[1] / n, -acc[2] / n])
}

/// Total exposed-face area (free and ∂U alike), as a tolerance scale.
pub(crate) fn voxel_boundary_scale(grid: &VoxelGrid) -> f64 {
    let cells = grid.cells;
    let faces = exec::count_indexed(cells, |k| {
        let mut count = 0u64;
        for j in 0..cells {
            for i in 0..cells {
                let (ii, jj, kk) = (i as i64, j as i64, k as i64);
                if !grid.occupied(ii, jj, kk) {
                    continue;
                }
                for (di, dj, dk) in FACE_DIRS {
                    if !grid.occupied(ii + di, jj + dj, kk + dk) {
                        count += 1;
                    }
                }
            }
        }
        count
    });
    faces as f64 * grid.h * grid.h
}

/// Fast signed volume imbalance (plus − minus) against a plane, center test
/// only. Used by the rotating halving-plane search.
pub(crate) fn voxel_volume_imbalance(grid: &VoxelGrid, normal: [f64; 3]) -> f64 {
    let cells = grid.cells;
    let h3 = grid.h * grid.h * grid.h;
    let balance = exec::sum_indexed(cells, |k| {
        let mut acc = 0.0;
        for j in 0..cells {
            for i in 0..cells {
                if grid.occupied(i as i64, j as i64, k as i64) {
                    let c = grid.center(i, j, k);
                    acc += if dot3(c, normal) >= 0.0 { 1.0 } else { -1.0 };
                }
            }
        }
        acc
    });
    balance * h3
}

fn fold_partials(partials: Vec<Vec<f64>>, nr: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; nr];
    for p in partials {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// polygon measures (exact edge arithmetic)
// ---------------------------------------------------------------------------

pub(crate) fn poly_area(poly: &Polygon2) -> f64 {
    let v = &poly.vertices;
    let mut twice = 0.0;
    for i in 0..v.len() {
        let a = v[i];
        let b = v[(i + 1) % v.len()];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * twice
}

/// Clip a polygon loop against the half-plane {p·n ≥ 0} (Sutherland–Hodgman).
pub(crate) fn clip_polygon(vertices: &[[f64; 2]], normal: [f64; 2]) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| p[0] * normal[0] + p[1] * normal[1];
    let mut out = Vec::with_capacity(vertices.len() + 2);
    for i in 0..vertices.len() {
        let a = vertices[i];
        let b = vertices[(i + 1) % vertices.len()];
        let (sa, sb) = (side(a), side(b));
        if sa >= 0.0 {
            out.push(a);
        }
        if (sa < 0.0) != (sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Areas of the two sides of a central line.
pub(crate) fn poly_split_areas(poly: &Polygon2, normal: [f64; 2]) -> (f64, f64) {
    let plus = Polygon2 {
        vertices: clip_polygon(&poly.vertices, normal),
        h: poly.h,
    };
    let minus = Polygon2 {
        vertices: clip_polygon(&poly.vertices, [-normal[0], -normal[1]]),
        h: poly.h,
    };
    (poly_area(&plus), poly_area(&minus))
}

/// Free perimeter of the loop split by a central line: edge pieces outside
/// the ∂U band, attributed to the side of their midpoint after splitting at
/// the crossing.
pub(crate) fn poly_free_split(
    poly: &Polygon2,
    ambient_radius: f64,
    normal: [f64; 2],
) -> (f64, f64) {
    let band = BOUNDARY_BAND * poly.h;
    let side = |p: [f64; 2]| p[0] * normal[0] + p[1] * normal[1];
    let v = &poly.vertices;
    let mut plus = 0.0;
    let mut minus = 0.0;
    let mut add_piece = |a: [f64; 2], b: [f64; 2]| {
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let r = (mid[0] * mid[0] + mid[1] * mid[1]).sqrt();
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        if len == 0.0 {
            return;
        }
        // on ∂U: inside the band with a near-radial edge normal
        if (r - ambient_radius).abs() <= band && r > band {
            let radial_dot =
                ((b[1] - a[1]) * mid[0] - (b[0] - a[0]) * mid[1]).abs() / (len * r);
            if radial_dot >= 0.5 {
                return;
            }
        }
        if side(mid) >= 0.0 {
            plus += len;
        } else {
            minus += len;
        }
    };
    for i in 0..v.len() {
        let a = v[i];
        let b = v[(i + 1) % v.len()];
        let (sa, sb) = (side(a), side(b));
        if (sa < 0.0) == (sb < 0.0) {
            add_piece(a, b);
        } else {
            let t = sa / (sa - sb);
            let c = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            add_piece(a, c);
            add_piece(c, b);
        }
    }
    (plus, minus)
}

/// Total free perimeter.
pub(crate) fn poly_free_total(poly: &Polygon2, ambient_radius: f64) -> f64 {
    let (p, m) = poly_free_split(poly, ambient_radius, [1.0, 0.0]);
    p + m
}

pub(crate) fn poly_perimeter(poly: &Polygon2) -> f64 {
    let v = &poly.vertices;
    (0..v.len())
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .sum()
}

// ---------------------------------------------------------------------------
// body-level dispatch
// ---------------------------------------------------------------------------

impl DiscreteBody {
    /// Volume (area in 2-D) of the discrete body.
    pub fn volume_measure(&self) -> f64 {
        match &self.rep {
            BodyRep::Polygon(p) => poly_area(p),
            BodyRep::Voxels(g) => g.occupied_count() as f64 * g.h * g.h * g.h,
        }
    }

    /// Free-boundary measure (perimeter in 2-D, area in 3-D).
    pub fn free_measure(&self) -> f64 {
        match &self.rep {
            BodyRep::Polygon(p) => poly_free_total(p, self.ambient.radius()),
            BodyRep::Voxels(g) => voxel_free_measure(g, self.ambient.radius(), &Whole)[0],
        }
    }

    /// Total boundary measure (free plus ∂U part); the tolerance scale for
    /// halving and gluing bands.
    pub fn boundary_scale(&self) -> f64 {
        match &self.rep {
            BodyRep::Polygon(p) => poly_perimeter(p),
            BodyRep::Voxels(g) => voxel_boundary_scale(g),
        }
    }
}
