//! The lemma-chain operations: split, halving-plane search, reflect-glue,
//! perpendicular incidence, quarters, and dyadic sectors.

use super::body::{BodyRep, DiscreteBody, Pivot, Polygon2, Side, VoxelGrid};
use super::measure::{
    clip_polygon, poly_free_split, poly_split_areas, voxel_free_measure, voxel_volume_imbalance,
    voxel_volumes, HalfSpaces, Quadrants, Sector, SplitMeasures,
};
use super::{dot3, norm3, orthonormal_complement, reflect3, scale3, sub3, CentralPlane};
use crate::error::{Error, Result};
use crate::exec;

/// Default sector start azimuth: deliberately not grid aligned.
pub(crate) const DYADIC_PHI0: f64 = 0.3;

/// Volumes and free measures of the two sides of a central plane. The cut
/// face itself is never counted, and boundary within the ∂U band is not free.
pub fn split_measures(body: &DiscreteBody, plane: &CentralPlane) -> Result<SplitMeasures> {
    let n = plane.normal();
    match &body.rep {
        BodyRep::Polygon(p) => {
            if n[2].abs() > 1e-12 {
                return Err(Error::Precondition(
                    "2-D bodies need an in-plane line normal (zero z component)".into(),
                ));
            }
            let n2 = [n[0], n[1]];
            let (vol_plus, vol_minus) = poly_split_areas(p, n2);
            let (free_plus, free_minus) = poly_free_split(p, body.ambient.radius(), n2);
            Ok(SplitMeasures {
                vol_plus,
                vol_minus,
                free_plus,
                free_minus,
            })
        }
        BodyRep::Voxels(g) => {
            let region = HalfSpaces { normal: n };
            let vols = voxel_volumes(g, &region);
            let frees = voxel_free_measure(g, body.ambient.radius(), &region);
            Ok(SplitMeasures {
                vol_plus: vols[0],
                vol_minus: vols[1],
                free_plus: frees[0],
                free_minus: frees[1],
            })
        }
    }
}

/// Advertised volume-imbalance tolerance of the halving-plane search.
pub fn halving_tolerance(body: &DiscreteBody) -> f64 {
    2.0 * body.resolution() * body.boundary_scale()
}

/// Rotate a plane about the pivot until it halves the body volume.
///
/// The signed imbalance f(α) satisfies f(α + π) = −f(α), so a sign change
/// exists; the search scans a coarse grid and bisects it.
pub fn find_halving_plane(body: &DiscreteBody, pivot: &Pivot) -> Result<CentralPlane> {
    let imbalance = |alpha: f64| -> Result<f64> {
        let plane = plane_at(body, pivot, alpha)?;
        Ok(match &body.rep {
            BodyRep::Polygon(p) => {
                let n = plane.normal();
                let (a, b) = poly_split_areas(p, [n[0], n[1]]);
                a - b
            }
            BodyRep::Voxels(g) => voxel_volume_imbalance(g, plane.normal()),
        })
    };

    const COARSE: usize = 48;
    let mut prev_alpha = 0.0;
    let mut prev_f = imbalance(0.0)?;
    if prev_f == 0.0 {
        return plane_at(body, pivot, 0.0);
    }
    let mut bracket = None;
    for s in 1..=COARSE {
        let alpha = std::f64::consts::PI * s as f64 / COARSE as f64;
        let f = imbalance(alpha)?;
        if f == 0.0 {
            return plane_at(body, pivot, alpha);
        }
        if (f < 0.0) != (prev_f < 0.0) {
            bracket = Some((prev_alpha, alpha, prev_f));
            break;
        }
        prev_alpha = alpha;
        prev_f = f;
    }
    let (mut lo, mut hi, f_lo) = bracket.ok_or_else(|| {
        Error::NoSignChange("no volume-halving rotation about this pivot".into())
    })?;
    let lo_negative = f_lo < 0.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let f = imbalance(mid)?;
        if f == 0.0 {
            return plane_at(body, pivot, mid);
        }
        if (f < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let plane = plane_at(body, pivot, alpha)?;
    let residual = imbalance(alpha)?.abs();
    let tol = halving_tolerance(body);
    if residual > tol {
        return Err(Error::Tolerance(format!(
            "halving search stalled: imbalance {residual:.3e} exceeds 2h·scale = {tol:.3e}"
        )));
    }
    Ok(plane)
}

fn plane_at(body: &DiscreteBody, pivot: &Pivot, alpha: f64) -> Result<CentralPlane> {
    match (body.dim(), pivot) {
        (2, Pivot::Origin) => Ok(CentralPlane::from_angle_2d(alpha)),
        (3, Pivot::Line(axis)) => {
            let n = norm3(*axis);
            if !(n > 1e-12) {
                return Err(Error::Precondition("pivot line needs a nonzero direction".into()));
            }
            let u = scale3(*axis, 1.0 / n);
            let (e1, e2) = orthonormal_complement(u);
            CentralPlane::new([
                alpha.cos() * e1[0] + alpha.sin() * e2[0],
                alpha.cos() * e1[1] + alpha.sin() * e2[1],
                alpha.cos() * e1[2] + alpha.sin() * e2[2],
            ])
        }
        (2, Pivot::Line(_)) => Err(Error::Precondition(
            "2-D bodies rotate about the origin pivot".into(),
        )),
        (3, Pivot::Origin) => Err(Error::Precondition(
            "3-D bodies need a pivot line through O".into(),
        )),
        _ => unreachable!("bodies are 2- or 3-dimensional"),
    }
}

/// Replace the body by side ∪ reflect(side) across a volume-halving plane.
pub fn reflect_glue(body: &DiscreteBody, plane: &CentralPlane, side: Side) -> Result<DiscreteBody> {
    let imbalance = match &body.rep {
        BodyRep::Polygon(p) => {
            let n = plane.normal();
            let (a, b) = poly_split_areas(p, [n[0], n[1]]);
            a - b
        }
        BodyRep::Voxels(g) => voxel_volume_imbalance(g, plane.normal()),
    };
    let tol = halving_tolerance(body);
    if imbalance.abs() > tol {
        return Err(Error::Tolerance(format!(
            "plane does not halve the volume: imbalance {:.3e} exceeds {:.3e}",
            imbalance.abs(),
            tol
        )));
    }
    // internally always keep the plus side of the (possibly flipped) normal
    let normal = match side {
        Side::Plus => plane.normal(),
        Side::Minus => scale3(plane.normal(), -1.0),
    };
    let rep = match &body.rep {
        BodyRep::Polygon(p) => BodyRep::Polygon(glue_polygon(p, [normal[0], normal[1]])?),
        BodyRep::Voxels(g) => BodyRep::Voxels(glue_voxels(g, normal)),
    };
    let keeps_axis = body
        .axis
        .map(|u| dot3(u, normal).abs() <= 1e-9)
        .unwrap_or(false);
    Ok(DiscreteBody {
        ambient: body.ambient,
        rep,
        axis: if keeps_axis { body.axis } else { None },
        lens: if keeps_axis { body.lens } else { None },
    })
}

fn glue_voxels(grid: &VoxelGrid, normal: [f64; 3]) -> VoxelGrid {
    let cells = grid.cells;
    let slab_words = grid.slab_words;
    let slabs = exec::map_range(cells, |k| {
        let mut words = vec![0u64; slab_words];
        for j in 0..cells {
            for i in 0..cells {
                let c = grid.center(i, j, k);
                let keep = if dot3(c, normal) >= 0.0 {
                    grid.occupied(i as i64, j as i64, k as i64)
                } else {
                    match grid.locate(reflect3(c, normal)) {
                        Some((mi, mj, mk)) => grid.occupied(mi as i64, mj as i64, mk as i64),
                        None => false,
                    }
                };
                if keep {
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
    VoxelGrid {
        cells,
        h: grid.h,
        origin: grid.origin,
        slab_words,
        occ,
    }
}

/// Loop surgery for star/convex polygons: exactly two boundary crossings.
fn glue_polygon(poly: &Polygon2, normal: [f64; 2]) -> Result<Polygon2> {
    let side = |p: [f64; 2]| p[0] * normal[0] + p[1] * normal[1];
    let v = &poly.vertices;
    let crossings: Vec<usize> = (0..v.len())
        .filter(|&i| {
            let sa = side(v[i]);
            let sb = side(v[(i + 1) % v.len()]);
            (sa < 0.0) != (sb < 0.0)
        })
        .collect();
    if crossings.len() != 2 {
        return Err(Error::Precondition(format!(
            "glue needs a side in one piece: found {} boundary crossings",
            crossings.len()
        )));
    }
    let kept = clip_polygon(v, normal);
    // locate the cut chord endpoints (the two vertices with side ≈ 0 bridging
    // the kept arc); walk from the exit crossing around to the entry crossing
    let eps = 1e-12 * poly.h.max(1.0);
    let on_plane: Vec<bool> = kept.iter().map(|&p| side(p).abs() <= eps).collect();
    let m = kept.len();
    // find the index pair (exit, entry) such that walking exit→…→entry stays
    // strictly positive in between
    let mut start = None;
    for i in 0..m {
        if on_plane[i] && !on_plane[(i + 1) % m] {
            start = Some(i);
            break;
        }
    }
    let Some(start) = start else {
        // the side never detaches from the plane; the body is the reflection
        return Ok(Polygon2 {
            vertices: kept,
            h: poly.h,
        });
    };
    let mut path = vec![kept[start]];
    let mut idx = (start + 1) % m;
    while !on_plane[idx] {
        path.push(kept[idx]);
        idx = (idx + 1) % m;
    }
    path.push(kept[idx]);
    // glued loop: the kept path plus its mirror traversed backwards, skipping
    // the shared chord endpoints
    let mut glued = path.clone();
    let reflect2 = |p: [f64; 2]| {
        let s = 2.0 * (p[0] * normal[0] + p[1] * normal[1]);
        [p[0] - s * normal[0], p[1] - s * normal[1]]
    };
    for p in path.iter().rev().skip(1).take(path.len().saturating_sub(2)) {
        glued.push(reflect2(*p));
    }
    Ok(Polygon2 {
        vertices: glued,
        h: poly.h,
    })
}

/// Max |⟨surface normal, plane normal⟩| over free-surface sample points on
/// the plane∩surface curve. Zero means the normal lies in the plane.
///
/// Sample points come from the discrete representation (cells or vertices
/// within h/2 of the plane on the free sphere patch); normals are analytic
/// second-sphere normals, which the construction of lens bodies provides.
pub fn perpendicular_incidence(body: &DiscreteBody, plane: &CentralPlane) -> Result<f64> {
    let meta = body.lens.ok_or_else(|| {
        Error::Precondition("perpendicular incidence needs a lens body (analytic normals)".into())
    })?;
    let n = plane.normal();
    let h = body.resolution();
    let band_u = super::body::BOUNDARY_BAND * h;
    let r_amb = body.ambient.radius();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut samples = 0usize;
    let mut consider = |p: [f64; 3]| {
        if plane.signed_dist(p).abs() > 0.5 * h {
            return;
        }
        let to_center = sub3(p, meta.center);
        let dist = norm3(to_center);
        if (dist - meta.rho).abs() > 1.5 * h {
            return; // not on the free sphere patch
        }
        if (norm3(p) - r_amb).abs() <= band_u {
            return; // on ∂U
        }
        let normal = scale3(to_center, 1.0 / dist);
        worst = worst.max(dot3(normal, n).abs());
        samples += 1;
    };
    match &body.rep {
        BodyRep::Polygon(p) => {
            for v in &p.vertices {
                consider([v[0], v[1], 0.0]);
            }
        }
        BodyRep::Voxels(g) => {
            for k in 0..g.cells {
                for j in 0..g.cells {
                    for i in 0..g.cells {
                        let (ii, jj, kk) = (i as i64, j as i64, k as i64);
                        if !g.occupied(ii, jj, kk) {
                            continue;
                        }
                        let boundary = [
                            (1, 0, 0),
                            (-1, 0, 0),
                            (0, 1, 0),
                            (0, -1, 0),
                            (0, 0, 1),
                            (0, 0, -1),
                        ]
                        .iter()
                        .any(|&(a, b, c)| !g.occupied(ii + a, jj + b, kk + c));
                        if boundary {
                            consider(g.center(i, j, k));
                        }
                    }
                }
            }
        }
    }
    if samples == 0 {
        return Err(Error::Resolution(
            "no free-surface samples near the plane at this resolution".into(),
        ));
    }
    Ok(worst)
}

/// Split a revolution body by two perpendicular axis-containing planes and
/// measure (volume, free) of the four parts.
pub fn quarters_check(
    body: &DiscreteBody,
    p1: &CentralPlane,
    p2: &CentralPlane,
) -> Result<[(f64, f64); 4]> {
    let BodyRep::Voxels(g) = &body.rep else {
        return Err(Error::Precondition(
            "quarters are azimuthal: 3-D revolution bodies only".into(),
        ));
    };
    let axis = body.axis.ok_or_else(|| {
        Error::Precondition("quarters need a body with a known revolution axis".into())
    })?;
    if dot3(p1.normal(), p2.normal()).abs() > 1e-9 {
        return Err(Error::Precondition("the two planes must be perpendicular".into()));
    }
    for p in [p1, p2] {
        if dot3(p.normal(), axis).abs() > 1e-9 {
            return Err(Error::Precondition(
                "both planes must contain the revolution axis".into(),
            ));
        }
    }
    let region = Quadrants {
        normal_1: p1.normal(),
        normal_2: p2.normal(),
    };
    let vols = voxel_volumes(g, &region);
    let frees = voxel_free_measure(g, body.ambient.radius(), &region);
    Ok([
        (vols[0], frees[0]),
        (vols[1], frees[1]),
        (vols[2], frees[2]),
        (vols[3], frees[3]),
    ])
}

/// Fractions (volume, free) held by the dihedral sector of angle π/2^k
/// between two axis-containing planes, at the default start azimuth.
pub fn dyadic_sector_check(body: &DiscreteBody, k: u32) -> Result<(f64, f64)> {
    dyadic_sector_check_at(body, k, DYADIC_PHI0)
}

/// As `dyadic_sector_check` with an explicit start azimuth.
pub fn dyadic_sector_check_at(body: &DiscreteBody, k: u32, phi0: f64) -> Result<(f64, f64)> {
    let (g, sector) = sector_region(body, k, phi0)?;
    let vols = voxel_volumes(g, &sector);
    let frees = voxel_free_measure(g, body.ambient.radius(), &sector);
    let vol_total = vols[0] + vols[1];
    let free_total = frees[0] + frees[1];
    if vol_total <= 0.0 || free_total <= 0.0 {
        return Err(Error::Resolution("empty body or no free surface".into()));
    }
    Ok((vols[0] / vol_total, frees[0] / free_total))
}

fn sector_region<'a>(
    body: &'a DiscreteBody,
    k: u32,
    phi0: f64,
) -> Result<(&'a VoxelGrid, Sector)> {
    if k < 1 {
        return Err(Error::Domain("sector exponent k must be >= 1".into()));
    }
    let BodyRep::Voxels(g) = &body.rep else {
        return Err(Error::Precondition(
            "dyadic sectors are azimuthal: 3-D revolution bodies only".into(),
        ));
    };
    let axis = body.axis.ok_or_else(|| {
        Error::Precondition("dyadic sectors need a body with a known revolution axis".into())
    })?;
    let angle = std::f64::consts::PI / f64::from(1u32 << k);
    let (e1, e2) = orthonormal_complement(axis);
    // resolution guard: the sector must be at least ~3 cells wide somewhere
    let max_radial = max_radial_extent(g, e1, e2);
    if max_radial * angle < 3.0 * g.h {
        return Err(Error::Resolution(format!(
            "sector of angle π/2^{k} is thinner than 3 voxels at radial extent {max_radial:.3}"
        )));
    }
    Ok((
        g,
        Sector {
            e1,
            e2,
            phi0,
            angle,
        },
    ))
}

fn max_radial_extent(g: &VoxelGrid, e1: [f64; 3], e2: [f64; 3]) -> f64 {
    let cells = g.cells;
    let maxes = exec::map_range(cells, |k| {
        let mut best = 0.0f64;
        for j in 0..cells {
            for i in 0..cells {
                if g.occupied(i as i64, j as i64, k as i64) {
                    let c = g.center(i, j, k);
                    let a = dot3(c, e1);
                    let b = dot3(c, e2);
                    best = best.max(a * a + b * b);
                }
            }
        }
        best
    });
    maxes.into_iter().fold(0.0f64, f64::max).sqrt()
}

/// Rebuild a revolution body from 2^{k+1} successively reflected copies of
/// one dihedral sector. The result should reproduce the body within O(h).
pub fn rebuild_from_sector(body: &DiscreteBody, k: u32, phi0: f64) -> Result<DiscreteBody> {
    let (g, sector) = sector_region(body, k, phi0)?;
    let angle = sector.angle;
    let (e1, e2) = (sector.e1, sector.e2);
    let axis = body.axis.expect("checked by sector_region");
    let cells = g.cells;
    let slab_words = g.slab_words;
    let slabs = exec::map_range(cells, |kz| {
        let mut words = vec![0u64; slab_words];
        for j in 0..cells {
            for i in 0..cells {
                let c = g.center(i, j, kz);
                let a = dot3(c, e1);
                let b = dot3(c, e2);
                let radial = (a * a + b * b).sqrt();
                let axial = dot3(c, axis);
                // fold the azimuth into the base sector through the dihedral
                // group generated by the two bounding planes
                let psi = b.atan2(a);
                let mut delta = (psi - phi0).rem_euclid(2.0 * angle);
                if delta > angle {
                    delta = 2.0 * angle - delta;
                }
                let folded = phi0 + delta;
                let p = [
                    axial * axis[0] + radial * (folded.cos() * e1[0] + folded.sin() * e2[0]),
                    axial * axis[1] + radial * (folded.cos() * e1[1] + folded.sin() * e2[1]),
                    axial * axis[2] + radial * (folded.cos() * e1[2] + folded.sin() * e2[2]),
                ];
                let keep = match g.locate(p) {
                    Some((mi, mj, mk)) => g.occupied(mi as i64, mj as i64, mk as i64),
                    None => false,
                };
                if keep {
                    let bit = i + cells * j;
                    words[bit / 64] |= 1u64 << (bit % 64);
                }
            }
        }
        words
    });
    let mut occ = Vec::with_capacity(slab_words * cells);
    for slab in slabs {
        occ.extend_from_slice(&slab);
    }
    Ok(DiscreteBody {
        ambient: body.ambient,
        rep: BodyRep::Voxels(VoxelGrid {
            cells,
            h: g.h,
            origin: g.origin,
            slab_words,
            occ,
        }),
        axis: body.axis,
        lens: body.lens,
    })
}
