//! The runnable lemma suite: every discrete check of the symmetrization
//! chain with its measured defect and threshold.

use super::body::{DiscreteBody, Pivot, Side};
use super::ops::{
    dyadic_sector_check_at, find_halving_plane, halving_tolerance, perpendicular_incidence,
    quarters_check, rebuild_from_sector, reflect_glue, split_measures, DYADIC_PHI0,
};
use super::CentralPlane;
use crate::error::{Error, Result};
use crate::lens::solve_rho_for_volume;

/// One lemma check: a measured defect against its threshold.
#[derive(Debug, Clone)]
pub struct LemmaCheck {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl LemmaCheck {
    fn of(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            threshold,
            pass: measured <= threshold,
            note: None,
        }
    }

    fn skipped(name: &str, threshold: f64, note: String) -> Self {
        Self {
            name: name.to_string(),
            measured: f64::NAN,
            threshold,
            pass: true,
            note: Some(note),
        }
    }
}

/// Suite configuration.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Resolution as a fraction of R (h = h_rel · R); the reference scale is
    /// 1/200.
    pub h_rel: f64,
    pub seed: u64,
    /// Seeded random bodies for the reflect-glue checks (voxel and polygon
    /// bodies alternate).
    pub glue_bodies: usize,
    /// Lens volume used for the lens-based checks.
    pub eps: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            h_rel: 1.0 / 200.0,
            seed: 1,
            glue_bodies: 50,
            eps: 0.1,
        }
    }
}

/// Full report of the suite.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub config: SuiteConfig,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Thresholds of the suite (fractions are relative deviations).
pub mod thresholds {
    /// Axis-plane halving of volume and free measure.
    pub const HALVING: f64 = 0.02;
    /// Quarter measures against 1/4.
    pub const QUARTERS: f64 = 0.03;
    /// Dyadic sector fractions against 2^{-(k+1)}, k ≤ 5.
    pub const DYADIC: f64 = 0.05;
    /// Perpendicular-incidence defect on lens bodies.
    pub const INCIDENCE: f64 = 5e-3;
    /// The tilted-plane guard must measure at least this defect.
    pub const INCIDENCE_GUARD_MIN: f64 = 0.1;
    /// Sector rebuild agreement (volume and free measure).
    pub const REBUILD: f64 = 0.05;
}

/// Run every lemma check at the configured resolution.
pub fn run_lemma_suite(config: &SuiteConfig) -> Result<LemmaReport> {
    let mut checks = Vec::new();
    let lens3 = *solve_rho_for_volume(3, config.eps, 1e-12)?
        .lens()
        .ok_or_else(|| Error::Domain("suite eps too close to 1/2".into()))?;
    let r3 = lens3.ambient().radius();
    let h3 = config.h_rel * r3;
    let body3 = DiscreteBody::lens_3d(&lens3, h3)?;

    // --- axis-plane halving (3-D lens), one grid-aligned and one rotated
    let planes = [
        CentralPlane::new([0.0, 0.0, 1.0])?,
        CentralPlane::new([0.0, (0.7f64).sin(), (0.7f64).cos()])?,
    ];
    for (tag, plane) in ["aligned", "rotated"].iter().zip(planes.iter()) {
        let s = split_measures(&body3, plane)?;
        let vol_dev = (s.vol_plus / s.volume_total() - 0.5).abs() / 0.5;
        let free_dev = (s.free_plus / s.free_total() - 0.5).abs() / 0.5;
        checks.push(LemmaCheck::of(
            &format!("halving-3d-volume-{tag}"),
            vol_dev,
            thresholds::HALVING,
        ));
        checks.push(LemmaCheck::of(
            &format!("halving-3d-free-{tag}"),
            free_dev,
            thresholds::HALVING,
        ));
    }

    // --- axis-line halving of the 2-D lens
    let lens2 = *solve_rho_for_volume(2, config.eps, 1e-12)?
        .lens()
        .ok_or_else(|| Error::Domain("suite eps too close to 1/2".into()))?;
    let body2 = DiscreteBody::lens_2d(&lens2, config.h_rel * lens2.ambient().radius())?;
    let s2 = split_measures(&body2, &CentralPlane::new([0.0, 1.0, 0.0])?)?;
    checks.push(LemmaCheck::of(
        "halving-2d-volume-axis",
        (s2.vol_plus / s2.volume_total() - 0.5).abs() / 0.5,
        thresholds::HALVING,
    ));
    checks.push(LemmaCheck::of(
        "halving-2d-free-axis",
        (s2.free_plus / s2.free_total() - 0.5).abs() / 0.5,
        thresholds::HALVING,
    ));

    // --- quarters: aligned and rotated perpendicular axis-plane pairs
    let pairs = [
        (
            CentralPlane::new([0.0, 1.0, 0.0])?,
            CentralPlane::new([0.0, 0.0, 1.0])?,
        ),
        (
            CentralPlane::new([0.0, (0.4f64).cos(), (0.4f64).sin()])?,
            CentralPlane::new([0.0, -(0.4f64).sin(), (0.4f64).cos()])?,
        ),
    ];
    for (tag, (p1, p2)) in ["aligned", "rotated"].iter().zip(pairs.iter()) {
        let parts = quarters_check(&body3, p1, p2)?;
        let vol_total: f64 = parts.iter().map(|p| p.0).sum();
        let free_total: f64 = parts.iter().map(|p| p.1).sum();
        let mut worst = 0.0f64;
        for (v, f) in parts {
            worst = worst.max((v / vol_total - 0.25).abs() / 0.25);
            worst = worst.max((f / free_total - 0.25).abs() / 0.25);
        }
        checks.push(LemmaCheck::of(
            &format!("quarters-{tag}"),
            worst,
            thresholds::QUARTERS,
        ));
    }

    // --- dyadic sectors k = 1..5
    for k in 1..=5u32 {
        let expected = 1.0 / f64::from(1u32 << (k + 1));
        match dyadic_sector_check_at(&body3, k, DYADIC_PHI0) {
            Ok((vol_frac, free_frac)) => {
                let dev = ((vol_frac - expected).abs() / expected)
                    .max((free_frac - expected).abs() / expected);
                checks.push(LemmaCheck::of(
                    &format!("dyadic-k{k}"),
                    dev,
                    thresholds::DYADIC,
                ));
            }
            Err(Error::Resolution(msg)) => {
                checks.push(LemmaCheck::skipped(
                    &format!("dyadic-k{k}"),
                    thresholds::DYADIC,
                    format!("resolution: {msg}"),
                ));
            }
            Err(e) => return Err(e),
        }
    }

    // --- perpendicular incidence: axis plane, plus a tilted guard
    let axis_plane = CentralPlane::new([0.0, 0.0, 1.0])?;
    let defect = perpendicular_incidence(&body3, &axis_plane)?;
    checks.push(LemmaCheck::of(
        "incidence-axis-plane",
        defect,
        thresholds::INCIDENCE,
    ));
    let tilt = 10.0f64.to_radians();
    let tilted = CentralPlane::new([tilt.sin(), 0.0, tilt.cos()])?;
    let tilted_defect = perpendicular_incidence(&body3, &tilted)?;
    checks.push(LemmaCheck {
        name: "incidence-tilted-guard".into(),
        measured: tilted_defect,
        threshold: thresholds::INCIDENCE_GUARD_MIN,
        pass: tilted_defect >= thresholds::INCIDENCE_GUARD_MIN,
        note: Some("guard: the metric must detect a tilted plane".into()),
    });

    // --- reflect-glue on seeded random bodies (alternating 3-D and 2-D)
    let mut worst_imbalance = 0.0f64;
    let mut worst_drift = 0.0f64;
    let mut worst_symmetry = 0.0f64;
    for b in 0..config.glue_bodies {
        let seed = config.seed.wrapping_add(b as u64);
        let voxel_case = b % 5 < 2; // 2 of 5 bodies are voxel grids
        let (body, pivot) = if voxel_case {
            let body = DiscreteBody::blob_3d(seed, h3)?;
            (body, Pivot::Line(pivot_direction(seed)))
        } else {
            let body = DiscreteBody::blob_2d(seed, config.h_rel * lens2.ambient().radius())?;
            (body, Pivot::Origin)
        };
        let h = body.resolution();
        let scale = body.boundary_scale();
        let plane = find_halving_plane(&body, &pivot)?;
        let split = split_measures(&body, &plane)?;
        let imbalance = (split.vol_plus - split.vol_minus).abs() / halving_tolerance(&body);
        worst_imbalance = worst_imbalance.max(imbalance);
        let glued = reflect_glue(&body, &plane, Side::Plus)?;
        let drift =
            (glued.volume_measure() - body.volume_measure()).abs() / (3.0 * h * scale);
        worst_drift = worst_drift.max(drift);
        let resplit = split_measures(&glued, &plane)?;
        let sym_defect = (resplit.vol_plus - resplit.vol_minus).abs() / scale / h;
        worst_symmetry = worst_symmetry.max(sym_defect);
    }
    checks.push(LemmaCheck::of(
        "glue-halving-imbalance/(2h·scale)",
        worst_imbalance,
        1.0,
    ));
    checks.push(LemmaCheck::of(
        "glue-volume-drift/(3h·scale)",
        worst_drift,
        1.0,
    ));
    checks.push(LemmaCheck::of(
        "glue-symmetry-defect/(h·scale)",
        worst_symmetry,
        1.0,
    ));

    // --- rebuild the lens from one dyadic sector (k = 2: 8 copies)
    match rebuild_from_sector(&body3, 2, DYADIC_PHI0) {
        Ok(rebuilt) => {
            let vol_dev = (rebuilt.volume_measure() - body3.volume_measure()).abs()
                / body3.volume_measure();
            let free_dev =
                (rebuilt.free_measure() - body3.free_measure()).abs() / body3.free_measure();
            checks.push(LemmaCheck::of(
                "rebuild-from-sector-k2",
                vol_dev.max(free_dev),
                thresholds::REBUILD,
            ));
        }
        Err(Error::Resolution(msg)) => {
            checks.push(LemmaCheck::skipped(
                "rebuild-from-sector-k2",
                thresholds::REBUILD,
                format!("resolution: {msg}"),
            ));
        }
        Err(e) => return Err(e),
    }

    Ok(LemmaReport {
        config: config.clone(),
        checks,
    })
}

fn pivot_direction(seed: u64) -> [f64; 3] {
    // deterministic non-axis pivot per body
    let t = (seed % 97) as f64 / 97.0 * std::f64::consts::TAU;
    let z = ((seed % 31) as f64 / 31.0) * 1.6 - 0.8;
    let r = (1.0 - z * z).sqrt();
    [r * t.cos(), r * t.sin(), z]
}
