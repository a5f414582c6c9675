//! Isoperimetric profile M(ε, n) and the distance bound D(ε, n).
//!
//! M comes from the closed-form lens family (the candidate minimizer), with
//! the flat cut supplying the ε = 1/2 endpoint. Growing a volume-ε set at
//! unit normal speed increases its volume at rate ≥ M(v, n); both bodies grow
//! to volume 1/2 and must then intersect, so
//!
//!   D(ε, n) = 2 ∫_ε^{1/2} dv / M(v, n)
//!
//! bounds the distance between any two volume-ε subsets of U. The quadrature
//! route and the growth-ODE route are computed independently and must agree;
//! the variational module provides a further cross-check on M itself.

use crate::error::{Error, Result};
use crate::exec;
use crate::lens::{flat_cut_free_area, solve_rho_for_volume, DEFAULT_VOLUME_TOL};
use crate::{ode, quad};

/// Default absolute quadrature tolerance for D.
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
/// Default local tolerance for the growth ODE.
pub const DEFAULT_ODE_TOL: f64 = 1e-9;

/// One point of the isoperimetric profile.
#[derive(Debug, Clone, Copy)]
pub struct IsoPoint {
    pub eps: f64,
    /// Free-surface lower bound M(eps, n).
    pub m_value: f64,
    pub n: u32,
}

/// Sampled distance-bound curve ε ↦ D(ε, n) for one dimension.
#[derive(Debug, Clone)]
pub struct DistanceCurve {
    pub n: u32,
    /// (eps, D) pairs in input order.
    pub samples: Vec<(f64, f64)>,
    /// Worst accumulated quadrature error estimate over the samples.
    pub quadrature_error: f64,
}

/// M(v, n) for v ∈ (0, 1/2]. Queries beyond 1/2 are refused rather than
/// silently reflected: the pipeline must never ask the lens solver for them.
pub fn m_value(n: u32, v: f64) -> Result<f64> {
    if v > 0.5 {
        return Err(Error::Domain(format!(
            "free-surface bound queried at volume {v} > 1/2; the lens family only covers (0, 1/2]"
        )));
    }
    if v == 0.5 {
        return flat_cut_free_area(n, 0.5);
    }
    Ok(solve_rho_for_volume(n, v, DEFAULT_VOLUME_TOL)?.free_area())
}

/// Evaluate the isoperimetric profile on a grid of volumes.
///
/// Grid points fail independently; one bad point does not abort the batch.
pub fn iso_profile(n: u32, eps_grid: &[f64]) -> Vec<Result<IsoPoint>> {
    exec::map_ordered(eps_grid, |&eps| {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::Domain(format!(
                "profile grid values must lie in (0, 1/2], got {eps}"
            )));
        }
        Ok(IsoPoint {
            eps,
            m_value: m_value(n, eps)?,
            n,
        })
    })
}

/// D(ε, n) = 2 ∫_ε^{1/2} dv / M(v, n) by adaptive Gauss–Kronrod quadrature.
///
/// D(1/2, n) = 0 exactly (empty interval).
pub fn distance_bound(n: u32, eps: f64, quad_tol: f64) -> Result<f64> {
    let (value, _err) = distance_bound_with_error(n, eps, quad_tol)?;
    Ok(value)
}

/// As `distance_bound`, also returning the quadrature error estimate.
pub fn distance_bound_with_error(n: u32, eps: f64, quad_tol: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Domain(format!(
            "distance bound requires eps in (0, 1/2], got {eps}"
        )));
    }
    if eps == 0.5 {
        return Ok((0.0, 0.0));
    }
    let result = quad::integrate(|v| Ok(1.0 / m_value(n, v)?), eps, 0.5, quad_tol)?;
    Ok((2.0 * result.value, 2.0 * result.error))
}

/// Required neighborhood expansion: integrate v' = M(v, n) from ε until the
/// volume reaches 1/2 and return the elapsed time.
pub fn growth_ode(n: u32, eps: f64, step_tol: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Domain(format!(
            "growth ODE requires eps in (0, 1/2], got {eps}"
        )));
    }
    if eps == 0.5 {
        return Ok(0.0);
    }
    let result = ode::time_to_reach(|v| m_value(n, v.min(0.5)), eps, 0.5, step_tol)?;
    Ok(result.time)
}

/// Sample the distance curve on a grid of volumes.
pub fn distance_curve(n: u32, eps_grid: &[f64], quad_tol: f64) -> Result<DistanceCurve> {
    let rows = exec::map_ordered(eps_grid, |&eps| distance_bound_with_error(n, eps, quad_tol));
    let mut samples = Vec::with_capacity(rows.len());
    let mut worst = 0.0f64;
    for (i, row) in rows.into_iter().enumerate() {
        let (d, e) = row.map_err(|err| {
            Error::Convergence(format!("distance curve failed at eps = {}: {err}", eps_grid[i]))
        })?;
        samples.push((eps_grid[i], d));
        worst = worst.max(e);
    }
    Ok(DistanceCurve {
        n,
        samples,
        quadrature_error: worst,
    })
}

/// One row of a dimension scan.
#[derive(Debug)]
pub struct ScanRow {
    pub n: u32,
    /// D by quadrature, D by doubling the growth-ODE time, and M(eps, n).
    pub result: Result<ScanValues>,
}

#[derive(Debug, Clone, Copy)]
pub struct ScanValues {
    pub m_eps: f64,
    pub d_quad: f64,
    pub d_ode: f64,
}

impl ScanValues {
    /// |quadrature − ODE| cross-oracle gap.
    pub fn gap(&self) -> f64 {
        (self.d_quad - self.d_ode).abs()
    }
}

/// Dimension scan of D(eps, ·) with per-row failure isolation.
#[derive(Debug)]
pub struct DimensionScan {
    pub eps: f64,
    pub rows: Vec<ScanRow>,
    /// Supremum of D over the rows that succeeded.
    pub sup: f64,
    /// |D(n_{k+1}) − D(n_k)| between consecutive successful rows.
    pub successive_diffs: Vec<f64>,
}

/// Compute D(eps, n) for every requested dimension. Rows are independent
/// jobs; output order follows `n_list` regardless of scheduling.
pub fn dimension_scan(eps: f64, n_list: &[u32], quad_tol: f64, ode_tol: f64) -> DimensionScan {
    let results = exec::map_ordered(n_list, |&n| -> Result<ScanValues> {
        let m_eps = m_value(n, eps)?;
        let d_quad = distance_bound(n, eps, quad_tol)?;
        let d_ode = 2.0 * growth_ode(n, eps, ode_tol)?;
        Ok(ScanValues {
            m_eps,
            d_quad,
            d_ode,
        })
    });
    let rows: Vec<ScanRow> = n_list
        .iter()
        .zip(results)
        .map(|(&n, result)| ScanRow { n, result })
        .collect();
    let oks: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok().map(|v| v.d_quad))
        .collect();
    let sup = oks.iter().copied().fold(0.0, f64::max);
    let successive_diffs = oks.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    DimensionScan {
        eps,
        rows,
        sup,
        successive_diffs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn profile_endpoint_values() {
        // M(1/2, 2) = diameter of the unit-area disk
        let p = iso_profile(2, &[0.5]);
        let m = p[0].as_ref().unwrap().m_value;
        assert!((m - 2.0 / PI.sqrt()).abs() < 1e-12, "got {m}");
        // M(1/2, 3) = π R₃²
        let r3 = crate::geometry::unit_volume_radius(3).unwrap();
        let p = iso_profile(3, &[0.5]);
        let m = p[0].as_ref().unwrap().m_value;
        assert!((m - PI * r3 * r3).abs() < 1e-12, "got {m}");
    }

    #[test]
    fn profile_isolates_bad_grid_points() {
        let p = iso_profile(3, &[0.1, -1.0, 0.2, 0.7]);
        assert!(p[0].is_ok());
        assert!(p[1].is_err());
        assert!(p[2].is_ok());
        assert!(p[3].is_err());
    }

    #[test]
    fn profile_monotone_on_log_grid() {
        let grid: Vec<f64> = (0..50)
            .map(|k| (1e-4f64.ln() + k as f64 * (0.5f64.ln() - 1e-4f64.ln()) / 49.0).exp())
            .collect();
        let points = iso_profile(3, &grid);
        let mut prev = 0.0;
        for p in points {
            let p = p.unwrap();
            assert!(p.m_value > prev, "not increasing at eps = {}", p.eps);
            prev = p.m_value;
        }
    }

    #[test]
    fn m_value_refuses_beyond_half() {
        assert!(m_value(3, 0.500_000_1).is_err());
        assert!(m_value(3, 0.9).is_err());
    }

    #[test]
    fn distance_zero_at_half() {
        assert_eq!(distance_bound(10, 0.5, 1e-8).unwrap(), 0.0);
        assert_eq!(growth_ode(10, 0.5, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_and_ode_agree() {
        for &(n, eps) in &[(2u32, 0.1), (10, 0.3), (5, 0.05)] {
            let d = distance_bound(n, eps, DEFAULT_QUAD_TOL).unwrap();
            let t = growth_ode(n, eps, DEFAULT_ODE_TOL).unwrap();
            assert!(
                (2.0 * t - d).abs() <= 1e-4,
                "n={n} eps={eps}: quad {d} vs 2·ode {}",
                2.0 * t
            );
        }
    }

    #[test]
    fn distance_decreasing_in_eps() {
        let grid = [0.01, 0.05, 0.1, 0.2, 0.3, 0.45, 0.5];
        let curve = distance_curve(7, &grid, 1e-9).unwrap();
        for w in curve.samples.windows(2) {
            assert!(w[0].1 > w[1].1 || w[1].0 == 0.5 && w[1].1 == 0.0);
        }
        assert_eq!(curve.samples.last().unwrap().1, 0.0);
    }

    #[test]
    fn scan_rows_deterministic_and_isolated() {
        let scan = dimension_scan(0.1, &[3, 3, 3], 1e-8, 1e-9);
        let vals: Vec<f64> = scan
            .rows
            .iter()
            .map(|r| r.result.as_ref().unwrap().d_quad)
            .collect();
        assert_eq!(vals[0].to_bits(), vals[1].to_bits());
        assert_eq!(vals[0].to_bits(), vals[2].to_bits());
        // n = 1 row fails alone
        let scan = dimension_scan(0.1, &[1, 3], 1e-8, 1e-9);
        assert!(scan.rows[0].result.is_err());
        assert!(scan.rows[1].result.is_ok());
        assert_eq!(scan.successive_diffs.len(), 0);
    }

    #[test]
    fn near_half_scan_values_small() {
        let scan = dimension_scan(0.49, &[2, 5, 20], 1e-9, 1e-9);
        for row in &scan.rows {
            let v = row.result.as_ref().unwrap();
            assert!(v.d_quad > 0.0 && v.d_quad < 0.05, "D = {}", v.d_quad);
            assert!(v.gap() <= 1e-4);
        }
    }
}
