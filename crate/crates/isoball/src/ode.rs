//! Embedded Runge–Kutta integration of autonomous scalar growth laws.
//!
//! Dormand–Prince 5(4) with standard step control, specialized to the one
//! job the pipeline needs: integrate v' = f(v) forward from v₀ until v
//! reaches a target value, and report the elapsed time.

use crate::error::{Error, Result};

/// Dormand–Prince tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 4th-order embedded weights (include the FSAL stage)
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeResult {
    /// Elapsed time to reach the target value.
    pub time: f64,
    pub steps: usize,
    /// Value at termination (within landing tolerance of the target).
    pub value: f64,
}

/// One DP5 step from `v` with size `h`; returns (v5, error_estimate).
fn dp5_step<F>(f: &mut F, v: f64, h: f64, k1: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let k2 = f(v + h * A21 * k1)?;
    let k3 = f(v + h * (A31 * k1 + A32 * k2))?;
    let k4 = f(v + h * (A41 * k1 + A42 * k2 + A43 * k3))?;
    let k5 = f(v + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))?;
    let k6 = f(v + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5))?;
    let v5 = v + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(v5)?;
    let v4 = v + h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Ok((v5, (v5 - v4).abs()))
}

/// Integrate v' = f(v) from `v0` until v = `v_target` (f must be positive on
/// the way); returns the elapsed time. `tol` controls the local step error.
pub fn time_to_reach<F>(mut f: F, v0: f64, v_target: f64, tol: f64) -> Result<OdeResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("ODE tolerance must be positive, got {tol}")));
    }
    if v_target < v0 {
        return Err(Error::Domain(format!(
            "target {v_target} lies behind the initial value {v0} for a growth law"
        )));
    }
    if v_target == v0 {
        return Ok(OdeResult {
            time: 0.0,
            steps: 0,
            value: v0,
        });
    }

    let mut v = v0;
    let mut t = 0.0;
    let mut steps = 0usize;
    let slope0 = f(v0)?;
    if !(slope0 > 0.0) {
        return Err(Error::Domain(format!(
            "growth rate must be positive, got f({v0}) = {slope0}"
        )));
    }
    let mut h = 0.01 * (v_target - v0) / slope0;
    let h_min = 1e3 * f64::EPSILON * (v_target - v0) / slope0;
    let land_tol = 1e-13 * v_target.abs().max(1.0);

    const MAX_STEPS: usize = 100_000;
    while v_target - v > land_tol {
        if steps >= MAX_STEPS {
            return Err(Error::Convergence(format!(
                "ODE step budget exhausted at v = {v}"
            )));
        }
        let k1 = f(v)?;
        let (mut v_new, err) = dp5_step(&mut f, v, h, k1)?;
        let scale = tol * (1.0 + v.abs());
        if err > scale {
            h *= (0.9 * (scale / err).powf(0.2)).max(0.2);
            if h < h_min {
                return Err(Error::Convergence(
                    "step-size underflow (stiff or degenerate growth law)".into(),
                ));
            }
            continue;
        }
        let mut h_used = h;
        if v_new > v_target {
            // land on the target: bisect the step size (f > 0, so the step
            // value is increasing in h at this scale)
            let mut lo = 0.0;
            let mut hi = h;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let (v_mid, _) = dp5_step(&mut f, v, mid, k1)?;
                if v_mid < v_target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if v_target - dp5_step(&mut f, v, lo, k1)?.0 < land_tol {
                    break;
                }
            }
            h_used = 0.5 * (lo + hi);
            v_new = dp5_step(&mut f, v, h_used, k1)?.0;
        }
        v = v_new;
        t += h_used;
        steps += 1;
        h *= (0.9 * (scale / err.max(1e-300)).powf(0.2)).clamp(0.2, 5.0);
    }
    Ok(OdeResult {
        time: t,
        steps,
        value: v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_time() {
        // v' = v: time from 1 to e is exactly 1
        let r = time_to_reach(|v| Ok(v), 1.0, std::f64::consts::E, 1e-10).unwrap();
        assert!((r.time - 1.0).abs() < 1e-9, "got {}", r.time);
    }

    #[test]
    fn constant_growth_time() {
        let r = time_to_reach(|_| Ok(2.0), 0.1, 0.5, 1e-9).unwrap();
        assert!((r.time - 0.2).abs() < 1e-12);
    }

    #[test]
    fn logistic_growth_time() {
        // v' = v(1-v) from 0.2 to 0.8: t = ln(0.8/0.2 · 0.8/0.2) = 2 ln 4
        let r = time_to_reach(|v| Ok(v * (1.0 - v)), 0.2, 0.8, 1e-11).unwrap();
        let expected = (16.0f64).ln();
        assert!((r.time - expected).abs() < 1e-8, "got {}", r.time);
    }

    #[test]
    fn zero_length_integration() {
        let r = time_to_reach(|v| Ok(v), 0.5, 0.5, 1e-9).unwrap();
        assert_eq!(r.time, 0.0);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn rejects_nonpositive_growth() {
        assert!(time_to_reach(|_| Ok(0.0), 0.1, 0.5, 1e-9).is_err());
        assert!(time_to_reach(|_| Ok(1.0), 0.5, 0.1, 1e-9).is_err());
    }
}
