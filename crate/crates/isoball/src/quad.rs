//! Adaptive Gauss–Kronrod quadrature (15-point rule, interval bisection).

use crate::error::{Error, Result};

/// Abscissae of the 15-point Kronrod rule (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_7,
    0.949_107_912_342_758_524_526_189_7,
    0.864_864_423_359_769_072_789_712_8,
    0.741_531_185_599_394_439_863_864_8,
    0.586_087_235_467_691_130_294_144_8,
    0.405_845_151_377_397_166_906_606_4,
    0.207_784_955_007_898_467_600_689_4,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_0,
    0.063_092_092_629_978_553_290_700_7,
    0.104_790_010_322_250_183_839_876_3,
    0.140_653_259_715_525_918_745_189_6,
    0.169_004_726_639_267_902_826_583_4,
    0.190_350_578_064_785_409_913_256_4,
    0.204_432_940_075_298_892_414_161_9,
    0.209_482_141_084_727_828_012_999_2,
];

/// Weights of the embedded 7-point Gauss rule (odd Kronrod abscissae).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_4,
    0.279_705_391_489_276_667_901_467_8,
    0.381_830_050_505_118_944_950_369_8,
    0.417_959_183_673_469_387_755_102_0,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of per-interval error estimates of the accepted intervals.
    pub error: f64,
    pub evaluations: usize,
}

/// One GK15 panel: returns (kronrod value, error estimate).
fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center)?;
    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut res_abs = kronrod.abs();
    let mut lows = [0.0f64; 7];
    let mut highs = [0.0f64; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        lows[j] = f1;
        highs[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((lows[j] - mean).abs() + (highs[j] - mean).abs());
    }
    let mut err = ((kronrod - gauss) * half).abs();
    res_asc *= half.abs();
    res_abs *= half.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let round_floor = 50.0 * f64::EPSILON * res_abs;
    Ok((kronrod * half, err.max(round_floor)))
}

/// Integrate `f` over [a, b] to the given absolute tolerance by adaptively
/// bisecting the panels with the worst error share.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(abs_tol > 0.0) {
        return Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {abs_tol}"
        )));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    // global strategy: keep splitting the panel with the largest error
    // estimate until the total meets the tolerance
    const MAX_PANELS: usize = 4096;
    let width = (b - a).abs();
    let mut evaluations = 15usize;
    let first = gk15(&mut f, a, b)?;
    let mut panels: Vec<(f64, f64, f64, f64)> = vec![(a, b, first.0, first.1)];
    loop {
        let total_error: f64 = panels.iter().map(|p| p.3).sum();
        if total_error <= abs_tol {
            break;
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Convergence(format!(
                "quadrature tolerance {abs_tol} unreachable within {MAX_PANELS} panels (error {total_error:.3e})"
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).expect("finite errors"))
            .map(|(i, _)| i)
            .expect("nonempty panel list");
        let (lo, hi, _, e) = panels.swap_remove(worst);
        if (hi - lo).abs() < 1e-14 * width {
            // cannot refine further; keep the panel and accept its error
            let v = gk15(&mut f, lo, hi)?.0;
            evaluations += 15;
            panels.push((lo, hi, v, 0.0));
            let rest: f64 = panels.iter().map(|p| p.3).sum();
            if rest + e > abs_tol {
                return Err(Error::Convergence(format!(
                    "quadrature stalled on a point-like panel at [{lo}, {hi}]"
                )));
            }
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let left = gk15(&mut f, lo, mid)?;
        let right = gk15(&mut f, mid, hi)?;
        evaluations += 30;
        panels.push((lo, mid, left.0, left.1));
        panels.push((mid, hi, right.0, right.1));
    }
    let value = panels.iter().map(|p| p.2).sum();
    let error = panels.iter().map(|p| p.3).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> QuadResult {
        integrate(|x| Ok(f(x)), a, b, tol).unwrap()
    }

    #[test]
    fn polynomial_is_exact() {
        let r = quad(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_transcendental() {
        let r = quad(|x| x.sin(), 0.0, PI, 1e-12);
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫₀¹ 1/√x dx = 2
        let r = quad(|x| 1.0 / x.max(1e-300).sqrt(), 1e-12, 1.0, 1e-9);
        assert!((r.value - (2.0 - 2e-6)).abs() < 1e-6, "got {}", r.value);
    }

    #[test]
    fn needle_peak_requires_adaptivity() {
        // ∫ exp(-(x-0.3)²/2σ²) dx, σ = 1e-3, over [0,1] ≈ σ√(2π)
        let sigma = 1e-3;
        let r = quad(
            |x| (-(x - 0.3) * (x - 0.3) / (2.0 * sigma * sigma)).exp(),
            0.0,
            1.0,
            1e-12,
        );
        let expected = sigma * (2.0 * PI).sqrt();
        assert!((r.value - expected).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn propagates_integrand_errors() {
        let r = integrate(
            |x| {
                if x > 0.5 {
                    Err(crate::error::Error::Domain("boom".into()))
                } else {
                    Ok(x)
                }
            },
            0.0,
            1.0,
            1e-8,
        );
        assert!(r.is_err());
    }

    #[test]
    fn empty_interval() {
        let r = quad(|x| x, 1.0, 1.0, 1e-8);
        assert_eq!(r.value, 0.0);
    }
}
