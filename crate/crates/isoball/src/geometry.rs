//! Exact n-dimensional ball, sphere, and spherical-cap measures.
//!
//! Conventions: U is the ambient ball of dimension n and radius R. A cap is
//! parametrized by its colatitude θ ∈ [0, π], the center angle from the cap's
//! pole to its rim; heights and plane offsets are converted at operation
//! boundaries. n = 1 is excluded throughout (no normal direction to speak of).

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_reg_inc_beta_with_complement};

const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Dimension and radius of an ambient ball, with its volume cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallGeometry {
    n: u32,
    radius: f64,
    volume: f64,
}

impl BallGeometry {
    /// Ball of given dimension and radius.
    pub fn with_radius(n: u32, radius: f64) -> Result<Self> {
        let volume = ball_volume(n, radius)?;
        Ok(Self { n, radius, volume })
    }

    /// The unit-volume ball U_n; volume is exactly 1 by construction.
    pub fn unit_volume(n: u32) -> Result<Self> {
        let radius = unit_volume_radius(n)?;
        Ok(Self {
            n,
            radius,
            volume: 1.0,
        })
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Surface area of the boundary (n−1)-sphere.
    pub fn boundary_area(&self) -> Result<f64> {
        sphere_area(self.n, self.radius)
    }

    /// Spherical cap of this ball at the given colatitude.
    pub fn cap(&self, colatitude: f64) -> Result<CapSpec> {
        CapSpec::new(*self, colatitude)
    }
}

/// A spherical cap: ambient ball plus colatitude (pole-to-rim angle).
#[derive(Debug, Clone, Copy)]
pub struct CapSpec {
    pub geometry: BallGeometry,
    pub colatitude: f64,
}

impl CapSpec {
    pub fn new(geometry: BallGeometry, colatitude: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&colatitude) {
            return Err(Error::Domain(format!(
                "cap colatitude must lie in [0, π], got {colatitude}"
            )));
        }
        Ok(Self {
            geometry,
            colatitude,
        })
    }

    /// n-volume of the cap.
    pub fn volume(&self) -> f64 {
        cap_volume(self)
    }

    /// Lateral ((n−1)-dimensional) area of the cap's spherical surface.
    pub fn area(&self) -> f64 {
        cap_area(self)
    }
}

fn check_dim(n: u32, min: u32, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!("{what} requires n >= {min}, got {n}")));
    }
    Ok(())
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    Ok(())
}

/// ln of the n-ball volume at the given radius.
pub fn ln_ball_volume(n: u32, radius: f64) -> Result<f64> {
    check_dim(n, 1, "ball_volume")?;
    check_radius(radius)?;
    let nf = f64::from(n);
    Ok(0.5 * nf * LN_PI + nf * radius.ln() - ln_gamma(0.5 * nf + 1.0))
}

/// Volume of the n-ball: π^{n/2} r^n / Γ(n/2 + 1), evaluated via log-gamma.
pub fn ball_volume(n: u32, radius: f64) -> Result<f64> {
    Ok(ln_ball_volume(n, radius)?.exp())
}

/// Radius R_n of the unit-volume n-ball: Γ(n/2+1)^{1/n} / √π.
pub fn unit_volume_radius(n: u32) -> Result<f64> {
    check_dim(n, 1, "unit_volume_radius")?;
    let nf = f64::from(n);
    Ok((ln_gamma(0.5 * nf + 1.0) / nf - 0.5 * LN_PI).exp())
}

/// ln of the boundary area of the n-ball: n κ_n r^{n−1}.
pub fn ln_sphere_area(n: u32, radius: f64) -> Result<f64> {
    check_dim(n, 2, "sphere_area")?;
    check_radius(radius)?;
    let nf = f64::from(n);
    Ok(nf.ln() + 0.5 * nf * LN_PI - ln_gamma(0.5 * nf + 1.0) + (nf - 1.0) * radius.ln())
}

/// Surface area of the (n−1)-sphere bounding the n-ball of this radius.
pub fn sphere_area(n: u32, radius: f64) -> Result<f64> {
    Ok(ln_sphere_area(n, radius)?.exp())
}

/// Volume of an acute cap given sin²θ and cos²θ exactly.
///
/// (κ_n R^n / 2) I_{sin²θ}((n+1)/2, 1/2), combined in log space so huge radii
/// (flat-cut limits of the lens family) stay finite. Taking the squares as
/// inputs lets callers with exact trigonometry (the lens family knows
/// cos θ = R/d without ever forming θ) keep full precision near θ = 0, π/2.
pub fn cap_volume_acute(n: u32, radius: f64, sin_sq: f64, cos_sq: f64) -> f64 {
    let nf = f64::from(n);
    let ln_i = ln_reg_inc_beta_with_complement(sin_sq, cos_sq, 0.5 * (nf + 1.0), 0.5)
        .expect("cap angle maps into the beta domain");
    if ln_i == f64::NEG_INFINITY {
        return 0.0;
    }
    let ln_ball = ln_ball_volume(n, radius).expect("cap radius is validated");
    0.5 * (ln_ball + ln_i).exp()
}

/// Volume of a spherical cap of colatitude θ.
///
/// For θ ≤ π/2 this is (κ_n R^n / 2) I_{sin²θ}((n+1)/2, 1/2); the obtuse case
/// is the complement of the cap at π − θ.
pub fn cap_volume(spec: &CapSpec) -> f64 {
    let theta = spec.colatitude;
    if theta <= std::f64::consts::FRAC_PI_2 {
        let (s, c) = (theta.sin(), theta.cos());
        cap_volume_acute(spec.geometry.n, spec.geometry.radius, s * s, c * c)
    } else {
        let complement = CapSpec {
            geometry: spec.geometry,
            colatitude: std::f64::consts::PI - theta,
        };
        spec.geometry.volume - cap_volume(&complement)
    }
}

/// Lateral area of an acute cap given sin²θ and cos²θ exactly.
pub fn cap_area_acute(n: u32, radius: f64, sin_sq: f64, cos_sq: f64) -> f64 {
    let nf = f64::from(n);
    let ln_i = ln_reg_inc_beta_with_complement(sin_sq, cos_sq, 0.5 * (nf - 1.0), 0.5)
        .expect("cap angle maps into the beta domain");
    if ln_i == f64::NEG_INFINITY {
        return 0.0;
    }
    let ln_area = ln_sphere_area(n, radius).expect("cap radius is validated");
    0.5 * (ln_area + ln_i).exp()
}

/// Lateral area of a spherical cap of colatitude θ.
///
/// For θ ≤ π/2 this is (area(∂B)/2) I_{sin²θ}((n−1)/2, 1/2), complement rule
/// for the obtuse range.
pub fn cap_area(spec: &CapSpec) -> f64 {
    let theta = spec.colatitude;
    if theta <= std::f64::consts::FRAC_PI_2 {
        let (s, c) = (theta.sin(), theta.cos());
        cap_area_acute(spec.geometry.n, spec.geometry.radius, s * s, c * c)
    } else {
        let complement = CapSpec {
            geometry: spec.geometry,
            colatitude: std::f64::consts::PI - theta,
        };
        spec.geometry
            .boundary_area()
            .expect("validated by CapSpec")
            - cap_area(&complement)
    }
}

/// Colatitude θ with cap_volume(θ) = target, by bisection.
///
/// Relies on strict monotonicity of the cap volume in θ.
pub fn cap_colatitude_for_volume(geometry: &BallGeometry, target: f64) -> Result<f64> {
    if !(target > 0.0) || target > geometry.volume {
        return Err(Error::Domain(format!(
            "cap volume target must lie in (0, volume(U)], got {target}"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = std::f64::consts::PI;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = cap_volume(&CapSpec {
            geometry: *geometry,
            colatitude: mid,
        });
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
