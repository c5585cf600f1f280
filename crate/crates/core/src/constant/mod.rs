//! The predicted leading constant
//!
//! ```text
//!     c = α · (2^{r₁}(2π)^{r₂} R_K h_K / |μ_K|)⁶ · |Δ_K|⁻⁴ · ∏_𝔭 ω_𝔭 · ∏_{v | ∞} ω_v,
//! ```
//!
//! with `α = 1/8640` and `β = 1`, together with machine checks of the finite
//! identities behind it: the local Möbius identity for the coprimality
//! weights ([`theta`]), the exact polytope volume ([`polytope`]), the two
//! representations of the archimedean densities ([`density`]) and the
//! volume of the height region ([`volume`]).

pub mod density;
pub mod euler;
pub mod montecarlo;
pub mod polytope;
pub mod quadrature;
pub mod theta;
pub mod volume;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use density::{omega_arch, Density, DensityConfig, DensityMethod};
pub use euler::{euler_factor, finite_product, EulerProduct, DEFAULT_TRUNCATION};
pub use polytope::{alpha, HalfSpace, PolytopeH};
pub use theta::{mobius_local_check, theta0, theta1, ThetaTables};
pub use volume::{volume_sf_check, VolumeReport};

use crate::error::Result;
use crate::numberfield::Field;

/// Order of the Weyl group of the root system `A₃ + A₁`.
pub const WEYL_ORDER: u64 = 48;

/// The cohomological constant `β`.
pub const BETA: u32 = 1;

/// One archimedean density in the bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub place: usize,
    pub value: f64,
    pub err: f64,
}

/// Closed interval for `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// All ingredients of `c` with error bars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantBundle {
    pub field: String,
    pub alpha: String,
    pub beta: u32,
    /// `(2^{r₁}(2π)^{r₂} R_K h_K / |μ_K|)⁶ · |Δ_K|⁻⁴`.
    pub prefactor: f64,
    pub euler: EulerProduct,
    pub omega: Vec<OmegaEntry>,
    pub c: Interval,
}

/// `(2^{r₁}(2π)^{r₂} R_K h_K / |μ_K|)⁶ · |Δ_K|⁻⁴`.
pub fn field_prefactor(field: &Field) -> f64 {
    let base = 2f64.powi(field.r1 as i32) * (2.0 * PI).powi(field.r2 as i32) * field.regulator
        * field.class_number as f64
        / field.mu_order as f64;
    base.powi(6) / (field.disc.unsigned_abs() as f64).powi(4)
}

/// Assembles `c` with the Euler product truncated at `p` and the
/// archimedean densities from the two-variable quadrature.
pub fn assemble_c(field: &Field, p: u64, budget: &DensityConfig) -> Result<ConstantBundle> {
    const ROUNDING: f64 = 1e-12;
    let a = alpha()?;
    let a_f64 = num_traits::ToPrimitive::to_f64(&a).expect("α is a small rational");
    let euler = finite_product(field, p)?;
    let prefactor = field_prefactor(field);
    let mut omega = Vec::new();
    let (mut lo, mut hi) = (a_f64 * prefactor * euler.tail_lo, a_f64 * prefactor * euler.tail_hi);
    for place in field.places() {
        let d = omega_arch(field, place.index, DensityMethod::Adelic2dQuad, budget)?;
        lo *= (d.value - d.err).max(0.0);
        hi *= d.value + d.err;
        omega.push(OmegaEntry { place: place.index, value: d.value, err: d.err });
    }
    Ok(ConstantBundle {
        field: field.tag.display_name().to_string(),
        alpha: a.to_string(),
        beta: BETA,
        prefactor,
        euler,
        omega,
        c: Interval { lo: lo * (1.0 - ROUNDING), hi: hi * (1.0 + ROUNDING) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};
    use num_rational::BigRational;

    #[test]
    fn worked_examples() {
        assert!((field_prefactor(&make_field(FieldTag::Q)) - 1.0).abs() < 1e-15);
        let qi = make_field(FieldTag::QI);
        let base: f64 = 2.0 * PI / 4.0;
        assert!((field_prefactor(&qi) - base.powi(6) / 256.0).abs() < 1e-12);
        let a = alpha().unwrap();
        assert_eq!(a.clone() * BigRational::from_integer(WEYL_ORDER.into()), BigRational::new(1.into(), 180.into()));
    }

    #[test]
    fn rational_bundle() {
        let f = make_field(FieldTag::Q);
        let b = assemble_c(&f, 10_000, &DensityConfig::default()).unwrap();
        assert_eq!(b.alpha, "1/8640");
        let c = b.euler.value * b.omega[0].value / 8640.0;
        assert!(b.c.contains(c));
        assert!(b.c.hi / b.c.lo < 1.01);
        let json = serde_json::to_value(&b).unwrap();
        for key in ["alpha", "euler", "omega", "c"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert!(json["euler"].get("P").is_some());
    }
}
