//! Fundamental domain for the action of `(O_K^×)⁶` on torsor points.
//!
//! The exponent matrix of the action restricted to `(a1, …, a6)` is unimodular,
//! so unit rescalings `(a1, …, a6) ↦ (v1a1, …, v6a6)` with arbitrary units
//! `v_j` are realized by exactly one `u ∈ (O_K^×)⁶`. Fixing `a1, …, a5` to
//! canonical associates leaves the residual action of one unit `w` scaling
//! `(a6, a7, a8, a9)` jointly, under which `Ñ_v ↦ |w|_v³·Ñ_v`.
//!
//! * The domain `ℱ` used for counting `M(B)` puts `a1, …, a5` in the unit
//!   window and, for real quadratic fields, `(a6, a7, a8)` in
//!   `ℱ₀ = {1 ≤ Ñ₁/Ñ₂ < ε⁶}`. This is the condition "coefficient of the
//!   trace-zero part of `(1/3)(log Ñ_v)_v` along `l(ε) = (log ε, −log ε)` lies
//!   in `[0, 1)`". It contains each orbit exactly `|μ_K|` times.
//! * The full-orbit canonical set additionally normalizes `a6` modulo the roots
//!   of unity and contains each orbit exactly once.

use std::cmp::Ordering;

use crate::numberfield::{AlgInt, Field, UnitWindow};
use crate::torsor::{psi_raw, TorsorPoint};

/// Membership predicates for one choice of unit window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FundDomain {
    pub window: UnitWindow,
}

/// Position of `Ñ₁/Ñ₂` relative to `[1, ε⁶)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioPosition {
    Below,
    /// Exactly on the closed lower boundary `Ñ₁ = Ñ₂`.
    LowerBoundary,
    Inside,
    /// Exactly on the open upper boundary `Ñ₁ = ε⁶Ñ₂`.
    UpperBoundary,
    Above,
}

impl RatioPosition {
    pub fn contained(self) -> bool {
        matches!(self, RatioPosition::LowerBoundary | RatioPosition::Inside)
    }

    pub fn on_boundary(self) -> bool {
        matches!(self, RatioPosition::LowerBoundary | RatioPosition::UpperBoundary)
    }
}

/// Exact position of `Ñ₁/Ñ₂` for the raw `Ψ` coordinates `x` over a real
/// quadratic field.
pub fn ratio_position(field: &Field, x: &[AlgInt; 5]) -> RatioPosition {
    let argmax = |v: usize| {
        let mut best = x[0];
        for &c in &x[1..] {
            if field.cmp_abs(c, best, v) == Ordering::Greater {
                best = c;
            }
        }
        best
    };
    let (m1, m2) = (argmax(0), argmax(1));
    // |σ₂(m2)| = |σ₁(conj m2)|.
    let m2c = field.conj(m2);
    match field.cmp_abs(m1, m2c, 0) {
        Ordering::Less => RatioPosition::Below,
        lower => {
            let eps6 = field.unit_pow(6);
            match field.cmp_abs(m1, field.mul(eps6, m2c), 0) {
                Ordering::Less if lower == Ordering::Equal => RatioPosition::LowerBoundary,
                Ordering::Less => RatioPosition::Inside,
                Ordering::Equal => RatioPosition::UpperBoundary,
                Ordering::Greater => RatioPosition::Above,
            }
        }
    }
}

impl FundDomain {
    pub fn new(window: UnitWindow) -> FundDomain {
        FundDomain { window }
    }

    /// `a ∈ ℱ₁`.
    pub fn f1_contains(&self, field: &Field, a: AlgInt) -> bool {
        field.is_canonical(a, self.window)
    }

    /// `(a6, a7, a8) ∈ ℱ₀(a1, …, a5)`; always true when the unit rank is 0.
    pub fn f0_contains(&self, field: &Field, t: &TorsorPoint) -> bool {
        if !field.is_real_quadratic() {
            return true;
        }
        ratio_position(field, &psi_raw(field, &t.a)).contained()
    }

    /// Membership in `ℱ = ℱ₁⁵ × ℱ₀ × K`.
    pub fn in_base_domain(&self, field: &Field, t: &TorsorPoint) -> bool {
        t.a[..5].iter().all(|&a| self.f1_contains(field, a)) && self.f0_contains(field, t)
    }

    /// Whether `t` is the unique representative of its `(O_K^×)⁶`-orbit.
    pub fn is_orbit_canonical(&self, field: &Field, t: &TorsorPoint) -> bool {
        self.in_base_domain(field, t) && field.is_mu_canonical(t.a[5], self.window)
    }

    /// The coefficient `s` of the trace-zero part of `(1/3)(log Ñ_v)_v` along
    /// `l(ε)` (real quadratic fields); the domain is `s ∈ [0, 1)`.
    pub fn log_coefficient(&self, field: &Field, t: &TorsorPoint) -> Option<f64> {
        if !field.is_real_quadratic() {
            return None;
        }
        let n1 = super::tilde_n_f64(field, &t.prefix8(), 0);
        let n2 = super::tilde_n_f64(field, &t.prefix8(), 1);
        Some((n1.ln() - n2.ln()) / (6.0 * field.regulator))
    }
}

/// Full-orbit canonicity for the standard window.
pub fn in_fundamental_domain(field: &Field, t: &TorsorPoint) -> bool {
    FundDomain::default().is_orbit_canonical(field, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};
    use crate::torsor::apply_unit_action;

    #[test]
    fn worked_examples_rational() {
        let f = make_field(FieldTag::Q);
        let t = TorsorPoint::from_ints(&f, [1, 1, 1, 1, 1, 1, 1, 1, -2]).unwrap();
        assert!(in_fundamental_domain(&f, &t));
        let neg = TorsorPoint::from_ints(&f, [1, 1, 1, 1, 1, -1, -1, -1, 2]).unwrap();
        assert!(!in_fundamental_domain(&f, &neg));
        assert!(FundDomain::default().in_base_domain(&f, &neg));
    }

    #[test]
    fn worked_examples_real_quadratic() {
        let f = make_field(FieldTag::QSqrt2);
        let t = TorsorPoint::from_ints(&f, [1, 1, 1, 1, 1, 1, 1, 1, -2]).unwrap();
        assert!(in_fundamental_domain(&f, &t));
        assert_eq!(FundDomain::default().log_coefficient(&f, &t), Some(0.0));
        assert_eq!(ratio_position(&f, &psi_raw(&f, &t.a)), RatioPosition::LowerBoundary);
        let e = f.fund_unit.unwrap();
        let o = AlgInt::ONE;
        let s = apply_unit_action(&f, &t, &[e, o, o, o, o, o]).unwrap();
        assert!(!in_fundamental_domain(&f, &s));
    }

    #[test]
    fn residual_unit_moves_log_coefficient_by_one() {
        let f = make_field(FieldTag::QSqrt2);
        let t = TorsorPoint::from_ints(&f, [1, 1, 1, 1, 1, 1, 1, 1, -2]).unwrap();
        let e = f.fund_unit.unwrap();
        let o = AlgInt::ONE;
        // u0 alone scales (a6, a7, a8, a9) jointly.
        let s = apply_unit_action(&f, &t, &[e, o, o, o, o, o]).unwrap();
        assert_eq!(&s.a[..5], &t.a[..5]);
        let d = FundDomain::default();
        let c0 = d.log_coefficient(&f, &t).unwrap();
        let c1 = d.log_coefficient(&f, &s).unwrap();
        assert!((c1 - c0 - 1.0).abs() < 1e-9);
    }
}
