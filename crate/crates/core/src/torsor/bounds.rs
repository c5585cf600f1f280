//! Explicit loop bounds for the torsor enumeration.
//!
//! # Per-place bounds on `Ñ_v`
//!
//! For a point in the fundamental domain with `∏_v Ñ_v ≤ B`:
//!
//! * unit rank 0 (one place): `Ñ_v ≤ T := B`;
//! * real quadratic fields: `1 ≤ Ñ₁/Ñ₂ < ε⁶` gives `Ñ₂² ≤ Ñ₁Ñ₂ ≤ B` and
//!   `Ñ₁² < ε⁶·Ñ₁Ñ₂ ≤ ε⁶B`, so `T = (ε³√B, √B)`.
//!
//! # Products used for bounding
//!
//! `M1 = a1²a2²a3²a4a6³` and `M2 = a1a2a3²a4²a5²a6²a7` are monomials of `Ñ_v`.
//! Since `a3a4a5a6a7·c = M3 − a3a4a5a6a7·a2a8 = ±M3 ∓ M0` (with
//! `c = a3a4²a5³a7`), the triangle inequality gives
//! `|P3|_v ≤ 2^{d_v}·T_v` for `P3 = a3²a4³a5⁴a6a7²`. Taking products over all
//! places, `|N(M1)|, |N(M2)| ≤ B` and `|N(P3)| ≤ 2^d·B`.
//!
//! Every nonzero ring element has `|N(a)| ≥ 1`, so the norm inequalities bound
//! each variable in terms of the already fixed ones. Per-place inequalities are
//! used only when every other factor is fixed, or when the field has a single
//! archimedean place (then `|a|_v = |N(a)|^{…} ≥ 1` for unfixed factors).
//! Canonical associates `a ∈ ℱ₁` satisfy `|a|_v ≤ ε·|N(a)|^{d_v/d}` (and
//! `|a|_v = |N(a)|^{d_v/d}` when the unit rank is 0). Finally `a8` is bounded by
//! `|M0|_v ≤ T_v`.
//!
//! All floating-point bounds are widened by a relative margin of `10⁻⁹`; every
//! defining condition is re-checked exactly afterwards, so the boxes only need
//! to be supersets.

use crate::error::{Error, Result};
use crate::numberfield::{AlgInt, Field};
use crate::rational::{to_f64, Rational};

/// Relative widening applied to every floating-point bound.
pub(crate) const MARGIN: f64 = 1e-9;

/// Exponents of `a1, …, a7` in `M1`, `M2`, `P3`.
pub(crate) const PRODUCT_EXPONENTS: [[u32; 7]; 3] = [
    [2, 2, 2, 1, 0, 3, 0],
    [1, 1, 2, 2, 2, 2, 1],
    [0, 0, 2, 3, 4, 1, 2],
];

/// Per-place upper bounds `T_v` on `Ñ_v` inside the fundamental domain.
pub fn place_height_bounds(field: &Field, b: &Rational) -> Vec<f64> {
    let bf = to_f64(b);
    if field.is_real_quadratic() {
        let e = field.fund_unit_f64().expect("real quadratic");
        vec![e.powi(3) * bf.sqrt(), bf.sqrt()]
    } else {
        vec![bf]
    }
}

/// A superset box for one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableBounds {
    /// 1-based index of the variable.
    pub var: usize,
    /// Bound on `|a_var|_v` at each place.
    pub per_place: Vec<f64>,
    /// Bound on `|N(a_var)|` (infinite when no norm bound applies).
    pub norm_max: f64,
    /// Whether `a_var = 0` is admissible (only `a8`).
    pub include_zero: bool,
    /// Whether no value is admissible at all.
    pub empty: bool,
}

/// Shared numeric context for bounding.
#[derive(Clone, Debug)]
pub(crate) struct BoundContext {
    pub b: f64,
    pub t: Vec<f64>,
    pub local_degrees: Vec<u32>,
    pub degree: u32,
    pub single_place: bool,
    pub f1_constant: f64,
}

impl BoundContext {
    pub fn new(field: &Field, b: &Rational) -> BoundContext {
        BoundContext {
            b: to_f64(b),
            t: place_height_bounds(field, b),
            local_degrees: field.places().iter().map(|p| p.kind.local_degree()).collect(),
            degree: field.degree,
            single_place: field.places().len() == 1,
            f1_constant: field.fund_unit_f64().unwrap_or(1.0),
        }
    }

    fn multiplier(&self, k: usize, d: u32) -> f64 {
        if k == 2 {
            2f64.powi(d as i32)
        } else {
            1.0
        }
    }

    /// Bound on `|N(a_j)|` (`j` 1-based, `≤ 7`) given the norms of the fixed
    /// variables.
    pub fn norm_bound(&self, norms: &[Option<f64>; 7], j: usize) -> f64 {
        let mut best = f64::INFINITY;
        for (k, exps) in PRODUCT_EXPONENTS.iter().enumerate() {
            let e = exps[j - 1];
            if e == 0 {
                continue;
            }
            let mut rest = 1.0;
            for (i, &ei) in exps.iter().enumerate() {
                if i != j - 1 && ei > 0 {
                    if let Some(n) = norms[i] {
                        rest *= n.powi(ei as i32);
                    }
                }
            }
            let cap = (self.multiplier(k, self.degree) * self.b / rest).powf(1.0 / e as f64);
            best = best.min(cap);
        }
        best * (1.0 + MARGIN)
    }

    /// Per-place bound on `|a_j|_v` (`j ∈ {6, 7}`) from the product
    /// inequalities, given per-place absolute values of the fixed variables.
    pub fn product_place_bound(&self, abs: &[Option<Vec<f64>>; 7], j: usize, v: usize) -> f64 {
        let mut best = f64::INFINITY;
        for (k, exps) in PRODUCT_EXPONENTS.iter().enumerate() {
            let e = exps[j - 1];
            if e == 0 {
                continue;
            }
            let mut rest = 1.0;
            let mut usable = true;
            for (i, &ei) in exps.iter().enumerate() {
                if i == j - 1 || ei == 0 {
                    continue;
                }
                match &abs[i] {
                    Some(vals) => rest *= vals[v].powi(ei as i32),
                    None if self.single_place => {}
                    None => usable = false,
                }
            }
            if usable {
                let cap = (self.multiplier(k, self.local_degrees[v]) * self.t[v] / rest)
                    .powf(1.0 / e as f64);
                best = best.min(cap);
            }
        }
        best * (1.0 + MARGIN)
    }

    /// Per-place bound for an element of `ℱ₁` with `|N| ≤ x`.
    pub fn f1_place_bounds(&self, x: f64) -> Vec<f64> {
        self.local_degrees
            .iter()
            .map(|&dv| self.f1_constant * x.powf(dv as f64 / self.degree as f64) * (1.0 + MARGIN))
            .collect()
    }

    /// Per-place bound on `|a8|_v` from `|M0|_v ≤ T_v`.
    pub fn a8_place_bounds(&self, abs: &[Option<Vec<f64>>; 7]) -> Vec<f64> {
        (0..self.t.len())
            .map(|v| {
                let rest: f64 = (1..7).map(|i| abs[i].as_ref().map_or(1.0, |a| a[v])).product();
                self.t[v] / rest * (1.0 + MARGIN)
            })
            .collect()
    }
}

/// Superset box for `a_{k+1}` given fixed `a1, …, a_k` (`k ≤ 7`), in the
/// standard loop order.
pub fn derive_loop_bounds(field: &Field, prefix: &[AlgInt], b: &Rational) -> Result<VariableBounds> {
    let k = prefix.len();
    if k >= 8 {
        return Err(Error::Domain("a9 is determined by the torsor equation".into()));
    }
    if prefix.iter().any(|a| a.is_zero()) {
        return Err(Error::Domain("a1..a7 must be nonzero".into()));
    }
    let var = k + 1;
    let places = field.places().len();
    if *b < Rational::from_integer(1) {
        return Ok(VariableBounds {
            var,
            per_place: vec![-1.0; places],
            norm_max: 0.0,
            include_zero: false,
            empty: true,
        });
    }
    let ctx = BoundContext::new(field, b);
    let mut norms = [None; 7];
    let mut abs: [Option<Vec<f64>>; 7] = Default::default();
    for (i, &a) in prefix.iter().enumerate() {
        norms[i] = Some(field.norm(a).abs() as f64);
        abs[i] = Some((0..places).map(|v| field.abs_v(a, v)).collect());
    }
    let result = match var {
        1..=5 => {
            let x = ctx.norm_bound(&norms, var);
            VariableBounds {
                var,
                per_place: ctx.f1_place_bounds(x),
                norm_max: x,
                include_zero: false,
                empty: x < 1.0,
            }
        }
        6 | 7 => {
            let x = ctx.norm_bound(&norms, var);
            let per_place: Vec<f64> =
                (0..places).map(|v| ctx.product_place_bound(&abs, var, v)).collect();
            VariableBounds { var, per_place, norm_max: x, include_zero: false, empty: x < 1.0 }
        }
        _ => VariableBounds {
            var,
            per_place: ctx.a8_place_bounds(&abs),
            norm_max: f64::INFINITY,
            include_zero: true,
            empty: false,
        },
    };
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};

    #[test]
    fn worked_examples() {
        let q = make_field(FieldTag::Q);
        let b = Rational::from_integer(10_000);
        let bounds = derive_loop_bounds(&q, &[], &b).unwrap();
        assert!((bounds.per_place[0] - 100.0).abs() < 1e-6);
        let ones = [AlgInt::ONE; 6];
        let bounds = derive_loop_bounds(&q, &ones, &Rational::from_integer(2)).unwrap();
        assert_eq!(bounds.var, 7);
        assert!((bounds.per_place[0] - 2.0).abs() < 1e-6);
        for tag in FieldTag::ALL {
            let f = make_field(tag);
            let bounds = derive_loop_bounds(&f, &[], &Rational::new(1, 2)).unwrap();
            assert!(bounds.empty);
            assert!(f.enumerate_box(&bounds.per_place).is_empty());
        }
    }

    #[test]
    fn real_quadratic_place_bounds() {
        let f = make_field(FieldTag::QSqrt2);
        let t = place_height_bounds(&f, &Rational::from_integer(4));
        let e = 1.0 + 2f64.sqrt();
        assert!((t[0] - 2.0 * e.powi(3)).abs() < 1e-9 && (t[1] - 2.0).abs() < 1e-12);
    }
}
