//! Integral points on the universal torsor
//!
//! ```text
//!     a1·a9 + a2·a8 + a3·a4²·a5³·a7 = 0,     a1, …, a7 ≠ 0,
//! ```
//!
//! the map `Ψ` to the surface, the lifted height `Ñ_v`, the fundamental domain
//! for the action of `(O_K^×)⁶`, and complete enumeration of the torsor points
//! of bounded height.
//!
//! # The five monomials
//!
//! With `c = a3a4²a5³a7`, the coordinates of `Ψ(a)` are, up to sign,
//!
//! ```text
//!     M0 = a2a3a4a5a6a7a8                  = x0
//!     M1 = a1²a2²a3²a4a6³                  = x1
//!     M2 = a1a2a3²a4²a5²a6²a7              = x2
//!     M3 = a3a4a5a6a7·(c + a2a8)           = −x3
//!     M4 = a7a8·(c + a2a8)/a1              = −x4
//! ```
//!
//! and `Ñ_v = max_i |M_i|_v`. For a torsor point satisfying the coprimality
//! conditions the tuple `Ψ(a)` is content-free, so `H(Ψ(a)) = ∏_v Ñ_v`.

mod bijection;
mod bounds;
mod domain;
mod engine;
mod rational_engine;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{place_max_product_cmp, place_max_product_f64, DynkinData, ProjPoint};
use crate::numberfield::{AlgInt, Field, Interval};
use crate::rational::Rational;

pub use bijection::{bijection_check, BijectionReport};
pub use bounds::{derive_loop_bounds, place_height_bounds, VariableBounds};
pub use domain::{in_fundamental_domain, FundDomain};
pub use engine::{enumerate_m, enumerate_m_with, Engine, EnumOptions, EnumResult, LoopOrder};

/// The exponent vectors `m⁽¹⁾, …, m⁽⁹⁾ ∈ ℤ⁶` describing the unit action
/// `a_j ↦ u^{m⁽ʲ⁾}·a_j` of `(O_K^×)⁶` on the torsor.
pub const DEGREES: [[i64; 6]; 9] = [
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0],
    [0, 1, -1, 0, 0, 0],
    [0, 0, 1, -1, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [1, -1, 0, 0, -1, -1],
    [1, -1, -1, -1, 0, 0],
    [1, 0, 0, 0, -1, 0],
    [1, 0, 0, 0, 0, -1],
];

/// The degree matrix together with derived invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeMatrix {
    pub rows: [[i64; 6]; 9],
}

impl Default for DegreeMatrix {
    fn default() -> Self {
        DegreeMatrix { rows: DEGREES }
    }
}

impl DegreeMatrix {
    /// Determinant of the 6×6 block `m⁽¹⁾, …, m⁽⁶⁾` over ℤ.
    pub fn block_determinant(&self) -> i64 {
        let mut m: Vec<Vec<i128>> =
            self.rows[..6].iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        // Bareiss fraction-free elimination.
        let n = 6;
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] == 0 {
                match (k + 1..n).find(|&i| m[i][k] != 0) {
                    Some(i) => {
                        m.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        (sign * m[n - 1][n - 1]) as i64
    }

    /// Whether the block is invertible modulo 2.
    pub fn block_invertible_mod2(&self) -> bool {
        self.block_determinant().rem_euclid(2) == 1
    }
}

/// A point `(a1, …, a9)` of the torsor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorsorPoint {
    pub a: [AlgInt; 9],
}

impl TorsorPoint {
    /// Validates nonvanishing of `a1, …, a7` and the torsor equation.
    pub fn new(field: &Field, a: [AlgInt; 9]) -> Result<TorsorPoint> {
        let t = TorsorPoint { a };
        if a[..7].iter().any(|x| x.is_zero()) {
            return Err(Error::Domain(format!("{t}: a1..a7 must be nonzero")));
        }
        if !equation(field, &a).is_zero() {
            return Err(Error::Domain(format!("{t}: torsor equation fails")));
        }
        Ok(t)
    }

    pub fn from_ints(field: &Field, a: [i128; 9]) -> Result<TorsorPoint> {
        TorsorPoint::new(field, a.map(AlgInt::int))
    }

    /// `a_j`, 1-based.
    pub fn get(&self, j: usize) -> AlgInt {
        self.a[j - 1]
    }

    pub fn prefix8(&self) -> [AlgInt; 8] {
        let mut p = [AlgInt::ZERO; 8];
        p.copy_from_slice(&self.a[..8]);
        p
    }
}

impl fmt::Display for TorsorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Left-hand side of the torsor equation.
pub fn equation(field: &Field, a: &[AlgInt; 9]) -> AlgInt {
    let m = |xs: &[AlgInt]| field.mul_all(xs);
    m(&[a[0], a[8]]) + m(&[a[1], a[7]]) + m(&[a[2], a[3], a[3], a[4], a[4], a[4], a[6]])
}

/// `c = a3·a4²·a5³·a7`.
pub fn c_term(field: &Field, a: &[AlgInt]) -> AlgInt {
    field.mul_all(&[a[2], a[3], a[3], a[4], a[4], a[4], a[6]])
}

/// The raw (not canonicalized) coordinates of `Ψ(a)`.
pub fn psi_raw(field: &Field, a: &[AlgInt; 9]) -> [AlgInt; 5] {
    let m = |xs: &[AlgInt]| field.mul_all(xs);
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9] = *a;
    [
        m(&[a2, a3, a4, a5, a6, a7, a8]),
        m(&[a1, a1, a2, a2, a3, a3, a4, a6, a6, a6]),
        m(&[a1, a2, a3, a3, a4, a4, a5, a5, a6, a6, a7]),
        m(&[a1, a3, a4, a5, a6, a7, a9]),
        m(&[a7, a8, a9]),
    ]
}

/// `Ψ(T)` as a canonical projective point.
pub fn psi(field: &Field, t: &TorsorPoint) -> Result<ProjPoint> {
    ProjPoint::canonical(field, psi_raw(field, &t.a))
}

/// The five monomials `M0, …, M3` and the numerator `a7a8(c + a2a8)` of `M4`.
pub fn monomials(field: &Field, a: &[AlgInt; 8]) -> ([AlgInt; 4], AlgInt) {
    let m = |xs: &[AlgInt]| field.mul_all(xs);
    let [a1, a2, a3, a4, a5, a6, a7, a8] = *a;
    let s = c_term(field, a) + field.mul(a2, a8);
    (
        [
            m(&[a2, a3, a4, a5, a6, a7, a8]),
            m(&[a1, a1, a2, a2, a3, a3, a4, a6, a6, a6]),
            m(&[a1, a2, a3, a3, a4, a4, a5, a5, a6, a6, a7]),
            m(&[a3, a4, a5, a6, a7, s]),
        ],
        m(&[a7, a8, s]),
    )
}

/// Interval enclosure of `Ñ_v(a1, …, a8)` at `bits` of precision. The fifth
/// monomial is divided by `a1` in interval arithmetic, so `a9` need not exist.
pub fn tilde_n_interval(field: &Field, a: &[AlgInt; 8], v: usize, bits: u32) -> Result<Interval> {
    if a[0].is_zero() {
        return Err(Error::Domain("Ñ_v needs a1 ≠ 0".into()));
    }
    let (ms, num4) = monomials(field, a);
    let mut best = Interval::from_int(0, bits);
    for x in ms {
        best = best.max(&field.embed(x, bits).abs_v(v));
    }
    let q = field.embed(num4, bits).abs_v(v).div(&field.embed(a[0], bits).abs_v(v))?;
    Ok(best.max(&q))
}

/// Floating-point `Ñ_v(a1, …, a8)`.
pub fn tilde_n_f64(field: &Field, a: &[AlgInt; 8], v: usize) -> f64 {
    let (ms, num4) = monomials(field, a);
    let m = ms.iter().map(|&x| field.abs_v(x, v)).fold(0.0, f64::max);
    m.max(field.abs_v(num4, v) / field.abs_v(a[0], v))
}

/// `Ñ` at a real place for real arguments `x1, …, x8` (`x1 ≠ 0`).
pub fn tilde_n_real(x: &[f64; 8]) -> f64 {
    let [x1, x2, x3, x4, x5, x6, x7, x8] = *x;
    let s = x3 * x4 * x4 * x5 * x5 * x5 * x7 + x2 * x8;
    let m = [
        x2 * x3 * x4 * x5 * x6 * x7 * x8,
        x1 * x1 * x2 * x2 * x3 * x3 * x4 * x6 * x6 * x6,
        x1 * x2 * x3 * x3 * x4 * x4 * x5 * x5 * x6 * x6 * x7,
        x3 * x4 * x5 * x6 * x7 * s,
        x7 * x8 * s / x1,
    ];
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// `Ñ` at a complex place (normalized absolute value = squared modulus) for
/// complex arguments given as `(re, im)` pairs.
pub fn tilde_n_complex(x: &[(f64, f64); 8]) -> f64 {
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let prod = |xs: &[(f64, f64)]| xs.iter().fold((1.0, 0.0), |acc, &z| mul(acc, z));
    let [x1, x2, x3, x4, x5, x6, x7, x8] = *x;
    let c = prod(&[x3, x4, x4, x5, x5, x5, x7]);
    let t = mul(x2, x8);
    let s = (c.0 + t.0, c.1 + t.1);
    let n2 = |z: (f64, f64)| z.0 * z.0 + z.1 * z.1;
    let m = [
        n2(prod(&[x2, x3, x4, x5, x6, x7, x8])),
        n2(prod(&[x1, x1, x2, x2, x3, x3, x4, x6, x6, x6])),
        n2(prod(&[x1, x2, x3, x3, x4, x4, x5, x5, x6, x6, x7])),
        n2(prod(&[x3, x4, x5, x6, x7, s])),
        n2(prod(&[x7, x8, s])) / n2(x1),
    ];
    m.iter().fold(0.0f64, |acc, &v| acc.max(v))
}

/// `∏_v Ñ_v(T) ≤ B`, decided exactly.
pub fn height_condition(field: &Field, t: &TorsorPoint, b: &Rational) -> bool {
    if *b.numer() <= 0 {
        return false;
    }
    let x = psi_raw(field, &t.a);
    place_max_product_cmp(field, &x, *b.numer(), *b.denom()) != Ordering::Greater
}

/// `∏_v Ñ_v(T)` as a floating-point number.
pub fn height_f64(field: &Field, t: &TorsorPoint) -> f64 {
    place_max_product_f64(field, &psi_raw(field, &t.a))
}

/// Whether `gcd(a_i, a_j)` is a unit for every nonadjacent pair `{i, j}`.
pub fn coprimality_holds(field: &Field, t: &TorsorPoint) -> bool {
    DynkinData::new()
        .nonadjacent
        .iter()
        .all(|&(i, j)| field.coprime(t.get(i), t.get(j)))
}

/// The inverse of a unit.
pub fn unit_inverse(field: &Field, u: AlgInt) -> Result<AlgInt> {
    if !field.is_unit(u) {
        return Err(Error::Domain(format!("{u} is not a unit")));
    }
    if field.is_rational() {
        return Ok(u);
    }
    let c = field.conj(u);
    Ok(if field.norm(u) == 1 { c } else { -c })
}

/// The action `a_j ↦ u^{m⁽ʲ⁾}·a_j` of `u = (u0, …, u5) ∈ (O_K^×)⁶`.
pub fn apply_unit_action(field: &Field, t: &TorsorPoint, u: &[AlgInt; 6]) -> Result<TorsorPoint> {
    let inv: Vec<AlgInt> = u.iter().map(|&x| unit_inverse(field, x)).collect::<Result<_>>()?;
    let mut a = t.a;
    for (j, row) in DEGREES.iter().enumerate() {
        for (i, &e) in row.iter().enumerate() {
            let base = if e >= 0 { u[i] } else { inv[i] };
            a[j] = field.mul(a[j], field.pow(base, e.unsigned_abs() as u32));
        }
    }
    Ok(TorsorPoint { a })
}
