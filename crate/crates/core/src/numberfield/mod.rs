//! Exact arithmetic in the rings of integers of the supported base fields.
//!
//! Every supported field `K = ℚ(√m)` has class number one and a norm-Euclidean
//! ring of integers `O_K = ℤ[ω]` with `ω = √m` or `ω = (1+√m)/2` (when
//! `m ≡ 1 mod 4`). An element is stored as its coordinate pair `(x, y)` for
//! `x + y·ω`; ℚ is represented with `m = 1` and `y = 0`.
//!
//! All decisions about embedded values (signs, comparisons of absolute values,
//! unit-window membership) are made exactly: a real embedding of an element is
//! `(p + q√m)/t` with integers `p, q` and `t ∈ {1, 2}`, whose sign is decided by
//! comparing `p²` with `q²m`.

mod interval;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use interval::{
    certified_cmp, certified_cmp_with, EmbeddingVector, Interval, PlaceApprox, MAX_PRECISION_BITS, MIN_PRECISION_BITS,
};

use crate::error::{Error, Result};

/// An element `x + y·ω` of the ring of integers.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct AlgInt {
    pub x: i128,
    pub y: i128,
}

impl AlgInt {
    pub const ZERO: AlgInt = AlgInt { x: 0, y: 0 };
    pub const ONE: AlgInt = AlgInt { x: 1, y: 0 };

    pub const fn new(x: i128, y: i128) -> Self {
        AlgInt { x, y }
    }

    /// A rational integer.
    pub const fn int(n: i128) -> Self {
        AlgInt { x: n, y: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl Add for AlgInt {
    type Output = AlgInt;
    fn add(self, o: AlgInt) -> AlgInt {
        AlgInt::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for AlgInt {
    type Output = AlgInt;
    fn sub(self, o: AlgInt) -> AlgInt {
        AlgInt::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for AlgInt {
    type Output = AlgInt;
    fn neg(self) -> AlgInt {
        AlgInt::new(-self.x, -self.y)
    }
}

impl fmt::Display for AlgInt {
    /// `x` when `y = 0`, otherwise `x+yw` / `x-yw` with `w` the ring generator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y == 0 {
            write!(f, "{}", self.x)
        } else if self.y < 0 {
            write!(f, "{}-{}w", self.x, -self.y)
        } else {
            write!(f, "{}+{}w", self.x, self.y)
        }
    }
}

impl FromStr for AlgInt {
    type Err = Error;

    /// Parses the [`fmt::Display`] form: `7`, `-3+2w`, `1-w`, `w`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Domain(format!("cannot parse ring element {s:?}"));
        if let Some(body) = s.strip_suffix('w') {
            // Split at the last sign that is not the leading one.
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i)
                .last();
            let (xs, ys) = match split {
                Some(i) => (&body[..i], &body[i..]),
                None => ("0", body),
            };
            let y = match ys {
                "" | "+" => 1,
                "-" => -1,
                t => t.trim_start_matches('+').parse::<i128>().map_err(|_| bad())?,
            };
            let x = xs.parse::<i128>().map_err(|_| bad())?;
            Ok(AlgInt::new(x, y))
        } else {
            Ok(AlgInt::int(s.parse::<i128>().map_err(|_| bad())?))
        }
    }
}

/// The supported base fields.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum FieldTag {
    Q,
    QI,
    QSqrtM2,
    QSqrtM3,
    QSqrtM7,
    QSqrtM11,
    QSqrt2,
    QSqrt5,
}

impl FieldTag {
    pub const ALL: [FieldTag; 8] = [
        FieldTag::Q,
        FieldTag::QI,
        FieldTag::QSqrtM2,
        FieldTag::QSqrtM3,
        FieldTag::QSqrtM7,
        FieldTag::QSqrtM11,
        FieldTag::QSqrt2,
        FieldTag::QSqrt5,
    ];

    /// The squarefree radicand `m` with `K = ℚ(√m)`; `1` for ℚ.
    pub fn radicand(self) -> i64 {
        match self {
            FieldTag::Q => 1,
            FieldTag::QI => -1,
            FieldTag::QSqrtM2 => -2,
            FieldTag::QSqrtM3 => -3,
            FieldTag::QSqrtM7 => -7,
            FieldTag::QSqrtM11 => -11,
            FieldTag::QSqrt2 => 2,
            FieldTag::QSqrt5 => 5,
        }
    }

    pub fn from_radicand(m: i64) -> Option<FieldTag> {
        FieldTag::ALL.into_iter().find(|t| t.radicand() == m)
    }

    /// Short command-line name: `q`, `qi`, `q-2`, …, `q5`.
    pub fn short_name(self) -> &'static str {
        match self {
            FieldTag::Q => "q",
            FieldTag::QI => "qi",
            FieldTag::QSqrtM2 => "q-2",
            FieldTag::QSqrtM3 => "q-3",
            FieldTag::QSqrtM7 => "q-7",
            FieldTag::QSqrtM11 => "q-11",
            FieldTag::QSqrt2 => "q2",
            FieldTag::QSqrt5 => "q5",
        }
    }

    /// Human-readable name, e.g. `Q(sqrt(-2))`.
    pub fn display_name(self) -> &'static str {
        match self {
            FieldTag::Q => "Q",
            FieldTag::QI => "Q(i)",
            FieldTag::QSqrtM2 => "Q(sqrt(-2))",
            FieldTag::QSqrtM3 => "Q(sqrt(-3))",
            FieldTag::QSqrtM7 => "Q(sqrt(-7))",
            FieldTag::QSqrtM11 => "Q(sqrt(-11))",
            FieldTag::QSqrt2 => "Q(sqrt(2))",
            FieldTag::QSqrt5 => "Q(sqrt(5))",
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FieldTag {
    type Err = Error;

    /// Accepts `q`, `Q`, `qi`, `Q(i)`, `q-2`, `Q(sqrt(-2))`, `Q(√5)`, `q5`, ….
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .to_lowercase()
            .replace("sqrt", "")
            .replace('√', "")
            .chars()
            .filter(|c| !c.is_whitespace() && !matches!(c, '(' | ')'))
            .collect();
        let body = cleaned
            .strip_prefix('q')
            .ok_or_else(|| Error::UnsupportedField(s.to_string()))?;
        let m: i64 = match body {
            "" => 1,
            "i" => -1,
            t => t.parse().map_err(|_| Error::UnsupportedField(s.to_string()))?,
        };
        FieldTag::from_radicand(m).ok_or_else(|| Error::UnsupportedField(s.to_string()))
    }
}

/// Real or complex archimedean place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaceKind {
    Real,
    Complex,
}

impl PlaceKind {
    /// Local degree `d_v = [K_v : ℝ]`.
    pub fn local_degree(self) -> u32 {
        match self {
            PlaceKind::Real => 1,
            PlaceKind::Complex => 2,
        }
    }
}

/// An archimedean place of the field. For real quadratic fields place 0 is
/// `σ₁: √m ↦ +√m` and place 1 is `σ₂: √m ↦ −√m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Place {
    pub index: usize,
    pub kind: PlaceKind,
}

/// Choice of the set of unit-orbit representatives on `K^×`. Both variants
/// are valid half-open fundamental domains; counts must not depend on the
/// choice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitWindow {
    /// ℚ: positive. Imaginary fields: argument in `[0, 2π/|μ_K|)`. Real
    /// quadratic: `σ₁ > 0` and `|σ₂(b)| ≤ |σ₁(b)| < ε²|σ₂(b)|`.
    #[default]
    Standard,
    /// ℚ: negative. Imaginary fields: argument window rotated by `π/|μ_K|`.
    /// Real quadratic: `σ₁ > 0` and `ε⁻¹|σ₂(b)| ≤ |σ₁(b)| < ε|σ₂(b)|`.
    Shifted,
}

/// A supported base field with all constants needed downstream.
#[derive(Clone, Debug)]
pub struct Field {
    pub tag: FieldTag,
    /// Radicand `m` (1 for ℚ).
    pub m: i64,
    pub degree: u32,
    pub r1: u32,
    pub r2: u32,
    /// Discriminant `Δ_K` (1 for ℚ).
    pub disc: i64,
    /// Order of the group of roots of unity.
    pub mu_order: u32,
    /// Whether the ring generator is `(1+√m)/2`.
    pub half_integral: bool,
    /// Fundamental unit `ε > 1` (real quadratic fields only).
    pub fund_unit: Option<AlgInt>,
    /// Regulator `R_K` (`log ε`, or 1 when the unit rank is 0).
    pub regulator: f64,
    pub class_number: u32,
    k: i128,
    roots_of_unity: Vec<AlgInt>,
    fund_unit_inv: Option<AlgInt>,
    sqrt_abs_m: f64,
    places: Vec<Place>,
}

/// Alias matching the terminology of the field table.
pub type FieldDescriptor = Field;

/// Builds the descriptor of a supported field.
pub fn make_field(tag: FieldTag) -> Field {
    Field::new(tag)
}

/// Builds the descriptor of a field given by name (see [`FieldTag::from_str`]).
pub fn make_field_by_name(name: &str) -> Result<Field> {
    Ok(Field::new(name.parse()?))
}

/// Sign of `p + q√m` for `m > 0` not a square.
fn sign_surd(p: i128, q: i128, m: i128) -> Ordering {
    if p >= 0 && q >= 0 {
        return (p + q).cmp(&0);
    }
    if p <= 0 && q <= 0 {
        return Ordering::Less;
    }
    let sq = p.checked_mul(p);
    let rq = q.checked_mul(q).and_then(|v| v.checked_mul(m));
    let diff = match (sq, rq) {
        (Some(a), Some(b)) => a.cmp(&b),
        _ => {
            let a = BigInt::from(p) * BigInt::from(p);
            let b = BigInt::from(q) * BigInt::from(q) * BigInt::from(m);
            a.cmp(&b)
        }
    };
    // p > 0 > q: sign is sign(p² − q²m); p < 0 < q: sign is sign(q²m − p²).
    if p > 0 {
        diff
    } else {
        diff.reverse()
    }
}

fn sign_surd_big(p: &BigInt, q: &BigInt, m: i128) -> Ordering {
    let zero = BigInt::zero();
    if !p.is_negative() && !q.is_negative() {
        return (p + q).cmp(&zero);
    }
    if !p.is_positive() && !q.is_positive() {
        return (p + q).cmp(&zero);
    }
    let diff = (p * p).cmp(&(q * q * BigInt::from(m)));
    if p.is_positive() {
        diff
    } else {
        diff.reverse()
    }
}

impl Field {
    pub fn new(tag: FieldTag) -> Field {
        let m = tag.radicand();
        let is_q = tag == FieldTag::Q;
        let half_integral = !is_q && m.rem_euclid(4) == 1;
        let disc = if is_q {
            1
        } else if half_integral {
            m
        } else {
            4 * m
        };
        let k = if half_integral { ((m - 1) / 4) as i128 } else { 0 };
        let (degree, r1, r2) = if is_q {
            (1, 1, 0)
        } else if m < 0 {
            (2, 0, 1)
        } else {
            (2, 2, 0)
        };
        let mut field = Field {
            tag,
            m,
            degree,
            r1,
            r2,
            disc,
            mu_order: 2,
            half_integral,
            fund_unit: None,
            regulator: 1.0,
            class_number: 1,
            k,
            roots_of_unity: vec![AlgInt::ONE, -AlgInt::ONE],
            fund_unit_inv: None,
            sqrt_abs_m: (m.unsigned_abs() as f64).sqrt(),
            places: Vec::new(),
        };
        let zeta = match tag {
            FieldTag::QI => Some((AlgInt::new(0, 1), 4)),
            // ω = (1+√−3)/2 is a primitive sixth root of unity.
            FieldTag::QSqrtM3 => Some((AlgInt::new(0, 1), 6)),
            _ => None,
        };
        if let Some((z, order)) = zeta {
            let mut powers = vec![AlgInt::ONE];
            for _ in 1..order {
                let last = *powers.last().expect("non-empty");
                powers.push(field.mul(last, z));
            }
            field.roots_of_unity = powers;
            field.mu_order = order;
        }
        let eps = match tag {
            FieldTag::QSqrt2 => Some(AlgInt::new(1, 1)),
            FieldTag::QSqrt5 => Some(AlgInt::new(0, 1)),
            _ => None,
        };
        if let Some(e) = eps {
            let n = field.norm(e);
            let c = field.conj(e);
            field.fund_unit = Some(e);
            field.fund_unit_inv = Some(if n == 1 { c } else { -c });
            field.regulator = field.sigma(e, 0).0.ln();
        }
        field.places = match (r1, r2) {
            (1, 0) => vec![Place { index: 0, kind: PlaceKind::Real }],
            (0, 1) => vec![Place { index: 0, kind: PlaceKind::Complex }],
            _ => vec![
                Place { index: 0, kind: PlaceKind::Real },
                Place { index: 1, kind: PlaceKind::Real },
            ],
        };
        field
    }

    pub fn is_rational(&self) -> bool {
        self.tag == FieldTag::Q
    }

    pub fn is_imaginary(&self) -> bool {
        self.r2 == 1
    }

    pub fn is_real_quadratic(&self) -> bool {
        self.r1 == 2
    }

    /// Unit rank `q = r₁ + r₂ − 1`.
    pub fn unit_rank(&self) -> u32 {
        self.r1 + self.r2 - 1
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn roots_of_unity(&self) -> &[AlgInt] {
        &self.roots_of_unity
    }

    /// `ε` as a real number (in the first embedding).
    pub fn fund_unit_f64(&self) -> Option<f64> {
        self.fund_unit.map(|e| self.sigma(e, 0).0)
    }

    /// Checks `a` lies in the ring representation of this field.
    pub fn contains(&self, a: AlgInt) -> bool {
        !self.is_rational() || a.y == 0
    }

    pub fn mul(&self, a: AlgInt, b: AlgInt) -> AlgInt {
        if self.half_integral {
            AlgInt::new(
                a.x * b.x + self.k * a.y * b.y,
                a.x * b.y + a.y * b.x + a.y * b.y,
            )
        } else {
            AlgInt::new(
                a.x * b.x + self.m as i128 * a.y * b.y,
                a.x * b.y + a.y * b.x,
            )
        }
    }

    pub fn mul_all(&self, factors: &[AlgInt]) -> AlgInt {
        factors.iter().fold(AlgInt::ONE, |acc, &f| self.mul(acc, f))
    }

    pub fn pow(&self, a: AlgInt, e: u32) -> AlgInt {
        let mut result = AlgInt::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        result
    }

    /// Galois conjugate (identity on ℚ).
    pub fn conj(&self, a: AlgInt) -> AlgInt {
        if self.is_rational() {
            a
        } else if self.half_integral {
            AlgInt::new(a.x + a.y, -a.y)
        } else {
            AlgInt::new(a.x, -a.y)
        }
    }

    /// Absolute norm `N_{K/ℚ}(a)`.
    pub fn norm(&self, a: AlgInt) -> i128 {
        if self.is_rational() {
            a.x
        } else if self.half_integral {
            a.x * a.x + a.x * a.y - self.k * a.y * a.y
        } else {
            a.x * a.x - self.m as i128 * a.y * a.y
        }
    }

    pub fn is_unit(&self, a: AlgInt) -> bool {
        self.norm(a).abs() == 1
    }

    /// `(p, q, t)` with `σ(a) = (p + q·√m)/t` where the sign of `q` encodes
    /// the place (`conjugate` selects `σ₂`).
    fn surd_parts(&self, a: AlgInt, conjugate: bool) -> (i128, i128, i128) {
        let (p, q, t) = if self.is_rational() {
            (a.x, 0, 1)
        } else if self.half_integral {
            (2 * a.x + a.y, a.y, 2)
        } else {
            (a.x, a.y, 1)
        };
        if conjugate {
            (p, -q, t)
        } else {
            (p, q, t)
        }
    }

    /// Floating-point value of the embedding at place `v` as `(re, im)`.
    pub fn sigma(&self, a: AlgInt, v: usize) -> (f64, f64) {
        let (p, q, t) = self.surd_parts(a, v == 1);
        let (p, q, t) = (p as f64, q as f64, t as f64);
        if self.m < 0 {
            (p / t, q * self.sqrt_abs_m / t)
        } else {
            ((p + q * self.sqrt_abs_m) / t, 0.0)
        }
    }

    /// Floating-point value of the normalized absolute value `|a|_v`.
    pub fn abs_v(&self, a: AlgInt, v: usize) -> f64 {
        let (re, im) = self.sigma(a, v);
        if self.m < 0 {
            re * re + im * im
        } else {
            re.abs()
        }
    }

    /// Exact sign of a real embedding.
    pub fn sign_real(&self, a: AlgInt, v: usize) -> Ordering {
        debug_assert!(self.m > 0, "sign of a non-real embedding");
        let (p, q, _) = self.surd_parts(a, v == 1);
        if self.is_rational() {
            p.cmp(&0)
        } else {
            sign_surd(p, q, self.m as i128)
        }
    }

    /// Exact comparison of `|a|_v` with `|b|_v`.
    pub fn cmp_abs(&self, a: AlgInt, b: AlgInt, v: usize) -> Ordering {
        if self.is_rational() {
            a.x.abs().cmp(&b.x.abs())
        } else if self.m < 0 {
            self.norm(a).cmp(&self.norm(b))
        } else {
            let d = self.mul(a, a) - self.mul(b, b);
            self.sign_real(d, v)
        }
    }

    /// Exact comparison of `|a|_v` with the rational `num/den` (`den > 0`).
    pub fn cmp_abs_rational(&self, a: AlgInt, v: usize, num: i128, den: i128) -> Ordering {
        debug_assert!(den > 0);
        if self.is_rational() {
            (a.x.abs() * den).cmp(&num)
        } else if self.m < 0 {
            (self.norm(a) * den).cmp(&num)
        } else {
            // |σ(a)| vs num/den  ⇔  σ(den²·a²) vs num².
            let sq = self.mul(a, a);
            let d2 = den * den;
            let lhs = AlgInt::new(sq.x * d2 - num * num, sq.y * d2);
            self.sign_real(lhs, v)
        }
    }

    /// Exact test `|a|_v ≤ bound` for a floating-point bound (taken as the
    /// exact dyadic rational it represents).
    pub fn abs_v_le(&self, a: AlgInt, v: usize, bound: f64) -> bool {
        let approx = self.abs_v(a, v);
        let margin = 1e-9 * (1.0 + bound.abs());
        if approx < bound - margin {
            return true;
        }
        if approx > bound + margin {
            return false;
        }
        let r = BigRational::from_float(bound).expect("finite bound");
        let (num, den) = (r.numer().clone(), r.denom().clone());
        if self.is_rational() {
            BigInt::from(a.x.abs()) * den <= num
        } else if self.m < 0 {
            BigInt::from(self.norm(a)) * den <= num
        } else {
            let (p, q, t) = self.surd_parts(a, v == 1);
            let (p, q, t) = (BigInt::from(p), BigInt::from(q), BigInt::from(t));
            let m = BigInt::from(self.m);
            let d2 = &den * &den;
            // ((p + q√m)/t)² ≤ (num/den)²
            let big_p = (&p * &p + &q * &q * &m) * &d2 - &num * &num * &t * &t;
            let big_q = BigInt::from(2) * &p * &q * &d2;
            sign_surd_big(&big_p, &big_q, self.m as i128) != Ordering::Greater
        }
    }

    /// `ε^k` for any integer `k` (real quadratic fields only).
    pub fn unit_pow(&self, k: i64) -> AlgInt {
        let (e, ei) = (
            self.fund_unit.expect("unit rank 1"),
            self.fund_unit_inv.expect("unit rank 1"),
        );
        if k >= 0 {
            self.pow(e, k as u32)
        } else {
            self.pow(ei, k.unsigned_abs() as u32)
        }
    }

    /// Where `b` lies relative to the real-quadratic unit window.
    fn real_window_position(&self, b: AlgInt, window: UnitWindow) -> Ordering {
        let e = self.fund_unit.expect("unit rank 1");
        let bc = self.conj(b);
        match window {
            UnitWindow::Standard => {
                if self.cmp_abs(b, bc, 0) == Ordering::Less {
                    Ordering::Less
                } else if self.cmp_abs(b, self.mul(self.mul(e, e), bc), 0) != Ordering::Less {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
            UnitWindow::Shifted => {
                if self.cmp_abs(bc, self.mul(e, b), 0) == Ordering::Greater {
                    Ordering::Less
                } else if self.cmp_abs(b, self.mul(e, bc), 0) != Ordering::Less {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    fn imaginary_in_window(&self, b: AlgInt, window: UnitWindow) -> bool {
        // Scaled real and imaginary parts, with the correct signs.
        let re = if self.half_integral { 2 * b.x + b.y } else { b.x };
        let im = b.y;
        match (self.mu_order, window) {
            (4, UnitWindow::Standard) => re > 0 && im >= 0,
            (4, UnitWindow::Shifted) => im >= re && im > -re,
            (6, UnitWindow::Standard) => b.y >= 0 && b.x > 0,
            (6, UnitWindow::Shifted) => b.y >= b.x && 2 * b.x + b.y > 0,
            (_, UnitWindow::Standard) => im > 0 || (im == 0 && re > 0),
            (_, UnitWindow::Shifted) => re < 0 || (re == 0 && im > 0),
        }
    }

    /// Returns `(b, u)` with `b = u·a` the representative of the unit orbit of
    /// `a` in `window`, and `u` a unit.
    pub fn canonicalize_with_unit(&self, a: AlgInt, window: UnitWindow) -> Result<(AlgInt, AlgInt)> {
        if a.is_zero() {
            return Err(Error::Domain("canonical associate of 0".into()));
        }
        if self.is_rational() {
            let positive = a.x > 0;
            let want_positive = window == UnitWindow::Standard;
            return Ok(if positive == want_positive {
                (a, AlgInt::ONE)
            } else {
                (-a, -AlgInt::ONE)
            });
        }
        if self.m < 0 {
            for &u in &self.roots_of_unity {
                let b = self.mul(u, a);
                if self.imaginary_in_window(b, window) {
                    return Ok((b, u));
                }
            }
            return Err(Error::Internal(format!("no associate of {a} in the unit window")));
        }
        let le = self.regulator;
        let (s1, s2) = (self.abs_v(a, 0), self.abs_v(a, 1));
        let r = 0.5 * (s1.ln() - s2.ln());
        let offset = match window {
            UnitWindow::Standard => 0.0,
            UnitWindow::Shifted => -0.5,
        };
        let k = (r / le - offset).floor() as i64;
        let mut u = self.unit_pow(-k);
        let mut b = self.mul(u, a);
        let (e, ei) = (self.fund_unit.expect("rank 1"), self.fund_unit_inv.expect("rank 1"));
        for _ in 0..64 {
            match self.real_window_position(b, window) {
                Ordering::Equal => {
                    if self.sign_real(b, 0) == Ordering::Less {
                        return Ok((-b, -u));
                    }
                    return Ok((b, u));
                }
                Ordering::Less => {
                    b = self.mul(b, e);
                    u = self.mul(u, e);
                }
                Ordering::Greater => {
                    b = self.mul(b, ei);
                    u = self.mul(u, ei);
                }
            }
        }
        Err(Error::Internal(format!("unit window search did not converge for {a}")))
    }

    /// The canonical associate of `a` in the standard window.
    pub fn canonical_associate(&self, a: AlgInt) -> Result<AlgInt> {
        self.canonical_associate_in(a, UnitWindow::Standard)
    }

    pub fn canonical_associate_in(&self, a: AlgInt, window: UnitWindow) -> Result<AlgInt> {
        Ok(self.canonicalize_with_unit(a, window)?.0)
    }

    /// Whether `a` is its own canonical associate.
    pub fn is_canonical(&self, a: AlgInt, window: UnitWindow) -> bool {
        if a.is_zero() {
            return false;
        }
        if self.is_rational() {
            return (a.x > 0) == (window == UnitWindow::Standard);
        }
        if self.m < 0 {
            return self.imaginary_in_window(a, window);
        }
        self.sign_real(a, 0) == Ordering::Greater
            && self.real_window_position(a, window) == Ordering::Equal
    }

    /// Whether `a` is the representative of its orbit under the roots of
    /// unity only: positive over ℚ (sign per window), in the argument window
    /// for imaginary fields, `σ₁(a) > 0` for real quadratic fields.
    pub fn is_mu_canonical(&self, a: AlgInt, window: UnitWindow) -> bool {
        if a.is_zero() {
            return false;
        }
        if self.m > 0 && !self.is_rational() {
            return self.sign_real(a, 0) == Ordering::Greater;
        }
        self.is_canonical(a, window)
    }

    /// Quotient of `a` by `b` rounded to a nearby ring element minimizing the
    /// norm of the remainder (the Euclidean step).
    pub fn div_round(&self, a: AlgInt, b: AlgInt) -> AlgInt {
        if self.is_rational() {
            let (q, r) = a.x.div_mod_floor(&b.x);
            return if 2 * r.abs() > b.x.abs() {
                AlgInt::int(q + b.x.signum() * r.signum())
            } else {
                AlgInt::int(q)
            };
        }
        let n = self.norm(b);
        let num = self.mul(a, self.conj(b));
        let (qx, qy) = (Integer::div_floor(&num.x, &n), Integer::div_floor(&num.y, &n));
        let mut best = AlgInt::new(qx, qy);
        let mut best_norm = i128::MAX;
        for dy in -1..=2 {
            for dx in -1..=2 {
                let q = AlgInt::new(qx + dx, qy + dy);
                let r = a - self.mul(q, b);
                let rn = self.norm(r).abs();
                if rn < best_norm {
                    best_norm = rn;
                    best = q;
                }
            }
        }
        best
    }

    /// Canonical generator of the ideal `(a, b)`.
    pub fn gcd(&self, a: AlgInt, b: AlgInt) -> Result<AlgInt> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Domain("gcd(0, 0)".into()));
        }
        if self.is_rational() {
            return Ok(AlgInt::int(a.x.gcd(&b.x)));
        }
        let (mut a, mut b) = (a, b);
        while !b.is_zero() {
            let q = self.div_round(a, b);
            let r = a - self.mul(q, b);
            debug_assert!(self.norm(r).abs() < self.norm(b).abs(), "Euclidean step failed");
            a = b;
            b = r;
        }
        self.canonical_associate(a)
    }

    /// Whether the ideal `(a, b)` is the unit ideal.
    pub fn coprime(&self, a: AlgInt, b: AlgInt) -> bool {
        if self.is_rational() {
            return a.x.gcd(&b.x) == 1;
        }
        match self.gcd(a, b) {
            Ok(g) => self.is_unit(g),
            Err(_) => false,
        }
    }

    /// Exact quotient `a/b`, or `None` if `b` does not divide `a`.
    pub fn exact_divide(&self, a: AlgInt, b: AlgInt) -> Result<Option<AlgInt>> {
        if b.is_zero() {
            return Err(Error::Domain("division by 0".into()));
        }
        if self.is_rational() {
            let (q, r) = a.x.div_rem(&b.x);
            return Ok((r == 0).then_some(AlgInt::int(q)));
        }
        let n = self.norm(b);
        let num = self.mul(a, self.conj(b));
        if num.x % n == 0 && num.y % n == 0 {
            Ok(Some(AlgInt::new(num.x / n, num.y / n)))
        } else {
            Ok(None)
        }
    }

    /// Whether `b | a` (with `0 | a` iff `a = 0`).
    pub fn divides(&self, b: AlgInt, a: AlgInt) -> bool {
        if b.is_zero() {
            return a.is_zero();
        }
        matches!(self.exact_divide(a, b), Ok(Some(_)))
    }

    /// All nonzero ring elements with `|a|_v ≤ bounds[v]` at every place.
    pub fn enumerate_box(&self, bounds: &[f64]) -> Vec<AlgInt> {
        self.box_elements(bounds, false)
    }

    /// As [`Field::enumerate_box`], optionally including 0. Elements are
    /// produced in increasing `(y, x)` order.
    pub fn box_elements(&self, bounds: &[f64], include_zero: bool) -> Vec<AlgInt> {
        assert_eq!(bounds.len(), self.places.len(), "one bound per archimedean place");
        assert!(
            bounds.iter().all(|b| b.is_finite()),
            "enumeration bounds must be finite"
        );
        let mut out = Vec::new();
        if bounds.iter().any(|&b| b < 0.0) {
            return out;
        }
        let fl = |v: f64| v.floor() as i128 - 1;
        let ce = |v: f64| v.ceil() as i128 + 1;
        let push = |a: AlgInt, out: &mut Vec<AlgInt>| {
            if (include_zero || !a.is_zero())
                && (0..bounds.len()).all(|v| self.abs_v_le(a, v, bounds[v]))
            {
                out.push(a);
            }
        };
        if self.is_rational() {
            let b = bounds[0];
            for x in fl(-b)..=ce(b) {
                push(AlgInt::int(x), &mut out);
            }
            return out;
        }
        let s = self.sqrt_abs_m;
        if self.m < 0 {
            let r = bounds[0].sqrt();
            let ymax = if self.half_integral { 2.0 * r / s } else { r / s };
            for y in fl(-ymax)..=ce(ymax) {
                let shift = if self.half_integral { y as f64 / 2.0 } else { 0.0 };
                for x in fl(-r - shift)..=ce(r - shift) {
                    push(AlgInt::new(x, y), &mut out);
                }
            }
            return out;
        }
        let (b1, b2) = (bounds[0], bounds[1]);
        let ymax = if self.half_integral { (b1 + b2) / s } else { (b1 + b2) / (2.0 * s) };
        for y in fl(-ymax)..=ce(ymax) {
            let yf = y as f64;
            let (c1, c2) = if self.half_integral {
                (yf * (1.0 + s) / 2.0, yf * (1.0 - s) / 2.0)
            } else {
                (yf * s, -yf * s)
            };
            let lo = (-b1 - c1).max(-b2 - c2);
            let hi = (b1 - c1).min(b2 - c2);
            if lo > hi + 2.0 {
                continue;
            }
            for x in fl(lo)..=ce(hi) {
                push(AlgInt::new(x, y), &mut out);
            }
        }
        out
    }

    /// Interval enclosures of all embeddings of `a` at `bits` of precision.
    pub fn embed(&self, a: AlgInt, bits: u32) -> EmbeddingVector {
        let places = if self.is_rational() {
            vec![PlaceApprox::Real(Interval::from_int(a.x, bits))]
        } else {
            let root = Interval::sqrt_int(self.m.unsigned_abs(), bits);
            let (p, q, t) = self.surd_parts(a, false);
            let pi = Interval::from_int(p, bits);
            let qi = root.mul_int(q);
            let scale = |iv: Interval| if t == 2 { iv.half() } else { iv };
            if self.m < 0 {
                vec![PlaceApprox::Complex { re: scale(pi), im: scale(qi) }]
            } else {
                vec![
                    PlaceApprox::Real(scale(pi.add(&qi))),
                    PlaceApprox::Real(scale(pi.sub(&qi))),
                ]
            }
        };
        EmbeddingVector { places, precision_bits: bits }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        self.tag == other.tag
    }
}

impl Eq for Field {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_table() {
        let q = make_field(FieldTag::Q);
        assert_eq!((q.degree, q.r1, q.r2, q.disc, q.mu_order), (1, 1, 0, 1, 2));
        assert_eq!(q.regulator, 1.0);
        let qi = make_field(FieldTag::QI);
        assert_eq!((qi.degree, qi.r1, qi.r2, qi.disc, qi.mu_order), (2, 0, 1, -4, 4));
        let q2 = make_field(FieldTag::QSqrt2);
        assert_eq!((q2.disc, q2.fund_unit), (8, Some(AlgInt::new(1, 1))));
        assert!((q2.regulator - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
        let q5 = make_field(FieldTag::QSqrt5);
        assert_eq!(q5.disc, 5);
        assert!((q5.regulator - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-15);
        let discs: Vec<i64> = FieldTag::ALL.iter().map(|&t| make_field(t).disc).collect();
        assert_eq!(discs, vec![1, -4, -8, -3, -7, -11, 8, 5]);
        let mus: Vec<u32> = FieldTag::ALL.iter().map(|&t| make_field(t).mu_order).collect();
        assert_eq!(mus, vec![2, 4, 2, 6, 2, 2, 2, 2]);
    }

    #[test]
    fn roots_of_unity_have_norm_one_and_are_distinct() {
        for tag in FieldTag::ALL {
            let f = make_field(tag);
            let mut roots = f.roots_of_unity().to_vec();
            assert!(roots.iter().all(|&u| f.is_unit(u)));
            roots.sort();
            roots.dedup();
            assert_eq!(roots.len() as u32, f.mu_order);
        }
    }

    #[test]
    fn parse_field_names() {
        for tag in FieldTag::ALL {
            assert_eq!(tag.short_name().parse::<FieldTag>().unwrap(), tag);
            assert_eq!(tag.display_name().parse::<FieldTag>().unwrap(), tag);
        }
        assert_eq!("Q(√5)".parse::<FieldTag>().unwrap(), FieldTag::QSqrt5);
        let err = "Q(sqrt(-5))".parse::<FieldTag>().unwrap_err();
        assert!(matches!(err, Error::UnsupportedField(_)));
        assert!(err.to_string().contains("class-number-one"));
        assert!(make_field_by_name("q10").is_err());
    }

    #[test]
    fn algint_text_round_trip() {
        for a in [AlgInt::new(3, 0), AlgInt::new(-3, 2), AlgInt::new(1, -1), AlgInt::new(0, 1), AlgInt::new(0, -7)] {
            assert_eq!(a.to_string().parse::<AlgInt>().unwrap(), a);
        }
    }

    #[test]
    fn sign_surd_cases() {
        assert_eq!(sign_surd(1, 1, 2), Ordering::Greater);
        assert_eq!(sign_surd(-1, -1, 2), Ordering::Less);
        assert_eq!(sign_surd(0, 0, 2), Ordering::Equal);
        assert_eq!(sign_surd(2, -1, 2), Ordering::Greater); // 2 − √2
        assert_eq!(sign_surd(1, -1, 2), Ordering::Less); // 1 − √2
        assert_eq!(sign_surd(-3, 2, 2), Ordering::Less); // −3 + 2√2
        assert_eq!(sign_surd(-2, 2, 2), Ordering::Greater); // −2 + 2√2
    }

    #[test]
    fn worked_examples_gcd_and_division() {
        let q = make_field(FieldTag::Q);
        assert_eq!(q.gcd(AlgInt::int(12), AlgInt::int(18)).unwrap(), AlgInt::int(6));
        assert_eq!(q.exact_divide(AlgInt::int(6), AlgInt::int(3)).unwrap(), Some(AlgInt::int(2)));
        assert_eq!(q.exact_divide(AlgInt::int(5), AlgInt::int(3)).unwrap(), None);
        assert!(q.gcd(AlgInt::ZERO, AlgInt::ZERO).is_err());
        assert!(q.exact_divide(AlgInt::int(1), AlgInt::ZERO).is_err());

        let qi = make_field(FieldTag::QI);
        let one_plus_i = AlgInt::new(1, 1);
        let g = qi.gcd(one_plus_i, AlgInt::int(2)).unwrap();
        assert_eq!(g, qi.canonical_associate(one_plus_i).unwrap());
        assert_eq!(g, one_plus_i);
        assert_eq!(qi.exact_divide(AlgInt::int(2), one_plus_i).unwrap(), Some(AlgInt::new(1, -1)));

        let q2 = make_field(FieldTag::QSqrt2);
        let r2 = AlgInt::new(0, 1);
        assert_eq!(q2.gcd(r2, AlgInt::int(2)).unwrap(), q2.canonical_associate(r2).unwrap());
    }

    #[test]
    fn worked_examples_canonical_associate() {
        let q = make_field(FieldTag::Q);
        assert_eq!(q.canonical_associate(AlgInt::int(-7)).unwrap(), AlgInt::int(7));
        let qi = make_field(FieldTag::QI);
        assert_eq!(qi.canonical_associate(AlgInt::new(0, 2)).unwrap(), AlgInt::int(2));
        let q2 = make_field(FieldTag::QSqrt2);
        assert_eq!(q2.canonical_associate(AlgInt::new(1, 1)).unwrap(), AlgInt::ONE);
        assert!(q2.canonical_associate(AlgInt::ZERO).is_err());
    }

    #[test]
    fn worked_examples_enumerate_box() {
        let q = make_field(FieldTag::Q);
        let got: Vec<i128> = q.enumerate_box(&[3.5]).iter().map(|a| a.x).collect();
        assert_eq!(got, vec![-3, -2, -1, 1, 2, 3]);
        let qi = make_field(FieldTag::QI);
        let mut got = qi.enumerate_box(&[1.0]);
        got.sort();
        assert_eq!(got, vec![AlgInt::new(-1, 0), AlgInt::new(0, -1), AlgInt::new(0, 1), AlgInt::new(1, 0)]);
        let q2 = make_field(FieldTag::QSqrt2);
        let got = q2.enumerate_box(&[2.0, 2.0]);
        let s = 2f64.sqrt();
        let mut naive = Vec::new();
        for y in -4i128..=4 {
            for x in -4i128..=4 {
                let (a, b) = (x as f64 + y as f64 * s, x as f64 - y as f64 * s);
                if (x, y) != (0, 0) && a.abs() <= 2.0 + 1e-12 && b.abs() <= 2.0 + 1e-12 {
                    naive.push(AlgInt::new(x, y));
                }
            }
        }
        assert_eq!(got, naive);
        // (±2, 0) lie exactly on the boundary and must be included.
        assert!(got.contains(&AlgInt::int(2)) && got.contains(&AlgInt::int(-2)));
    }

    #[test]
    fn fundamental_unit_is_minimal() {
        // Every unit > 1 with small embeddings is a power of ε.
        for tag in [FieldTag::QSqrt2, FieldTag::QSqrt5] {
            let f = make_field(tag);
            let eps = f.fund_unit_f64().unwrap();
            for a in f.enumerate_box(&[50.0, 50.0]) {
                if f.is_unit(a) && f.sigma(a, 0).0 > 1.0 + 1e-12 {
                    assert!(f.sigma(a, 0).0 >= eps - 1e-12, "{tag}: unit {a} below ε");
                }
            }
        }
    }

    #[test]
    fn embedding_intervals_enclose_float_values() {
        for tag in FieldTag::ALL {
            let f = make_field(tag);
            let a = if f.is_rational() { AlgInt::int(-5) } else { AlgInt::new(3, -7) };
            let ev = f.embed(a, 128);
            for v in 0..f.places().len() {
                let iv = ev.abs_v(v);
                let val = f.abs_v(a, v);
                assert!(iv.lo_f64() <= val * (1.0 + 1e-14) && iv.hi_f64() >= val * (1.0 - 1e-14));
                assert!(iv.radius_f64() < 1e-25);
            }
        }
    }
}
