//! The surface `S: x0x3 − x2x4 = x0x1 + x1x3 + x2² = 0` in `P⁴`, its lines,
//! the anticanonical height, the configuration of curves on the minimal
//! desingularization, and point counts over finite fields.
//!
//! # Height
//!
//! For a content-free integral representative only the archimedean places
//! contribute: `H(x) = ∏_{v|∞} max_i |x_i|_v`, with `|·|_v` the ordinary
//! absolute value at a real place and the squared modulus at a complex place.
//! For a representative with content `g`, `H(x) = ∏_v max_i |x_i|_v / |N(g)|`.
//!
//! # Points over finite fields
//!
//! `S` has two singular points, `(0:0:0:0:1)` of type A₃ and `(0:1:0:0:0)` of
//! type A₁. Over `F_p` the singular surface has `p² + 2p + 1` points; the
//! minimal desingularization replaces the two singular points by chains of
//! three and one projective lines meeting in points, contributing
//! `(3p + 1) + (p + 1) − 2 = 4p` additional points, so that
//! `|S̃(F_p)| = p² + 6p + 1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numberfield::{certified_cmp_with, AlgInt, Field, Interval, UnitWindow, MAX_PRECISION_BITS};
use crate::rational::Rational;

/// A point of `P⁴(K)` given by integral coordinates. Equality and ordering
/// compare the coordinate vectors, so two representatives of the same point
/// are equal only after canonicalization.
#[derive(Clone, Copy, Debug)]
pub struct ProjPoint {
    coords: [AlgInt; 5],
    canonical: bool,
}

impl ProjPoint {
    /// An arbitrary nonzero integral representative.
    pub fn new(coords: [AlgInt; 5]) -> Result<ProjPoint> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(Error::Domain("the zero vector is not a projective point".into()));
        }
        Ok(ProjPoint { coords, canonical: false })
    }

    /// Convenience constructor over ℚ.
    pub fn from_ints(xs: [i128; 5]) -> Result<ProjPoint> {
        ProjPoint::new(xs.map(AlgInt::int))
    }

    /// The canonical representative: content removed, then the vector scaled
    /// by the unit that makes its first nonzero coordinate a canonical
    /// associate.
    pub fn canonical(field: &Field, coords: [AlgInt; 5]) -> Result<ProjPoint> {
        ProjPoint::new(coords)?;
        let g = content(field, &coords)?;
        let mut out = [AlgInt::ZERO; 5];
        for (o, &c) in out.iter_mut().zip(coords.iter()) {
            *o = field
                .exact_divide(c, g)?
                .ok_or_else(|| Error::Internal("content does not divide a coordinate".into()))?;
        }
        let first = *out.iter().find(|c| !c.is_zero()).expect("nonzero point");
        let (_, u) = field.canonicalize_with_unit(first, UnitWindow::Standard)?;
        for o in out.iter_mut() {
            *o = field.mul(*o, u);
        }
        Ok(ProjPoint { coords: out, canonical: true })
    }

    pub fn canonicalize(&self, field: &Field) -> Result<ProjPoint> {
        ProjPoint::canonical(field, self.coords)
    }

    pub fn coords(&self) -> &[AlgInt; 5] {
        &self.coords
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for ProjPoint {}

impl std::hash::Hash for ProjPoint {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl PartialOrd for ProjPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ProjPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

/// Canonical generator of the ideal generated by the coordinates.
pub fn content(field: &Field, coords: &[AlgInt]) -> Result<AlgInt> {
    let mut g = AlgInt::ZERO;
    for &c in coords {
        if !c.is_zero() {
            g = if g.is_zero() { field.canonical_associate(c)? } else { field.gcd(g, c)? };
        }
    }
    if g.is_zero() {
        return Err(Error::Domain("content of the zero vector".into()));
    }
    Ok(g)
}

/// The two quadrics `(x0x3 − x2x4, x0x1 + x1x3 + x2²)`.
pub fn quadrics(field: &Field, x: &[AlgInt; 5]) -> (AlgInt, AlgInt) {
    let m = |a, b| field.mul(a, b);
    let h1 = m(x[0], x[3]) - m(x[2], x[4]);
    let h2 = m(x[0], x[1]) + m(x[1], x[3]) + m(x[2], x[2]);
    (h1, h2)
}

/// Whether both quadrics vanish.
pub fn on_surface(field: &Field, p: &ProjPoint) -> bool {
    let (h1, h2) = quadrics(field, p.coords());
    h1.is_zero() && h2.is_zero()
}

/// Whether the point lies on the union of the lines of `S`:
/// `x2 = 0` and `x0x1 = x0x3 = x1x3 = 0`.
pub fn on_lines(p: &ProjPoint) -> bool {
    let x = p.coords();
    // In an integral domain a product vanishes iff a factor does.
    let z = |i: usize| x[i].is_zero();
    z(2) && (z(0) || z(1)) && (z(0) || z(3)) && (z(1) || z(3))
}

/// Membership in the open subset `U = S ∖ lines`.
pub fn in_u(field: &Field, p: &ProjPoint) -> bool {
    on_surface(field, p) && !on_lines(p)
}

/// Exact comparison of `∏_v max_i |x_i|_v` with `num/den` (`den > 0`).
pub fn place_max_product_cmp(field: &Field, x: &[AlgInt], num: i128, den: i128) -> Ordering {
    if field.is_real_quadratic() {
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
        // |σ₁(m1)|·|σ₂(m2)| = |σ₁(m1 · conj(m2))|.
        let gamma = field.mul(m1, field.conj(m2));
        field.cmp_abs_rational(gamma, 0, num, den)
    } else {
        let max = x
            .iter()
            .map(|&c| if field.is_rational() { c.x.abs() } else { field.norm(c) })
            .max()
            .unwrap_or(0);
        (max * den).cmp(&num)
    }
}

/// Floating-point value of `∏_v max_i |x_i|_v`.
pub fn place_max_product_f64(field: &Field, x: &[AlgInt]) -> f64 {
    (0..field.places().len())
        .map(|v| x.iter().map(|&c| field.abs_v(c, v)).fold(0.0, f64::max))
        .product()
}

/// Result of comparing a height with a bound.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightComparison {
    /// `H(P)` compared with `B`.
    pub ordering: Ordering,
    /// The exact height when it is a rational number (always over ℚ and over
    /// imaginary quadratic fields).
    pub exact: Option<Rational>,
    /// Floating-point approximation of `H(P)`.
    pub approx: f64,
    /// Whether the interval comparison had to be settled exactly.
    pub exact_fallback: bool,
}

impl HeightComparison {
    pub fn within(&self) -> bool {
        self.ordering != Ordering::Greater
    }
}

fn height_interval(field: &Field, x: &[AlgInt; 5], g_norm: i128, bits: u32) -> Result<Interval> {
    let embeddings: Vec<_> = x.iter().map(|&c| field.embed(c, bits)).collect();
    let mut h = Interval::from_int(1, bits);
    for v in 0..field.places().len() {
        let mut m = Interval::from_int(0, bits);
        for e in &embeddings {
            m = m.max(&e.abs_v(v));
        }
        h = h.mul(&m);
    }
    h.div(&Interval::from_int(g_norm.abs(), bits))
}

/// Compares `H(P)` with `B` for any integral representative `P`.
///
/// The comparison is first attempted with interval arithmetic (doubling the
/// precision up to 1024 bits); when the enclosure cannot separate `H(P)` from
/// `B` — which happens exactly at ties `H(P) = B` — it is settled by an exact
/// algebraic comparison. Boundary points are included (`H ≤ B`).
pub fn height(field: &Field, p: &ProjPoint, b: &Rational) -> Result<HeightComparison> {
    height_with_precision(field, p, b, MAX_PRECISION_BITS)
}

/// [`height`] with the interval stage capped at `max_bits` of precision.
pub fn height_with_precision(field: &Field, p: &ProjPoint, b: &Rational, max_bits: u32) -> Result<HeightComparison> {
    let x = p.coords();
    let g = content(field, x)?;
    let g_norm = field.norm(g).abs();
    let approx = place_max_product_f64(field, x) / g_norm as f64;
    let exact = if field.is_real_quadratic() {
        None
    } else {
        let max = x
            .iter()
            .map(|&c| if field.is_rational() { c.x.abs() } else { field.norm(c) })
            .max()
            .unwrap_or(0);
        Some(Rational::new(max, g_norm))
    };
    let target = BigRational::new(BigInt::from(*b.numer()), BigInt::from(*b.denom()));
    let certified = certified_cmp_with(&target, "height comparison", max_bits, |bits| {
        height_interval(field, x, g_norm, bits)
    });
    let (ordering, exact_fallback) = match certified {
        Ok(o) => (o, false),
        Err(Error::PrecisionExhausted { .. }) => {
            let num = b.numer().checked_mul(g_norm).ok_or_else(|| {
                Error::Internal("height bound overflow in exact comparison".into())
            })?;
            (place_max_product_cmp(field, x, num, *b.denom()), true)
        }
        Err(e) => return Err(e),
    };
    Ok(HeightComparison { ordering, exact, approx, exact_fallback })
}

/// A divisor class in the basis `ℓ₀, …, ℓ₅` of the Picard group of the
/// minimal desingularization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass(pub [i64; 6]);

/// Classes of `E₁, …, E₉` (index `i − 1`).
pub const E_CLASSES: [DivisorClass; 9] = [
    DivisorClass([0, 0, 0, 0, 0, 1]),
    DivisorClass([0, 0, 0, 0, 1, 0]),
    DivisorClass([0, 1, -1, 0, 0, 0]),
    DivisorClass([0, 0, 1, -1, 0, 0]),
    DivisorClass([0, 0, 0, 1, 0, 0]),
    DivisorClass([1, -1, 0, 0, -1, -1]),
    DivisorClass([1, -1, -1, -1, 0, 0]),
    DivisorClass([1, 0, 0, 0, -1, 0]),
    DivisorClass([1, 0, 0, 0, 0, -1]),
];

/// Edges of the configuration graph of `E₁, …, E₉`, 1-based.
pub const CONFIGURATION_EDGES: [(usize, usize); 11] = [
    (1, 6),
    (2, 6),
    (3, 6),
    (3, 4),
    (4, 5),
    (5, 7),
    (7, 8),
    (7, 9),
    (8, 9),
    (1, 9),
    (2, 8),
];

/// The intersection form `ℓ₀² = 1`, `ℓᵢ² = −1`, `ℓᵢ·ℓⱼ = 0` (`i ≠ j`).
pub fn intersection_number(a: &DivisorClass, b: &DivisorClass) -> i64 {
    a.0[0] * b.0[0] - (1..6).map(|i| a.0[i] * b.0[i]).sum::<i64>()
}

/// The nine classes, their intersection matrix and adjacency data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynkinData {
    pub classes: [DivisorClass; 9],
    pub matrix: [[i64; 9]; 9],
    /// Unordered pairs `{i, j}` (1-based, `i < j`) with `Eᵢ·Eⱼ = 0`.
    pub nonadjacent: Vec<(usize, usize)>,
    /// Unordered pairs (1-based, `i < j`) with `Eᵢ·Eⱼ ≥ 1`.
    pub adjacent: Vec<(usize, usize)>,
}

impl DynkinData {
    pub fn new() -> DynkinData {
        let mut matrix = [[0; 9]; 9];
        for i in 0..9 {
            for j in 0..9 {
                matrix[i][j] = intersection_number(&E_CLASSES[i], &E_CLASSES[j]);
            }
        }
        let mut nonadjacent = Vec::new();
        let mut adjacent = Vec::new();
        for i in 0..9 {
            for j in i + 1..9 {
                if matrix[i][j] == 0 {
                    nonadjacent.push((i + 1, j + 1));
                } else if matrix[i][j] >= 1 {
                    adjacent.push((i + 1, j + 1));
                }
            }
        }
        DynkinData { classes: E_CLASSES, matrix, nonadjacent, adjacent }
    }
}

impl Default for DynkinData {
    fn default() -> Self {
        DynkinData::new()
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat inverse; p is prime and a ≠ 0 mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if p > 1000 {
        return Err(Error::Domain(format!("p = {p} exceeds the supported range p ≤ 1000")));
    }
    Ok(())
}

/// `|S(F_p)|`, computed by counting the solutions of both quadrics in `F_p⁵`
/// and dividing by the scalings. Each quadric is linear in one variable
/// (`x0` in the second, `x4` in the first), which is eliminated exactly; the
/// remaining three coordinates are scanned in full, in parallel over `x1`.
pub fn count_fp(p: u64) -> Result<u64> {
    check_prime(p)?;
    let affine: u64 = (0..p)
        .into_par_iter()
        .map(|x1| {
            let mut acc = 0u64;
            for x2 in 0..p {
                for x3 in 0..p {
                    // Solutions x0 of x0·x1 + x1·x3 + x2² = 0.
                    let x0s: Vec<u64> = if x1 != 0 {
                        let rhs = (p - (x1 * x3 + x2 * x2) % p) % p;
                        vec![rhs * inv_mod(x1, p) % p]
                    } else if x2 == 0 {
                        (0..p).collect()
                    } else {
                        Vec::new()
                    };
                    for x0 in x0s {
                        // Solutions x4 of x2·x4 = x0·x3.
                        acc += if x2 != 0 {
                            1
                        } else if x0 * x3 % p == 0 {
                            p
                        } else {
                            0
                        };
                    }
                }
            }
            acc
        })
        .sum();
    // Remove the origin and divide by the p − 1 scalings.
    Ok((affine - 1) / (p - 1))
}

/// `|S(F_p)|` by a plain scan of all points of `P⁴(F_p)` (first nonzero
/// coordinate normalized to 1); feasible for small `p` only.
pub fn count_fp_bruteforce(p: u64) -> Result<u64> {
    check_prime(p)?;
    let mut count = 0;
    for lead in 0..5 {
        let free = 4 - lead;
        let total = p.pow(free as u32);
        for idx in 0..total {
            let mut x = [0u64; 5];
            x[lead] = 1;
            let mut r = idx;
            for c in x.iter_mut().skip(lead + 1) {
                *c = r % p;
                r /= p;
            }
            let h1 = (x[0] * x[3] % p + p - x[2] * x[4] % p) % p;
            let h2 = (x[0] * x[1] + x[1] * x[3] + x[2] * x[2]) % p;
            if h1 == 0 && h2 == 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};

    fn q() -> Field {
        make_field(FieldTag::Q)
    }

    #[test]
    fn worked_examples_on_surface() {
        let f = q();
        assert!(on_surface(&f, &ProjPoint::from_ints([0, 1, 0, 0, 0]).unwrap()));
        assert!(on_surface(&f, &ProjPoint::from_ints([2, -1, 2, 2, 2]).unwrap()));
        let p = ProjPoint::from_ints([1, 1, 1, 1, 1]).unwrap();
        assert!(!on_surface(&f, &p));
        assert_eq!(quadrics(&f, p.coords()).1, AlgInt::int(3));
    }

    #[test]
    fn worked_examples_on_lines() {
        assert!(on_lines(&ProjPoint::from_ints([0, 0, 0, 0, 1]).unwrap()));
        assert!(on_lines(&ProjPoint::from_ints([0, 1, 0, 0, 1]).unwrap()));
        assert!(!on_lines(&ProjPoint::from_ints([2, -1, 2, 2, 2]).unwrap()));
    }

    #[test]
    fn worked_examples_height() {
        let f = q();
        let h = height(&f, &ProjPoint::from_ints([1, -1, 1, 0, 0]).unwrap(), &Rational::from_integer(1)).unwrap();
        assert_eq!(h.exact, Some(Rational::from_integer(1)));
        assert_eq!(h.ordering, Ordering::Equal);
        let h = height(&f, &ProjPoint::from_ints([2, -1, 2, 2, 2]).unwrap(), &Rational::from_integer(3)).unwrap();
        assert_eq!(h.exact, Some(Rational::from_integer(2)));
        assert!(h.within());
        let qi = make_field(FieldTag::QI);
        let p = ProjPoint::new([AlgInt::ZERO, AlgInt::ONE, AlgInt::new(0, 1), AlgInt::int(-1), AlgInt::ZERO]).unwrap();
        let h = height(&qi, &p, &Rational::from_integer(1)).unwrap();
        assert_eq!(h.exact, Some(Rational::from_integer(1)));
        assert!(h.within());
    }

    #[test]
    fn height_of_non_primitive_representative() {
        let f = q();
        let p = ProjPoint::from_ints([4, -2, 4, 4, 4]).unwrap();
        let h = height(&f, &p, &Rational::from_integer(2)).unwrap();
        assert_eq!(h.exact, Some(Rational::from_integer(2)));
        assert_eq!(h.ordering, Ordering::Equal);
    }

    #[test]
    fn irrational_tie_falls_back_to_exact_comparison() {
        let f = make_field(FieldTag::QSqrt2);
        let eps = f.fund_unit.unwrap();
        // max |x|_v is ε at σ₁ and 1/ε at σ₂: the product is exactly 1.
        let p = ProjPoint::new([AlgInt::ZERO, eps, AlgInt::ZERO, AlgInt::ZERO, AlgInt::ZERO]).unwrap();
        let h = height(&f, &p, &Rational::from_integer(1)).unwrap();
        assert_eq!(h.ordering, Ordering::Equal);
        assert!(h.exact_fallback, "a tie cannot be separated by intervals");
        let h = height(&f, &p, &Rational::new(99, 100)).unwrap();
        assert_eq!(h.ordering, Ordering::Greater);
        assert!(!h.exact_fallback);
    }

    #[test]
    fn canonical_form_is_unique() {
        let f = q();
        let a = ProjPoint::canonical(&f, [-4, 2, -4, -4, -4].map(AlgInt::int)).unwrap();
        let b = ProjPoint::canonical(&f, [2, -1, 2, 2, 2].map(AlgInt::int)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coords(), &[2, -1, 2, 2, 2].map(AlgInt::int));
        assert!(ProjPoint::from_ints([0; 5]).is_err());
    }

    #[test]
    fn worked_examples_intersection_numbers() {
        let e = |i: usize| E_CLASSES[i - 1];
        assert_eq!(intersection_number(&e(3), &e(4)), 1);
        assert_eq!(intersection_number(&e(1), &e(2)), 0);
        assert_eq!(intersection_number(&e(7), &e(7)), -2);
        for i in [1, 2, 5] {
            assert_eq!(intersection_number(&e(i), &e(i)), -1);
        }
        for i in [3, 4, 6, 7] {
            assert_eq!(intersection_number(&e(i), &e(i)), -2);
        }
    }

    #[test]
    fn adjacency_matches_configuration() {
        let d = DynkinData::new();
        let mut expected: Vec<(usize, usize)> =
            CONFIGURATION_EDGES.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        expected.sort();
        assert_eq!(d.adjacent, expected);
        assert_eq!(d.nonadjacent.len(), 36 - 11);
        assert!(d.matrix.iter().flatten().all(|&v| (-2..=1).contains(&v)));
    }

    #[test]
    fn worked_examples_count_fp() {
        assert_eq!(count_fp(2).unwrap(), 9);
        assert_eq!(count_fp(3).unwrap(), 16);
        assert_eq!(count_fp_bruteforce(2).unwrap(), 9);
        assert_eq!(count_fp_bruteforce(3).unwrap(), 16);
        assert_eq!(count_fp(2).unwrap() + 8, 17);
        assert!(count_fp(4).is_err());
    }
}
