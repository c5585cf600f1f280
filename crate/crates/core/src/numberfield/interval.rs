//! Dyadic interval arithmetic used to embed ring elements into ℝ and ℂ with a
//! certified error radius.
//!
//! An [`Interval`] with `bits = b` represents the closed set `[lo, hi] · 2^{-b}`
//! for big integers `lo ≤ hi`. Every operation rounds outward, so the true real
//! value is always contained in the result.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Working precision of the first attempt of a certified comparison.
pub const MIN_PRECISION_BITS: u32 = 128;
/// Precision at which a certified comparison gives up.
pub const MAX_PRECISION_BITS: u32 = 1024;

/// A closed interval with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn shr_floor(v: &BigInt, s: u32) -> BigInt {
    // `>>` on a negative BigInt rounds toward −∞.
    v >> s
}

fn shr_ceil(v: &BigInt, s: u32) -> BigInt {
    -((-v) >> s)
}

impl Interval {
    /// The exact integer `n` at precision `bits`.
    pub fn from_int(n: impl Into<BigInt>, bits: u32) -> Self {
        let v: BigInt = n.into() << bits;
        Interval { lo: v.clone(), hi: v, bits }
    }

    /// An enclosure of `√n` for a non-negative integer `n`.
    pub fn sqrt_int(n: u64, bits: u32) -> Self {
        let scaled = BigInt::from(n) << (2 * bits);
        let s = scaled.sqrt();
        let hi = if &s * &s == scaled { s.clone() } else { &s + 1 };
        Interval { lo: s, hi, bits }
    }

    /// Working precision in bits.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn check(&self, other: &Interval) {
        assert_eq!(self.bits, other.bits, "interval precision mismatch");
    }

    pub fn add(&self, other: &Interval) -> Interval {
        self.check(other);
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, bits: self.bits }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        self.check(other);
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().expect("four products");
        let hi = products.iter().max().expect("four products");
        Interval { lo: shr_floor(lo, self.bits), hi: shr_ceil(hi, self.bits), bits: self.bits }
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: impl Into<BigInt>) -> Interval {
        let n: BigInt = n.into();
        let (a, b) = (&self.lo * &n, &self.hi * &n);
        if a <= b {
            Interval { lo: a, hi: b, bits: self.bits }
        } else {
            Interval { lo: b, hi: a, bits: self.bits }
        }
    }

    /// Division by two, rounding outward.
    pub fn half(&self) -> Interval {
        Interval { lo: shr_floor(&self.lo, 1), hi: shr_ceil(&self.hi, 1), bits: self.bits }
    }

    /// Quotient of two intervals; the divisor must be strictly positive.
    pub fn div(&self, other: &Interval) -> Result<Interval> {
        self.check(other);
        if !other.lo.is_positive() {
            return Err(Error::PrecisionExhausted {
                bits: self.bits,
                context: "interval division by an interval containing 0".into(),
            });
        }
        let candidates = [
            (&self.lo << self.bits, &other.lo),
            (&self.lo << self.bits, &other.hi),
            (&self.hi << self.bits, &other.lo),
            (&self.hi << self.bits, &other.hi),
        ];
        let lo = candidates.iter().map(|(n, d)| n.div_floor(d)).min().expect("non-empty");
        let hi = candidates
            .iter()
            .map(|(n, d)| {
                let (q, r) = n.div_mod_floor(d);
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            })
            .max()
            .expect("non-empty");
        Ok(Interval { lo, hi, bits: self.bits })
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = std::cmp::max(-&self.lo, self.hi.clone());
            Interval { lo: BigInt::zero(), hi, bits: self.bits }
        }
    }

    /// Enclosure of `max(x, y)` for `x ∈ self`, `y ∈ other`.
    pub fn max(&self, other: &Interval) -> Interval {
        self.check(other);
        Interval {
            lo: std::cmp::max(self.lo.clone(), other.lo.clone()),
            hi: std::cmp::max(self.hi.clone(), other.hi.clone()),
            bits: self.bits,
        }
    }

    /// Certified comparison with a rational; `None` if the interval contains
    /// the rational and is not a single point.
    pub fn cmp_rational(&self, r: &BigRational) -> Option<Ordering> {
        let scaled = r.numer() << self.bits;
        let den = r.denom();
        let lo = &self.lo * den;
        let hi = &self.hi * den;
        if hi < scaled {
            Some(Ordering::Less)
        } else if lo > scaled {
            Some(Ordering::Greater)
        } else if lo == scaled && hi == scaled {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn to_f64(v: &BigInt, bits: u32) -> f64 {
        if bits > 60 {
            let shifted: BigInt = v >> (bits - 60);
            shifted.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-60)
        } else {
            v.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(bits as i32))
        }
    }

    pub fn lo_f64(&self) -> f64 {
        Self::to_f64(&self.lo, self.bits)
    }

    pub fn hi_f64(&self) -> f64 {
        Self::to_f64(&self.hi, self.bits)
    }

    pub fn mid_f64(&self) -> f64 {
        Self::to_f64(&(&self.lo + &self.hi), self.bits + 1)
    }

    /// Half-width, as a floating-point number.
    pub fn radius_f64(&self) -> f64 {
        Self::to_f64(&(&self.hi - &self.lo), self.bits + 1)
    }
}

/// The value of one embedding of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceApprox {
    Real(Interval),
    Complex { re: Interval, im: Interval },
}

impl PlaceApprox {
    /// Enclosure of the normalized absolute value `|·|_v` (squared modulus at
    /// a complex place).
    pub fn abs_v(&self) -> Interval {
        match self {
            PlaceApprox::Real(x) => x.abs(),
            PlaceApprox::Complex { re, im } => re.mul(re).add(&im.mul(im)),
        }
    }
}

/// Interval enclosures of all archimedean embeddings of an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingVector {
    pub places: Vec<PlaceApprox>,
    pub precision_bits: u32,
}

impl EmbeddingVector {
    pub fn abs_v(&self, place: usize) -> Interval {
        self.places[place].abs_v()
    }
}

/// Compares the real number enclosed by `f(bits)` with `target`, doubling the
/// precision from [`MIN_PRECISION_BITS`] until the enclosure excludes the
/// target or [`MAX_PRECISION_BITS`] is reached.
pub fn certified_cmp<F>(target: &BigRational, context: &str, f: F) -> Result<Ordering>
where
    F: Fn(u32) -> Result<Interval>,
{
    certified_cmp_with(target, context, MAX_PRECISION_BITS, f)
}

/// [`certified_cmp`] with a caller-chosen precision ceiling (at least
/// [`MIN_PRECISION_BITS`]).
pub fn certified_cmp_with<F>(target: &BigRational, context: &str, max_bits: u32, f: F) -> Result<Ordering>
where
    F: Fn(u32) -> Result<Interval>,
{
    let max_bits = max_bits.max(MIN_PRECISION_BITS);
    let mut bits = MIN_PRECISION_BITS;
    loop {
        let iv = f(bits)?;
        if let Some(ord) = iv.cmp_rational(target) {
            return Ok(ord);
        }
        if bits >= max_bits {
            return Err(Error::PrecisionExhausted { bits, context: context.to_string() });
        }
        bits = (bits * 2).min(max_bits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn sqrt_two_enclosure_is_tight() {
        let r = Interval::sqrt_int(2, 128);
        assert!(r.lo_f64() <= std::f64::consts::SQRT_2 + 1e-15);
        assert!(r.hi_f64() >= std::f64::consts::SQRT_2 - 1e-15);
        assert!(r.radius_f64() < 1e-30);
        let sq = r.mul(&r);
        assert_eq!(sq.cmp_rational(&BigRational::from_integer(2.into())), None);
        assert_eq!(sq.cmp_rational(&BigRational::new(3.into(), 2.into())), Some(Ordering::Greater));
    }

    #[test]
    fn exact_integers_compare_equal() {
        let v = Interval::from_int(7, 128);
        assert_eq!(v.cmp_rational(&BigRational::from_integer(7.into())), Some(Ordering::Equal));
    }

    #[test]
    fn certified_cmp_refines_and_gives_up_on_ties() {
        let target = BigRational::new(1.into(), 3.into());
        // 1/3 is not dyadic: the enclosure of 1/3 never separates from 1/3.
        let third = |bits: u32| Interval::from_int(1, bits).div(&Interval::from_int(3, bits));
        assert!(matches!(
            certified_cmp(&target, "tie", third),
            Err(Error::PrecisionExhausted { bits: MAX_PRECISION_BITS, .. })
        ));
        let sqrt2 = |bits: u32| Ok(Interval::sqrt_int(2, bits));
        let close = BigRational::new(141_421_356_237_309_504u64.into(), 100_000_000_000_000_000u64.into());
        assert_eq!(certified_cmp(&close, "sqrt2", sqrt2).unwrap(), Ordering::Greater);
        assert_eq!(certified_cmp(&BigRational::one(), "sqrt2", sqrt2).unwrap(), Ordering::Greater);
    }

    #[test]
    fn abs_and_half_round_outward() {
        let v = Interval { lo: BigInt::from(-3), hi: BigInt::from(5), bits: 1 };
        let a = v.abs();
        assert_eq!((a.lo.clone(), a.hi.clone()), (BigInt::zero(), BigInt::from(5)));
        let h = v.half();
        assert_eq!((h.lo, h.hi), (BigInt::from(-2), BigInt::from(3)));
    }
}
