//! The Euler product `∏_𝔭 (1 − 1/N𝔭)⁶(1 + 6/N𝔭 + 1/N𝔭²)` over the prime
//! ideals of `O_K`.
//!
//! # Tail bound
//!
//! With `x = 1/N𝔭`, the factor is
//! `f(x) = (1 − x)⁶(1 + 6x + x²) = 1 − 20x² + 64x³ − 90x⁴ + 64x⁵ − 20x⁶ + x⁸`.
//! For `0 < x ≤ 1/11` put `y = 1 − f(x)`. Dropping the alternating tail,
//! `0 < y ≤ 20x²(1 − 3.2x + 4.5x²) ≤ 20x²(1 − 2.79x)`, so `y ≤ 0.17`, and
//! `−log(1 − y) ≤ y(1 + y/(2(1 − y))) ≤ 20x²(1 − 2.79x)(1 + 1.09x) ≤ 20x²`.
//! Hence `|log f(1/N𝔭)| ≤ 21/N𝔭²` for `N𝔭 ≥ 11` (the constant is also checked
//! numerically on a fine grid in the unit tests).
//!
//! Every rational prime `ℓ` has at most `d` prime ideals above it,
//! all of norm `≥ ℓ`, so
//! `Σ_{N𝔭 > P} |log f(1/N𝔭)| ≤ 21·d·Σ_{n > P} 1/n² < 21d/P`.
//! The partial product therefore determines the full product up to a factor
//! `exp(±21d/P)`, to which a relative rounding allowance of `10⁻¹²` is added.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numberfield::Field;

/// Default truncation bound.
pub const DEFAULT_TRUNCATION: u64 = 1_000_000;
/// Constant in the tail bound `|log f(1/N𝔭)| ≤ C/N𝔭²` for `N𝔭 ≥ 11`.
pub const TAIL_CONSTANT: f64 = 21.0;
/// Relative allowance for floating-point rounding in the partial product.
const ROUNDING: f64 = 1e-12;

/// The factor `(1 − 1/q)⁶(1 + 6/q + 1/q²)` as an exact rational.
pub fn euler_factor(q: u64) -> BigRational {
    let x = BigRational::new(1.into(), q.into());
    let one = BigRational::from_integer(1.into());
    let six = BigRational::from_integer(6.into());
    let base = &one - &x;
    let mut p = one.clone();
    for _ in 0..6 {
        p *= &base;
    }
    p * (&one + &six * &x + &x * &x)
}

/// `log f(1/q)` in floating point, accurate for large `q`.
pub fn log_euler_factor(q: f64) -> f64 {
    let x = 1.0 / q;
    6.0 * (-x).ln_1p() + (6.0 * x + x * x).ln_1p()
}

/// Truncated Euler product with a rigorous enclosure of the full product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    #[serde(rename = "P")]
    pub truncation: u64,
    pub value: f64,
    pub tail_lo: f64,
    pub tail_hi: f64,
}

impl EulerProduct {
    pub fn contains(&self, x: f64) -> bool {
        self.tail_lo <= x && x <= self.tail_hi
    }
}

/// Primes `≤ n` (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Kronecker symbol `(Δ/ℓ)` for a prime `ℓ`.
pub fn kronecker(disc: i64, l: u64) -> i32 {
    if l == 2 {
        if disc.rem_euclid(2) == 0 {
            return 0;
        }
        return match disc.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let a = disc.rem_euclid(l as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (l - 1) / 2, l) == 1 {
        1
    } else {
        -1
    }
}

/// Norms of the prime ideals above `ℓ`, with multiplicity.
pub fn prime_ideal_norms(field: &Field, l: u64) -> Vec<u64> {
    if field.is_rational() {
        return vec![l];
    }
    match kronecker(field.disc, l) {
        1 => vec![l, l],
        0 => vec![l],
        _ => vec![l * l],
    }
}

/// `∏_{N𝔭 ≤ P}` of the Euler factors, with the tail enclosure.
pub fn finite_product(field: &Field, p: u64) -> Result<EulerProduct> {
    if p < 11 {
        return Err(Error::Domain(format!("truncation bound {p} must be at least 11")));
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for l in primes_up_to(p) {
        for q in prime_ideal_norms(field, l) {
            if q <= p {
                // Neumaier summation of the logarithms.
                let term = log_euler_factor(q as f64);
                let t = sum + term;
                if sum.abs() >= term.abs() {
                    comp += (sum - t) + term;
                } else {
                    comp += (term - t) + sum;
                }
                sum = t;
            }
        }
    }
    let log_value = sum + comp;
    let value = log_value.exp();
    let width = TAIL_CONSTANT * field.degree as f64 / p as f64;
    Ok(EulerProduct {
        truncation: p,
        value,
        tail_lo: (log_value - width).exp() * (1.0 - ROUNDING),
        tail_hi: (log_value + width).exp() * (1.0 + ROUNDING),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};

    #[test]
    fn worked_examples() {
        assert_eq!(euler_factor(2), BigRational::new(17.into(), 256.into()));
        assert_eq!(euler_factor(3), BigRational::new(1792.into(), 6561.into()));
        assert!((log_euler_factor(1e12)).abs() < 1e-22);
    }

    #[test]
    fn tail_constant_holds_on_grid() {
        for k in 11..200_000u64 {
            let q = k as f64 / 10.0 + 10.0;
            if q < 11.0 {
                continue;
            }
            assert!(log_euler_factor(q).abs() <= TAIL_CONSTANT / (q * q), "q = {q}");
        }
    }

    #[test]
    fn splitting() {
        let qi = make_field(FieldTag::QI);
        assert_eq!(prime_ideal_norms(&qi, 2), vec![2]);
        assert_eq!(prime_ideal_norms(&qi, 5), vec![5, 5]);
        assert_eq!(prime_ideal_norms(&qi, 3), vec![9]);
        let q2 = make_field(FieldTag::QSqrt2);
        assert_eq!(prime_ideal_norms(&q2, 7), vec![7, 7]);
        assert_eq!(prime_ideal_norms(&q2, 3), vec![9]);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
    }

    #[test]
    fn refinement_stays_inside() {
        for tag in [FieldTag::Q, FieldTag::QI, FieldTag::QSqrt2] {
            let f = make_field(tag);
            let coarse = finite_product(&f, 1000).unwrap();
            let fine = finite_product(&f, 2000).unwrap();
            assert!(coarse.contains(fine.value), "{tag}");
        }
    }
}
