//! Exact rational height bounds.

use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Height bounds and other exact rationals with small numerators.
pub type Rational = num_rational::Ratio<i128>;

/// Parses `1000`, `3/2`, `0.5`, `1e6` or `2.5e3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Domain(format!("cannot parse {s:?} as a rational number"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut value = Rational::from_integer(digits.parse::<i128>().map_err(|_| bad())?);
    let shift = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(10);
    let scale = (0..shift.unsigned_abs()).try_fold(Rational::one(), |acc, _| {
        acc.numer().checked_mul(10).map(|_| acc * ten).ok_or_else(bad)
    })?;
    value = if shift >= 0 { value * scale } else { value / scale };
    Ok(if neg && !value.is_zero() { -value } else { value })
}

/// Canonical text form: `n` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floating-point value.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("1000").unwrap(), Rational::from_integer(1000));
        assert_eq!(parse_rational("3/2").unwrap(), Rational::new(3, 2));
        assert_eq!(parse_rational("0.5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("1e6").unwrap(), Rational::from_integer(1_000_000));
        assert_eq!(parse_rational("2.5e3").unwrap(), Rational::from_integer(2500));
        assert_eq!(parse_rational("-1.25").unwrap(), Rational::new(-5, 4));
        assert_eq!(parse_rational("15e-1").unwrap(), Rational::new(3, 2));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn format_round_trips() {
        for r in [Rational::new(3, 2), Rational::from_integer(7), Rational::new(-1, 3)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
}
