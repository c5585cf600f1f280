//! Direct enumeration of the rational points of `U` of bounded height,
//! independent of the torsor.
//!
//! Points are found through the equations themselves. When `x0 ≠ 0`, the first
//! quadric `x0x3 = x2x4` determines `x3 = x2x4/x0`, and the second one
//! `x1(x0 + x3) = −x2²` determines `x1` (here `x0 + x3 ≠ 0`, since otherwise
//! `x2 = 0`, hence `x3 = 0` and `x0 = 0`). When `x0 = 0`, a point of `U` has
//! `x2 ≠ 0`, hence `x4 = 0` and `x3 = −x2²/x1`.
//!
//! * Over ℚ, with `x0 > 0`, write `g = gcd(x0, x2)`, `x0 = gu`, `x2 = gw`; then
//!   `u | x4`, so `x4 = uk` and `x3 = wk`, and `x1 = −g²w²/(gu + wk)`. The
//!   loops over `(u, w, k, g)` are driven by `max|x_i| ≤ B` on the primitive
//!   representative.
//! * Over a quadratic field (class number 1), every point has a primitive
//!   representative, which can be rescaled by a unit so that
//!   `max_i |x_i|_v ≤ √(εB)` at both real places (`≤ B` at a complex place).
//!   The coordinates `x0, x2, x4` (or `x1, x2` when `x0 = 0`) are looped over
//!   that box; every solution is canonicalized and the height compared exactly.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_u, place_max_product_cmp, ProjPoint};
use crate::numberfield::{AlgInt, Field, FieldTag};
use crate::rational::{format_rational, to_f64, Rational};
use crate::torsor::{enumerate_m_with, EnumOptions};

/// Largest bound accepted by the direct method over ℚ.
pub const DIRECT_LIMIT_Q: i128 = 10_000;
/// Largest bound accepted by the direct method over quadratic fields.
pub const DIRECT_LIMIT_QUADRATIC: i128 = 50;
/// Largest bound accepted by the exhaustive box scan over ℚ.
pub const BOX_SCAN_LIMIT: i128 = 20;

/// Counting method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Torsor,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Torsor => "torsor",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(Method::Direct),
            "torsor" => Ok(Method::Torsor),
            other => Err(Error::Domain(format!("unknown method {other:?} (expected direct or torsor)"))),
        }
    }
}

/// One row of a count table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub field: FieldTag,
    /// The bound, formatted as an integer or `p/q`.
    #[serde(rename = "B")]
    pub bound: String,
    pub method: Method,
    pub count: u64,
    pub elapsed_s: f64,
}

/// The largest `B` accepted by the direct method.
pub fn direct_limit(field: &Field) -> Rational {
    Rational::from_integer(if field.is_rational() { DIRECT_LIMIT_Q } else { DIRECT_LIMIT_QUADRATIC })
}

/// All points of `U(K)` with `H ≤ B`, as sorted canonical representatives.
pub fn direct_points(field: &Field, b: &Rational) -> Result<Vec<ProjPoint>> {
    check_limit(field, b)?;
    if *b < Rational::from_integer(1) {
        return Ok(Vec::new());
    }
    if field.is_rational() {
        direct_points_q(b.floor().to_integer())
    } else {
        direct_points_quadratic(field, b)
    }
}

/// `N_{U,H}(B)` by direct enumeration.
pub fn direct_count(field: &Field, b: &Rational) -> Result<u64> {
    Ok(direct_points(field, b)?.len() as u64)
}

fn check_limit(field: &Field, b: &Rational) -> Result<()> {
    let limit = direct_limit(field);
    if *b > limit {
        return Err(Error::LimitExceeded {
            what: format!("direct enumeration over {}", field.tag.display_name()),
            requested: format_rational(b),
            limit: format_rational(&limit),
        });
    }
    Ok(())
}

fn gcd5(x: &[i128; 5]) -> i128 {
    x.iter().fold(0i128, |g, &v| g.gcd(&v))
}

fn direct_points_q(bi: i128) -> Result<Vec<ProjPoint>> {
    // x0 > 0.
    let chunks: Vec<Vec<[i128; 5]>> = (1..=bi)
        .into_par_iter()
        .map(|u| {
            let mut out = Vec::new();
            for w in -bi..=bi {
                if u.gcd(&w) != 1 {
                    continue;
                }
                let mx = u.max(w.abs());
                let kmax = bi / mx;
                for k in -kmax..=kmax {
                    for g in 1..=kmax {
                        let d = g * u + w * k;
                        let num = g * g * w * w;
                        if d == 0 || num % d != 0 {
                            continue;
                        }
                        let x1 = -num / d;
                        let x = [g * u, x1, g * w, w * k, u * k];
                        if x1.abs() <= bi && gcd5(&x) == 1 && !(x1 == 0 && w == 0) {
                            out.push(x);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut points: Vec<[i128; 5]> = chunks.into_iter().flatten().collect();
    // x0 = 0: x4 = 0, x2 ≠ 0, x1 > 0 canonical, x3 = −x2²/x1.
    for x1 in 1..=bi {
        for x2 in (-bi..=bi).filter(|&v| v != 0) {
            if (x2 * x2) % x1 == 0 {
                let x3 = -(x2 * x2) / x1;
                let x = [0, x1, x2, x3, 0];
                if x3.abs() <= bi && gcd5(&x) == 1 {
                    points.push(x);
                }
            }
        }
    }
    points.sort();
    points.into_iter().map(ProjPoint::from_ints).collect()
}

/// Exhaustive scan of all primitive integer vectors with `max|x_i| ≤ B` over
/// ℚ; an oracle for [`direct_points`] at small `B`.
pub fn direct_points_box_scan(b: i128) -> Result<Vec<ProjPoint>> {
    if b > BOX_SCAN_LIMIT {
        return Err(Error::LimitExceeded {
            what: "exhaustive box scan".into(),
            requested: b.to_string(),
            limit: BOX_SCAN_LIMIT.to_string(),
        });
    }
    let q = Field::new(FieldTag::Q);
    let mut out = Vec::new();
    let r = -b..=b;
    for x0 in r.clone() {
        for x1 in r.clone() {
            for x2 in r.clone() {
                for x3 in r.clone() {
                    if x0 * x1 + x1 * x3 + x2 * x2 != 0 {
                        continue;
                    }
                    for x4 in r.clone() {
                        let x = [x0, x1, x2, x3, x4];
                        if x0 * x3 != x2 * x4 || gcd5(&x) != 1 {
                            continue;
                        }
                        let first = *x.iter().find(|&&c| c != 0).expect("primitive");
                        if first < 0 {
                            continue;
                        }
                        let p = ProjPoint::from_ints(x)?;
                        if in_u(&q, &p) {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn direct_points_quadratic(field: &Field, b: &Rational) -> Result<Vec<ProjPoint>> {
    let bf = to_f64(b);
    let r = if field.is_real_quadratic() {
        (field.fund_unit_f64().expect("real quadratic") * bf).sqrt()
    } else {
        bf
    } * (1.0 + 1e-9);
    let bounds = vec![r; field.places().len()];
    let nonzero = field.enumerate_box(&bounds);
    let all = field.box_elements(&bounds, true);
    let in_box = |a: AlgInt| (0..bounds.len()).all(|v| field.abs_v_le(a, v, r));
    let accept = |x: [AlgInt; 5]| -> Result<Option<ProjPoint>> {
        if !(in_box(x[1]) && in_box(x[3])) {
            return Ok(None);
        }
        let p = ProjPoint::canonical(field, x)?;
        if !in_u(field, &p) {
            return Ok(None);
        }
        let within =
            place_max_product_cmp(field, p.coords(), *b.numer(), *b.denom()) != std::cmp::Ordering::Greater;
        Ok(within.then_some(p))
    };
    let chunks: Vec<BTreeSet<ProjPoint>> = nonzero
        .par_iter()
        .map(|&x0| -> Result<BTreeSet<ProjPoint>> {
            let mut set = BTreeSet::new();
            for &x2 in &all {
                for &x4 in &all {
                    let Some(x3) = field.exact_divide(field.mul(x2, x4), x0)? else { continue };
                    let d = x0 + x3;
                    if d.is_zero() {
                        continue;
                    }
                    let Some(x1) = field.exact_divide(-field.mul(x2, x2), d)? else { continue };
                    if let Some(p) = accept([x0, x1, x2, x3, x4])? {
                        set.insert(p);
                    }
                }
            }
            Ok(set)
        })
        .collect::<Result<_>>()?;
    let mut set: BTreeSet<ProjPoint> = chunks.into_iter().flatten().collect();
    for &x1 in &nonzero {
        for &x2 in &nonzero {
            let Some(x3) = field.exact_divide(-field.mul(x2, x2), x1)? else { continue };
            if let Some(p) = accept([AlgInt::ZERO, x1, x2, x3, AlgInt::ZERO])? {
                set.insert(p);
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Counts `N_{U,H}(B)` with the given method and records the wall time.
pub fn count(field: &Field, b: &Rational, method: Method, threads: Option<usize>) -> Result<CountResult> {
    let start = Instant::now();
    let count = match method {
        Method::Direct => {
            let run = || direct_count(field, b);
            match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
                    .install(run)?,
                None => run()?,
            }
        }
        Method::Torsor => {
            let opts = EnumOptions { threads, full_m: false, ..Default::default() };
            enumerate_m_with(field, b, &opts)?.orbit_count
        }
    };
    Ok(CountResult {
        field: field.tag,
        bound: format_rational(b),
        method,
        count,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}
