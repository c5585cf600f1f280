//! Specialised integer enumeration over ℚ.
//!
//! With `Bi = ⌊B⌋` (all heights are integers) and `n_j = |a_j|`, the
//! inequalities `M1 ≤ Bi`, `M2 ≤ Bi`, `P3 ≤ 2Bi` bound `n1, …, n6` and `|a7|`
//! by exact integer roots. For fixed `a1, …, a7`, the conditions `|M0| ≤ Bi`
//! and `|M3| ≤ Bi` confine `a8` to an interval, and integrality of
//! `a9 = −(c + a2a8)/a1` to the residue class `a8 ≡ −c·a2⁻¹ (mod a1)`, which is
//! stepped through directly. Only `|M4| ≤ Bi` and the coprimality of `a8`,
//! `a9` remain to be checked per candidate; coprimality of `a_j` with the
//! nonadjacent `a_i` is tested with a single gcd against their product.

use num_integer::{Integer, Roots};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numberfield::{AlgInt, UnitWindow};
use crate::rational::Rational;

use super::engine::{EnumOptions, EnumResult, LoopOrder};
use super::TorsorPoint;

fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// `a⁻¹ mod m` for `gcd(a, m) = 1`, `m ≥ 1`.
fn inv_mod(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let ext = a.rem_euclid(m).extended_gcd(&m);
    debug_assert_eq!(ext.gcd, 1);
    ext.x.rem_euclid(m)
}

#[derive(Default)]
struct Tally {
    orbit: u64,
    m: u64,
    candidates: u64,
    points: Vec<TorsorPoint>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.orbit += other.orbit;
        self.m += other.m;
        self.candidates += other.candidates;
        self.points.extend(other.points);
        self
    }
}

/// The admissible `n1, …, n5`, in the requested loop order.
fn prefixes(bi: i128, order: LoopOrder) -> Vec<[i128; 5]> {
    let mut out = Vec::new();
    for n1 in 1..=bi.sqrt() {
        for n2 in 1..=(bi / (n1 * n1)).sqrt() {
            if gcd(n1, n2) != 1 {
                continue;
            }
            for n3 in 1..=(bi / (n1 * n1 * n2 * n2)).sqrt() {
                if gcd(n3, n1 * n2) != 1 {
                    continue;
                }
                let n4_max = (bi / (n1 * n1 * n2 * n2 * n3 * n3))
                    .min((bi / (n1 * n2 * n3 * n3)).sqrt())
                    .min((2 * bi / (n3 * n3)).cbrt());
                for n4 in 1..=n4_max {
                    if gcd(n4, n1 * n2) != 1 {
                        continue;
                    }
                    let n5_max = (bi / (n1 * n2 * n3 * n3 * n4 * n4))
                        .sqrt()
                        .min((2 * bi / (n3 * n3 * n4 * n4 * n4)).nth_root(4));
                    for n5 in 1..=n5_max {
                        if gcd(n5, n1 * n2 * n3) == 1 {
                            out.push([n1, n2, n3, n4, n5]);
                        }
                    }
                }
            }
        }
    }
    if order == LoopOrder::Permuted {
        // Same set, visited with a5 outermost.
        out.sort_by_key(|n| [n[4], n[3], n[2], n[1], n[0]]);
    }
    out
}

fn n6_max(bi: i128, n: &[i128; 5]) -> i128 {
    let [n1, n2, n3, n4, n5] = *n;
    (bi / (n1 * n1 * n2 * n2 * n3 * n3 * n4))
        .cbrt()
        .min((bi / (n1 * n2 * n3 * n3 * n4 * n4 * n5 * n5)).sqrt())
        .min(2 * bi / (n3 * n3 * n4 * n4 * n4 * n5 * n5 * n5 * n5))
}

fn n7_max(bi: i128, n: &[i128; 5], n6: i128) -> i128 {
    let [n1, n2, n3, n4, n5] = *n;
    (bi / (n1 * n2 * n3 * n3 * n4 * n4 * n5 * n5 * n6 * n6))
        .min((2 * bi / (n3 * n3 * n4 * n4 * n4 * n5 * n5 * n5 * n5 * n6)).sqrt())
}

struct Ctx {
    bi: i128,
    sign: i128,
    full_m: bool,
    collect: bool,
}

impl Ctx {
    fn process(&self, n: &[i128; 5], n6: i128) -> Tally {
        let mut t = Tally::default();
        let [n1, n2, n3, n4, n5] = *n;
        let s = self.sign;
        let (a1, a2, a3, a4, a5) = (s * n1, s * n2, s * n3, s * n4, s * n5);
        let bi = self.bi;
        let signs6: &[i128] = if self.full_m { &[1, -1] } else { &[1] };
        let q7 = n1 * n2 * n3 * n4 * n6;
        let q8 = n1 * n3 * n4 * n5 * n6;
        let q9 = n2 * n3 * n4 * n5 * n6;
        for &s6 in signs6 {
            let a6 = s * s6 * n6;
            for n7 in 1..=n7_max(bi, n, n6) {
                if gcd(n7, q7) != 1 {
                    continue;
                }
                for a7 in [n7, -n7] {
                    let c = a3 * a4 * a4 * a5 * a5 * a5 * a7;
                    let r0 = bi / (n2 * n3 * n4 * n5 * n6 * n7);
                    let r3 = bi / (n3 * n4 * n5 * n6 * n7);
                    // c + a2·a8 ∈ [−r3, r3].
                    let (lo3, hi3) = if a2 > 0 {
                        (Integer::div_ceil(&(-r3 - c), &a2), Integer::div_floor(&(r3 - c), &a2))
                    } else {
                        (Integer::div_ceil(&(r3 - c), &a2), Integer::div_floor(&(-r3 - c), &a2))
                    };
                    let lo = lo3.max(-r0);
                    let hi = hi3.min(r0);
                    if lo > hi {
                        continue;
                    }
                    let residue = (-c).rem_euclid(n1) * inv_mod(a2, n1) % n1;
                    let mut a8 = lo + (residue - lo).rem_euclid(n1);
                    while a8 <= hi {
                        let num = -(c + a2 * a8);
                        debug_assert_eq!(num % a1, 0);
                        let a9 = num / a1;
                        t.candidates += 1;
                        if (a7 * a8 * a9).abs() <= bi && gcd(a8, q8) == 1 && gcd(a9, q9) == 1 {
                            t.m += 1;
                            if s6 == 1 {
                                t.orbit += 1;
                                if self.collect {
                                    t.points.push(TorsorPoint {
                                        a: [a1, a2, a3, a4, a5, a6, a7, a8, a9].map(AlgInt::int),
                                    });
                                }
                            }
                        }
                        a8 += n1;
                    }
                }
            }
        }
        t
    }
}

pub(crate) fn run(b: &Rational, opts: &EnumOptions) -> Result<EnumResult> {
    let bi = b.floor().to_integer();
    if bi < 1 {
        return Ok(EnumResult::empty(*b, opts));
    }
    if bi > 1_000_000_000_000 {
        return Err(Error::LimitExceeded {
            what: "height bound for the integer engine".into(),
            requested: bi.to_string(),
            limit: "10^12".into(),
        });
    }
    let ctx = Ctx {
        bi,
        sign: if opts.window == UnitWindow::Standard { 1 } else { -1 },
        full_m: opts.full_m,
        collect: opts.collect_points,
    };
    let items: Vec<([i128; 5], i128)> = prefixes(bi, opts.order)
        .into_iter()
        .flat_map(|n| {
            let n6max = n6_max(bi, &n);
            (1..=n6max).filter(move |&n6| gcd(n6, n[3] * n[4]) == 1).map(move |n6| (n, n6))
        })
        .collect();
    let tally = items
        .par_iter()
        .map(|(n, n6)| ctx.process(n, *n6))
        .reduce(Tally::default, Tally::merge);
    if opts.full_m && tally.m != 2 * tally.orbit {
        return Err(Error::Internal(format!("|M| = {} is not 2·{}", tally.m, tally.orbit)));
    }
    Ok(EnumResult {
        bound: *b,
        orbit_count: tally.orbit,
        m_count: opts.full_m.then_some(tally.m),
        points: opts.collect_points.then_some(tally.points),
        candidates: tally.candidates,
        boundary_hits: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let opts = EnumOptions::default();
        let r = run(&Rational::from_integer(1), &opts).unwrap();
        assert_eq!((r.orbit_count, r.m_count), (4, Some(8)));
        let r = run(&Rational::from_integer(2), &opts).unwrap();
        assert_eq!(r.orbit_count, 10);
    }

    #[test]
    fn inverse_mod() {
        for m in 1..30 {
            for a in -40i128..40 {
                if gcd(a, m) == 1 {
                    assert_eq!((a * inv_mod(a, m)).rem_euclid(m), 1 % m);
                }
            }
        }
    }
}
