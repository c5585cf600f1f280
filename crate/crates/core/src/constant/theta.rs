//! The local coprimality weights `θ₀,𝔭(J)` and `θ₁,𝔭(J)` for
//! `J ⊆ {1, …, 5}`, and the local form of the Möbius identity relating them.
//!
//! # The local Möbius sum
//!
//! For a prime `𝔭` of norm `q` and the set `J` of indices `j` with
//! `𝔭 | 𝔞_j`, only tuples `𝐝 = (𝔡₆₇, 𝔡₆₈, 𝔡₆₉, 𝔡₆, 𝔡₇, 𝔡₈)` with every
//! component in `{1, 𝔭}` contribute (the Möbius function kills higher
//! powers). Writing `e_k ∈ {0, 1}` for the exponents, the localized
//! constraints are
//!
//! * `e₆₇ = 1` only if `J = ∅`;
//! * `e₆₈ = 1` only if `J ∩ {1, 3, 4, 5} = ∅`;
//! * `e₆₉ = 1` only if `J ∩ {2, 3, 4, 5} = ∅`;
//! * not both `e₆₈` and `e₆₉`;
//! * `e₆ = 1` only if `J ∩ {4, 5} ≠ ∅`, `e₇ = 1` only if `J ∩ {1, 2, 3, 4} ≠ ∅`,
//!   `e₈ = 1` only if `J ∩ {3, 4, 5} ≠ ∅`.
//!
//! The denominator `N(𝔡₆𝔡₇𝔡₈𝔡₆₇𝔡₆₈𝔡₆₉(𝔡₆₇ ∩ 𝔡₆₈𝔡₆₉))` has exponent
//! `e₆ + e₇ + e₈ + e₆₇ + e₆₈ + e₆₉ + max(e₆₇, e₆₈ + e₆₉)`, and the sign is
//! `(−1)^{Σ e}`.
//!
//! # Mean value
//!
//! `θ₁` depends on the exponents only through their support, so its local
//! mean value is `(1 − 1/q)⁵ Σ_J θ₁,𝔭(J)·(q − 1)^{−|J|}`; it coincides with
//! the finite-place Euler factor `(1 − 1/q)⁶(1 + 6/q + 1/q²)`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// A subset of `{1, …, 5}` as a bit mask (bit `j − 1` for index `j`).
pub type Subset = u8;

/// Builds a subset from 1-based indices.
pub fn subset(indices: &[usize]) -> Subset {
    indices.iter().fold(0, |m, &j| {
        assert!((1..=5).contains(&j), "indices are in 1..=5");
        m | (1 << (j - 1))
    })
}

/// The 1-based indices of a subset.
pub fn indices(j: Subset) -> Vec<usize> {
    (1..=5).filter(|&i| j & (1 << (i - 1)) != 0).collect()
}

fn meets(j: Subset, indices: &[usize]) -> bool {
    j & subset(indices) != 0
}

fn q_rat(q: u64) -> BigRational {
    BigRational::from_integer(q.into())
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// `θ₀,𝔭(J)`: 1 exactly for `∅, {1}, …, {5}, {3,4}, {4,5}`.
pub fn theta0(j: Subset) -> BigRational {
    let allowed = [0, subset(&[3, 4]), subset(&[4, 5])];
    if j.count_ones() <= 1 || allowed.contains(&j) {
        BigRational::one()
    } else {
        BigRational::zero()
    }
}

/// `θ₁,𝔭(J)` for a prime of norm `q`.
pub fn theta1(q: u64, j: Subset) -> BigRational {
    let one = BigRational::one();
    let x = &one / q_rat(q);
    let base = &one - &x;
    let two = BigRational::from_integer(2.into());
    if j == 0 {
        pow(&base, 2) * (&one + &two * &x)
    } else if j == subset(&[1]) || j == subset(&[2]) {
        pow(&base, 2) * (&one + &x)
    } else if j == subset(&[3]) || j == subset(&[5]) {
        pow(&base, 2)
    } else if j == subset(&[4]) || j == subset(&[3, 4]) || j == subset(&[4, 5]) {
        pow(&base, 3)
    } else {
        BigRational::zero()
    }
}

/// The tables of `θ₀,𝔭` and `θ₁,𝔭` over all 32 subsets, for one prime norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaTables {
    pub q: u64,
    pub theta0: BTreeMap<Subset, BigRational>,
    pub theta1: BTreeMap<Subset, BigRational>,
}

impl ThetaTables {
    pub fn new(q: u64) -> ThetaTables {
        ThetaTables {
            q,
            theta0: (0..32).map(|j| (j, theta0(j))).collect(),
            theta1: (0..32).map(|j| (j, theta1(q, j))).collect(),
        }
    }
}

/// Whether the exponent tuple `(e₆₇, e₆₈, e₆₉, e₆, e₇, e₈)` satisfies the
/// localized constraints for `J`.
pub fn local_tuple_allowed(j: Subset, e: [u32; 6]) -> bool {
    let [e67, e68, e69, e6, e7, e8] = e;
    (e67 == 0 || j == 0)
        && (e68 == 0 || !meets(j, &[1, 3, 4, 5]))
        && (e69 == 0 || !meets(j, &[2, 3, 4, 5]))
        && (e68 == 0 || e69 == 0)
        && (e6 == 0 || meets(j, &[4, 5]))
        && (e7 == 0 || meets(j, &[1, 2, 3, 4]))
        && (e8 == 0 || meets(j, &[3, 4, 5]))
}

/// `(θ₀,𝔭(J)·Σ_𝐝 μ(𝐝)/N(denominator), θ₁,𝔭(J))` for a prime of norm `q`.
pub fn mobius_local_check(q: u64, j: Subset) -> (BigRational, BigRational) {
    let qr = q_rat(q);
    let mut sum = BigRational::zero();
    for mask in 0u32..64 {
        let e: [u32; 6] = std::array::from_fn(|k| (mask >> k) & 1);
        if !local_tuple_allowed(j, e) {
            continue;
        }
        let [e67, e68, e69, e6, e7, e8] = e;
        let exponent = e6 + e7 + e8 + e67 + e68 + e69 + e67.max(e68 + e69);
        let term = BigRational::one() / pow(&qr, exponent);
        if mask.count_ones() % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    (theta0(j) * sum, theta1(q, j))
}

/// Local mean value `(1 − 1/q)⁵ Σ_J θ₁,𝔭(J)(q − 1)^{−|J|}` of `θ₁`.
pub fn theta1_mean_value(q: u64) -> BigRational {
    let one = BigRational::one();
    let base = &one - &one / q_rat(q);
    let w = &one / (q_rat(q) - &one);
    let sum: BigRational = (0..32u8).map(|j| theta1(q, j) * pow(&w, j.count_ones())).sum();
    pow(&base, 5) * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constant::euler::euler_factor;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn worked_examples() {
        assert_eq!(mobius_local_check(2, 0), (r(1, 2), r(1, 2)));
        for q in [2, 3, 5, 7] {
            assert_eq!(mobius_local_check(q, subset(&[1, 2])), (r(0, 1), r(0, 1)));
        }
        let (lhs, rhs) = mobius_local_check(3, subset(&[4]));
        assert_eq!(lhs, r(8, 27));
        assert_eq!(rhs, r(8, 27));
    }

    #[test]
    fn all_subsets_balance() {
        for q in [2, 3, 4, 5, 9, 25, 101] {
            for j in 0..32 {
                let (lhs, rhs) = mobius_local_check(q, j);
                assert_eq!(lhs, rhs, "q = {q}, J = {:?}", indices(j));
            }
        }
    }

    #[test]
    fn zero_pattern() {
        for j in 0..32 {
            let z0 = theta0(j).is_zero();
            let z1 = theta1(7, j).is_zero();
            assert_eq!(z0, z1, "J = {:?}", indices(j));
        }
        assert_eq!(ThetaTables::new(5).theta1.values().filter(|v| !v.is_zero()).count(), 8);
    }

    #[test]
    fn mean_value_is_euler_factor() {
        for q in [2, 3, 4, 5, 7, 9, 11, 49, 1009] {
            assert_eq!(theta1_mean_value(q), euler_factor(q));
        }
    }
}
