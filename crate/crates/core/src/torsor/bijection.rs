//! Pointwise comparison of `Ψ` applied to the torsor points with the directly
//! enumerated points of `U`.

use std::collections::BTreeMap;

use crate::direct::direct_points;
use crate::error::Result;
use crate::geometry::{in_u, ProjPoint};
use crate::numberfield::Field;
use crate::rational::Rational;

use super::{enumerate_m_with, psi, EnumOptions, TorsorPoint};

/// Outcome of [`bijection_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectionReport {
    pub direct_count: u64,
    pub torsor_count: u64,
    /// Points of `U` with `H ≤ B` that are not the image of a torsor point.
    pub missing: Vec<ProjPoint>,
    /// Images of torsor points that were not found directly (or not in `U`).
    pub extra: Vec<(TorsorPoint, ProjPoint)>,
    /// Points hit by more than one orbit-canonical torsor point.
    pub duplicates: Vec<(ProjPoint, Vec<TorsorPoint>)>,
}

impl BijectionReport {
    /// Total number of discrepancies.
    pub fn mismatches(&self) -> usize {
        self.missing.len() + self.extra.len() + self.duplicates.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.mismatches() == 0
    }
}

/// Checks that `Ψ` maps the orbit-canonical torsor points of height `≤ B`
/// bijectively onto the points of `U` of height `≤ B`.
pub fn bijection_check(field: &Field, b: &Rational) -> Result<BijectionReport> {
    let direct = direct_points(field, b)?;
    let opts = EnumOptions { collect_points: true, full_m: false, ..Default::default() };
    let torsor = enumerate_m_with(field, b, &opts)?.points.unwrap_or_default();

    let mut images: BTreeMap<ProjPoint, Vec<TorsorPoint>> = BTreeMap::new();
    for t in &torsor {
        images.entry(psi(field, t)?).or_default().push(*t);
    }
    let direct_set: std::collections::BTreeSet<&ProjPoint> = direct.iter().collect();
    let missing = direct.iter().filter(|p| !images.contains_key(p)).copied().collect();
    let mut extra = Vec::new();
    let mut duplicates = Vec::new();
    for (p, ts) in images {
        if !direct_set.contains(&p) || !in_u(field, &p) {
            extra.extend(ts.iter().map(|t| (*t, p)));
        } else if ts.len() > 1 {
            duplicates.push((p, ts));
        }
    }
    Ok(BijectionReport {
        direct_count: direct.len() as u64,
        torsor_count: torsor.len() as u64,
        missing,
        extra,
        duplicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};

    #[test]
    fn worked_examples() {
        let q = make_field(FieldTag::Q);
        for b in [1, 100] {
            let r = bijection_check(&q, &Rational::from_integer(b)).unwrap();
            assert!(r.is_bijective(), "{r:?}");
            assert_eq!(r.direct_count, r.torsor_count);
        }
        let qi = make_field(FieldTag::QI);
        let r = bijection_check(&qi, &Rational::from_integer(10)).unwrap();
        assert!(r.is_bijective(), "{r:?}");
    }
}
