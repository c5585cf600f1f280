//! Complete enumeration of torsor points of bounded height.
//!
//! The generic engine works over every supported field:
//!
//! 1. all canonical associates `a ∈ ℱ₁` with `|N(a)|` up to the largest norm
//!    bound for `a1, …, a5` are listed once, sorted by norm;
//! 2. prefixes `(a1, …, a5)` are built in the chosen loop order, pruned by the
//!    norm inequalities and the coprimality conditions among themselves;
//! 3. for each prefix, `a6` and `a7` are taken from per-place boxes, `a8` from
//!    the box given by `|M0|_v ≤ T_v`, and `a9 = −(a2a8 + c)/a1` must be
//!    integral;
//! 4. coprimality, the height condition and (for real quadratic fields) the
//!    `ℱ₀` condition are then decided exactly.
//!
//! Work items `(prefix, first of a6/a7)` are processed in parallel; the result
//! is independent of the thread count because counts are sums and collected
//! points are sorted.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{place_max_product_cmp, DynkinData};
use crate::numberfield::{AlgInt, Field, UnitWindow};
use crate::rational::Rational;

use super::bounds::BoundContext;
use super::domain::{ratio_position, FundDomain};
use super::{c_term, psi_raw, rational_engine, TorsorPoint};

/// Which implementation to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Engine {
    /// The specialised integer engine over ℚ, the generic engine otherwise.
    #[default]
    Auto,
    /// Always the generic engine.
    Generic,
}

/// Order in which the variables are fixed. Counts must not depend on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoopOrder {
    /// `a1, a2, a3, a4, a5, a6, a7, a8`.
    #[default]
    Standard,
    /// `a5, a4, a3, a2, a1`, then `a7` before `a6` for fields with a single
    /// archimedean place.
    Permuted,
}

/// Options of an enumeration run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    pub window: UnitWindow,
    pub order: LoopOrder,
    /// Worker threads; `None` uses the default pool size.
    pub threads: Option<usize>,
    /// Whether to return the orbit-canonical points.
    pub collect_points: bool,
    pub engine: Engine,
    /// Whether to also count `|M(B)|`, i.e. all `|μ_K|` representatives
    /// per orbit.
    pub full_m: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            window: UnitWindow::Standard,
            order: LoopOrder::Standard,
            threads: None,
            collect_points: false,
            engine: Engine::Auto,
            full_m: true,
        }
    }
}

/// Outcome of an enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumResult {
    pub bound: Rational,
    /// Number of orbits, i.e. `N_{U,H}(B)`.
    pub orbit_count: u64,
    /// `|M(B)|`, when requested.
    pub m_count: Option<u64>,
    /// Orbit-canonical torsor points, sorted, when requested.
    pub points: Option<Vec<TorsorPoint>>,
    /// Tuples `(a1, …, a9)` reaching the exact checks.
    pub candidates: u64,
    /// Candidates lying exactly on a boundary of `ℱ₀`.
    pub boundary_hits: u64,
}

impl EnumResult {
    pub(crate) fn empty(bound: Rational, opts: &EnumOptions) -> EnumResult {
        EnumResult {
            bound,
            orbit_count: 0,
            m_count: opts.full_m.then_some(0),
            points: opts.collect_points.then(Vec::new),
            candidates: 0,
            boundary_hits: 0,
        }
    }
}

/// Enumerates `M(B)` with default options.
pub fn enumerate_m(field: &Field, b: &Rational) -> Result<EnumResult> {
    enumerate_m_with(field, b, &EnumOptions::default())
}

/// Enumerates `M(B)`.
pub fn enumerate_m_with(field: &Field, b: &Rational, opts: &EnumOptions) -> Result<EnumResult> {
    if *b < Rational::from_integer(1) {
        return Ok(EnumResult::empty(*b, opts));
    }
    if opts.threads == Some(0) {
        return Err(Error::Domain("thread count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut result = pool.install(|| {
        if field.is_rational() && opts.engine == Engine::Auto {
            rational_engine::run(b, opts)
        } else {
            run_generic(field, b, opts)
        }
    })?;
    if let Some(points) = &mut result.points {
        points.sort();
    }
    Ok(result)
}

#[derive(Default)]
struct Tally {
    orbit: u64,
    m: u64,
    candidates: u64,
    boundary: u64,
    points: Vec<TorsorPoint>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.orbit += other.orbit;
        self.m += other.m;
        self.candidates += other.candidates;
        self.boundary += other.boundary;
        self.points.extend(other.points);
        self
    }
}

struct Generic<'a> {
    field: &'a Field,
    b: Rational,
    ctx: BoundContext,
    domain: FundDomain,
    opts: EnumOptions,
    /// `nonadjacent[i][j]` for 1-based `i, j`.
    nonadjacent: [[bool; 10]; 10],
    /// Canonical associates sorted by `|N|`.
    canon: Vec<(f64, AlgInt)>,
}

impl Generic<'_> {
    fn coprime_with_fixed(&self, j: usize, value: AlgInt, fixed: &[Option<AlgInt>; 9]) -> bool {
        (1..=9).all(|i| {
            i == j
                || !self.nonadjacent[i][j]
                || fixed[i - 1].is_none_or(|a| self.field.coprime(a, value))
        })
    }

    fn abs_vector(&self, fixed: &[Option<AlgInt>; 9]) -> [Option<Vec<f64>>; 7] {
        let places = self.field.places().len();
        let mut abs: [Option<Vec<f64>>; 7] = Default::default();
        for i in 0..7 {
            abs[i] = fixed[i].map(|a| (0..places).map(|v| self.field.abs_v(a, v)).collect());
        }
        abs
    }

    fn norms(&self, fixed: &[Option<AlgInt>; 9]) -> [Option<f64>; 7] {
        let mut n = [None; 7];
        for i in 0..7 {
            n[i] = fixed[i].map(|a| self.field.norm(a).abs() as f64);
        }
        n
    }

    /// Admissible values of `a_j` (`j ∈ {6, 7}`) given the fixed variables.
    fn candidates_67(&self, j: usize, fixed: &[Option<AlgInt>; 9]) -> Vec<AlgInt> {
        let abs = self.abs_vector(fixed);
        let per_place: Vec<f64> =
            (0..self.field.places().len()).map(|v| self.ctx.product_place_bound(&abs, j, v)).collect();
        let norm_max = self.ctx.norm_bound(&self.norms(fixed), j);
        if norm_max < 1.0 {
            return Vec::new();
        }
        self.field
            .enumerate_box(&per_place)
            .into_iter()
            .filter(|&a| (self.field.norm(a).abs() as f64) <= norm_max)
            .filter(|&a| j != 6 || self.opts.full_m || self.field.is_mu_canonical(a, self.opts.window))
            .filter(|&a| self.coprime_with_fixed(j, a, fixed))
            .collect()
    }

    fn prefixes(&self) -> Vec<[AlgInt; 5]> {
        let order: [usize; 5] = match self.opts.order {
            LoopOrder::Standard => [1, 2, 3, 4, 5],
            LoopOrder::Permuted => [5, 4, 3, 2, 1],
        };
        let mut out = Vec::new();
        let mut fixed = [None; 9];
        self.extend_prefix(&order, 0, &mut fixed, &mut out);
        out
    }

    fn extend_prefix(
        &self,
        order: &[usize; 5],
        depth: usize,
        fixed: &mut [Option<AlgInt>; 9],
        out: &mut Vec<[AlgInt; 5]>,
    ) {
        if depth == 5 {
            out.push([0, 1, 2, 3, 4].map(|i| fixed[i].expect("prefix fixed")));
            return;
        }
        let j = order[depth];
        let x = self.ctx.norm_bound(&self.norms(fixed), j);
        for &(n, a) in &self.canon {
            if n > x {
                break;
            }
            if self.coprime_with_fixed(j, a, fixed) {
                fixed[j - 1] = Some(a);
                self.extend_prefix(order, depth + 1, fixed, out);
                fixed[j - 1] = None;
            }
        }
    }

    fn first_second(&self) -> (usize, usize) {
        if self.opts.order == LoopOrder::Permuted && self.ctx.single_place {
            (7, 6)
        } else {
            (6, 7)
        }
    }

    fn process(&self, prefix: &[AlgInt; 5], first_value: AlgInt) -> Result<Tally> {
        let (first, second) = self.first_second();
        let mut fixed = [None; 9];
        for i in 0..5 {
            fixed[i] = Some(prefix[i]);
        }
        fixed[first - 1] = Some(first_value);
        let mut tally = Tally::default();
        for second_value in self.candidates_67(second, &fixed) {
            fixed[second - 1] = Some(second_value);
            self.process_a8(&mut fixed, &mut tally)?;
        }
        Ok(tally)
    }

    fn process_a8(&self, fixed: &mut [Option<AlgInt>; 9], tally: &mut Tally) -> Result<()> {
        let f = self.field;
        let abs = self.abs_vector(fixed);
        let bounds = self.ctx.a8_place_bounds(&abs);
        let a: Vec<AlgInt> = fixed[..7].iter().map(|x| x.expect("a1..a7 fixed")).collect();
        let c = c_term(f, &a);
        for a8 in f.box_elements(&bounds, true) {
            let s = c + f.mul(a[1], a8);
            let Some(a9) = f.exact_divide(-s, a[0])? else { continue };
            tally.candidates += 1;
            fixed[7] = Some(a8);
            let coprime8 = self.coprime_with_fixed(8, a8, fixed);
            fixed[8] = Some(a9);
            let coprime9 = coprime8 && self.coprime_with_fixed(9, a9, fixed);
            fixed[7] = None;
            fixed[8] = None;
            if !coprime9 {
                continue;
            }
            let full = [a[0], a[1], a[2], a[3], a[4], a[5], a[6], a8, a9];
            let x = psi_raw(f, &full);
            if place_max_product_cmp(f, &x, *self.b.numer(), *self.b.denom()).is_gt() {
                continue;
            }
            if f.is_real_quadratic() {
                let pos = ratio_position(f, &x);
                if pos.on_boundary() {
                    tally.boundary += 1;
                }
                if !pos.contained() {
                    continue;
                }
            }
            tally.m += 1;
            if f.is_mu_canonical(a[5], self.domain.window) {
                tally.orbit += 1;
                if self.opts.collect_points {
                    tally.points.push(TorsorPoint { a: full });
                }
            }
        }
        Ok(())
    }
}

fn run_generic(field: &Field, b: &Rational, opts: &EnumOptions) -> Result<EnumResult> {
    if b.numer().is_zero() {
        return Ok(EnumResult::empty(*b, opts));
    }
    let ctx = BoundContext::new(field, b);
    let domain = FundDomain::new(opts.window);
    let mut nonadjacent = [[false; 10]; 10];
    for (i, j) in DynkinData::new().nonadjacent {
        nonadjacent[i][j] = true;
        nonadjacent[j][i] = true;
    }
    let xmax = (1..=5).map(|j| ctx.norm_bound(&[None; 7], j)).fold(0.0, f64::max);
    let mut canon: Vec<(f64, AlgInt)> = field
        .enumerate_box(&ctx.f1_place_bounds(xmax))
        .into_iter()
        .filter(|&a| domain.f1_contains(field, a))
        .map(|a| (field.norm(a).abs() as f64, a))
        .filter(|&(n, _)| n <= xmax)
        .collect();
    canon.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let engine = Generic { field, b: *b, ctx, domain, opts: *opts, nonadjacent, canon };

    let (first, _) = engine.first_second();
    let items: Vec<([AlgInt; 5], AlgInt)> = engine
        .prefixes()
        .into_par_iter()
        .flat_map_iter(|prefix| {
            let mut fixed = [None; 9];
            for i in 0..5 {
                fixed[i] = Some(prefix[i]);
            }
            engine.candidates_67(first, &fixed).into_iter().map(move |v| (prefix, v))
        })
        .collect();
    let tally = items
        .par_iter()
        .map(|(prefix, v)| engine.process(prefix, *v))
        .try_reduce(Tally::default, |x, y| Ok(x.merge(y)))?;

    let m_count = if opts.full_m {
        if tally.m != tally.orbit * field.mu_order as u64 {
            return Err(Error::Internal(format!(
                "|M| = {} is not |μ|·N = {}·{}",
                tally.m, field.mu_order, tally.orbit
            )));
        }
        Some(tally.m)
    } else {
        None
    };
    let points = opts.collect_points.then(|| {
        let set: BTreeSet<TorsorPoint> = tally.points.into_iter().collect();
        set.into_iter().collect()
    });
    Ok(EnumResult {
        bound: *b,
        orbit_count: tally.orbit,
        m_count,
        points,
        candidates: tally.candidates,
        boundary_hits: tally.boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{make_field, FieldTag};

    fn generic() -> EnumOptions {
        EnumOptions { engine: Engine::Generic, collect_points: true, ..Default::default() }
    }

    #[test]
    fn worked_examples_rational() {
        let q = make_field(FieldTag::Q);
        let r = enumerate_m(&q, &Rational::from_integer(1)).unwrap();
        assert_eq!((r.orbit_count, r.m_count), (4, Some(8)));
        let r = enumerate_m(&q, &Rational::new(1, 2)).unwrap();
        assert_eq!((r.orbit_count, r.m_count), (0, Some(0)));
        let g = enumerate_m_with(&q, &Rational::from_integer(1), &generic()).unwrap();
        assert_eq!((g.orbit_count, g.m_count), (4, Some(8)));
    }

    #[test]
    fn engines_agree_over_rationals() {
        let q = make_field(FieldTag::Q);
        for b in [2, 5, 10, 30] {
            let b = Rational::from_integer(b);
            let fast = enumerate_m_with(&q, &b, &EnumOptions { collect_points: true, ..Default::default() })
                .unwrap();
            let slow = enumerate_m_with(&q, &b, &generic()).unwrap();
            assert_eq!(fast.orbit_count, slow.orbit_count);
            assert_eq!(fast.m_count, slow.m_count);
            assert_eq!(fast.points, slow.points);
        }
    }

    #[test]
    fn windows_orders_and_threads_agree() {
        for tag in [FieldTag::QI, FieldTag::QSqrt2, FieldTag::QSqrtM3] {
            let f = make_field(tag);
            let b = Rational::from_integer(8);
            let base = enumerate_m(&f, &b).unwrap();
            for window in [UnitWindow::Standard, UnitWindow::Shifted] {
                for order in [LoopOrder::Standard, LoopOrder::Permuted] {
                    for threads in [1, 3] {
                        let o = EnumOptions { window, order, threads: Some(threads), ..Default::default() };
                        let r = enumerate_m_with(&f, &b, &o).unwrap();
                        assert_eq!((r.orbit_count, r.m_count), (base.orbit_count, base.m_count), "{tag}");
                    }
                }
            }
        }
    }
}
