//! Exact volumes of small bounded polytopes given by rational half-spaces.
//!
//! Vertices are found by intersecting every `d`-subset of the bounding
//! hyperplanes and keeping the feasible, distinct solutions. Boundedness is
//! certified first: the constraint matrix must have rank `d`, and no extreme
//! ray `r ≠ 0` of the recession cone `{r : A r ≤ 0}` may exist (every such ray
//! is the kernel of `d − 1` linearly independent rows).
//!
//! The volume is obtained from a pulling triangulation: fix a vertex `v₀` of a
//! face, triangulate recursively every facet of that face not containing
//! `v₀`, and cone over `v₀`. All arithmetic is exact.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The half-space `a · x ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub a: Vec<BigRational>,
    pub b: BigRational,
}

impl HalfSpace {
    /// Builds `a · x ≤ b` from integer data.
    pub fn from_ints(a: &[i64], b: i64) -> HalfSpace {
        HalfSpace { a: a.iter().map(|&v| rat(v)).collect(), b: rat(b) }
    }

    /// Multiplies both sides by a positive rational.
    pub fn scaled(&self, s: &BigRational) -> HalfSpace {
        assert!(s.is_positive(), "half-spaces may only be scaled by positive factors");
        HalfSpace { a: self.a.iter().map(|x| x * s).collect(), b: &self.b * s }
    }

    fn slack(&self, x: &[BigRational]) -> BigRational {
        let dot: BigRational = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        &self.b - dot
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// A polytope `{x ∈ ℝᵈ : a_i · x ≤ b_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeH {
    pub dim: usize,
    pub halfspaces: Vec<HalfSpace>,
}

/// Solves `M x = r` for square `M`; `None` if singular.
fn solve(mut m: Vec<Vec<BigRational>>, mut r: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot);
        r.swap(col, pivot);
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[col][col];
                for j in col..n {
                    let v = &f * &m[col][j];
                    m[i][j] -= v;
                }
                let v = &f * &r[col];
                r[i] -= v;
            }
        }
    }
    Some((0..n).map(|i| &r[i] / &m[i][i]).collect())
}

/// Rank of a list of rational row vectors.
fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &m[rank][col];
                for j in col..cols {
                    let v = &f * &m[rank][j];
                    m[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A nonzero kernel vector of `rows` (`d − 1` independent rows in `ℝᵈ`).
fn kernel_vector(rows: &[Vec<BigRational>], d: usize) -> Option<Vec<BigRational>> {
    // Append each unit vector as an extra row until the system is regular.
    for k in 0..d {
        let mut m = rows.to_vec();
        let mut e = vec![BigRational::zero(); d];
        e[k] = BigRational::one();
        m.push(e);
        let mut r = vec![BigRational::zero(); d];
        r[d - 1] = BigRational::one();
        if let Some(x) = solve(m, r) {
            return Some(x);
        }
    }
    None
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else { return BigRational::zero() };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        for i in col + 1..n {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &m[col][col];
                for j in col..n {
                    let v = &f * &m[col][j];
                    m[i][j] -= v;
                }
            }
        }
    }
    det
}

impl PolytopeH {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<PolytopeH> {
        if halfspaces.iter().any(|h| h.a.len() != dim) {
            return Err(Error::Domain("half-space dimension mismatch".into()));
        }
        Ok(PolytopeH { dim, halfspaces })
    }

    /// Whether the polytope is bounded (see the module documentation).
    pub fn is_bounded(&self) -> bool {
        let rows: Vec<Vec<BigRational>> = self.halfspaces.iter().map(|h| h.a.clone()).collect();
        if rank(&rows) < self.dim {
            return false;
        }
        for idx in subsets(rows.len(), self.dim - 1) {
            let sub: Vec<Vec<BigRational>> = idx.iter().map(|&i| rows[i].clone()).collect();
            if rank(&sub) != self.dim - 1 {
                continue;
            }
            let Some(r) = kernel_vector(&sub, self.dim) else { continue };
            for dir in [r.clone(), r.iter().map(|x| -x).collect::<Vec<_>>()] {
                let recedes = rows.iter().all(|a| {
                    let dot: BigRational = a.iter().zip(&dir).map(|(a, x)| a * x).sum();
                    !dot.is_positive()
                });
                if recedes {
                    return false;
                }
            }
        }
        true
    }

    /// All vertices, each with the set of constraints tight at it.
    pub fn vertices(&self) -> Vec<(Vec<BigRational>, BTreeSet<usize>)> {
        let mut out: Vec<(Vec<BigRational>, BTreeSet<usize>)> = Vec::new();
        for idx in subsets(self.halfspaces.len(), self.dim) {
            let m: Vec<Vec<BigRational>> = idx.iter().map(|&i| self.halfspaces[i].a.clone()).collect();
            let r: Vec<BigRational> = idx.iter().map(|&i| self.halfspaces[i].b.clone()).collect();
            let Some(x) = solve(m, r) else { continue };
            if self.halfspaces.iter().any(|h| h.slack(&x).is_negative()) {
                continue;
            }
            if out.iter().any(|(v, _)| *v == x) {
                continue;
            }
            let tight = (0..self.halfspaces.len()).filter(|&i| self.halfspaces[i].slack(&x).is_zero()).collect();
            out.push((x, tight));
        }
        out
    }

    fn affine_dim(points: &[&Vec<BigRational>]) -> usize {
        if points.len() <= 1 {
            return 0;
        }
        let diffs: Vec<Vec<BigRational>> =
            points[1..].iter().map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect()).collect();
        rank(&diffs)
    }

    /// Simplices (as vertex index lists) of a pulling triangulation of the face
    /// spanned by `face` (vertex indices) of dimension `dim`.
    fn triangulate(
        verts: &[(Vec<BigRational>, BTreeSet<usize>)],
        face: &[usize],
        dim: usize,
        constraints: usize,
    ) -> Vec<Vec<usize>> {
        if dim == 0 {
            return vec![vec![face[0]]];
        }
        let v0 = face[0];
        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in 0..constraints {
            let sub: Vec<usize> = face.iter().copied().filter(|&v| verts[v].1.contains(&c)).collect();
            if sub.contains(&v0) || sub.len() < dim {
                continue;
            }
            let pts: Vec<&Vec<BigRational>> = sub.iter().map(|&v| &verts[v].0).collect();
            if Self::affine_dim(&pts) == dim - 1 {
                facets.insert(sub);
            }
        }
        let mut out = Vec::new();
        for facet in facets {
            for mut s in Self::triangulate(verts, &facet, dim - 1, constraints) {
                s.push(v0);
                out.push(s);
            }
        }
        out
    }

    /// Exact `d`-dimensional volume.
    pub fn volume(&self) -> Result<BigRational> {
        if !self.is_bounded() {
            return Err(Error::Internal("polytope is unbounded".into()));
        }
        let verts = self.vertices();
        if verts.is_empty() {
            return Ok(BigRational::zero());
        }
        let all: Vec<usize> = (0..verts.len()).collect();
        let pts: Vec<&Vec<BigRational>> = verts.iter().map(|(v, _)| v).collect();
        if Self::affine_dim(&pts) < self.dim {
            return Ok(BigRational::zero());
        }
        let simplices = Self::triangulate(&verts, &all, self.dim, self.halfspaces.len());
        let mut fact = BigRational::one();
        for k in 2..=self.dim {
            fact *= rat(k as i64);
        }
        let mut total = BigRational::zero();
        for s in simplices {
            let base = &verts[s[0]].0;
            let m: Vec<Vec<BigRational>> = s[1..]
                .iter()
                .map(|&i| verts[i].0.iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            total += determinant(m).abs();
        }
        Ok(total / fact)
    }
}

/// The polytope `x ≥ 0`, `2x1+2x2+2x3+x4 ≤ 1`, `−x1−x2+2x3+4x4+6x5 ≤ 1`.
pub fn alpha_polytope() -> PolytopeH {
    let mut hs: Vec<HalfSpace> = (0..5)
        .map(|i| {
            let mut a = [0i64; 5];
            a[i] = -1;
            HalfSpace::from_ints(&a, 0)
        })
        .collect();
    hs.push(HalfSpace::from_ints(&[2, 2, 2, 1, 0], 1));
    hs.push(HalfSpace::from_ints(&[-1, -1, 2, 4, 6], 1));
    PolytopeH { dim: 5, halfspaces: hs }
}

/// The standard simplex `x ≥ 0`, `Σ x_i ≤ 1` in `ℝᵈ`.
pub fn standard_simplex(dim: usize) -> PolytopeH {
    let mut hs: Vec<HalfSpace> = (0..dim)
        .map(|i| {
            let mut a = vec![0i64; dim];
            a[i] = -1;
            HalfSpace::from_ints(&a, 0)
        })
        .collect();
    hs.push(HalfSpace::from_ints(&vec![1; dim], 1));
    PolytopeH { dim, halfspaces: hs }
}

/// `α = vol(polytope)/3`.
pub fn alpha() -> Result<BigRational> {
    Ok(alpha_polytope().volume()? / rat(3))
}
