//! Archimedean densities `ω_v`, computed two independent ways.
//!
//! * **region3d**: `ω_v = (3/2)·vol{N_v ≤ 1}` at a real place and
//!   `(12/π)·vol{N_v ≤ 1}` at a complex place, with the volume estimated by
//!   importance-sampled Monte Carlo (see [`super::montecarlo`]).
//! * **adelic2d**: `ω_v = ∫∫ dz₀ dz₃ / max{1, |w|_v, |z₀w|_v, |z₃w|_v, |z₀z₃w|_v}`
//!   with `w = z₀ + z₃`, the measure being Lebesgue at real places and twice
//!   Lebesgue on each factor (factor 4 overall) at complex places.
//!
//! Because `max{1, |w|, |z₀w|, |z₃w|, |z₀z₃w|} = max(1, a·|w|·max(1, |z₃|))`
//! with `a = max(1, |z₀|)`, the inner integral over `z₃` has a closed form.
//!
//! # Real place
//!
//! For `z₀ ≥ 0` (the integrand is even under `(z₀, z₃) ↦ (−z₀, −z₃)`) the
//! inner integral `g(z₀)` splits into four closed-form pieces:
//! `|z₃| ≤ 1`, `z₃ > 1`, and `z₃ < −1` with `w > 0` or `w ≤ 0`. Then
//! `ω = 2∫₀^∞ g`, integrated numerically over `[0, 1]` and over
//! `s = ln z₀ ∈ [0, 40]`; for `z₀ ≥ 2` one has `g(z₀) ≤ (9 + 12 ln z₀)/z₀²`,
//! so the remainder beyond `Z` is at most `2(21 + 12 ln Z)/Z`.
//!
//! # Complex place
//!
//! In polar coordinates `z₀ = r e^{iφ}` the integrand depends on `r` and on
//! `u = z₀ + z₃`; with `A = max(1, r²)`, `k = A|u|²`, `ρ = |u|`, the angular
//! integral over `arg u` has a closed form `J(ρ; r)`, and
//! `ω = 4·∫₀^∞ 2πr ∫₀^∞ ρ J(ρ; r) dρ dr`. The `ρ`-tail beyond
//! `P ≥ max(r + 1, 1/√A)` is exact, and the `r`-tail uses
//! `G(r) ≤ (π/r⁴)(73 + 32 ln r)` for `r ≥ 2`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::montecarlo::{self, Estimate};
use super::quadrature::{integrate, integrate_pieces, Quad};
use crate::error::{Error, Result};
use crate::numberfield::{Field, PlaceKind};

/// How a density was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityMethod {
    #[serde(rename = "region3d-mc")]
    Region3dMc,
    #[serde(rename = "adelic2d-quad")]
    Adelic2dQuad,
}

impl fmt::Display for DensityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityMethod::Region3dMc => "region3d-mc",
            DensityMethod::Adelic2dQuad => "adelic2d-quad",
        })
    }
}

impl FromStr for DensityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "region3d-mc" | "region3d" | "mc" => Ok(DensityMethod::Region3dMc),
            "adelic2d-quad" | "adelic2d" | "quad" => Ok(DensityMethod::Adelic2dQuad),
            _ => Err(Error::Domain(format!("unknown density method {s:?}"))),
        }
    }
}

/// An archimedean density with its error bar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub place: usize,
    pub kind: PlaceKind,
    pub value: f64,
    /// Quadrature: error estimate plus rigorous tail bounds. Monte Carlo:
    /// one standard error.
    pub err: f64,
    pub method: DensityMethod,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

/// Work budget and accuracy target for [`omega_arch`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityConfig {
    /// Monte Carlo sample count.
    pub samples: u64,
    pub seed: u64,
    /// Requested relative error bar; exceeding it is a budget error.
    pub rel_err: f64,
    /// Maximal number of subintervals per one-dimensional quadrature.
    pub max_intervals: usize,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { samples: 1_000_000, seed: 0, rel_err: 1e-2, max_intervals: 4000 }
    }
}

/// The integrand `1/max{1, |w|_v, |z₀w|_v, |z₃w|_v, |z₀z₃w|_v}` at a real
/// place.
pub fn adelic_integrand_real(z0: f64, z3: f64) -> f64 {
    let w = z0 + z3;
    let m = [1.0, w.abs(), (z0 * w).abs(), (z3 * w).abs(), (z0 * z3 * w).abs()];
    1.0 / m.iter().fold(0.0f64, |a, &b| a.max(b))
}

/// `∫₀^u dt / max(1, a|t|)` (odd in `u`).
fn phi(u: f64, a: f64) -> f64 {
    let x = u.abs();
    let v = if x <= 1.0 / a { x } else { (1.0 + (a * x).ln()) / a };
    v.copysign(u)
}

/// `ln(1 + x)/x`, continuous at 0.
fn ln1p_over(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x / 2.0
    } else {
        x.ln_1p() / x
    }
}

/// `g(z₀) = ∫_ℝ dz₃ / max{…}` for `z₀ ≥ 0` (real place).
pub fn real_inner(z0: f64) -> f64 {
    let z0 = z0.abs();
    let a = z0.max(1.0);
    // |z₃| ≤ 1: integrand 1/max(1, a|w|).
    let near = phi(z0 + 1.0, a) - phi(z0 - 1.0, a);
    // z₃ > 1: a·w·z₃ ≥ 1, integrand 1/(a z₃ (z₀ + z₃)).
    let right = ln1p_over(z0) / a;
    // z₃ < −1 and w = t ∈ (0, z₀ − 1): integrand min(1, 1/(a t (z₀ − t))).
    let l1 = if z0 > 1.0 {
        let len = z0 - 1.0;
        let disc = z0 * z0 - 4.0 / a;
        if disc < 0.0 {
            len
        } else {
            let sq = disc.sqrt();
            let t_minus = (2.0 / a) / (z0 + sq);
            let t_plus = (z0 + sq) / 2.0;
            // t₊ + t₋ = z₀, so `z₀ − t` is taken from the partner root (or
            // is exactly 1 at t = z₀ − 1) to avoid cancellation.
            let (lo, lo_c) = if t_minus < len { (t_minus, t_plus) } else { (len, 1.0) };
            let (hi, hi_c, rest) = if t_plus < len { (t_plus, t_minus, len - t_plus) } else { (len, 1.0, 0.0) };
            lo + ((hi / hi_c).ln() - (lo / lo_c).ln()) / (a * z0) + rest
        }
    } else {
        0.0
    };
    // z₃ < −1 and w = −t with t ≥ max(1 − z₀, 0): integrand
    // min(1, 1/(a t (z₀ + t))).
    let t0 = (1.0 - z0).max(0.0);
    let t_star = (2.0 / a) / (z0 + (z0 * z0 + 4.0 / a).sqrt());
    let t = t0.max(t_star);
    let l2 = (t - t0) + ln1p_over(z0 / t) / (a * t);
    near + right + l1 + l2
}

/// `ω_v` at a real place via the two-variable form.
pub fn adelic2d_real(max_intervals: usize) -> Result<Quad> {
    const S_MAX: f64 = 40.0;
    let tol = 1e-11;
    let head = integrate(real_inner, 0.0, 1.0, tol, max_intervals)?;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let breaks = [0.0, golden.ln(), 4f64.ln() / 3.0, 2f64.ln(), 2.0, 5.0, 10.0, 20.0, S_MAX];
    let body = integrate_pieces(|s: f64| real_inner(s.exp()) * s.exp(), &breaks, tol, max_intervals)?;
    let z = S_MAX.exp();
    let tail = 2.0 * (21.0 + 12.0 * z.ln()) / z;
    let q = head + body;
    Ok(Quad { value: 2.0 * q.value, err: 2.0 * q.err + tail, evaluations: q.evaluations })
}

/// `∫₀^{2π} dθ / max(1, c·(ρ² + r² − 2ρr cos θ))`.
pub fn complex_ring(c: f64, rho: f64, r: f64) -> f64 {
    let lo = (rho - r) * (rho - r);
    let hi = (rho + r) * (rho + r);
    if c * hi <= 1.0 {
        return TAU;
    }
    if c * lo >= 1.0 {
        return TAU / (c * (rho * rho - r * r).abs());
    }
    let inv = 1.0 / c;
    let tan_half = ((inv - lo) / (hi - inv)).sqrt();
    let theta_star = 2.0 * tan_half.atan();
    let y = (rho - r).abs() / ((rho + r) * tan_half);
    let atanc = if y < 1e-8 { 1.0 - y * y / 3.0 } else { y.atan() / y };
    2.0 * theta_star + (4.0 / c) * atanc / (hi * tan_half)
}

/// Angular integral `J(ρ; r)` of the complex-place integrand over `arg u`,
/// where `u = z₀ + z₃`, `|z₀| = r`, `|u| = ρ`.
pub fn complex_angular(rho: f64, r: f64) -> f64 {
    let a = (r * r).max(1.0);
    let k = a * rho * rho;
    if k >= 1.0 {
        complex_ring(1.0, rho, r) / k
    } else {
        complex_ring(k, rho, r)
    }
}

/// `G(r) = ∫₀^∞ ρ J(ρ; r) dρ`.
pub fn complex_radial(r: f64, tol: f64, max_intervals: usize) -> Result<Quad> {
    let a = (r * r).max(1.0);
    let s = 1.0 / a.sqrt();
    let mut pts = vec![0.0, s, r, r + 1.0, (r - 1.0).abs(), 1.0 - r];
    // Roots of ρ(ρ + r) = s and ρ|ρ − r| = s.
    pts.push((-r + (r * r + 4.0 * s).sqrt()) / 2.0);
    pts.push((r + (r * r + 4.0 * s).sqrt()) / 2.0);
    if r * r >= 4.0 * s {
        let d = (r * r - 4.0 * s).sqrt();
        pts.push((r - d) / 2.0);
        pts.push((r + d) / 2.0);
    }
    let p = 2.0 * (r + 1.0).max(s) + 1.0;
    pts.push(p);
    let pts: Vec<f64> = pts.into_iter().filter(|&x| (0.0..=p).contains(&x)).collect();
    let body = integrate_pieces(|rho: f64| rho * complex_angular(rho, r), &pts, tol, max_intervals)?;
    // Exact tail: J = 2π/(Aρ²(ρ² − r²)) for ρ ≥ P.
    let tail = if r == 0.0 {
        PI / (a * p * p)
    } else {
        let x = r * r / (p * p);
        PI / (a * p * p) * (-(-x).ln_1p() / x)
    };
    Ok(Quad { value: body.value + tail, ..body })
}

/// `ω_v` at a complex place via the two-variable form.
pub fn adelic2d_complex(max_intervals: usize) -> Result<Quad> {
    const S_MAX: f64 = 30.0;
    let tol = 1e-9;
    let inner_scale = 1e-3 * tol;
    let f_head = |r: f64| -> Result<f64> {
        let g = complex_radial(r, inner_scale, max_intervals)?;
        Ok(r * g.value)
    };
    let f_body = |s: f64| -> Result<f64> {
        let r = s.exp();
        let g = complex_radial(r, inner_scale / (1.0 + r * r), max_intervals)?;
        Ok(r * r * g.value)
    };
    let head = integrate_fallible(f_head, &[0.0, 0.5, 1.0], tol, max_intervals)?;
    let body = integrate_fallible(f_body, &[0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, S_MAX], tol, max_intervals)?;
    let q = head + body;
    let factor = 8.0 * PI;
    let big_r = S_MAX.exp();
    let r_tail = 8.0 * PI * PI * (44.5 + 16.0 * big_r.ln()) / (big_r * big_r);
    // Propagated inner error: ∫ 8πr·tol_in(r) dr over [0, e^{S_MAX}].
    let inner_err = factor * inner_scale * (0.5 + 0.5 * (1.0 + big_r * big_r).ln());
    Ok(Quad {
        value: factor * q.value,
        err: factor * q.err + r_tail + inner_err,
        evaluations: q.evaluations,
    })
}

/// Runs [`integrate_pieces`] on a fallible integrand, surfacing the first
/// inner error.
fn integrate_fallible<F: Fn(f64) -> Result<f64>>(f: F, xs: &[f64], tol: f64, max_intervals: usize) -> Result<Quad> {
    let failure = std::cell::RefCell::new(None);
    let q = integrate_pieces(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        xs,
        tol,
        max_intervals,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    q
}

/// `vol{N_v ≤ 1}` by Monte Carlo.
pub fn region_volume(kind: PlaceKind, samples: u64, seed: u64) -> Result<Estimate> {
    match kind {
        PlaceKind::Real => montecarlo::estimate(samples, seed, montecarlo::region_real_draw),
        PlaceKind::Complex => montecarlo::estimate(samples, seed, montecarlo::region_complex_draw),
    }
}

/// The factor turning `vol{N_v ≤ 1}` into `ω_v`.
pub fn region_factor(kind: PlaceKind) -> f64 {
    match kind {
        PlaceKind::Real => 1.5,
        PlaceKind::Complex => 12.0 / PI,
    }
}

/// `ω_v` at the archimedean place `place` of `field`.
pub fn omega_arch(field: &Field, place: usize, method: DensityMethod, cfg: &DensityConfig) -> Result<Density> {
    let kind = field
        .places()
        .get(place)
        .ok_or_else(|| Error::Domain(format!("{} has no archimedean place {place}", field.tag.display_name())))?
        .kind;
    let density = match method {
        DensityMethod::Adelic2dQuad => {
            let q = match kind {
                PlaceKind::Real => adelic2d_real(cfg.max_intervals)?,
                PlaceKind::Complex => adelic2d_complex(cfg.max_intervals)?,
            };
            Density { place, kind, value: q.value, err: q.err, method, seed: None, samples: None }
        }
        DensityMethod::Region3dMc => {
            let e = region_volume(kind, cfg.samples, cfg.seed)?;
            let f = region_factor(kind);
            Density {
                place,
                kind,
                value: f * e.mean,
                err: f * e.stderr,
                method,
                seed: Some(cfg.seed),
                samples: Some(cfg.samples),
            }
        }
    };
    let rel = density.err / density.value.abs();
    if !(rel <= cfg.rel_err) {
        return Err(Error::BudgetExceeded {
            context: format!("{method} density at place {place}"),
            achieved: rel,
            requested: cfg.rel_err,
        });
    }
    Ok(density)
}
