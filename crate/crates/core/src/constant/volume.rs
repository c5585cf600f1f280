//! Monte Carlo check of the volume of the height region `S_F(𝐚′; B)`.
//!
//! For fixed nonzero `𝐚′ = (a1, …, a5)` the region is the set of real
//! `(x6, x7, x8)` per place with `∏_v Ñ_v(𝐚′, x) ≤ B` (and, for real quadratic
//! fields, `1 ≤ Ñ₁/Ñ₂ < ε⁶`, which selects one orbit of the unit action on
//! the two height factors). Its volume is predicted to be
//! `(1/3)·2^{r₁}·∏ω_v·R_K·B/|N(a2a3a4a5)|`.
//!
//! The estimator samples the substitution
//! `y0 = l^{−1/3}a2·x8`, `y1 = l^{−1/3}a1a2a3a4a5·x6`, `y2 = l^{−1/3}a3a4²a5³·x7`
//! with `l = |a1a2a3a4²a5³|`, under which `Ñ_v(𝐚′, x) = N_v(y)` and
//! `dx = dy/|a2a3a4a5|`. Points `y` are drawn from the covering proposal of
//! `{N_v ≤ T_v}` with `T_v` an upper bound for the place-`v` factor; the
//! indicator is then evaluated on `Ñ` in the original coordinates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::density::adelic2d_real;
use super::montecarlo::{estimate, sample_real_pair};
use crate::error::{Error, Result};
use crate::numberfield::{AlgInt, Field};
use crate::torsor::tilde_n_real;

/// Outcome of [`volume_sf_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    #[serde(rename = "B")]
    pub bound: f64,
    pub samples: u64,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub predicted: f64,
    /// `|estimate − predicted|/predicted`.
    pub rel_dev: f64,
    /// `|estimate − predicted|/stderr`.
    pub z: f64,
}

impl VolumeReport {
    /// Within `rel` relative deviation and below `z_max` standard errors.
    pub fn passes(&self, rel: f64, z_max: f64) -> bool {
        self.rel_dev <= rel && self.z < z_max
    }
}

/// Per-place data of the substitution.
struct PlaceMap {
    a: [f64; 5],
    /// Multipliers turning `y` into `(x8, x6, x7)`.
    to_x: [f64; 3],
    /// Scale `T_v^{1/3}` of the proposal and its volume factor `T_v`.
    scale: f64,
    volume: f64,
}

impl PlaceMap {
    fn new(a: [f64; 5], t: f64) -> PlaceMap {
        let [a1, a2, a3, a4, a5] = a;
        let l = (a1 * a2 * a3 * a4 * a4 * a5 * a5 * a5).abs();
        let c = l.cbrt();
        PlaceMap {
            a,
            to_x: [c / a2, c / (a1 * a2 * a3 * a4 * a5), c / (a3 * a4 * a4 * a5 * a5 * a5)],
            scale: t.cbrt(),
            volume: t,
        }
    }

    /// Draws a point, returning `(Ñ_v, weight)`.
    fn draw<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let (y0, y2, w) = sample_real_pair(rng);
        let y1: f64 = rng.gen_range(-1.0..=1.0);
        let s = self.scale;
        let x8 = s * y0 * self.to_x[0];
        let x6 = s * y1 * self.to_x[1];
        let x7 = s * y2 * self.to_x[2];
        let [a1, a2, a3, a4, a5] = self.a;
        (tilde_n_real(&[a1, a2, a3, a4, a5, x6, x7, x8]), 2.0 * w * self.volume)
    }
}

/// Estimates `vol S_F(𝐚′; B)` and compares it with the closed form.
pub fn volume_sf_check(field: &Field, a: &[AlgInt; 5], b: f64, samples: u64, seed: u64) -> Result<VolumeReport> {
    if field.is_imaginary() {
        return Err(Error::Domain("the volume check needs a rational or real quadratic field".into()));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("B must be positive, got {b}")));
    }
    if a.iter().any(|x| x.is_zero()) {
        return Err(Error::Domain("a1, …, a5 must be nonzero".into()));
    }
    let norm = field.norm(field.mul_all(&a[1..5])).unsigned_abs() as f64;
    let omega = adelic2d_real(4000)?.value;
    let places = field.places().len();
    let predicted = (2f64.powi(places as i32) / 3.0) * omega.powi(places as i32) * field.regulator * b / norm;
    let sigma = |v: usize| -> [f64; 5] { std::array::from_fn(|i| field.sigma(a[i], v).0) };
    let est = if field.is_rational() {
        let map = PlaceMap::new(sigma(0), b);
        estimate(samples, seed, |rng| {
            let (n, w) = map.draw(rng);
            if n <= b {
                w / norm
            } else {
                0.0
            }
        })?
    } else {
        let eps = field.fund_unit_f64().expect("real quadratic fields have a fundamental unit");
        let eps6 = eps.powi(6);
        let m1 = PlaceMap::new(sigma(0), eps.powi(3) * b.sqrt());
        let m2 = PlaceMap::new(sigma(1), b.sqrt());
        estimate(samples, seed, |rng| {
            let (n1, w1) = m1.draw(rng);
            let (n2, w2) = m2.draw(rng);
            if n1 * n2 <= b && n1 >= n2 && n1 < eps6 * n2 {
                w1 * w2 / norm
            } else {
                0.0
            }
        })?
    };
    let dev = (est.mean - predicted).abs();
    Ok(VolumeReport {
        bound: b,
        samples,
        seed,
        estimate: est.mean,
        stderr: est.stderr,
        predicted,
        rel_dev: dev / predicted,
        z: if est.stderr > 0.0 { dev / est.stderr } else { f64::INFINITY },
    })
}
