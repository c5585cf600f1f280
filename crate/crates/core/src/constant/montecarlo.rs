//! Reproducible Monte Carlo estimation and the covering proposal for the
//! region `{N_v(x0, x1, x2) ≤ 1}`.
//!
//! # Determinism
//!
//! Samples are drawn in chunks of [`CHUNK`]; chunk `i` uses a ChaCha8 stream
//! keyed by `(seed, i)`, so the multiset of samples does not depend on the
//! number of worker threads. Per-chunk sums are combined in chunk order with
//! compensated (Neumaier) summation.
//!
//! # The covering proposal
//!
//! For fixed `(x0, x2)` the conditions on `x1` are `|x1| ≤ 1` together with
//! bounds not involving `x1`, and `(x0, x2)` must satisfy
//! `|x0 x2 (x0 + x2)| ≤ 1`. Among the moduli of `x0`, `x2`, `x0 + x2` let
//! `m ≤ mid ≤ M`; each is at most the sum of the other two, so `M ≤ 2·mid`
//! and `m ≤ 1/(mid·M) ≤ 2/M²`. Hence every admissible `(x0, x2)` with
//! `max(|x0|, |x2|) > 2` lies in one of the strips
//!
//! * `A = {|x0| ≥ 1, |x2| ≤ 2/|x0|²}`,
//! * `B = {|x2| ≥ 1, |x0| ≤ 2/|x2|²}`,
//! * `C = {|x2| ≥ 1, |x0 + x2| ≤ 2/|x2|²}`,
//!
//! and otherwise in the core `{|x0| ≤ 2, |x2| ≤ 2}`. Over `ℝ` the strips have
//! measure 8 and the core 16; over `ℂ` the strips have measure `4π²` and the
//! core `16π²`. Sampling a component with probability proportional to its
//! measure and then uniformly inside it gives the proposal density
//! `n(x)/Σ|component|`, where `n(x)` is the number of components containing
//! `x`. No truncation is needed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per reproducible chunk.
pub const CHUNK: u64 = 1 << 16;

/// Mean and standard error of a Monte Carlo estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Averages `f(rng)` over `samples` draws.
pub fn estimate<F>(samples: u64, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples < 2 {
        return Err(Error::Domain("Monte Carlo needs at least 2 samples".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let n = CHUNK.min(samples - i * CHUNK);
            let (mut s, mut s2) = (Neumaier::default(), Neumaier::default());
            for _ in 0..n {
                let v = f(&mut rng);
                s.add(v);
                s2.add(v * v);
            }
            (s.value(), s2.value())
        })
        .collect();
    let (mut s, mut s2) = (Neumaier::default(), Neumaier::default());
    for (a, b) in partial {
        s.add(a);
        s2.add(b);
    }
    let n = samples as f64;
    let mean = s.value() / n;
    let var = ((s2.value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(Estimate { mean, stderr: (var / n).sqrt(), samples })
}

fn signed<R: Rng>(rng: &mut R, x: f64) -> f64 {
    if rng.gen::<bool>() {
        x
    } else {
        -x
    }
}

/// `U(0, 1]`.
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Total measure of the real covering.
pub const REAL_COVER_MEASURE: f64 = 40.0;

/// Draws `(x0, x2)` from the real covering proposal and returns it with the
/// importance weight `1/density`.
pub fn sample_real_pair<R: Rng>(rng: &mut R) -> (f64, f64, f64) {
    let u = rng.gen::<f64>() * REAL_COVER_MEASURE;
    let (x0, x2) = if u < 16.0 {
        (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0))
    } else {
        let mag = 1.0 / open_unit(rng);
        let t = signed(rng, mag);
        let s = rng.gen_range(-2.0..=2.0) / (t * t);
        if u < 24.0 {
            (t, s)
        } else if u < 32.0 {
            (s, t)
        } else {
            (-t + s, t)
        }
    };
    let n = real_cover_count(x0, x2);
    (x0, x2, REAL_COVER_MEASURE / n as f64)
}

/// Number of covering components containing `(x0, x2)`.
pub fn real_cover_count(x0: f64, x2: f64) -> u32 {
    let (a0, a2, s) = (x0.abs(), x2.abs(), (x0 + x2).abs());
    u32::from(a0 <= 2.0 && a2 <= 2.0)
        + u32::from(a0 >= 1.0 && a2 <= 2.0 / (a0 * a0))
        + u32::from(a2 >= 1.0 && a0 <= 2.0 / (a2 * a2))
        + u32::from(a2 >= 1.0 && s <= 2.0 / (a2 * a2))
}

/// Total measure of the complex covering.
pub const COMPLEX_COVER_MEASURE: f64 = 28.0 * std::f64::consts::PI * std::f64::consts::PI;

fn disc_point<R: Rng>(rng: &mut R, radius: f64) -> (f64, f64) {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = rng.gen::<f64>() * std::f64::consts::TAU;
    (r * phi.cos(), r * phi.sin())
}

fn modulus(z: (f64, f64)) -> f64 {
    z.0.hypot(z.1)
}

/// Complex analogue of [`sample_real_pair`].
pub fn sample_complex_pair<R: Rng>(rng: &mut R) -> ((f64, f64), (f64, f64), f64) {
    // Core measure 16π², each strip 4π²: pick a component in proportion.
    let u = rng.gen::<f64>() * 28.0;
    let (x0, x2) = if u < 16.0 {
        (disc_point(rng, 2.0), disc_point(rng, 2.0))
    } else {
        // |t| ≥ 1 with density ∝ |t|⁻⁴.
        let rho = 1.0 / open_unit(rng).sqrt();
        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
        let t = (rho * phi.cos(), rho * phi.sin());
        let s = disc_point(rng, 2.0 / (rho * rho));
        if u < 20.0 {
            (t, s)
        } else if u < 24.0 {
            (s, t)
        } else {
            ((s.0 - t.0, s.1 - t.1), t)
        }
    };
    let n = complex_cover_count(x0, x2);
    debug_assert!(n >= 1);
    (x0, x2, COMPLEX_COVER_MEASURE / n as f64)
}

/// Number of complex covering components containing `(x0, x2)`.
pub fn complex_cover_count(x0: (f64, f64), x2: (f64, f64)) -> u32 {
    let (a0, a2, s) = (modulus(x0), modulus(x2), modulus((x0.0 + x2.0, x0.1 + x2.1)));
    u32::from(a0 <= 2.0 && a2 <= 2.0)
        + u32::from(a0 >= 1.0 && a2 <= 2.0 / (a0 * a0))
        + u32::from(a2 >= 1.0 && a0 <= 2.0 / (a2 * a2))
        + u32::from(a2 >= 1.0 && s <= 2.0 / (a2 * a2))
}

/// `N_v(x0, x1, x2)` at a real place.
pub fn n_real(x0: f64, x1: f64, x2: f64) -> f64 {
    let s = x0 + x2;
    [x0 * x1 * x2, x1 * x1 * x1, x1 * x1 * x2, x1 * x2 * s, x0 * x2 * s]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `max` of the moduli of the five monomials of `N_v` at a complex place
/// (so `N_v` is its square).
pub fn n_complex_modulus(x0: (f64, f64), x1: (f64, f64), x2: (f64, f64)) -> f64 {
    let (a0, a1, a2) = (modulus(x0), modulus(x1), modulus(x2));
    let s = modulus((x0.0 + x2.0, x0.1 + x2.1));
    [a0 * a1 * a2, a1 * a1 * a1, a1 * a1 * a2, a1 * a2 * s, a0 * a2 * s]
        .iter()
        .fold(0.0f64, |m, &v| m.max(v))
}

/// One importance-weighted draw for `vol{N_v ≤ 1} ⊂ ℝ³`.
pub fn region_real_draw<R: Rng>(rng: &mut R) -> f64 {
    let (x0, x2, w) = sample_real_pair(rng);
    let x1 = rng.gen_range(-1.0..=1.0);
    if n_real(x0, x1, x2) <= 1.0 {
        2.0 * w
    } else {
        0.0
    }
}

/// One importance-weighted draw for `vol{N_v ≤ 1} ⊂ ℂ³ = ℝ⁶`.
pub fn region_complex_draw<R: Rng>(rng: &mut R) -> f64 {
    let (x0, x2, w) = sample_complex_pair(rng);
    let x1 = disc_point(rng, 1.0);
    if n_complex_modulus(x0, x1, x2) <= 1.0 {
        std::f64::consts::PI * w
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_thread_counts() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate(300_000, 7, region_real_draw).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn cover_contains_every_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let (x0, x2, _) = sample_real_pair(&mut rng);
            assert!(real_cover_count(x0, x2) >= 1);
            let (z0, z2, _) = sample_complex_pair(&mut rng);
            assert!(complex_cover_count(z0, z2) >= 1);
        }
    }

    #[test]
    fn region_points_are_covered() {
        // Rejection-sample the region in a large box and check coverage.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut hits = 0;
        for _ in 0..200_000 {
            let x0: f64 = rng.gen_range(-30.0..30.0);
            let x2: f64 = rng.gen_range(-30.0..30.0);
            if (x0 * x2 * (x0 + x2)).abs() <= 1.0 {
                hits += 1;
                assert!(real_cover_count(x0, x2) >= 1, "({x0}, {x2})");
            }
        }
        assert!(hits > 100);
    }

    #[test]
    fn simple_mean() {
        let e = estimate(100_000, 3, |r| r.gen::<f64>()).unwrap();
        assert!((e.mean - 0.5).abs() < 5.0 * e.stderr);
        assert!(estimate(1, 3, |_| 0.0).is_err());
    }
}
