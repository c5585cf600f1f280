//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (no test harness) so that every line is printed
//! even when all criteria pass. The process fails iff a hard criterion
//! fails; the trend check (criterion 10) is soft and only warns, with a
//! diagnostic dump.

use std::process::ExitCode;
use std::time::Instant;

use manin_dp4::constant::density::region_volume;
use manin_dp4::constant::{
    alpha, assemble_c, finite_product, mobius_local_check, omega_arch, polytope::standard_simplex, volume_sf_check,
    DensityConfig, DensityMethod,
};
use manin_dp4::direct::{count, Method};
use manin_dp4::geometry::count_fp;
use manin_dp4::numberfield::{make_field, AlgInt, FieldTag, PlaceKind, UnitWindow};
use manin_dp4::torsor::{bijection_check, enumerate_m_with, EnumOptions, LoopOrder};
use manin_dp4::Rational;
use num_rational::BigRational;

// Criterion 1.
const C1_BOUNDS: [i128; 8] = [1, 2, 5, 10, 50, 100, 500, 1000];
const C1_BUDGET_S: f64 = 120.0;
// Criterion 2.
const C2_FIELDS: [FieldTag; 2] = [FieldTag::QI, FieldTag::QSqrt2];
const C2_BOUNDS: [i128; 6] = [1, 2, 5, 10, 20, 50];
const C2_BIJECTION_BOUNDS: [i128; 4] = [1, 2, 5, 10];
const C2_BUDGET_S: f64 = 600.0;
// Criterion 4.
const C4_PRIMES: [u64; 3] = [2, 3, 5];
const C4_BUDGET_S: f64 = 1.0;
// Criterion 5.
const C5_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
const C5_BUDGET_S: f64 = 60.0;
// Criterion 6.
const C6_REL_TOL: f64 = 1e-2;
const C6_SAMPLES: u64 = 10_000_000;
const C6_SEED: u64 = 6;
const C6_BUDGET_S: f64 = 300.0;
// Criterion 7.
const C7_REL_TOL: f64 = 0.02;
const C7_Z_MAX: f64 = 3.0;
const C7_SAMPLES: u64 = 10_000_000;
const C7_SEED: u64 = 7;
const C7_BUDGET_S: f64 = 300.0;
// Criterion 8.
const C8_COARSE: u64 = 10_000;
const C8_FINE: u64 = 200_000;
// Criterion 9.
const C9_CASES: [(FieldTag, i128); 4] = [(FieldTag::Q, 100), (FieldTag::Q, 1000), (FieldTag::QI, 20), (FieldTag::QSqrt2, 20)];
const C9_THREADS: [usize; 3] = [1, 4, 8];
// Criterion 10.
const C10_BOUND: i128 = 1_000_000;
const C10_BAND: f64 = 10.0;
const C10_BUDGET_S: f64 = 1800.0;

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    soft: bool,
    detail: String,
    seconds: f64,
}

fn timed(id: u32, title: &'static str, soft: bool, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = f();
    let o = Outcome { id, title, passed, soft, detail, seconds: start.elapsed().as_secs_f64() };
    let tag = match (o.passed, o.soft) {
        (true, _) => "PASS",
        (false, false) => "FAIL",
        (false, true) => "WARN",
    };
    println!("[{tag}] criterion {:>2}: {} ({:.2} s) — {}", o.id, o.title, o.seconds, o.detail);
    o
}

fn int(b: i128) -> Rational {
    Rational::from_integer(b)
}

fn criterion1() -> Outcome {
    timed(1, "direct = torsor over Q, N(1) = 4", false, || {
        let start = Instant::now();
        let q = make_field(FieldTag::Q);
        let mut bad = Vec::new();
        let mut n1 = 0;
        for b in C1_BOUNDS {
            let d = count(&q, &int(b), Method::Direct, None).unwrap().count;
            let t = count(&q, &int(b), Method::Torsor, None).unwrap().count;
            if b == 1 {
                n1 = d;
            }
            if d != t {
                bad.push(format!("B={b}: {d} vs {t}"));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        (bad.is_empty() && n1 == 4 && secs < C1_BUDGET_S, format!("N(1)={n1}, mismatches={bad:?}, budget {C1_BUDGET_S} s"))
    })
}

fn criterion2() -> Outcome {
    timed(2, "direct = torsor over Q(i), Q(sqrt 2); bijection at B <= 10", false, || {
        let start = Instant::now();
        let mut bad = Vec::new();
        let mut mismatches = 0;
        for tag in C2_FIELDS {
            let f = make_field(tag);
            for b in C2_BOUNDS {
                let d = count(&f, &int(b), Method::Direct, None).unwrap().count;
                let t = count(&f, &int(b), Method::Torsor, None).unwrap().count;
                if d != t {
                    bad.push(format!("{tag} B={b}: {d} vs {t}"));
                }
            }
            for b in C2_BIJECTION_BOUNDS {
                mismatches += bijection_check(&f, &int(b)).unwrap().mismatches();
            }
        }
        let secs = start.elapsed().as_secs_f64();
        (
            bad.is_empty() && mismatches == 0 && secs < C2_BUDGET_S,
            format!("count mismatches={bad:?}, bijection mismatches={mismatches}, budget {C2_BUDGET_S} s"),
        )
    })
}

fn criterion3() -> Outcome {
    timed(3, "alpha = 1/8640 and simplex volume = 1/120", false, || {
        let a = alpha().unwrap();
        let s = standard_simplex(5).volume().unwrap();
        let ok = a == BigRational::new(1.into(), 8640.into()) && s == BigRational::new(1.into(), 120.into());
        (ok, format!("alpha={a}, simplex={s}"))
    })
}

fn criterion4() -> Outcome {
    timed(4, "Moebius identity, 32 subsets x 3 primes", false, || {
        let start = Instant::now();
        let mut passed = 0;
        for p in C4_PRIMES {
            for j in 0..32u8 {
                let (lhs, rhs) = mobius_local_check(p, j);
                passed += usize::from(lhs == rhs);
            }
        }
        let secs = start.elapsed().as_secs_f64();
        (passed == 96 && secs < C4_BUDGET_S, format!("{passed}/96 exact equalities, budget {C4_BUDGET_S} s"))
    })
}

fn criterion5() -> Outcome {
    timed(5, "|S(F_p)| + 4p = p^2 + 6p + 1", false, || {
        let start = Instant::now();
        let mut bad = Vec::new();
        for p in C5_PRIMES {
            let n = count_fp(p).unwrap();
            if n + 4 * p != p * p + 6 * p + 1 {
                bad.push((p, n));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        (bad.is_empty() && secs < C5_BUDGET_S, format!("failures={bad:?}, budget {C5_BUDGET_S} s"))
    })
}

fn criterion6() -> Outcome {
    timed(6, "real place: adelic2d vs (3/2) region3d within 1%", false, || {
        let start = Instant::now();
        let q = make_field(FieldTag::Q);
        let quad = omega_arch(&q, 0, DensityMethod::Adelic2dQuad, &DensityConfig::default()).unwrap();
        let vol = region_volume(PlaceKind::Real, C6_SAMPLES, C6_SEED).unwrap();
        let (mc, mc_err) = (1.5 * vol.mean, 1.5 * vol.stderr);
        let rel = (quad.value - mc).abs() / quad.value;
        let overlap = (quad.value - mc).abs() <= 3.0 * quad.err.hypot(mc_err);
        let secs = start.elapsed().as_secs_f64();
        (
            rel <= C6_REL_TOL && overlap && secs < C6_BUDGET_S,
            format!(
                "adelic2d={:.6}±{:.1e}, 1.5*region3d={mc:.6}±{mc_err:.1e}, rel={rel:.2e} (tol {C6_REL_TOL}), 3-sigma overlap={overlap}",
                quad.value, quad.err
            ),
        )
    })
}

fn criterion7() -> Outcome {
    timed(7, "height-region volume over Q within 2%, z < 3", false, || {
        let start = Instant::now();
        let q = make_field(FieldTag::Q);
        let mut worst_rel = 0.0f64;
        let mut worst_z = 0.0f64;
        let mut ok = true;
        for a in [[1, 1, 1, 1, 1], [1, 2, 1, 1, 1]] {
            for b in [1.0, 8.0] {
                let r = volume_sf_check(&q, &a.map(AlgInt::int), b, C7_SAMPLES, C7_SEED).unwrap();
                ok &= r.passes(C7_REL_TOL, C7_Z_MAX);
                worst_rel = worst_rel.max(r.rel_dev);
                worst_z = worst_z.max(r.z);
            }
        }
        let secs = start.elapsed().as_secs_f64();
        (
            ok && secs < C7_BUDGET_S,
            format!("worst rel={worst_rel:.2e} (tol {C7_REL_TOL}), worst z={worst_z:.2} (max {C7_Z_MAX}), {C7_SAMPLES} samples"),
        )
    })
}

fn criterion8() -> Outcome {
    timed(8, "Euler product P=2e5 inside the P=1e4 enclosure", false, || {
        let mut details = Vec::new();
        let mut ok = true;
        for tag in [FieldTag::Q, FieldTag::QI, FieldTag::QSqrt2] {
            let f = make_field(tag);
            let coarse = finite_product(&f, C8_COARSE).unwrap();
            let fine = finite_product(&f, C8_FINE).unwrap();
            ok &= coarse.contains(fine.value);
            details.push(format!("{tag}: {:.9} in [{:.9}, {:.9}]", fine.value, coarse.tail_lo, coarse.tail_hi));
        }
        (ok, details.join("; "))
    })
}

fn criterion9() -> Outcome {
    timed(9, "torsor counts invariant under window, loop order, threads; |M| = |mu| N", false, || {
        let mut bad = Vec::new();
        for (tag, b) in C9_CASES {
            let f = make_field(tag);
            let mut reference = None;
            for window in [UnitWindow::Standard, UnitWindow::Shifted] {
                for order in [LoopOrder::Standard, LoopOrder::Permuted] {
                    for threads in C9_THREADS {
                        let opts = EnumOptions { window, order, threads: Some(threads), ..Default::default() };
                        let r = enumerate_m_with(&f, &int(b), &opts).unwrap();
                        if r.m_count != Some(f.mu_order as u64 * r.orbit_count) {
                            bad.push(format!("{tag} B={b}: |M|={:?} N={}", r.m_count, r.orbit_count));
                        }
                        let n = *reference.get_or_insert(r.orbit_count);
                        if n != r.orbit_count {
                            bad.push(format!("{tag} B={b} {window:?} {order:?} t={threads}: {} vs {n}", r.orbit_count));
                        }
                    }
                }
            }
        }
        (bad.is_empty(), format!("{} configurations, discrepancies={bad:?}", C9_CASES.len() * 12))
    })
}

fn criterion10() -> Outcome {
    timed(10, "trend: N(B)/(B log^5 B) within [c/10, 10c] at B = 1e6 (soft)", true, || {
        let start = Instant::now();
        let q = make_field(FieldTag::Q);
        let bundle = assemble_c(&q, 1_000_000, &DensityConfig::default()).unwrap();
        let c = bundle.c.mid();
        let n = count(&q, &int(C10_BOUND), Method::Torsor, None).unwrap().count;
        let b = C10_BOUND as f64;
        let l = b.ln();
        let ratio = n as f64 / (b * l.powi(5));
        let secs = start.elapsed().as_secs_f64();
        let in_band = ratio >= c / C10_BAND && ratio <= C10_BAND * c;
        // Diagnostic: the shift `s` with N = c·B·(log B + s)⁵.
        let shift = (n as f64 / (c * b)).powf(0.2) - l;
        (
            in_band && secs < C10_BUDGET_S,
            format!(
                "N={n}, ratio={ratio:.4e}, c in [{:.4e}, {:.4e}], band=[{:.4e}, {:.4e}], ratio/c={:.1}, \
                 effective log shift s={shift:.2} (N = c B (log B + s)^5)",
                bundle.c.lo,
                bundle.c.hi,
                c / C10_BAND,
                C10_BAND * c,
                ratio / c
            ),
        )
    })
}

fn main() -> ExitCode {
    println!("acceptance: {} hard criteria, 1 soft", 9);
    let outcomes = [
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(),
        criterion9(),
        criterion10(),
    ];
    let hard_failures: Vec<u32> = outcomes.iter().filter(|o| !o.passed && !o.soft).map(|o| o.id).collect();
    let warnings: Vec<u32> = outcomes.iter().filter(|o| !o.passed && o.soft).map(|o| o.id).collect();
    println!(
        "acceptance summary: {} passed, hard failures {:?}, soft warnings {:?}",
        outcomes.iter().filter(|o| o.passed).count(),
        hard_failures,
        warnings
    );
    if hard_failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
