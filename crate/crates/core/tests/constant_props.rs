//! Ingredients of the leading constant: exact identities, enclosures and the
//! agreement of independent numerical representations.

use manin_dp4::constant::density::{adelic2d_real, real_inner};
use manin_dp4::constant::euler::{euler_factor, finite_product, log_euler_factor};
use manin_dp4::constant::polytope::{alpha_polytope, standard_simplex, HalfSpace, PolytopeH};
use manin_dp4::constant::theta::{mobius_local_check, theta0, theta1, theta1_mean_value};
use manin_dp4::constant::{assemble_c, omega_arch, volume_sf_check, DensityConfig, DensityMethod};
use manin_dp4::numberfield::{make_field, AlgInt, FieldTag};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The volume ignores the order of the half-spaces and positive rescaling
    /// of any of them.
    #[test]
    fn alpha_volume_is_presentation_invariant(
        perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
        scales in prop::collection::vec((1i64..=9, 1i64..=9), 7),
    ) {
        let base = alpha_polytope();
        let hs: Vec<HalfSpace> = perm
            .iter()
            .zip(&scales)
            .map(|(&i, &(n, d))| base.halfspaces[i].scaled(&rat(n, d)))
            .collect();
        let p = PolytopeH::new(5, hs).unwrap();
        prop_assert_eq!(p.volume().unwrap(), rat(1, 2880));
    }

    /// The local Möbius identity at arbitrary prime-power norms.
    #[test]
    fn mobius_identity_any_norm(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 49, 121, 997]), j in 0u8..32) {
        let (lhs, rhs) = mobius_local_check(q, j);
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(theta1(q, j).is_zero(), theta0(j).is_zero());
    }

    /// The θ₁ mean value is the local Euler factor, and the floating-point
    /// logarithm agrees with the exact factor.
    #[test]
    fn mean_value_and_log_factor(q in 2u64..5000) {
        let f = euler_factor(q);
        prop_assert_eq!(theta1_mean_value(q), f.clone());
        let exact = f.to_f64().unwrap().ln();
        prop_assert!((log_euler_factor(q as f64) - exact).abs() < 1e-12);
    }
}

#[test]
fn exact_volumes() {
    assert_eq!(standard_simplex(5).volume().unwrap(), rat(1, 120));
    assert_eq!(alpha_polytope().volume().unwrap(), rat(1, 2880));
    assert_eq!(manin_dp4::constant::alpha().unwrap(), rat(1, 8640));
    // A half-space list without an upper bound is rejected before the volume.
    let mut open = standard_simplex(3);
    open.halfspaces.pop();
    assert!(!open.is_bounded());
    assert!(open.volume().is_err());
}

#[test]
fn euler_product_refinement() {
    for tag in [FieldTag::Q, FieldTag::QI, FieldTag::QSqrt2, FieldTag::QSqrtM3, FieldTag::QSqrt5] {
        let f = make_field(tag);
        for p in [100u64, 1000, 10_000] {
            let coarse = finite_product(&f, p).unwrap();
            let fine = finite_product(&f, 2 * p).unwrap();
            assert!(coarse.contains(fine.value), "{tag} P={p}");
            assert!(coarse.tail_lo < fine.tail_lo && fine.tail_hi < coarse.tail_hi, "{tag} P={p}");
        }
    }
    assert!(finite_product(&make_field(FieldTag::Q), 10).is_err());
}

#[test]
fn density_closed_form_is_even_and_decays() {
    assert!((real_inner(0.0) - 4.0).abs() < 1e-12);
    for z in [0.1, 0.7, 1.3, 2.5, 40.0] {
        assert_eq!(real_inner(z), real_inner(-z));
    }
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let g = real_inner(k as f64);
        assert!(g < prev);
        prev = g;
    }
    let q = adelic2d_real(4000).unwrap();
    assert!(q.err < 1e-9);
}

#[test]
fn densities_agree_at_real_and_complex_places() {
    let cfg = DensityConfig { samples: 2_000_000, seed: 11, rel_err: 0.05, ..Default::default() };
    for tag in [FieldTag::Q, FieldTag::QI] {
        let f = make_field(tag);
        let quad = omega_arch(&f, 0, DensityMethod::Adelic2dQuad, &cfg).unwrap();
        let mc = omega_arch(&f, 0, DensityMethod::Region3dMc, &cfg).unwrap();
        let diff = (quad.value - mc.value).abs();
        assert!(diff < 4.0 * quad.err.hypot(mc.err), "{tag}: {} vs {} ± {}", quad.value, mc.value, mc.err);
        assert!(diff < 0.01 * quad.value);
        assert_eq!(mc.seed, Some(11));
    }
}

#[test]
fn monte_carlo_is_thread_count_independent() {
    let f = make_field(FieldTag::QI);
    let cfg = DensityConfig { samples: 300_000, seed: 3, rel_err: 1.0, ..Default::default() };
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| omega_arch(&f, 0, DensityMethod::Region3dMc, &cfg).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn height_region_volume_scales_linearly() {
    let q = make_field(FieldTag::Q);
    let a = [1, 1, 1, 1, 1].map(AlgInt::int);
    let r1 = volume_sf_check(&q, &a, 1.0, 500_000, 17).unwrap();
    let r8 = volume_sf_check(&q, &a, 8.0, 500_000, 18).unwrap();
    let ratio = r8.estimate / r1.estimate;
    let err = 8.0 * ((r8.stderr / r8.estimate).powi(2) + (r1.stderr / r1.estimate).powi(2)).sqrt();
    assert!((ratio - 8.0).abs() < 4.0 * err, "{ratio} ± {err}");
    assert!((r8.predicted / r1.predicted - 8.0).abs() < 1e-12);
    let half = volume_sf_check(&q, &[1, 2, 1, 1, 1].map(AlgInt::int), 1.0, 500_000, 17).unwrap();
    assert!((half.predicted * 2.0 - r1.predicted).abs() < 1e-9);
    assert!(half.passes(0.02, 4.0));
}

#[test]
fn constant_bundle_fields() {
    let qi = make_field(FieldTag::QI);
    let b = assemble_c(&qi, 1000, &DensityConfig::default()).unwrap();
    let expected_prefactor = (2.0 * std::f64::consts::PI / 4.0f64).powi(6) / 4f64.powi(4);
    assert!((b.prefactor - expected_prefactor).abs() < 1e-12 * expected_prefactor);
    assert!(b.c.lo > 0.0 && b.c.lo < b.c.hi);
    let q2 = assemble_c(&make_field(FieldTag::QSqrt2), 1000, &DensityConfig::default()).unwrap();
    assert_eq!(q2.omega.len(), 2);
}
