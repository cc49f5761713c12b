use mzmesh_core::domain::{GraphDomain, Region};
use mzmesh_core::mesh::{build_mesh, MeshParams};
use mzmesh_core::poly::{random_poly, MultiPoly};
use mzmesh_core::AxisBox;
use mzmesh_verify::common::model_domain;
use mzmesh_verify::*;
use proptest::prelude::*;

#[test]
fn reports_are_byte_identical_across_reruns() {
    let mut cfg = MzConfig::new("alpha:1.5", 2, 4, 2.0, 0.5);
    cfg.ensemble_size = 4;
    let a = mz_experiment(&cfg).unwrap().to_json().unwrap();
    let b = mz_experiment(&cfg).unwrap().to_json().unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let c = pool.install(|| mz_experiment(&cfg).unwrap().to_json().unwrap());
    assert_eq!(a, c);
}

#[test]
fn discretization_of_zero_polynomial() {
    let zero = MultiPoly::<f64>::zero(1, 3, AxisBox::cube(1, 0.0, 1.0)).unwrap();
    let r = lemma73_discretization_check(&zero, 6, 1.0, 2.0).unwrap();
    assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
}

#[test]
fn discretization_of_chebyshev_is_finite() {
    let mut c = vec![0.0; 17];
    c[16] = 1.0;
    let t16 = MultiPoly::univariate(c, 0.0, 1.0).unwrap();
    let r = lemma73_discretization_check(&t16, 32, 1.0, 2.0).unwrap();
    assert!(r.ratio.is_finite() && r.ratio > 0.0);
    assert!(r.lhs >= r.lhs_sampled);
}

#[test]
fn constant_has_no_oscillation() {
    let dom = model_domain("alpha:1.5", 2, GraphDomain::mesh_setting).unwrap();
    let mesh = build_mesh(&dom, MeshParams::new(4, 0.5, 1.5), false).unwrap();
    let one = MultiPoly::constant(2, 3.0, dom.bounding_box(Region::GStar)).unwrap();
    assert_eq!(oscillation_sum(&dom, &mesh, &one, 2.0, 5), 0.0);
}

#[test]
fn sanity_t4() {
    let r = classical_sanity_suite(&SanityConfig {
        max_cheb: 4,
        ball_ensemble: 2,
        ..SanityConfig::default()
    })
    .unwrap();
    let t4 = r.records.iter().find(|r| r.label == "markov T_4").unwrap();
    assert_eq!(t4.values["max_dT"], 16.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn discretization_ratio_is_scale_invariant(seed in 0u64..10_000, lambda in 0.01f64..100.0, beta in 0.0f64..3.0) {
        let f = random_poly(1, 6, seed, AxisBox::cube(1, 0.0, 1.0)).unwrap();
        let a = lemma73_discretization_check(&f, 12, beta, 2.0).unwrap().ratio;
        let b = lemma73_discretization_check(&f.scaled(lambda), 12, beta, 2.0).unwrap().ratio;
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn oscillation_scales_with_power(seed in 0u64..10_000, lambda in 0.1f64..10.0) {
        let dom = model_domain("alpha:1.5", 2, GraphDomain::mesh_setting).unwrap();
        let mesh = build_mesh(&dom, MeshParams::new(3, 1.0, 1.5), false).unwrap();
        let f = random_poly(2, 3, seed, dom.bounding_box(Region::GStar)).unwrap();
        let a = oscillation_sum(&dom, &mesh, &f, 2.0, 3);
        let b = oscillation_sum(&dom, &mesh, &f.scaled(lambda), 2.0, 3);
        prop_assert!((b - lambda * lambda * a).abs() <= 1e-9 * b);
    }
}
