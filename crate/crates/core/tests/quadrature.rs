use mzmesh_core::domain::{model_function, GraphDomain, Region};
use mzmesh_core::integrate::{lp_norm, QuadratureSpec, Weight};
use mzmesh_core::poly::{jacobi_eval, random_poly, JacobiSpec, MultiPoly};
use mzmesh_core::AxisBox;
use proptest::prelude::*;

fn alpha_domain(a: f64) -> GraphDomain<f64> {
    GraphDomain::standard(model_function(&format!("alpha:{a}"), 1).unwrap()).unwrap()
}

/// Composite Simpson on `[0, 1]` with `n` (even) panels, graded by `x = s^2` toward the kink.
fn simpson_graded(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let w = |s: f64| f(s * s) * 2.0 * s;
    let mut acc = w(0.0) + w(1.0);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * w(i as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn second_moment_matches_independent_oracle() {
    for a in [1.25, 1.5, 2.0] {
        let dom = alpha_domain(a);
        let y = MultiPoly::linear(0.0, &[0.0, 1.0], dom.bounding_box(Region::G)).unwrap();
        let got = lp_norm(
            &y,
            &dom,
            2.0,
            Region::G,
            Weight::None,
            &QuadratureSpec::default(),
        )
        .unwrap();
        // ∫_0^1 ∫_{g-1}^{g} y^2 dy dx with g = 1 - x^a
        let exact = simpson_graded(
            |x| {
                let g = 1.0 - x.powf(a);
                (g.powi(3) - (g - 1.0).powi(3)) / 3.0
            },
            20_000,
        )
        .sqrt();
        assert!(
            (got.value - exact).abs() <= 1e-10 * exact,
            "a = {a}: {} vs {exact}",
            got.value
        );
        assert!(!got.warning);
    }
}

#[test]
fn constants_give_the_measure() {
    let dom = alpha_domain(1.5);
    let bx = dom.bounding_box(Region::GStar);
    let one = MultiPoly::constant(2, 1.0, bx).unwrap();
    for (region, m) in [(Region::G, 1.0), (Region::GStar, 3.0 * 8.0)] {
        let r = lp_norm(
            &one,
            &dom,
            1.0,
            region,
            Weight::None,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((r.value - m).abs() <= 1e-12 * m, "{region:?}: {}", r.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_is_absolutely_homogeneous(seed in 0u64..10_000, lambda in -4.0f64..4.0, p in 1.0f64..4.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let dom = alpha_domain(1.5);
        let f = random_poly(2, 4, seed, dom.bounding_box(Region::G)).unwrap();
        let spec = QuadratureSpec::default();
        let a = lp_norm(&f, &dom, p, Region::G, Weight::None, &spec).unwrap().value;
        let b = lp_norm(&f.scaled(lambda), &dom, p, Region::G, Weight::None, &spec).unwrap().value;
        prop_assert!((b - lambda.abs() * a).abs() <= 1e-9 * b);
    }

    #[test]
    fn jacobi_derivative_matches_differences(n in 1usize..=30, beta_hi in any::<bool>(), y in -1.0f64..1.0) {
        let beta = if beta_hi { 7.0 } else { 1.0 };
        let spec = JacobiSpec::new(beta, n).unwrap();
        let h = 1e-5 / ((n + 1) * (n + 1)) as f64;
        let (_, d): (f64, f64) = jacobi_eval(spec, y);
        let fd = (jacobi_eval(spec, y + h).0 - jacobi_eval(spec, y - h).0) / (2.0 * h);
        // relative to the size of P_n' on [-1, 1], attained at y = 1
        let scale = jacobi_eval(spec, 1.0f64).1.abs();
        prop_assert!((fd - d).abs() <= 1e-7 * scale);
    }

    #[test]
    fn chebyshev_gradient_matches_differences(seed in 0u64..10_000, x in -0.9f64..0.9, y in -0.9f64..0.9) {
        let f = random_poly(2, 6, seed, AxisBox::cube(2, -1.0, 1.0)).unwrap();
        let mut g = [0.0; 2];
        f.eval_grad(&[x, y], &mut g);
        let h = 1e-6;
        let fx = (f.eval(&[x + h, y]) - f.eval(&[x - h, y])) / (2.0 * h);
        let fy = (f.eval(&[x, y + h]) - f.eval(&[x, y - h])) / (2.0 * h);
        let s = 1.0 + g[0].abs().max(g[1].abs());
        prop_assert!((fx - g[0]).abs() <= 1e-6 * s && (fy - g[1]).abs() <= 1e-6 * s);
    }
}
