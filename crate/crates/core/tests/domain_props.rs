use mzmesh_core::domain::{
    model_function, steklov_transform, GraphDomain, PhiGadget, Region, SteklovSpec,
};
use mzmesh_core::poly::MultiPoly;
use mzmesh_core::AxisBox;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODELS: [&str; 7] = [
    "flat",
    "quad",
    "trig",
    "alpha:1.25",
    "alpha:1.5",
    "alpha:1.75",
    "alpha:2",
];

#[test]
fn hoelder_certificates_hold() {
    for id in MODELS {
        for k in [1, 2] {
            let g = model_function::<f64>(id, k).unwrap();
            assert!(g.hoelder_ratio(10_000, 3) <= 1.001, "{id}, k = {k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_difference_within_hoelder_bound(mi in 0usize..7, x in -1.0f64..2.0, t in -1.0f64..1.0) {
        let g = model_function::<f64>(MODELS[mi], 1).unwrap();
        let lhs = (g.gradient(&[x + t])[0] - g.gradient(&[x])[0]).abs();
        let rhs = g.hoelder_l() * t.abs().powf(g.alpha() - 1.0);
        prop_assert!(lhs <= 1.001 * rhs + 1e-12, "{lhs} > {rhs}");
    }

    #[test]
    fn sandwich_on_random_points(mi in 0usize..7, seed in 0u64..1000) {
        let dom = GraphDomain::standard(model_function::<f64>(MODELS[mi], 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = dom.random_point(Region::G, &mut rng);
        let delta = dom.delta(&xi);
        let (dist, u) = dom.dist_to_essential_boundary(&xi).unwrap();
        prop_assert!(dist <= delta + 1e-12);
        prop_assert!(dist >= dom.c_star() * delta - 1e-12);
        // the reported foot point realizes the distance
        let direct = (u[0] - xi[0]).hypot(dom.g().value(&u) - xi[1]);
        prop_assert!((direct - dist).abs() <= 1e-12);
    }

    #[test]
    fn phi_round_trip(seed in 0u64..1000) {
        let gadget = PhiGadget::new(model_function::<f64>("trig", 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = gadget.domain().random_point(Region::G, &mut rng);
        let (z, t) = gadget.inverse_plus(p[0], p[1]).unwrap();
        prop_assert!(t >= 0.0 && t <= gadget.r1());
        let img = gadget.forward(z, t).unwrap();
        prop_assert!((img.x - p[0]).abs() <= 1e-10 && (img.y - p[1]).abs() <= 1e-10);
    }

    #[test]
    fn phi_jacobian_matches_differences(z in -1.0f64..2.0, s in 0.05f64..1.0, neg in any::<bool>()) {
        let gadget = PhiGadget::new(model_function::<f64>("quad", 1).unwrap()).unwrap();
        let t = if neg { -s } else { s } * gadget.r0();
        prop_assume!(gadget.in_e(z, t));
        let j = gadget.forward(z, t).unwrap().jacobian;
        prop_assert!((gadget.fd_jacobian(z, t, 1e-5) - j).abs() <= 1e-6 * j);
    }

    #[test]
    fn tangential_gradient_ignores_normal_direction(x in 0.05f64..0.95, z in 0.05f64..0.95, c in -3.0f64..3.0) {
        // adding c (nu . xi) to f changes the gradient only along the normal at u
        let dom = GraphDomain::standard(model_function::<f64>("alpha:1.5", 1).unwrap()).unwrap();
        let bx = AxisBox::cube(2, -2.0, 3.0);
        let f = MultiPoly::linear(0.3, &[1.0, -0.5], bx.clone()).unwrap();
        let u = [x];
        let nu = dom.unit_normal(&u);
        let h = MultiPoly::linear(0.3, &[1.0 + c * nu[0], -0.5 + c * nu[1]], bx).unwrap();
        let xi = dom.lift(&[x], z);
        let a = dom.tangential_gradient(&f, &u, &xi).unwrap();
        let b = dom.tangential_gradient(&h, &u, &xi).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }
}

/// `sup |g - g_delta|` scales like `delta^alpha`; the constant is pinned loosely.
#[test]
fn steklov_error_scales() {
    for alpha in [1.25, 1.5, 1.75] {
        let g = model_function::<f64>(&format!("alpha:{alpha}"), 1).unwrap();
        let mut prev: Option<f64> = None;
        for k in 3..7 {
            let delta = 2f64.powi(-k);
            let gd = steklov_transform(&g, delta, SteklovSpec::default()).unwrap();
            let e = (g.value(&[0.0]) - gd.value(&[0.0])).abs();
            if let Some(p) = prev {
                let slope = (p / e).log2();
                assert!((slope - alpha).abs() < 0.05, "alpha {alpha}: slope {slope}");
            }
            prev = Some(e);
        }
    }
}
