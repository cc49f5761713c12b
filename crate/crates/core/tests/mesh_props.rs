use mzmesh_core::domain::{model_function, GraphDomain, Region};
use mzmesh_core::mesh::{build_mesh, mesh_cardinality, MeshParams, NodePolicy};
use mzmesh_core::scalar::CompensatedSum;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn domain(alpha: f64, d: usize) -> GraphDomain<f64> {
    GraphDomain::mesh_setting(model_function(&format!("alpha:{alpha}"), d - 1).unwrap()).unwrap()
}

#[test]
fn flat_layers_collapse() {
    // gamma = 0: every layer has m columns
    let mesh = build_mesh(&domain(2.0, 2), MeshParams::new(4, 1.0, 2.0), false).unwrap();
    assert_eq!(mesh.m(), 8);
    assert_eq!(mesh.cell_count(), 64);
}

#[test]
fn three_dimensional_range_is_enforced() {
    assert!(build_mesh(&domain(1.25, 3), MeshParams::new(2, 1.0, 1.25), false).is_err());
    assert!(build_mesh(&domain(1.25, 3), MeshParams::new(2, 1.0, 1.25), true).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cells_partition_the_region(ai in 0usize..3, n in 1usize..10, ei in 0usize..3) {
        let alpha = [1.25, 1.5, 2.0][ai];
        let eps = [1.0, 0.5, 0.25][ei];
        let mesh = build_mesh(&domain(alpha, 2), MeshParams::new(n, eps, alpha), false).unwrap();
        let sum: CompensatedSum<f64> = (0..mesh.cell_count()).map(|i| mesh.cell(i).measure).collect();
        prop_assert!((sum.value() - mesh.region_measure()).abs() <= 1e-12 * mesh.region_measure());
        prop_assert!((mesh.region_measure() - 0.25).abs() <= 1e-15);
        let c = mesh_cardinality(&MeshParams::new(n, eps, alpha), 2).unwrap();
        prop_assert_eq!(c.total, mesh.cell_count() as u128);
    }

    #[test]
    fn located_cell_contains_the_point(ai in 0usize..3, n in 1usize..8, seed in 0u64..1000, corner in any::<bool>()) {
        let alpha = [1.25, 1.5, 2.0][ai];
        let dom = domain(alpha, 2);
        let policy = if corner { NodePolicy::Corner } else { NodePolicy::Random { seed } };
        let mesh = build_mesh(&dom, MeshParams::new(n, 0.5, alpha).with_policy(policy), false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let xi = dom.random_point(Region::G, &mut rng);
            let id = mesh.locate_cell(&dom, &xi).unwrap();
            let c = mesh.cell(id.id);
            let z = dom.g().value(&xi[..1]) - xi[1];
            prop_assert!(c.x_lo[0] <= xi[0] && xi[0] <= c.x_hi[0]);
            prop_assert!(c.z_lo - 1e-15 <= z && z <= c.z_hi + 1e-15);
        }
        // every node lies in its own cell
        for i in 0..mesh.cell_count() {
            prop_assert_eq!(mesh.locate_cell(&dom, mesh.node(i)).unwrap().id, i);
        }
    }

    #[test]
    fn cardinality_is_at_least_m_to_the_d(n in 1usize..40, ai in 0usize..3, d in 2usize..4) {
        let alpha = [1.75, 1.9, 2.0][ai];
        let c = mesh_cardinality(&MeshParams::new(n, 0.5, alpha), d).unwrap();
        prop_assert!(c.total >= (c.m as u128).pow(d as u32));
        prop_assert_eq!(c.per_layer.len(), c.m);
    }
}
