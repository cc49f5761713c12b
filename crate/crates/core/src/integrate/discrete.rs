use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::MZMesh;
use crate::scalar::{CompensatedSum, Scalar};

/// `(sum_j |Q_j| |f(xi_j)|^p)^(1/p)` over the mesh cells, summed in cell order.
pub fn discrete_lp_norm<T: Scalar, F: ScalarField<T> + ?Sized>(
    f: &F,
    mesh: &MZMesh<T>,
    p: f64,
) -> Result<T> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!(
            "p = {p} must be positive and finite"
        )));
    }
    if f.dim() != mesh.dim() {
        return Err(Error::Parameter("field and mesh dimensions differ".into()));
    }
    let pt = T::of(p);
    let mut acc = CompensatedSum::new();
    for id in 0..mesh.cell_count() {
        let v = f.value(mesh.node(id)).abs();
        acc.add(mesh.cell_measure(id) * v.powf(pt));
    }
    Ok(acc.value().powf(T::one() / pt))
}

/// Largest `|f|` over the mesh nodes (the `p = infinity` analogue).
pub fn discrete_sup<T: Scalar, F: ScalarField<T> + ?Sized>(f: &F, mesh: &MZMesh<T>) -> T {
    (0..mesh.cell_count())
        .map(|id| f.value(mesh.node(id)).abs())
        .fold(T::zero(), |a, b| a.max(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AlphaGraphFunction, GraphDomain};
    use crate::geometry::AxisBox;
    use crate::mesh::{build_mesh_2d, MeshParams};
    use crate::poly::MultiPoly;

    #[test]
    fn constant_field_gives_measure_power() {
        let g = AlphaGraphFunction::flat(1, AxisBox::cube(1, -4.0, 4.0)).unwrap();
        let dom = GraphDomain::mesh_setting(g).unwrap();
        let mesh = build_mesh_2d(&dom, MeshParams::new(3, 0.5, 1.5)).unwrap();
        let one = MultiPoly::<f64>::constant(2, 1.0, AxisBox::cube(2, -10.0, 10.0)).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let v = discrete_lp_norm(&one, &mesh, p).unwrap();
            assert!((v - 0.25f64.powf(1.0 / p)).abs() < 1e-13);
        }
        assert_eq!(discrete_sup(&one, &mesh), 1.0);
        assert!(discrete_lp_norm(&one, &mesh, 0.0).is_err());
    }
}
