//! Marcinkiewicz-Zygmund partitions of `G = {x in D1, g(x) - 1/4 <= y <= g(x)}`.
//!
//! Layer `j` is the shear slab `z_{j-1} <= g(x) - y <= z_j` with `z_j = j^2 / (4 m^2)`; its base
//! is split into `N_j^(d-1)` equal cubes. Cells are stored implicitly (layer table plus one node
//! per cell) because their geometry is arithmetic in `(j, i)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{GraphDomain, Region};
use crate::error::{to_f64_vec, Error, Result};
use crate::geometry::AxisBox;
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NodePolicy {
    Center,
    Random { seed: u64 },
    Corner,
}

impl NodePolicy {
    pub fn name(&self) -> &'static str {
        match self {
            NodePolicy::Center => "center",
            NodePolicy::Random { .. } => "random",
            NodePolicy::Corner => "corner",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshParams {
    pub n: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub c0: f64,
    pub node_policy: NodePolicy,
    /// replaces `ceil(c0 n / epsilon)` (refinement studies)
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_override: Option<usize>,
}

impl MeshParams {
    pub fn new(n: usize, epsilon: f64, alpha: f64) -> Self {
        Self {
            n,
            epsilon,
            alpha,
            c0: 2.0,
            node_policy: NodePolicy::Center,
            m_override: None,
        }
    }

    pub fn with_policy(mut self, policy: NodePolicy) -> Self {
        self.node_policy = policy;
        self
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    /// `m = ceil(c0 n / epsilon)`.
    pub fn m(&self) -> usize {
        if let Some(m) = self.m_override {
            return m;
        }
        let v = self.c0 * self.n as f64 / self.epsilon;
        fuzzy_ceil(v).max(1.0) as usize
    }

    /// `gamma = 1/alpha - 1/2`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.alpha - 0.5
    }

    /// `N_j = max(m, ceil(m (m/j)^(2 gamma)))`.
    pub fn layer_count(&self, j: usize) -> usize {
        let m = self.m();
        let v = m as f64 * (m as f64 / j as f64).powf(2.0 * self.gamma());
        (fuzzy_ceil(v) as usize).max(m)
    }

    /// Validation shared by all dimensions; returns warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Parameter(format!(
                "epsilon = {} not in (0, 1]",
                self.epsilon
            )));
        }
        if !(1.0..=2.0).contains(&self.alpha) {
            return Err(Error::Parameter(format!(
                "alpha = {} not in [1, 2]",
                self.alpha
            )));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::Parameter("c0 must be positive".into()));
        }
        let m = self.m();
        if m < 2 * self.n {
            return Err(Error::Parameter(format!(
                "m = {m} must be at least 2n = {}",
                2 * self.n
            )));
        }
        if m == 2 * self.n {
            warnings.push(format!(
                "m = {m} equals 2n; the strict requirement m > 2n is not met"
            ));
        }
        Ok(warnings)
    }
}

/// `ceil` that ignores relative rounding noise below `1e-12`.
fn fuzzy_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub j: usize,
    pub z_lo: f64,
    pub z_hi: f64,
    #[serde(rename = "N_j")]
    pub n_j: usize,
}

/// Position of a cell: layer `j` (1-based) and the per-axis cube index `i` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellId {
    pub layer: usize,
    pub index: Vec<usize>,
    /// position in the global cell order
    pub id: usize,
}

/// Geometry of one cell: `x` in `[x_lo, x_hi]`, `z_lo <= g(x) - y <= z_hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell<T> {
    pub id: CellId,
    pub x_lo: Vec<T>,
    pub x_hi: Vec<T>,
    pub z_lo: T,
    pub z_hi: T,
    pub measure: T,
}

#[derive(Clone, Debug)]
pub struct MZMesh<T: Scalar> {
    params: MeshParams,
    dim: usize,
    m: usize,
    base: AxisBox<T>,
    depth: T,
    layers: Vec<Layer>,
    /// cell measure of every layer
    measures: Vec<T>,
    /// first global cell index of every layer, plus the total at the end
    offsets: Vec<usize>,
    nodes: Vec<T>,
    warnings: Vec<String>,
}

/// Mesh on a planar graph domain.
pub fn build_mesh_2d<T: Scalar>(domain: &GraphDomain<T>, params: MeshParams) -> Result<MZMesh<T>> {
    if domain.dim() != 2 {
        return Err(Error::Parameter(
            "build_mesh_2d needs a planar domain".into(),
        ));
    }
    MZMesh::build(domain, params)
}

/// Mesh for `d >= 3`; refuses `alpha <= 2 - 2/d` unless `force` is set.
pub fn build_mesh_hd<T: Scalar>(
    domain: &GraphDomain<T>,
    params: MeshParams,
    force: bool,
) -> Result<MZMesh<T>> {
    let d = domain.dim();
    if d < 3 {
        return Err(Error::Parameter("build_mesh_hd needs d >= 3".into()));
    }
    let threshold = 2.0 - 2.0 / d as f64;
    let below = params.alpha <= threshold;
    if below && !force {
        return Err(Error::Parameter(format!(
            "alpha = {} <= 2 - 2/d = {threshold}: the n^d bound fails (use force to build anyway)",
            params.alpha
        )));
    }
    let mut mesh = MZMesh::build(domain, params)?;
    if below {
        mesh.warnings.push(format!(
            "alpha = {} <= 2 - 2/d = {threshold}: the cardinality bound n^d degrades",
            params.alpha
        ));
    }
    Ok(mesh)
}

/// Either builder by dimension.
pub fn build_mesh<T: Scalar>(
    domain: &GraphDomain<T>,
    params: MeshParams,
    force: bool,
) -> Result<MZMesh<T>> {
    if domain.dim() == 2 {
        build_mesh_2d(domain, params)
    } else {
        build_mesh_hd(domain, params, force)
    }
}

impl<T: Scalar> MZMesh<T> {
    fn build(domain: &GraphDomain<T>, params: MeshParams) -> Result<Self> {
        let warnings = params.validate()?;
        let k = domain.base_dim();
        let m = params.m();
        let depth = domain.depth_g();
        let base = domain.inner_box().clone();
        let vol = base.volume();
        let mut layers = Vec::with_capacity(m);
        let mut measures = Vec::with_capacity(m);
        let mut offsets = Vec::with_capacity(m + 1);
        let mut total = 0usize;
        let m2 = T::of_usize(m * m);
        for j in 1..=m {
            let n_j = params.layer_count(j);
            let count = n_j
                .checked_pow(k as u32)
                .ok_or_else(|| Error::Parameter("cell count overflows".into()))?;
            let z_lo = depth * T::of_usize((j - 1) * (j - 1)) / m2;
            let z_hi = depth * T::of_usize(j * j) / m2;
            // |D1| (z_j - z_{j-1}) / N_j^k, i.e. (2j - 1) / (4 m^2 N_j^k) on the unit cube
            measures.push(vol * depth * T::of_usize(2 * j - 1) / (m2 * T::of_usize(count)));
            layers.push(Layer {
                j,
                z_lo: z_lo.to_f64_lossy(),
                z_hi: z_hi.to_f64_lossy(),
                n_j,
            });
            offsets.push(total);
            total = total
                .checked_add(count)
                .ok_or_else(|| Error::Parameter("cell count overflows".into()))?;
        }
        offsets.push(total);
        let mut mesh = Self {
            params,
            dim: k + 1,
            m,
            base,
            depth,
            layers,
            measures,
            offsets,
            nodes: Vec::new(),
            warnings,
        };
        mesh.pick_nodes(domain, params.node_policy);
        Ok(mesh)
    }

    /// Replaces every node according to `policy`.
    pub fn pick_nodes(&mut self, domain: &GraphDomain<T>, policy: NodePolicy) {
        let d = self.dim;
        let k = d - 1;
        let total = self.cell_count();
        let mut nodes = Vec::with_capacity(total * d);
        let mut rng = match policy {
            NodePolicy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let push = T::of(1e-12);
        let half = T::of(0.5);
        let mut x = vec![T::zero(); k];
        for id in 0..total {
            let cell = self.cell(id);
            let z = match policy {
                NodePolicy::Center => {
                    for a in 0..k {
                        x[a] = (cell.x_lo[a] + cell.x_hi[a]) * half;
                    }
                    (cell.z_lo + cell.z_hi) * half
                }
                NodePolicy::Random { .. } => {
                    let r = rng.as_mut().expect("seeded");
                    for a in 0..k {
                        x[a] =
                            cell.x_lo[a] + (cell.x_hi[a] - cell.x_lo[a]) * T::of(r.random::<f64>());
                    }
                    cell.z_lo + (cell.z_hi - cell.z_lo) * T::of(r.random::<f64>())
                }
                NodePolicy::Corner => {
                    for a in 0..k {
                        x[a] = cell.x_lo[a] + push;
                    }
                    cell.z_hi - push
                }
            };
            nodes.extend_from_slice(&x);
            nodes.push(domain.g().value(&x) - z);
        }
        self.nodes = nodes;
        self.params.node_policy = policy;
    }

    pub fn params(&self) -> &MeshParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn cell_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// Measure shared by all cells of layer `j` (1-based).
    pub fn layer_measure(&self, j: usize) -> T {
        self.measures[j - 1]
    }

    /// Sum of all cell measures, compensated.
    pub fn total_measure(&self) -> T {
        let mut s = CompensatedSum::new();
        for (l, layer) in self.layers.iter().enumerate() {
            let count = layer.n_j.pow((self.dim - 1) as u32);
            s.add(self.measures[l] * T::of_usize(count));
        }
        s.value()
    }

    /// `|D1| / 4` for the standard depth: the exact area of `G`.
    pub fn region_measure(&self) -> T {
        self.base.volume() * self.depth
    }

    /// Layer (1-based) containing the global cell index.
    fn layer_of(&self, id: usize) -> usize {
        match self.offsets.binary_search(&id) {
            Ok(pos) => pos + 1,
            Err(pos) => pos,
        }
    }

    pub fn cell(&self, id: usize) -> Cell<T> {
        let j = self.layer_of(id);
        let layer = &self.layers[j - 1];
        let k = self.dim - 1;
        let mut rest = id - self.offsets[j - 1];
        let nj = layer.n_j;
        let mut index = Vec::with_capacity(k);
        let mut x_lo = Vec::with_capacity(k);
        let mut x_hi = Vec::with_capacity(k);
        for a in 0..k {
            let i = rest % nj;
            rest /= nj;
            index.push(i);
            let w = self.base.width(a) / T::of_usize(nj);
            x_lo.push(self.base.lo[a] + w * T::of_usize(i));
            x_hi.push(if i + 1 == nj {
                self.base.hi[a]
            } else {
                self.base.lo[a] + w * T::of_usize(i + 1)
            });
        }
        let m2 = T::of_usize(self.m * self.m);
        Cell {
            id: CellId {
                layer: j,
                index,
                id,
            },
            x_lo,
            x_hi,
            z_lo: self.depth * T::of_usize((j - 1) * (j - 1)) / m2,
            z_hi: self.depth * T::of_usize(j * j) / m2,
            measure: self.measures[j - 1],
        }
    }

    pub fn cell_measure(&self, id: usize) -> T {
        self.measures[self.layer_of(id) - 1]
    }

    pub fn node(&self, id: usize) -> &[T] {
        &self.nodes[id * self.dim..(id + 1) * self.dim]
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// The cell containing `xi`; ties on shared faces go to the smaller index.
    pub fn locate_cell(&self, domain: &GraphDomain<T>, xi: &[T]) -> Result<CellId> {
        if !domain.contains(Region::G, xi) {
            return Err(Error::Membership {
                point: to_f64_vec(xi),
                region: "G".into(),
            });
        }
        let k = self.dim - 1;
        let z = domain.delta(xi).max(T::zero()).min(self.depth);
        let m = self.m;
        let raw = (T::of_usize(m) * (z / self.depth).sqrt()).to_f64_lossy();
        let mut j = (fuzzy_ceil(raw) as usize).clamp(1, m);
        // exact comparison against the breaks settles rounding in the square root
        let m2 = T::of_usize(m * m);
        while j > 1 && z <= self.depth * T::of_usize((j - 1) * (j - 1)) / m2 {
            j -= 1;
        }
        while j < m && z > self.depth * T::of_usize(j * j) / m2 {
            j += 1;
        }
        let nj = self.layers[j - 1].n_j;
        let mut id = self.offsets[j - 1];
        let mut stride = 1usize;
        let mut index = Vec::with_capacity(k);
        for a in 0..k {
            let t =
                ((xi[a] - self.base.lo[a]) / self.base.width(a) * T::of_usize(nj)).to_f64_lossy();
            let mut i = (t.ceil() as i64 - 1).clamp(0, nj as i64 - 1) as usize;
            let w = self.base.width(a) / T::of_usize(nj);
            while i > 0 && xi[a] <= self.base.lo[a] + w * T::of_usize(i) {
                i -= 1;
            }
            while i + 1 < nj && xi[a] > self.base.lo[a] + w * T::of_usize(i + 1) {
                i += 1;
            }
            index.push(i);
            id += i * stride;
            stride *= nj;
        }
        Ok(CellId {
            layer: j,
            index,
            id,
        })
    }

    pub fn to_json(&self) -> MeshJson {
        let k = self.dim - 1;
        let cells = (0..self.cell_count())
            .map(|id| {
                let c = self.cell(id);
                CellJson {
                    layer: c.id.layer,
                    index: c.id.index.clone(),
                    bbox: CellBoxJson {
                        x_lo: to_f64_vec(&c.x_lo),
                        x_hi: to_f64_vec(&c.x_hi),
                        z_lo: c.z_lo.to_f64_lossy(),
                        z_hi: c.z_hi.to_f64_lossy(),
                    },
                    measure: c.measure.to_f64_lossy(),
                    node: to_f64_vec(self.node(id)),
                }
            })
            .collect();
        debug_assert!(k >= 1);
        MeshJson {
            params: self.params,
            m: self.m,
            gamma: self.params.gamma(),
            layers: self.layers.clone(),
            cells,
        }
    }

    /// One row per cell: `j, i_1.., x_lo_1.., x_hi_1.., z_lo, z_hi, measure, node_1..node_d`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let k = self.dim - 1;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["j".to_string()];
        header.extend((1..=k).map(|a| format!("i{a}")));
        header.extend((1..=k).map(|a| format!("x_lo{a}")));
        header.extend((1..=k).map(|a| format!("x_hi{a}")));
        header.extend(["z_lo", "z_hi", "measure"].map(String::from));
        header.extend((1..=self.dim).map(|a| format!("node{a}")));
        w.write_record(&header)?;
        for id in 0..self.cell_count() {
            let c = self.cell(id);
            let mut row = vec![c.id.layer.to_string()];
            row.extend(c.id.index.iter().map(|i| i.to_string()));
            row.extend(c.x_lo.iter().map(|v| v.to_f64_lossy().to_string()));
            row.extend(c.x_hi.iter().map(|v| v.to_f64_lossy().to_string()));
            row.push(c.z_lo.to_f64_lossy().to_string());
            row.push(c.z_hi.to_f64_lossy().to_string());
            row.push(c.measure.to_f64_lossy().to_string());
            row.extend(self.node(id).iter().map(|v| v.to_f64_lossy().to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellBoxJson {
    pub x_lo: Vec<f64>,
    pub x_hi: Vec<f64>,
    pub z_lo: f64,
    pub z_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub layer: usize,
    pub index: Vec<usize>,
    #[serde(rename = "box")]
    pub bbox: CellBoxJson,
    pub measure: f64,
    pub node: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshJson {
    pub params: MeshParams,
    pub m: usize,
    pub gamma: f64,
    pub layers: Vec<Layer>,
    pub cells: Vec<CellJson>,
}

/// Cell counts without building a mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cardinality {
    pub d: usize,
    pub m: usize,
    pub total: u128,
    /// `(j, N_j, N_j^(d-1))`
    pub per_layer: Vec<(usize, usize, u128)>,
    /// `total / n^d`, or `total / (n^2 log n)` when `alpha = 1`, `d = 2`
    pub normalized: f64,
}

pub fn mesh_cardinality(params: &MeshParams, d: usize) -> Result<Cardinality> {
    params.validate()?;
    if d < 2 {
        return Err(Error::Parameter("d must be at least 2".into()));
    }
    let m = params.m();
    let mut total: u128 = 0;
    let mut per_layer = Vec::with_capacity(m);
    for j in 1..=m {
        let nj = params.layer_count(j);
        let c = (nj as u128).pow((d - 1) as u32);
        total += c;
        per_layer.push((j, nj, c));
    }
    let n = params.n as f64;
    let scale = if params.alpha == 1.0 && d == 2 {
        n * n * n.ln().max(1.0)
    } else {
        n.powi(d as i32)
    };
    Ok(Cardinality {
        d,
        m,
        total,
        per_layer,
        normalized: total as f64 / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{model_function, AlphaGraphFunction};

    fn flat2() -> GraphDomain<f64> {
        let g = AlphaGraphFunction::flat(1, AxisBox::cube(1, -4.0, 4.0)).unwrap();
        GraphDomain::mesh_setting(g).unwrap()
    }

    #[test]
    fn breaks_for_m_four() {
        let mut p = MeshParams::new(2, 1.0, 2.0);
        p.m_override = Some(4);
        let mesh = build_mesh_2d(&flat2(), p).unwrap();
        let z: Vec<f64> = mesh.layers().iter().map(|l| l.z_hi).collect();
        assert_eq!(z, vec![1.0 / 64.0, 1.0 / 16.0, 9.0 / 64.0, 0.25]);
        assert_eq!(mesh.layers()[0].z_lo, 0.0);
    }

    #[test]
    fn alpha_two_collapses_to_m_squared() {
        let p = MeshParams::new(4, 1.0, 2.0);
        assert_eq!(p.m(), 8);
        let mesh = build_mesh_2d(&flat2(), p).unwrap();
        assert_eq!(mesh.cell_count(), 64);
        assert!(mesh.layers().iter().all(|l| l.n_j == 8));
        assert_eq!(mesh.warnings().len(), 1);
        assert_eq!(mesh_cardinality(&p, 2).unwrap().total, 64);
    }

    #[test]
    fn cardinality_examples() {
        let p = MeshParams::new(4, 1.0, 1.5);
        let c = mesh_cardinality(&p, 2).unwrap();
        let want: u128 = (1..=8u32)
            .map(|j| (8.0 * (8.0 / j as f64).powf(1.0 / 3.0)).ceil().max(8.0) as u128)
            .sum();
        // 8 (8/j)^(1/3) is an integer at j = 1 (16) and j = 8 (8); the direct ceil above may round up
        let exact: u128 = (1..=8u32)
            .map(|j| {
                let v = 8.0 * (8.0 / j as f64).powf(1.0 / 3.0);
                let r = v.round();
                (if (v - r).abs() < 1e-9 { r } else { v.ceil() }).max(8.0) as u128
            })
            .sum();
        assert_eq!(c.total, exact);
        assert!(want >= exact);
        let mut p3 = MeshParams::new(2, 1.0, 2.0);
        p3.m_override = Some(4);
        assert_eq!(mesh_cardinality(&p3, 3).unwrap().total, 64);
    }

    #[test]
    fn measures_and_nodes() {
        let p = MeshParams::new(4, 0.5, 1.5);
        let mesh = build_mesh_2d(&flat2(), p).unwrap();
        let rel = (mesh.total_measure() - 0.25).abs() / 0.25;
        assert!(rel < 1e-12);
        let j = 3;
        let nj = mesh.layers()[j - 1].n_j as f64;
        let m = mesh.m() as f64;
        assert!((mesh.layer_measure(j) - 5.0 / (4.0 * m * m * nj)).abs() < 1e-18);
    }

    #[test]
    fn center_node_on_flat_domain() {
        let mut p = MeshParams::new(2, 1.0, 2.0);
        p.m_override = Some(4);
        let mesh = build_mesh_2d(&flat2(), p).unwrap();
        let n = mesh.node(0);
        assert!((n[0] - 0.125).abs() < 1e-15);
        assert!((n[1] + (0.0 + 1.0 / 64.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn nodes_locate_to_their_cells() {
        let g = model_function::<f64>("alpha:1.5", 1).unwrap();
        let dom = GraphDomain::mesh_setting(g).unwrap();
        for policy in [
            NodePolicy::Center,
            NodePolicy::Random { seed: 3 },
            NodePolicy::Corner,
        ] {
            let mesh =
                build_mesh_2d(&dom, MeshParams::new(4, 0.5, 1.5).with_policy(policy)).unwrap();
            for id in 0..mesh.cell_count() {
                let c = mesh.locate_cell(&dom, mesh.node(id)).unwrap();
                assert_eq!(c.id, id, "{policy:?}");
            }
        }
    }

    #[test]
    fn tie_rules() {
        let dom = flat2();
        let mesh = build_mesh_2d(&dom, MeshParams::new(2, 0.5, 1.5)).unwrap();
        assert_eq!(mesh.locate_cell(&dom, &[0.3, 0.0]).unwrap().layer, 1);
        assert_eq!(
            mesh.locate_cell(&dom, &[0.3, -0.25]).unwrap().layer,
            mesh.m()
        );
        assert!(mesh.locate_cell(&dom, &[0.3, -0.3]).is_err());
        let c = mesh.locate_cell(&dom, &[0.0, -0.1]).unwrap();
        assert_eq!(c.index, vec![0]);
    }

    #[test]
    fn random_nodes_are_reproducible() {
        let dom = flat2();
        let p = MeshParams::new(3, 0.5, 1.25).with_policy(NodePolicy::Random { seed: 11 });
        let a = build_mesh_2d(&dom, p).unwrap();
        let b = build_mesh_2d(&dom, p).unwrap();
        assert_eq!(a.nodes(), b.nodes());
    }

    #[test]
    fn hd_threshold_and_small_m_rejected() {
        let g = model_function::<f64>("alpha:1.25", 2).unwrap();
        let dom = GraphDomain::mesh_setting(g).unwrap();
        let p = MeshParams::new(2, 1.0, 1.25);
        assert!(build_mesh_hd(&dom, p, false).is_err());
        let forced = build_mesh_hd(&dom, p, true).unwrap();
        assert!(!forced.warnings().is_empty());
        assert!(MeshParams::new(4, 1.0, 2.0)
            .with_c0(1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn json_and_csv_shapes() {
        let mut p = MeshParams::new(2, 1.0, 2.0);
        p.m_override = Some(4);
        let mesh = build_mesh_2d(&flat2(), p).unwrap();
        let j = serde_json::to_value(mesh.to_json()).unwrap();
        assert_eq!(j["layers"][0]["N_j"], 4);
        assert_eq!(j["cells"].as_array().unwrap().len(), 16);
        assert!(j["cells"][0]["box"].is_object());
        let mut buf = Vec::new();
        mesh.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 17);
        assert!(text.starts_with("j,i1,x_lo1,x_hi1,z_lo,z_hi,measure,node1,node2"));
    }
}
