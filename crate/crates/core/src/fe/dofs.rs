use std::collections::HashMap;

use super::basis::{reference_nodes, tabulate};
use super::mesh::HexMesh;
use super::quadrature::check_order;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Global node numbering of a Lagrange field on a mesh.
///
/// Nodes are placed by the trilinear geometry map and identified across
/// cells by their rounded coordinates, numbered in order of first visit.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpace {
    pub order: usize,
    /// `n_cells x n_d` global node ids in local lexicographic order.
    pub connectivity: Vec<Vec<usize>>,
    pub coordinates: Vec<[f64; 3]>,
}

impl FieldSpace {
    pub fn new(mesh: &HexMesh, order: usize) -> Result<Self> {
        check_order(order)?;
        let nodes = reference_nodes(order);
        let geo = tabulate(1, &nodes)?;
        let scale = mesh.vertices.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        let quantum = scale * 1e-9;
        let mut ids: HashMap<[i64; 3], usize> = HashMap::new();
        let mut coordinates = Vec::new();
        let mut connectivity = Vec::with_capacity(mesh.n_cells());
        for c in 0..mesh.n_cells() {
            let x = mesh.cell_coordinates(c);
            let mut local = Vec::with_capacity(nodes.len());
            for m in 0..nodes.len() {
                let mut p = [0.0; 3];
                for (k, xk) in x.iter().enumerate() {
                    let w = geo.bf.at(&[m, k]);
                    for a in 0..3 {
                        p[a] += w * xk[a];
                    }
                }
                let key = p.map(|v| (v / quantum).round() as i64);
                let id = *ids.entry(key).or_insert_with(|| {
                    coordinates.push(p);
                    coordinates.len() - 1
                });
                local.push(id);
            }
            connectivity.push(local);
        }
        Ok(FieldSpace {
            order,
            connectivity,
            coordinates,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.coordinates.len()
    }

    pub fn n_cells(&self) -> usize {
        self.connectivity.len()
    }

    pub fn n_cell_dofs(&self) -> usize {
        (self.order + 1).pow(3)
    }

    /// Gathers a node-major global vector (`node * D + i`) into the per-cell
    /// `(n_c, D, n_d)` operand.
    pub fn gather(&self, global: &[f64], components: usize) -> Result<DenseTensor> {
        if global.len() != self.n_nodes() * components {
            return Err(Error::Shape(format!(
                "DOF vector has {} entries, field needs {} x {components}",
                global.len(),
                self.n_nodes()
            )));
        }
        let nd = self.n_cell_dofs();
        let mut out = vec![0.0; self.n_cells() * components * nd];
        for (c, conn) in self.connectivity.iter().enumerate() {
            for i in 0..components {
                let row = &mut out[(c * components + i) * nd..(c * components + i + 1) * nd];
                for (slot, &node) in row.iter_mut().zip(conn) {
                    *slot = global[node * components + i];
                }
            }
        }
        DenseTensor::from_vec(&[self.n_cells(), components, nd], out)
    }

    /// Scatter-adds a per-cell `(n_c, D, n_d)` or `(n_c, n_d)` array into a
    /// node-major global vector.
    pub fn assemble(&self, per_cell: &DenseTensor) -> Result<Vec<f64>> {
        let nd = self.n_cell_dofs();
        let components = match per_cell.shape() {
            [c, n] if *c == self.n_cells() && *n == nd => 1,
            [c, d, n] if *c == self.n_cells() && *n == nd => *d,
            other => {
                return Err(Error::Shape(format!(
                    "cannot assemble {other:?} on {} cells with {nd} DOFs each",
                    self.n_cells()
                )))
            }
        };
        let data = per_cell.to_contiguous();
        let values = data.as_slice().expect("contiguous");
        let mut global = vec![0.0; self.n_nodes() * components];
        for (c, conn) in self.connectivity.iter().enumerate() {
            for i in 0..components {
                let row = &values[(c * components + i) * nd..(c * components + i + 1) * nd];
                for (v, &node) in row.iter().zip(conn) {
                    global[node * components + i] += v;
                }
            }
        }
        Ok(global)
    }
}

/// A field's DOFs in global and gathered form.
#[derive(Debug, Clone)]
pub struct FieldDofs {
    pub components: usize,
    /// Node-major global vector; empty when set per cell.
    pub global: Vec<f64>,
    /// `(n_c, D, n_d)`.
    pub per_cell: DenseTensor,
}

/// Gathers `global` over the cells of `space`.
pub fn gather_dofs(space: &FieldSpace, global: &[f64], components: usize) -> Result<FieldDofs> {
    Ok(FieldDofs {
        components,
        global: global.to_vec(),
        per_cell: space.gather(global, components)?,
    })
}

/// Scatter-adds per-cell residual contributions into a global vector.
pub fn assemble_residual(space: &FieldSpace, per_cell: &DenseTensor) -> Result<Vec<f64>> {
    space.assemble(per_cell)
}
