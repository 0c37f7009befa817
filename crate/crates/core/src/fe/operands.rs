use std::collections::BTreeMap;

use super::basis::{lagrange_basis, BasisTab};
use super::dofs::{gather_dofs, FieldDofs, FieldSpace};
use super::mapping::{compute_mapping, MappingData};
use super::mesh::{build_bar_mesh, HexMesh};
use super::quadrature::{gauss_quadrature, QuadratureRule};
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Everything a transpiled form binds to: geometry, basis tables, field
/// DOFs and material values, all in their emitted default layouts.
#[derive(Debug, Clone)]
pub struct FeOperandSet {
    pub order: usize,
    pub mesh: HexMesh,
    pub rule: QuadratureRule,
    pub basis: BasisTab,
    pub space: FieldSpace,
    pub mapping: MappingData,
    /// `(n_c, n_q, 3, n_d)` physical basis gradients.
    pub bfg: DenseTensor,
    fields: BTreeMap<String, FieldDofs>,
    materials: BTreeMap<String, DenseTensor>,
}

impl FeOperandSet {
    pub fn new(mesh: HexMesh, order: usize) -> Result<Self> {
        let rule = gauss_quadrature(order)?;
        let geometry = lagrange_basis(1, &rule)?;
        let basis = lagrange_basis(order, &rule)?;
        let mapping = compute_mapping(&mesh, &rule, &geometry)?;
        let bfg = mapping.physical_gradients(&basis)?;
        let space = FieldSpace::new(&mesh, order)?;
        Ok(FeOperandSet {
            order,
            mesh,
            rule,
            basis,
            space,
            mapping,
            bfg,
            fields: BTreeMap::new(),
            materials: BTreeMap::new(),
        })
    }

    /// Operands on a bar of `n_cells` cubes of edge `cell_size`.
    pub fn bar(order: usize, n_cells: usize, cell_size: f64) -> Result<Self> {
        FeOperandSet::new(build_bar_mesh(n_cells, cell_size)?, order)
    }

    pub fn dim(&self) -> usize {
        3
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    pub fn n_points(&self) -> usize {
        self.rule.n_points()
    }

    pub fn n_cell_dofs(&self) -> usize {
        self.basis.n_dofs()
    }

    /// `(n_c, n_q)`.
    pub fn det(&self) -> &DenseTensor {
        &self.mapping.det
    }

    /// `(n_q, n_d)`.
    pub fn bf(&self) -> &DenseTensor {
        &self.basis.bf
    }

    /// Sets a field from a node-major global DOF vector.
    pub fn set_field(&mut self, name: &str, components: usize, global: &[f64]) -> Result<()> {
        let dofs = gather_dofs(&self.space, global, components)?;
        self.fields.insert(name.to_string(), dofs);
        Ok(())
    }

    /// Sets a field directly from per-cell `(n_c, D, n_d)` values. The
    /// global vector is left empty.
    pub fn set_cell_dofs(&mut self, name: &str, per_cell: DenseTensor) -> Result<()> {
        let s = per_cell.shape();
        if s.len() != 3 || s[0] != self.n_cells() || s[2] != self.n_cell_dofs() {
            return Err(Error::Shape(format!(
                "per-cell DOFs of `{name}` have shape {s:?}, expected ({}, D, {})",
                self.n_cells(),
                self.n_cell_dofs()
            )));
        }
        let dofs = FieldDofs {
            components: s[1],
            global: Vec::new(),
            per_cell: per_cell.to_contiguous(),
        };
        self.fields.insert(name.to_string(), dofs);
        Ok(())
    }

    pub fn field(&self, name: &str) -> Result<&FieldDofs> {
        self.fields
            .get(name)
            .ok_or_else(|| Error::Argument(format!("no DOFs set for variable `{name}`")))
    }

    /// Sets a material given per cell and quadrature point, shape
    /// `(n_c, n_q, ...)`.
    pub fn set_material(&mut self, name: &str, values: DenseTensor) -> Result<()> {
        let shape = values.shape();
        if shape.len() < 2 || shape[0] != self.n_cells() || shape[1] != self.n_points() {
            return Err(Error::Shape(format!(
                "material `{name}` has shape {shape:?}, expected ({}, {}, ...)",
                self.n_cells(),
                self.n_points()
            )));
        }
        self.materials.insert(name.to_string(), values);
        Ok(())
    }

    pub fn material(&self, name: &str) -> Result<&DenseTensor> {
        self.materials
            .get(name)
            .ok_or_else(|| Error::Argument(format!("no values set for material `{name}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_operand_shapes() {
        let ops = FeOperandSet::bar(2, 4, 1.0).unwrap();
        assert_eq!(ops.det().shape(), &[4, 27]);
        assert_eq!(ops.bf().shape(), &[27, 27]);
        assert_eq!(ops.bfg.shape(), &[4, 27, 3, 27]);
    }

    #[test]
    fn fields_and_materials() {
        let mut ops = FeOperandSet::bar(1, 2, 1.0).unwrap();
        let n = ops.space.n_nodes();
        ops.set_field("u", 3, &vec![1.0; 3 * n]).unwrap();
        assert_eq!(ops.field("u").unwrap().per_cell.shape(), &[2, 3, 8]);
        assert!(ops.field("w").is_err());
        assert!(ops.set_field("u", 3, &[1.0]).is_err());
        assert!(ops.set_material("m", DenseTensor::zeros(&[2, 7])).is_err());
        ops.set_material("m", DenseTensor::zeros(&[2, 8, 3, 3])).unwrap();
        assert_eq!(ops.material("m").unwrap().shape(), &[2, 8, 3, 3]);
    }
}
