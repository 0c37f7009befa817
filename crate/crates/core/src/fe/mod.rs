//! Finite-element operands on structured hexahedral meshes.

mod basis;
mod dofs;
mod mapping;
mod mesh;
mod operands;
mod quadrature;
mod random;

pub use basis::{lagrange_1d, lagrange_basis, lagrange_nodes_1d, reference_nodes, tabulate, BasisTab};
pub use dofs::{assemble_residual, gather_dofs, FieldDofs, FieldSpace};
pub use mapping::{compute_mapping, MappingData};
pub use mesh::{build_bar_mesh, HexMesh};
pub use operands::FeOperandSet;
pub use quadrature::{gauss_legendre_1d, gauss_quadrature, QuadratureRule, MAX_ORDER};
pub use random::seeded_uniform;
