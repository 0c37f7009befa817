use rayon::prelude::*;

use super::basis::BasisTab;
use super::mesh::HexMesh;
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Reference mapping data per cell and quadrature point.
#[derive(Debug, Clone)]
pub struct MappingData {
    /// `(n_c, n_q)`: `|J| w_q`.
    pub det: DenseTensor,
    /// `(n_c, n_q, 3, 3)`: `d xi_l / d x_j` at `[c, q, l, j]`.
    pub jac_inv: DenseTensor,
}

/// Trilinear mapping of every cell evaluated at the rule's points.
///
/// `geometry` must be the order-1 basis tabulated on `rule`.
pub fn compute_mapping(mesh: &HexMesh, rule: &QuadratureRule, geometry: &BasisTab) -> Result<MappingData> {
    if geometry.n_dofs() != 8 {
        return Err(Error::Argument(format!(
            "geometry basis must be trilinear, got {} functions",
            geometry.n_dofs()
        )));
    }
    let nq = rule.n_points();
    if geometry.n_points() != nq {
        return Err(Error::Shape(format!(
            "geometry basis has {} points, rule has {nq}",
            geometry.n_points()
        )));
    }
    let nc = mesh.n_cells();
    let g = geometry.bfg_ref.as_slice().expect("contiguous");
    let mut det = vec![0.0; nc * nq];
    let mut inv = vec![0.0; nc * nq * 9];
    let failure = det
        .par_chunks_mut(nq)
        .zip(inv.par_chunks_mut(nq * 9))
        .enumerate()
        .map(|(c, (det_c, inv_c))| {
            let x = mesh.cell_coordinates(c);
            for q in 0..nq {
                // jac[a][l] = d x_a / d xi_l
                let mut jac = [[0.0; 3]; 3];
                for (k, xk) in x.iter().enumerate() {
                    for l in 0..3 {
                        let d = g[(q * 3 + l) * 8 + k];
                        for a in 0..3 {
                            jac[a][l] += xk[a] * d;
                        }
                    }
                }
                let (dj, ji) = invert3(&jac);
                if dj <= 0.0 || !dj.is_finite() {
                    return Some((c, dj));
                }
                det_c[q] = dj * rule.weights[q];
                for l in 0..3 {
                    for j in 0..3 {
                        inv_c[q * 9 + l * 3 + j] = ji[l][j];
                    }
                }
            }
            None
        })
        .find_first(Option::is_some)
        .flatten();
    if let Some((cell, det)) = failure {
        return Err(Error::DegenerateCell { cell, det });
    }
    Ok(MappingData {
        det: DenseTensor::from_vec(&[nc, nq], det)?,
        jac_inv: DenseTensor::from_vec(&[nc, nq, 3, 3], inv)?,
    })
}

impl MappingData {
    pub fn n_cells(&self) -> usize {
        self.det.shape()[0]
    }

    /// `(n_c, n_q, 3, n_d)` physical gradients of `basis`.
    pub fn physical_gradients(&self, basis: &BasisTab) -> Result<DenseTensor> {
        let (nc, nq) = (self.det.shape()[0], self.det.shape()[1]);
        if basis.n_points() != nq {
            return Err(Error::Shape(format!(
                "basis has {} points, mapping has {nq}",
                basis.n_points()
            )));
        }
        let nd = basis.n_dofs();
        let g = basis.bfg_ref.as_slice().expect("contiguous");
        let inv = self.jac_inv.as_slice().expect("contiguous");
        let mut out = vec![0.0; nc * nq * 3 * nd];
        out.par_chunks_mut(nq * 3 * nd).enumerate().for_each(|(c, out_c)| {
            for q in 0..nq {
                let ji = &inv[(c * nq + q) * 9..(c * nq + q + 1) * 9];
                for j in 0..3 {
                    let row = &mut out_c[(q * 3 + j) * nd..(q * 3 + j + 1) * nd];
                    for l in 0..3 {
                        let f = ji[l * 3 + j];
                        let src = &g[(q * 3 + l) * nd..(q * 3 + l + 1) * nd];
                        for (o, s) in row.iter_mut().zip(src) {
                            *o += s * f;
                        }
                    }
                }
            }
        });
        DenseTensor::from_vec(&[nc, nq, 3, nd], out)
    }
}

fn invert3(m: &[[f64; 3]; 3]) -> (f64, [[f64; 3]; 3]) {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    let r = 1.0 / det;
    let inv = [
        [
            c00 * r,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * r,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * r,
        ],
        [
            c01 * r,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * r,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * r,
        ],
        [
            c02 * r,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * r,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * r,
        ],
    ];
    (det, inv)
}
