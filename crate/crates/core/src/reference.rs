//! Cell-by-cell, point-by-point evaluation of the study forms.
//!
//! Every integrand is written out by hand. Cells are visited in order and
//! quadrature points in ascending order, so results are deterministic.
//! Output shapes match the transpiled programs: `(c, D, n_d)` residuals,
//! `(c, D, n_d, D, n_d)` matrices, `(c)` for eval mode; the component axes
//! are absent for scalar forms.

use crate::error::Result;
use crate::fe::FeOperandSet;
use crate::forms::{StudyForm, STATE_VAR};
use crate::tensor::DenseTensor;

/// Engineering strain of a displacement gradient `g[i][j] = du_i/dx_j`:
/// `(e_xx, e_yy, e_zz, 2e_xy, 2e_xz, 2e_yz)`.
fn strain(g: &[[f64; 3]; 3]) -> [f64; 6] {
    [
        g[0][0],
        g[1][1],
        g[2][2],
        g[0][1] + g[1][0],
        g[0][2] + g[2][0],
        g[1][2] + g[2][1],
    ]
}

/// Strain of the basis function `phi_k e_r`.
fn basis_strain(r: usize, grad: [f64; 3]) -> [f64; 6] {
    let mut g = [[0.0; 3]; 3];
    g[r] = grad;
    strain(&g)
}

struct Point<'a> {
    w: f64,
    phi: &'a [f64],
    /// `dphi[j][k] = d phi_k / d x_j`
    dphi: [&'a [f64]; 3],
    u: [f64; 3],
    /// `gu[i][j] = d u_i / d x_j`
    gu: [[f64; 3]; 3],
    material: &'a [f64],
}

struct Cells<'a> {
    ops: &'a FeOperandSet,
    nq: usize,
    nd: usize,
    dim: usize,
    det: &'a [f64],
    bf: &'a [f64],
    bfg: &'a [f64],
    dofs: Option<&'a [f64]>,
    material: Option<(&'a [f64], usize)>,
}

impl<'a> Cells<'a> {
    fn new(form: StudyForm, ops: &'a FeOperandSet, need_state: bool) -> Result<Self> {
        let dofs = if need_state {
            Some(ops.field(STATE_VAR)?.per_cell.as_slice().expect("contiguous"))
        } else {
            None
        };
        let material = match form.material() {
            Some(name) => {
                let m = ops.material(name)?;
                let per_point: usize = m.shape()[2..].iter().product();
                Some((m.as_slice().expect("contiguous"), per_point))
            }
            None => None,
        };
        Ok(Cells {
            ops,
            nq: ops.n_points(),
            nd: ops.n_cell_dofs(),
            dim: form.components(),
            det: ops.det().as_slice().expect("contiguous"),
            bf: ops.bf().as_slice().expect("contiguous"),
            bfg: ops.bfg.as_slice().expect("contiguous"),
            dofs,
            material,
        })
    }

    fn point(&self, c: usize, q: usize) -> Point<'a> {
        let (nq, nd, dim) = (self.nq, self.nd, self.dim);
        let phi = &self.bf[q * nd..(q + 1) * nd];
        let base = (c * nq + q) * 3 * nd;
        let dphi = [0, 1, 2].map(|j| &self.bfg[base + j * nd..base + (j + 1) * nd]);
        let mut u = [0.0; 3];
        let mut gu = [[0.0; 3]; 3];
        if let Some(dofs) = self.dofs {
            for i in 0..dim {
                let ui = &dofs[(c * dim + i) * nd..(c * dim + i + 1) * nd];
                for k in 0..nd {
                    u[i] += phi[k] * ui[k];
                    for j in 0..3 {
                        gu[i][j] += dphi[j][k] * ui[k];
                    }
                }
            }
        }
        let material = match self.material {
            Some((m, n)) => &m[(c * nq + q) * n..(c * nq + q + 1) * n],
            None => &[],
        };
        Point {
            w: self.det[c * nq + q],
            phi,
            dphi,
            u,
            gu,
            material,
        }
    }

    fn n_cells(&self) -> usize {
        self.ops.n_cells()
    }

    fn row_len(&self) -> usize {
        self.dim * self.nd
    }

    fn shape(&self, rank: usize) -> Vec<usize> {
        let mut s = vec![self.n_cells()];
        for _ in 0..rank {
            if self.dim > 1 {
                s.push(self.dim);
            }
            s.push(self.nd);
        }
        s
    }
}

/// Action of the form on the state DOFs, one cell at a time.
pub fn eval_residual_loop(form: StudyForm, ops: &FeOperandSet) -> Result<DenseTensor> {
    let cells = Cells::new(form, ops, true)?;
    let (nd, nrow) = (cells.nd, cells.row_len());
    let mut out = vec![0.0; cells.n_cells() * nrow];
    for c in 0..cells.n_cells() {
        let r_c = &mut out[c * nrow..(c + 1) * nrow];
        for q in 0..cells.nq {
            let p = cells.point(c, q);
            match form {
                StudyForm::Dot => {
                    for r in 0..3 {
                        for d in 0..nd {
                            r_c[r * nd + d] += p.w * p.phi[d] * p.u[r];
                        }
                    }
                }
                StudyForm::WeightedDot => {
                    for r in 0..3 {
                        let mu: f64 = (0..3).map(|j| p.material[r * 3 + j] * p.u[j]).sum();
                        for d in 0..nd {
                            r_c[r * nd + d] += p.w * p.phi[d] * mu;
                        }
                    }
                }
                StudyForm::Laplace => {
                    for d in 0..nd {
                        let g: f64 = (0..3).map(|j| p.dphi[j][d] * p.gu[0][j]).sum();
                        r_c[d] += p.w * g;
                    }
                }
                StudyForm::Convection => {
                    for r in 0..3 {
                        let adv: f64 = (0..3).map(|j| p.gu[r][j] * p.u[j]).sum();
                        for d in 0..nd {
                            r_c[r * nd + d] += p.w * p.phi[d] * adv;
                        }
                    }
                }
                StudyForm::Elasticity => {
                    let e = strain(&p.gu);
                    let mut s = [0.0; 6];
                    for (a, sa) in s.iter_mut().enumerate() {
                        *sa = (0..6).map(|b| p.material[a * 6 + b] * e[b]).sum();
                    }
                    for r in 0..3 {
                        for d in 0..nd {
                            let b = basis_strain(r, [p.dphi[0][d], p.dphi[1][d], p.dphi[2][d]]);
                            let v: f64 = (0..6).map(|a| b[a] * s[a]).sum();
                            r_c[r * nd + d] += p.w * v;
                        }
                    }
                }
            }
        }
    }
    DenseTensor::from_vec(&cells.shape(1), out)
}

/// Local element matrices: derivative of the residual with respect to the
/// state DOFs, one cell at a time.
pub fn eval_matrix_loop(form: StudyForm, ops: &FeOperandSet) -> Result<DenseTensor> {
    let cells = Cells::new(form, ops, form == StudyForm::Convection)?;
    let (nd, nrow, dim) = (cells.nd, cells.row_len(), cells.dim);
    let mut out = vec![0.0; cells.n_cells() * nrow * nrow];
    let mut col = vec![0.0; nrow];
    let mut strains = vec![[0.0; 6]; nrow];
    for c in 0..cells.n_cells() {
        let m_c = &mut out[c * nrow * nrow..(c + 1) * nrow * nrow];
        for q in 0..cells.nq {
            let p = cells.point(c, q);
            match form {
                StudyForm::Dot | StudyForm::WeightedDot => {
                    for r in 0..3 {
                        for s in 0..3 {
                            let coef = match form {
                                StudyForm::Dot if r == s => p.w,
                                StudyForm::Dot => continue,
                                _ => p.w * p.material[r * 3 + s],
                            };
                            for d in 0..nd {
                                let row = &mut m_c[(r * nd + d) * nrow + s * nd..(r * nd + d) * nrow + (s + 1) * nd];
                                let f = coef * p.phi[d];
                                for (m, phi_e) in row.iter_mut().zip(p.phi) {
                                    *m += f * phi_e;
                                }
                            }
                        }
                    }
                }
                StudyForm::Laplace => {
                    for d in 0..nd {
                        let row = &mut m_c[d * nrow..(d + 1) * nrow];
                        for (e, m) in row.iter_mut().enumerate() {
                            let g: f64 = (0..3).map(|j| p.dphi[j][d] * p.dphi[j][e]).sum();
                            *m += p.w * g;
                        }
                    }
                }
                StudyForm::Convection => {
                    // d/du_s,e of phi_d (grad u_r . u) = phi_d (delta_rs grad phi_e . u + du_r/dx_s phi_e)
                    for e in 0..nd {
                        col[e] = (0..3).map(|j| p.dphi[j][e] * p.u[j]).sum();
                    }
                    for r in 0..3 {
                        for d in 0..nd {
                            let f = p.w * p.phi[d];
                            let row = &mut m_c[(r * nd + d) * nrow..(r * nd + d + 1) * nrow];
                            for s in 0..3 {
                                for e in 0..nd {
                                    let mut v = p.gu[r][s] * p.phi[e];
                                    if r == s {
                                        v += col[e];
                                    }
                                    row[s * nd + e] += f * v;
                                }
                            }
                        }
                    }
                }
                StudyForm::Elasticity => {
                    for r in 0..dim {
                        for d in 0..nd {
                            strains[r * nd + d] = basis_strain(r, [p.dphi[0][d], p.dphi[1][d], p.dphi[2][d]]);
                        }
                    }
                    for (i, bi) in strains.iter().enumerate() {
                        let mut db = [0.0; 6];
                        for (b, v) in db.iter_mut().enumerate() {
                            *v = (0..6).map(|a| bi[a] * p.material[a * 6 + b]).sum::<f64>() * p.w;
                        }
                        let row = &mut m_c[i * nrow..(i + 1) * nrow];
                        for (m, bj) in row.iter_mut().zip(&strains) {
                            *m += (0..6).map(|b| db[b] * bj[b]).sum::<f64>();
                        }
                    }
                }
            }
        }
    }
    DenseTensor::from_vec(&cells.shape(2), out)
}

/// Per-cell integral of the form with the state in every slot.
pub fn eval_scalar_loop(form: StudyForm, ops: &FeOperandSet) -> Result<DenseTensor> {
    let cells = Cells::new(form, ops, true)?;
    let mut out = vec![0.0; cells.n_cells()];
    for (c, total) in out.iter_mut().enumerate() {
        for q in 0..cells.nq {
            let p = cells.point(c, q);
            let v = match form {
                StudyForm::Dot => (0..3).map(|i| p.u[i] * p.u[i]).sum(),
                StudyForm::WeightedDot => {
                    let mut v = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            v += p.u[i] * p.material[i * 3 + j] * p.u[j];
                        }
                    }
                    v
                }
                StudyForm::Laplace => (0..3).map(|j| p.gu[0][j] * p.gu[0][j]).sum(),
                StudyForm::Convection => {
                    let mut v = 0.0;
                    for i in 0..3 {
                        for j in 0..3 {
                            v += p.u[i] * p.gu[i][j] * p.u[j];
                        }
                    }
                    v
                }
                StudyForm::Elasticity => {
                    let e = strain(&p.gu);
                    let mut v = 0.0;
                    for a in 0..6 {
                        for b in 0..6 {
                            v += e[a] * p.material[a * 6 + b] * e[b];
                        }
                    }
                    v
                }
            };
            *total += p.w * v;
        }
    }
    DenseTensor::from_vec(&[cells.n_cells()], out)
}
