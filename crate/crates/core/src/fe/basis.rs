use super::quadrature::{check_order, QuadratureRule};
use crate::error::Result;
use crate::tensor::DenseTensor;

/// Equispaced 1D Lagrange nodes on `[-1, 1]`.
pub fn lagrange_nodes_1d(order: usize) -> Vec<f64> {
    (0..=order).map(|k| -1.0 + 2.0 * k as f64 / order as f64).collect()
}

/// Values and derivatives of the 1D Lagrange polynomials at `x`.
pub fn lagrange_1d(order: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes = lagrange_nodes_1d(order);
    let n = nodes.len();
    let mut vals = vec![0.0; n];
    let mut ders = vec![0.0; n];
    for k in 0..n {
        let denom: f64 = (0..n).filter(|&m| m != k).map(|m| nodes[k] - nodes[m]).product();
        vals[k] = (0..n).filter(|&m| m != k).map(|m| x - nodes[m]).product::<f64>() / denom;
        let mut d = 0.0;
        for skip in (0..n).filter(|&m| m != k) {
            d += (0..n)
                .filter(|&m| m != k && m != skip)
                .map(|m| x - nodes[m])
                .product::<f64>();
        }
        ders[k] = d / denom;
    }
    (vals, ders)
}

/// Tensor-product Lagrange basis tabulated at quadrature points.
#[derive(Debug, Clone)]
pub struct BasisTab {
    pub order: usize,
    /// `(n_q, n_d)` values.
    pub bf: DenseTensor,
    /// `(n_q, 3, n_d)` reference gradients.
    pub bfg_ref: DenseTensor,
}

impl BasisTab {
    pub fn n_points(&self) -> usize {
        self.bf.shape()[0]
    }

    pub fn n_dofs(&self) -> usize {
        self.bf.shape()[1]
    }
}

/// Local node `k = a + (p+1) b + (p+1)^2 c` sits at reference coordinates
/// `(x_a, x_b, x_c)`.
pub fn reference_nodes(order: usize) -> Vec<[f64; 3]> {
    let x = lagrange_nodes_1d(order);
    let mut out = Vec::with_capacity(x.len().pow(3));
    for &z in &x {
        for &y in &x {
            for &xx in &x {
                out.push([xx, y, z]);
            }
        }
    }
    out
}

/// Tabulates the basis of `order` at arbitrary reference points.
pub fn tabulate(order: usize, points: &[[f64; 3]]) -> Result<BasisTab> {
    check_order(order)?;
    let n1 = order + 1;
    let nd = n1 * n1 * n1;
    let nq = points.len();
    let mut bf = vec![0.0; nq * nd];
    let mut bfg = vec![0.0; nq * 3 * nd];
    for (q, p) in points.iter().enumerate() {
        let t: Vec<(Vec<f64>, Vec<f64>)> = p.iter().map(|&x| lagrange_1d(order, x)).collect();
        for c in 0..n1 {
            for b in 0..n1 {
                for a in 0..n1 {
                    let k = a + n1 * (b + n1 * c);
                    let (vx, dx) = (t[0].0[a], t[0].1[a]);
                    let (vy, dy) = (t[1].0[b], t[1].1[b]);
                    let (vz, dz) = (t[2].0[c], t[2].1[c]);
                    bf[q * nd + k] = vx * vy * vz;
                    bfg[(q * 3) * nd + k] = dx * vy * vz;
                    bfg[(q * 3 + 1) * nd + k] = vx * dy * vz;
                    bfg[(q * 3 + 2) * nd + k] = vx * vy * dz;
                }
            }
        }
    }
    Ok(BasisTab {
        order,
        bf: DenseTensor::from_vec(&[nq, nd], bf)?,
        bfg_ref: DenseTensor::from_vec(&[nq, 3, nd], bfg)?,
    })
}

/// Lagrange basis of `order` at the points of `rule`.
pub fn lagrange_basis(order: usize, rule: &QuadratureRule) -> Result<BasisTab> {
    tabulate(order, &rule.points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::quadrature::gauss_quadrature;

    #[test]
    fn dof_counts() {
        for (order, nd) in [(1, 8), (2, 27), (3, 64)] {
            let b = lagrange_basis(order, &gauss_quadrature(order).unwrap()).unwrap();
            assert_eq!(b.n_dofs(), nd);
        }
    }

    #[test]
    fn kronecker_at_nodes() {
        for order in 1..=3 {
            let nodes = reference_nodes(order);
            let b = tabulate(order, &nodes).unwrap();
            for m in 0..nodes.len() {
                for k in 0..nodes.len() {
                    let want = if k == m { 1.0 } else { 0.0 };
                    assert!((b.bf.at(&[m, k]) - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        let pts = [[0.3, -0.7, 0.11], [-0.95, 0.5, 0.999], [0.0, 0.0, 0.0]];
        for order in 1..=3 {
            let b = tabulate(order, &pts).unwrap();
            for q in 0..pts.len() {
                let s: f64 = (0..b.n_dofs()).map(|k| b.bf.at(&[q, k])).sum();
                assert!((s - 1.0).abs() < 1e-13);
                for l in 0..3 {
                    let g: f64 = (0..b.n_dofs()).map(|k| b.bfg_ref.at(&[q, l, k])).sum();
                    assert!(g.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let h = 1e-6;
        for order in 1..=3 {
            let (_, d) = lagrange_1d(order, 0.37);
            let (p, _) = lagrange_1d(order, 0.37 + h);
            let (m, _) = lagrange_1d(order, 0.37 - h);
            for k in 0..=order {
                assert!((d[k] - (p[k] - m[k]) / (2.0 * h)).abs() < 1e-7);
            }
        }
    }
}
