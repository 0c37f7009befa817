use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Index pairs of the symmetric storage slots: the diagonal first, then the
/// upper triangle row by row.
pub fn sym_storage_pairs(dim: usize) -> Result<Vec<(usize, usize)>> {
    match dim {
        2 => Ok(vec![(0, 0), (1, 1), (0, 1)]),
        3 => Ok(vec![(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]),
        d => Err(Error::Dimension(d)),
    }
}

/// Selector `Psg[r, j, I]` of shape `(D, D, D(D+1)/2)`.
///
/// Contracting a gradient `G[r, j]` with it gives the engineering strain
/// vector: diagonal slots hold `G_ii`, shear slots hold `G_ij + G_ji`.
pub fn build_psg(dim: usize) -> Result<DenseTensor> {
    let pairs = sym_storage_pairs(dim)?;
    let n = pairs.len();
    let mut data = vec![0.0; dim * dim * n];
    for (slot, &(a, b)) in pairs.iter().enumerate() {
        data[(a * dim + b) * n + slot] = 1.0;
        data[(b * dim + a) * n + slot] = 1.0;
    }
    DenseTensor::from_vec(&[dim, dim, n], data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(psg: &DenseTensor, g: &[[f64; 3]; 3]) -> Vec<f64> {
        let n = psg.shape()[2];
        (0..n)
            .map(|s| {
                let mut v = 0.0;
                for (r, row) in g.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        v += psg.at(&[r, j, s]) * x;
                    }
                }
                v
            })
            .collect()
    }

    #[test]
    fn shapes() {
        assert_eq!(build_psg(3).unwrap().shape(), &[3, 3, 6]);
        assert_eq!(build_psg(2).unwrap().shape(), &[2, 2, 3]);
        assert!(matches!(build_psg(4), Err(Error::Dimension(4))));
    }

    #[test]
    fn round_trip_symmetric_gradient() {
        let g = [[1.0, 2.0, 3.0], [2.0, 5.0, 6.0], [3.0, 6.0, 9.0]];
        let psg = build_psg(3).unwrap();
        let v = apply(&psg, &g);
        let pairs = sym_storage_pairs(3).unwrap();
        let mut back = [[0.0; 3]; 3];
        for (slot, &(a, b)) in pairs.iter().enumerate() {
            let x = if a == b { v[slot] } else { v[slot] / 2.0 };
            back[a][b] = x;
            back[b][a] = x;
        }
        assert_eq!(back, g);
    }

    #[test]
    fn shear_slot_adds_both_halves() {
        let g = [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        assert_eq!(apply(&build_psg(3).unwrap(), &g), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }
}
