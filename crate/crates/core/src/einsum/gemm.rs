//! Row-major matrix kernels used by pairwise contraction.
//!
//! Every output element accumulates its `k` products in ascending order, so
//! results do not depend on how the batch or row ranges are split up.

/// `c[m x n] += a[m x k] * b[k x n]`, all row-major and contiguous.
pub fn gemm_acc(m: usize, n: usize, k: usize, a: &[f64], b: &[f64], c: &mut [f64]) {
    debug_assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    if n == 1 {
        for i in 0..m {
            let row = &a[i * k..(i + 1) * k];
            let mut acc = c[i];
            for (x, y) in row.iter().zip(&b[..k]) {
                acc += x * y;
            }
            c[i] = acc;
        }
        return;
    }
    for i in 0..m {
        let crow = &mut c[i * n..(i + 1) * n];
        let arow = &a[i * k..(i + 1) * k];
        for (p, &aip) in arow.iter().enumerate() {
            let brow = &b[p * n..(p + 1) * n];
            for (cj, bj) in crow.iter_mut().zip(brow) {
                *cj += aip * bj;
            }
        }
    }
}

/// `c[m x n] = a[m] (outer) b[n]`.
pub fn outer(a: &[f64], b: &[f64], c: &mut [f64]) {
    let n = b.len();
    for (i, &ai) in a.iter().enumerate() {
        for (cj, bj) in c[i * n..(i + 1) * n].iter_mut().zip(b) {
            *cj = ai * bj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_gemm() {
        // [[1,2],[3,4]] x [[5,6],[7,8]]
        let mut c = vec![0.0; 4];
        gemm_acc(2, 2, 2, &[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0, 7.0, 8.0], &mut c);
        assert_eq!(c, vec![19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn matrix_vector() {
        let mut c = vec![0.0; 2];
        gemm_acc(2, 1, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[1.0, 0.0, -1.0], &mut c);
        assert_eq!(c, vec![-2.0, -2.0]);
    }

    #[test]
    fn outer_product() {
        let mut c = vec![0.0; 6];
        outer(&[1.0, 2.0], &[3.0, 4.0, 5.0], &mut c);
        assert_eq!(c, vec![3.0, 4.0, 5.0, 6.0, 8.0, 10.0]);
    }
}
