use super::gemm::{gemm_acc, outer};
use super::naive::naive_contract;
use super::EinsumSpec;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Contracts two operands into `out` subscripts by lowering to a batched
/// matrix product.
///
/// Index letters are grouped into batch (in both operands and the output),
/// free (in one operand and the output) and contracted (in both operands,
/// not in the output). The operands are copied into `[batch, free_a,
/// contracted]` and `[batch, contracted, free_b]` order, multiplied batch by
/// batch, and the result is permuted to `out`. Repeated letters and letters
/// private to one operand are reduced first.
pub fn contract_pair(
    a: &DenseTensor,
    a_sub: &[char],
    b: &DenseTensor,
    b_sub: &[char],
    out: &[char],
) -> Result<DenseTensor> {
    if let Some(ch) = out.iter().find(|c| !a_sub.contains(c) && !b_sub.contains(c)) {
        return Err(Error::Shape(format!("output index `{ch}` missing from both operands")));
    }
    let (a, a_sub) = reduce_private(a, a_sub, b_sub, out)?;
    let (b, b_sub) = reduce_private(b, b_sub, &a_sub, out)?;

    let batch: Vec<char> = out
        .iter()
        .copied()
        .filter(|c| a_sub.contains(c) && b_sub.contains(c))
        .collect();
    let free_a: Vec<char> = out
        .iter()
        .copied()
        .filter(|c| a_sub.contains(c) && !b_sub.contains(c))
        .collect();
    let free_b: Vec<char> = out
        .iter()
        .copied()
        .filter(|c| b_sub.contains(c) && !a_sub.contains(c))
        .collect();
    let contracted: Vec<char> = a_sub
        .iter()
        .copied()
        .filter(|c| b_sub.contains(c) && !out.contains(c))
        .collect();

    let extent = |c: &char| -> usize {
        a_sub
            .iter()
            .position(|x| x == c)
            .map(|p| a.shape()[p])
            .or_else(|| b_sub.iter().position(|x| x == c).map(|p| b.shape()[p]))
            .expect("letter of an operand")
    };
    for c in &contracted {
        let pa = a_sub.iter().position(|x| x == c).expect("present");
        let pb = b_sub.iter().position(|x| x == c).expect("present");
        if a.shape()[pa] != b.shape()[pb] {
            return Err(Error::Shape(format!("index `{c}` has mismatched extents")));
        }
    }
    let nb: usize = batch.iter().map(extent).product();
    let m: usize = free_a.iter().map(extent).product();
    let n: usize = free_b.iter().map(extent).product();
    let k: usize = contracted.iter().map(extent).product();

    let a_order: Vec<char> = batch.iter().chain(&free_a).chain(&contracted).copied().collect();
    let b_order: Vec<char> = batch.iter().chain(&contracted).chain(&free_b).copied().collect();
    let a_mat = arrange(&a, &a_sub, &a_order)?;
    let b_mat = arrange(&b, &b_sub, &b_order)?;
    let a_data = a_mat.as_slice().expect("contiguous");
    let b_data = b_mat.as_slice().expect("contiguous");

    let mut c = vec![0.0; nb * m * n];
    if contracted.is_empty() {
        for ib in 0..nb {
            outer(
                &a_data[ib * m..(ib + 1) * m],
                &b_data[ib * n..(ib + 1) * n],
                &mut c[ib * m * n..(ib + 1) * m * n],
            );
        }
    } else {
        for ib in 0..nb {
            gemm_acc(
                m,
                n,
                k,
                &a_data[ib * m * k..(ib + 1) * m * k],
                &b_data[ib * k * n..(ib + 1) * k * n],
                &mut c[ib * m * n..(ib + 1) * m * n],
            );
        }
    }

    let c_sub: Vec<char> = batch.iter().chain(&free_a).chain(&free_b).copied().collect();
    let c_shape: Vec<usize> = c_sub.iter().map(extent).collect();
    let result = DenseTensor::from_vec(&c_shape, c)?;
    arrange(&result, &c_sub, out)
}

/// Sums out letters of `t` that appear neither in `other` nor in `out`, and
/// takes diagonals of repeated letters.
fn reduce_private(t: &DenseTensor, sub: &[char], other: &[char], out: &[char]) -> Result<(DenseTensor, Vec<char>)> {
    let mut keep: Vec<char> = Vec::new();
    for &c in sub {
        if (other.contains(&c) || out.contains(&c)) && !keep.contains(&c) {
            keep.push(c);
        }
    }
    if keep.len() == sub.len() {
        return Ok((t.clone(), sub.to_vec()));
    }
    let ins: String = sub.iter().collect();
    let outs: String = keep.iter().collect();
    let spec = EinsumSpec::from_subscripts(&[&ins], &outs, &[t.shape()])?;
    Ok((naive_contract(&spec, std::slice::from_ref(t))?, keep))
}

/// Contiguous copy of `t` with axes reordered from `sub` to `order`.
pub(crate) fn arrange(t: &DenseTensor, sub: &[char], order: &[char]) -> Result<DenseTensor> {
    let perm: Vec<usize> = order
        .iter()
        .map(|c| {
            sub.iter()
                .position(|x| x == c)
                .ok_or_else(|| Error::Shape(format!("index `{c}` not found in operand")))
        })
        .collect::<Result<_>>()?;
    if perm.len() != sub.len() {
        return Err(Error::Shape(format!(
            "cannot arrange {:?} as {:?}",
            sub.iter().collect::<String>(),
            order.iter().collect::<String>()
        )));
    }
    if perm.iter().enumerate().all(|(k, &p)| k == p) {
        return Ok(t.to_contiguous());
    }
    Ok(t.permuted(&perm)?.to_contiguous())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(shape: &[usize], scale: f64) -> DenseTensor {
        let n: usize = shape.iter().product();
        DenseTensor::from_vec(shape, (0..n).map(|v| (v as f64 + 1.0) * scale).collect()).unwrap()
    }

    fn check(expr: &str, a: DenseTensor, b: DenseTensor) {
        let spec = EinsumSpec::parse(expr, &[a.shape(), b.shape()]).unwrap();
        let expected = naive_contract(&spec, &[a.clone(), b.clone()]).unwrap();
        let got = contract_pair(&a, &spec.inputs()[0], &b, &spec.inputs()[1], spec.output()).unwrap();
        assert_eq!(got.shape(), expected.shape(), "{expr}");
        assert!(got.rel_diff(&expected).unwrap() < 1e-14, "{expr}");
    }

    #[test]
    fn matmul_variants() {
        check("ik,kj->ij", seq(&[3, 4], 0.5), seq(&[4, 5], 0.25));
        check("kl,jk->jl", seq(&[5, 2], 1.0), seq(&[2, 5], 1.0));
        check("bik,bkj->bji", seq(&[2, 3, 4], 0.1), seq(&[2, 4, 5], 0.3));
    }

    #[test]
    fn outer_and_broadcast() {
        check("i,j->ij", seq(&[3], 1.0), seq(&[4], 2.0));
        check("cq,qd->cqd", seq(&[4, 3], 1.0), seq(&[3, 5], 1.0));
    }

    #[test]
    fn private_and_repeated_letters() {
        check("ijj,jk->k", seq(&[2, 3, 3], 1.0), seq(&[3, 4], 1.0));
        check("ir,is->rs", seq(&[3, 3], 1.0), seq(&[3, 3], 1.0));
        check("ab,cd->", seq(&[2, 3], 1.0), seq(&[4, 2], 1.0));
    }
}
