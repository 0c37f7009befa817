use super::EinsumSpec;
use crate::error::Result;
use crate::tensor::DenseTensor;

/// Evaluates `spec` with one loop per index letter.
///
/// Output letters form the outer loops, summed letters the inner ones, both
/// in first-appearance order. Each operand's factor is multiplied in at the
/// loop level of its last letter, so the iteration count is the product of
/// all extents but the inner body touches only the operands that vary there.
pub fn naive_contract(spec: &EinsumSpec, operands: &[DenseTensor]) -> Result<DenseTensor> {
    spec.check_operands(operands)?;
    let mut order: Vec<char> = spec.output().to_vec();
    order.extend(spec.summed_letters());
    let n_levels = order.len();
    let n_out = spec.output().len();

    let mut scalar = 1.0;
    let mut data = Vec::new();
    let mut bases = Vec::new();
    let mut op_strides: Vec<Vec<usize>> = Vec::new();
    let mut attach: Vec<Vec<usize>> = vec![Vec::new(); n_levels];
    for (k, op) in operands.iter().enumerate() {
        let letters = &spec.inputs()[k];
        if letters.is_empty() {
            scalar *= op.at(&[]);
            continue;
        }
        let per_level: Vec<usize> = order
            .iter()
            .map(|ch| {
                letters
                    .iter()
                    .zip(op.strides())
                    .filter(|(c, _)| *c == ch)
                    .map(|(_, s)| *s)
                    .sum()
            })
            .collect();
        let last = order
            .iter()
            .rposition(|ch| letters.contains(ch))
            .expect("operand letters are loop letters");
        attach[last].push(data.len());
        data.push(op.buffer().as_slice());
        bases.push(op.offset());
        op_strides.push(per_level);
    }

    let extents: Vec<usize> = order.iter().map(|c| spec.dim(*c)).collect();
    let n_ops = data.len();
    // strides laid out [level][op]
    let mut strides = vec![0usize; n_levels * n_ops];
    for (op, s) in op_strides.iter().enumerate() {
        for (level, &st) in s.iter().enumerate() {
            strides[level * n_ops + op] = st;
        }
    }
    let nest = Nest {
        extents,
        n_out,
        data,
        strides,
        attach,
        n_ops,
    };
    let out_shape = spec.output_shape();
    let mut out = vec![0.0; out_shape.iter().product()];
    let mut offs = vec![0usize; (n_levels + 1) * n_ops.max(1)];
    offs[..n_ops].copy_from_slice(&bases);
    let mut pos = 0;
    nest.outer(0, scalar, &mut offs, &mut out, &mut pos);
    DenseTensor::from_vec(&out_shape, out)
}

struct Nest<'a> {
    extents: Vec<usize>,
    n_out: usize,
    data: Vec<&'a [f64]>,
    strides: Vec<usize>,
    attach: Vec<Vec<usize>>,
    n_ops: usize,
}

impl Nest<'_> {
    #[inline]
    fn advance(&self, level: usize, i: usize, offs: &mut [usize]) {
        let n = self.n_ops;
        let (cur, next) = offs.split_at_mut((level + 1) * n);
        let cur = &cur[level * n..];
        let st = &self.strides[level * n..(level + 1) * n];
        for op in 0..n {
            next[op] = cur[op] + i * st[op];
        }
    }

    #[inline]
    fn factor(&self, level: usize, partial: f64, offs: &[usize]) -> f64 {
        let n = self.n_ops;
        let mut p = partial;
        for &op in &self.attach[level] {
            p *= self.data[op][offs[(level + 1) * n + op]];
        }
        p
    }

    fn outer(&self, level: usize, partial: f64, offs: &mut [usize], out: &mut [f64], pos: &mut usize) {
        if level == self.n_out {
            out[*pos] = self.inner(level, partial, offs);
            *pos += 1;
            return;
        }
        for i in 0..self.extents[level] {
            self.advance(level, i, offs);
            let p = self.factor(level, partial, offs);
            self.outer(level + 1, p, offs, out, pos);
        }
    }

    fn inner(&self, level: usize, partial: f64, offs: &mut [usize]) -> f64 {
        let n_levels = self.extents.len();
        if level == n_levels {
            return partial;
        }
        let mut sum = 0.0;
        if level + 1 == n_levels {
            for i in 0..self.extents[level] {
                self.advance(level, i, offs);
                sum += self.factor(level, partial, offs);
            }
            return sum;
        }
        for i in 0..self.extents[level] {
            self.advance(level, i, offs);
            let p = self.factor(level, partial, offs);
            sum += self.inner(level + 1, p, offs);
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: &[usize], v: &[f64]) -> DenseTensor {
        DenseTensor::from_vec(shape, v.to_vec()).unwrap()
    }

    fn run(expr: &str, ops: &[DenseTensor]) -> DenseTensor {
        let shapes: Vec<&[usize]> = ops.iter().map(|o| o.shape()).collect();
        let spec = EinsumSpec::parse(expr, &shapes).unwrap();
        naive_contract(&spec, ops).unwrap()
    }

    #[test]
    fn identity_matmul() {
        let eye = t(&[2, 2], &[1.0, 0.0, 0.0, 1.0]);
        let b = t(&[2, 2], &[3.0, -1.0, 2.5, 7.0]);
        assert_eq!(run("ik,kj->ij", &[eye, b.clone()]), b);
    }

    #[test]
    fn bilinear_picks_corner() {
        let u = t(&[2], &[1.0, 0.0]);
        let a = t(&[2, 2], &[2.0, 3.0, 4.0, 5.0]);
        let r = run("i,ij,j->", &[u.clone(), a, u]);
        assert_eq!(r.shape(), &[] as &[usize]);
        assert_eq!(r.at(&[]), 2.0);
    }

    #[test]
    fn trace_and_diagonal() {
        let a = t(&[3, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(run("ii", &[a.clone()]).at(&[]), 15.0);
        assert_eq!(run("ii->i", &[a.clone()]).to_vec(), vec![1.0, 5.0, 9.0]);
        assert_eq!(
            run("ij->ji", &[a]).to_vec(),
            vec![1.0, 4.0, 7.0, 2.0, 5.0, 8.0, 3.0, 6.0, 9.0]
        );
    }

    #[test]
    fn strided_operand() {
        let a = t(&[2, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).permuted(&[1, 0]).unwrap();
        let r = run("ij->i", &[a]);
        assert_eq!(r.to_vec(), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn scalar_operand() {
        let s = DenseTensor::scalar(2.0);
        let v = t(&[3], &[1.0, 2.0, 3.0]);
        assert_eq!(run(",i->i", &[s, v]).to_vec(), vec![2.0, 4.0, 6.0]);
    }
}
