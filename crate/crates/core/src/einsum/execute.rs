use super::cost::Simulator;
use super::naive::naive_contract;
use super::pairwise::{arrange, contract_pair};
use super::path::ContractionPath;
use super::EinsumSpec;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Evaluates `spec` step by step along `path`.
///
/// Pair steps go through [`contract_pair`]; single-operand steps and steps
/// over three or more operands use the nested-loop evaluator. A path that is
/// one step over every operand is exactly [`naive_contract`].
pub fn execute_path(spec: &EinsumSpec, operands: &[DenseTensor], path: &ContractionPath) -> Result<DenseTensor> {
    spec.check_operands(operands)?;
    if path.is_single_step(spec.n_operands()) {
        let step = &path.steps()[0];
        if step.iter().enumerate().all(|(k, &p)| k == p) {
            return naive_contract(spec, operands);
        }
    }
    let mut sim = Simulator::new(spec);
    let mut live: Vec<DenseTensor> = operands.to_vec();
    for positions in path.steps() {
        let plan = sim.plan(positions)?;
        let tensors: Vec<DenseTensor> = positions.iter().map(|&p| live[p].clone()).collect();
        let result = match tensors.len() {
            2 => contract_pair(&tensors[0], &plan.inputs[0], &tensors[1], &plan.inputs[1], &plan.result)?,
            _ => {
                let ins: Vec<String> = plan.inputs.iter().map(|s| s.iter().collect()).collect();
                let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
                let shapes: Vec<&[usize]> = tensors.iter().map(|t| t.shape()).collect();
                let out: String = plan.result.iter().collect();
                let sub = EinsumSpec::from_subscripts(&ins, &out, &shapes)?;
                naive_contract(&sub, &tensors)?
            }
        };
        let mut sorted = positions.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for p in sorted {
            live.remove(p);
        }
        live.push(result);
        sim.apply(positions, plan.result);
    }
    if live.len() != 1 {
        return Err(Error::Path(format!(
            "path leaves {} operands instead of one",
            live.len()
        )));
    }
    let last = live.pop().expect("one operand");
    let letters = sim.operands.pop().expect("one operand");
    if letters != spec.output() {
        return arrange(&last, &letters, spec.output());
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einsum::{optimize_path, PathStrategy};

    fn ints(shape: &[usize], seed: i64) -> DenseTensor {
        let n: usize = shape.iter().product();
        DenseTensor::from_vec(shape, (0..n as i64).map(|v| ((v * 7 + seed) % 11 - 5) as f64).collect()).unwrap()
    }

    #[test]
    fn chained_dot_exact_on_integers() {
        let ops = [ints(&[2, 2], 1), ints(&[2, 5], 2), ints(&[5, 2], 3)];
        let spec = EinsumSpec::parse("ij,jk,kl->il", &[&[2, 2], &[2, 5], &[5, 2]]).unwrap();
        let naive = naive_contract(&spec, &ops).unwrap();
        for s in [PathStrategy::Greedy, PathStrategy::Optimal] {
            let (path, _) = optimize_path(&spec, s);
            assert_eq!(execute_path(&spec, &ops, &path).unwrap(), naive);
        }
    }

    #[test]
    fn naive_path_bitwise() {
        let ops = [ints(&[3, 4], 1), ints(&[4, 5], 2), ints(&[5, 3], 3)];
        let spec = EinsumSpec::parse("ij,jk,ki->", &[&[3, 4], &[4, 5], &[5, 3]]).unwrap();
        let naive = naive_contract(&spec, &ops).unwrap();
        let got = execute_path(&spec, &ops, &ContractionPath::naive(3)).unwrap();
        assert_eq!(got.to_vec(), naive.to_vec());
    }

    #[test]
    fn multiway_step() {
        let ops = [ints(&[2, 3], 1), ints(&[3, 4], 2), ints(&[4, 2], 3), ints(&[2], 4)];
        let shapes: Vec<&[usize]> = ops.iter().map(|o| o.shape()).collect();
        let spec = EinsumSpec::parse("ij,jk,kl,l->i", &shapes).unwrap();
        let naive = naive_contract(&spec, &ops).unwrap();
        let path: ContractionPath = "[(0, 1), (0, 1, 2)]".parse().unwrap();
        assert_eq!(execute_path(&spec, &ops, &path).unwrap(), naive);
    }

    #[test]
    fn bad_path_rejected() {
        let ops = [ints(&[2, 2], 1), ints(&[2, 5], 2), ints(&[5, 2], 3)];
        let spec = EinsumSpec::parse("ij,jk,kl->il", &[&[2, 2], &[2, 5], &[5, 2]]).unwrap();
        let path = ContractionPath::from_pairs(&[(0, 1), (1, 2)]);
        assert!(matches!(execute_path(&spec, &ops, &path), Err(Error::Path(_))));
        let path = ContractionPath::from_pairs(&[(0, 1)]);
        assert!(matches!(execute_path(&spec, &ops, &path), Err(Error::Path(_))));
    }
}
