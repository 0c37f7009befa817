use std::collections::BTreeMap;

use super::path::ContractionPath;
use super::EinsumSpec;
use crate::error::{Error, Result};

/// Flop count of one contraction step over `indices`.
///
/// Returns `S * f` with `S` the product of the extents and
/// `f = max(1, n_terms - 1) + [has_summed]`.
pub fn step_flops<'a>(
    indices: impl IntoIterator<Item = &'a char>,
    has_summed: bool,
    n_terms: usize,
    dims: &BTreeMap<char, usize>,
) -> u128 {
    let size = size_of(indices, dims);
    let factor = n_terms.saturating_sub(1).max(1) as u128 + u128::from(has_summed);
    size * factor
}

pub(crate) fn size_of<'a>(indices: impl IntoIterator<Item = &'a char>, dims: &BTreeMap<char, usize>) -> u128 {
    indices.into_iter().map(|c| dims[c] as u128).product()
}

/// Cost of evaluating the whole spec in a single nested loop.
pub fn naive_flops(spec: &EinsumSpec) -> u128 {
    let letters = spec.letters();
    let has_summed = letters.len() > spec.output().len();
    step_flops(&letters, has_summed, spec.n_operands(), spec.dims())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepCost {
    pub positions: Vec<usize>,
    /// Number of distinct indices touched by the step.
    pub scaling: usize,
    /// Step expression, e.g. `jk,kl->jl`.
    pub subscripts: String,
    /// Operand list after the step, e.g. `ij,jl->il`.
    pub remaining: String,
    pub flops: u128,
    pub result_size: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub naive_flops: u128,
    pub path_flops: u128,
    /// Element count of the largest step result, the final output included.
    pub largest_intermediate: u128,
    pub naive_scaling: usize,
    pub steps: Vec<StepCost>,
}

impl CostReport {
    pub fn optimized_scaling(&self) -> usize {
        self.steps.iter().map(|s| s.scaling).max().unwrap_or(0)
    }

    pub fn speedup(&self) -> f64 {
        if self.path_flops == 0 {
            1.0
        } else {
            self.naive_flops as f64 / self.path_flops as f64
        }
    }
}

/// Operand bookkeeping shared by the cost model and path execution: after a
/// step the contracted operands are removed and the result is appended.
#[derive(Debug, Clone)]
pub(crate) struct Simulator<'a> {
    spec: &'a EinsumSpec,
    pub(crate) operands: Vec<Vec<char>>,
}

#[derive(Debug, Clone)]
pub(crate) struct StepPlan {
    pub inputs: Vec<Vec<char>>,
    pub result: Vec<char>,
    pub union: Vec<char>,
    pub has_summed: bool,
}

impl<'a> Simulator<'a> {
    pub(crate) fn new(spec: &'a EinsumSpec) -> Self {
        Simulator {
            spec,
            operands: spec.inputs().to_vec(),
        }
    }

    /// Letters the step over `positions` must keep: those used by the
    /// remaining operands or the output. The last step yields the output.
    pub(crate) fn plan(&self, positions: &[usize]) -> Result<StepPlan> {
        if positions.is_empty() {
            return Err(Error::Path("empty step".into()));
        }
        for (k, &p) in positions.iter().enumerate() {
            if p >= self.operands.len() {
                return Err(Error::Path(format!(
                    "position {p} out of range for {} operands",
                    self.operands.len()
                )));
            }
            if positions[..k].contains(&p) {
                return Err(Error::Path(format!("position {p} repeated in step {positions:?}")));
            }
        }
        let inputs: Vec<Vec<char>> = positions.iter().map(|&p| self.operands[p].clone()).collect();
        let mut union = Vec::new();
        for ch in inputs.iter().flatten() {
            if !union.contains(ch) {
                union.push(*ch);
            }
        }
        let rest: Vec<&Vec<char>> = self
            .operands
            .iter()
            .enumerate()
            .filter(|(k, _)| !positions.contains(k))
            .map(|(_, o)| o)
            .collect();
        let result: Vec<char> = if rest.is_empty() {
            self.spec.output().to_vec()
        } else {
            union
                .iter()
                .copied()
                .filter(|ch| self.spec.output().contains(ch) || rest.iter().any(|o| o.contains(ch)))
                .collect()
        };
        let has_summed = union.iter().any(|c| !result.contains(c));
        Ok(StepPlan {
            inputs,
            result,
            union,
            has_summed,
        })
    }

    pub(crate) fn apply(&mut self, positions: &[usize], result: Vec<char>) {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        for p in sorted {
            self.operands.remove(p);
        }
        self.operands.push(result);
    }

    pub(crate) fn remaining_string(&self) -> String {
        let ops: Vec<String> = self.operands.iter().map(|o| o.iter().collect()).collect();
        format!("{}->{}", ops.join(","), self.spec.output_subscripts())
    }
}

/// Scores an arbitrary path with the flop model.
pub fn cost_of_path(spec: &EinsumSpec, path: &ContractionPath) -> Result<CostReport> {
    let mut sim = Simulator::new(spec);
    let mut steps = Vec::with_capacity(path.steps().len());
    let mut total = 0u128;
    let mut largest = 0u128;
    for positions in path.steps() {
        let plan = sim.plan(positions)?;
        let flops = step_flops(&plan.union, plan.has_summed, positions.len(), spec.dims());
        let result_size = size_of(&plan.result, spec.dims());
        let ins: Vec<String> = plan.inputs.iter().map(|s| s.iter().collect()).collect();
        let subscripts = format!("{}->{}", ins.join(","), plan.result.iter().collect::<String>());
        sim.apply(positions, plan.result.clone());
        total += flops;
        largest = largest.max(result_size);
        steps.push(StepCost {
            positions: positions.clone(),
            scaling: plan.union.len(),
            subscripts,
            remaining: sim.remaining_string(),
            flops,
            result_size,
        });
    }
    if sim.operands.len() != 1 {
        return Err(Error::Path(format!(
            "path leaves {} operands instead of one",
            sim.operands.len()
        )));
    }
    Ok(CostReport {
        naive_flops: naive_flops(spec),
        path_flops: total,
        largest_intermediate: largest,
        naive_scaling: spec.letters().len(),
        steps,
    })
}

/// Formats like `1.200e+2`.
pub fn format_sci(value: f64) -> String {
    let s = format!("{value:.3e}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => s,
    }
}
