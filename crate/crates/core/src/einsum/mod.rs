//! Einsum expressions: parsing, the naive nested-loop oracle, the flop cost
//! model, contraction path optimization, and path execution.

mod cost;
mod execute;
mod explain;
pub mod gemm;
mod naive;
mod pairwise;
mod path;

pub use cost::{cost_of_path, format_sci, naive_flops, step_flops, CostReport, StepCost};
pub use execute::execute_path;
pub use explain::{explain, render_report};
pub use naive::naive_contract;
pub use pairwise::contract_pair;
pub use path::{optimize_path, ContractionPath, PathStrategy};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// A validated einsum expression with the extent of every index letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EinsumSpec {
    inputs: Vec<Vec<char>>,
    output: Vec<char>,
    dims: BTreeMap<char, usize>,
}

impl EinsumSpec {
    /// Parses `expr` (e.g. `"ij,jk->ik"`) against the operand shapes.
    ///
    /// Without `->` the output is every letter that appears exactly once,
    /// sorted alphabetically.
    pub fn parse(expr: &str, shapes: &[&[usize]]) -> Result<Self> {
        let expr_clean: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
        let (lhs, output) = match expr_clean.split_once("->") {
            Some((lhs, rhs)) => {
                if rhs.contains("->") {
                    return Err(Error::parse(expr, "more than one `->`"));
                }
                (lhs.to_string(), Some(rhs.to_string()))
            }
            None => (expr_clean.clone(), None),
        };
        let inputs: Vec<String> = lhs.split(',').map(str::to_string).collect();
        for s in inputs.iter().chain(output.iter()) {
            if let Some(bad) = s.chars().find(|c| !c.is_ascii_alphabetic()) {
                return Err(Error::parse(expr, format!("invalid subscript character {bad:?}")));
            }
        }
        let output = match output {
            Some(o) => o,
            None => {
                let all: String = inputs.concat();
                let mut once: Vec<char> = all
                    .chars()
                    .filter(|&c| all.chars().filter(|&d| d == c).count() == 1)
                    .collect();
                once.sort_unstable();
                once.into_iter().collect()
            }
        };
        let inputs: Vec<&str> = inputs.iter().map(String::as_str).collect();
        Self::from_subscripts(&inputs, &output, shapes).map_err(|e| match e {
            Error::Parse { reason, .. } => Error::parse(expr, reason),
            other => other,
        })
    }

    /// Builds a spec from per-operand subscripts and the output subscripts.
    pub fn from_subscripts(inputs: &[&str], output: &str, shapes: &[&[usize]]) -> Result<Self> {
        let expr = format!("{}->{}", inputs.join(","), output);
        if inputs.len() != shapes.len() {
            return Err(Error::parse(
                &expr,
                format!("{} subscripts for {} operands", inputs.len(), shapes.len()),
            ));
        }
        let mut dims = BTreeMap::new();
        let mut parsed = Vec::with_capacity(inputs.len());
        for (k, (sub, shape)) in inputs.iter().zip(shapes).enumerate() {
            let letters: Vec<char> = sub.chars().collect();
            if let Some(bad) = letters.iter().find(|c| !c.is_ascii_alphabetic()) {
                return Err(Error::parse(&expr, format!("invalid subscript character {bad:?}")));
            }
            if letters.len() != shape.len() {
                return Err(Error::Shape(format!(
                    "operand {k} has {} axes but subscripts `{sub}`",
                    shape.len()
                )));
            }
            for (&ch, &d) in letters.iter().zip(shape.iter()) {
                match dims.get(&ch) {
                    Some(&prev) if prev != d => {
                        return Err(Error::Shape(format!(
                            "index `{ch}` has extent {prev} and {d} in `{expr}`"
                        )));
                    }
                    _ => {
                        dims.insert(ch, d);
                    }
                }
            }
            parsed.push(letters);
        }
        let out: Vec<char> = output.chars().collect();
        for (k, ch) in out.iter().enumerate() {
            if !ch.is_ascii_alphabetic() {
                return Err(Error::parse(&expr, format!("invalid output character {ch:?}")));
            }
            if !dims.contains_key(ch) {
                return Err(Error::parse(&expr, format!("output index `{ch}` not in any input")));
            }
            if out[..k].contains(ch) {
                return Err(Error::parse(&expr, format!("output index `{ch}` repeated")));
            }
        }
        Ok(EinsumSpec {
            inputs: parsed,
            output: out,
            dims,
        })
    }

    pub fn inputs(&self) -> &[Vec<char>] {
        &self.inputs
    }

    pub fn output(&self) -> &[char] {
        &self.output
    }

    pub fn dims(&self) -> &BTreeMap<char, usize> {
        &self.dims
    }

    pub fn dim(&self, ch: char) -> usize {
        self.dims[&ch]
    }

    pub fn n_operands(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_shape(&self) -> Vec<usize> {
        self.output.iter().map(|c| self.dims[c]).collect()
    }

    pub fn input_shape(&self, k: usize) -> Vec<usize> {
        self.inputs[k].iter().map(|c| self.dims[c]).collect()
    }

    /// Letters in first-appearance order across the inputs.
    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        for ch in self.inputs.iter().flatten() {
            if !out.contains(ch) {
                out.push(*ch);
            }
        }
        out
    }

    /// Letters summed over (present in inputs, absent from the output).
    pub fn summed_letters(&self) -> Vec<char> {
        self.letters()
            .into_iter()
            .filter(|c| !self.output.contains(c))
            .collect()
    }

    /// `(letter, extent)` pairs in first-appearance order.
    pub fn sizes_in_order(&self) -> Vec<(char, usize)> {
        self.letters().into_iter().map(|c| (c, self.dims[&c])).collect()
    }

    pub fn input_subscripts(&self, k: usize) -> String {
        self.inputs[k].iter().collect()
    }

    pub fn output_subscripts(&self) -> String {
        self.output.iter().collect()
    }

    /// Checks that `operands` match the spec's operand count and shapes.
    pub fn check_operands(&self, operands: &[DenseTensor]) -> Result<()> {
        if operands.len() != self.inputs.len() {
            return Err(Error::Shape(format!(
                "`{self}` expects {} operands, got {}",
                self.inputs.len(),
                operands.len()
            )));
        }
        for (k, op) in operands.iter().enumerate() {
            let expected = self.input_shape(k);
            if op.shape() != expected.as_slice() {
                return Err(Error::Shape(format!(
                    "operand {k} of `{self}` has shape {:?}, expected {:?}",
                    op.shape(),
                    expected
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for EinsumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|s| s.iter().collect()).collect();
        write!(f, "{}->{}", ins.join(","), self.output_subscripts())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_chained_dot() {
        let s = EinsumSpec::parse("ij,jk,kl->il", &[&[2, 2], &[2, 5], &[5, 2]]).unwrap();
        let dims: Vec<(char, usize)> = s.dims().iter().map(|(c, d)| (*c, *d)).collect();
        assert_eq!(dims, vec![('i', 2), ('j', 2), ('k', 5), ('l', 2)]);
        assert_eq!(s.to_string(), "ij,jk,kl->il");
    }

    #[test]
    fn parse_laplacian_sizes() {
        let s = EinsumSpec::parse(
            "cq,cqjd,cqje->cde",
            &[&[1024, 27], &[1024, 27, 3, 27], &[1024, 27, 3, 27]],
        )
        .unwrap();
        assert_eq!(
            s.sizes_in_order(),
            vec![('c', 1024), ('q', 27), ('j', 3), ('d', 27), ('e', 27)]
        );
    }

    #[test]
    fn parse_trace_implicit_output() {
        let s = EinsumSpec::parse("ii", &[&[3, 3]]).unwrap();
        assert!(s.output().is_empty());
        let s = EinsumSpec::parse("ij,jk", &[&[2, 3], &[3, 4]]).unwrap();
        assert_eq!(s.output_subscripts(), "ik");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            EinsumSpec::parse("ij,jk->ik", &[&[2, 3], &[4, 4]]),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            EinsumSpec::parse("i1,jk->ik", &[&[2, 3], &[3, 4]]),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            EinsumSpec::parse("ij->ix", &[&[2, 3]]),
            Err(Error::Parse { .. })
        ));
        assert!(EinsumSpec::parse("ij,jk->ik", &[&[2, 3]]).is_err());
        assert!(EinsumSpec::parse("ij->i->j", &[&[2, 3]]).is_err());
    }
}
