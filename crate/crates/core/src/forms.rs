//! The five forms used by the benchmarks and cross-checks.

use std::fmt;
use std::str::FromStr;

use crate::einsum::EinsumSpec;
use crate::error::{Error, Result};
use crate::fe::{seeded_uniform, FeOperandSet};
use crate::tensor::DenseTensor;
use crate::transpiler::{parse_form, sym_storage_pairs, transpile, FormArg, FormExpression, Mode, OperandSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StudyForm {
    /// `('i,i', v, u)`
    Dot,
    /// `('ij,i,j', m_M, v, u)`
    WeightedDot,
    /// `('0.i,0.i', v, u)`, scalar
    Laplace,
    /// `('i,i.j,j', v, u, u)`
    Convection,
    /// `('IK,s(i:j)->I,s(k:l)->K', m_D, v, u)`
    Elasticity,
}

pub const TEST_VAR: &str = "v";
pub const STATE_VAR: &str = "u";

impl StudyForm {
    pub const ALL: [StudyForm; 5] = [
        StudyForm::Dot,
        StudyForm::WeightedDot,
        StudyForm::Laplace,
        StudyForm::Convection,
        StudyForm::Elasticity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyForm::Dot => "dot",
            StudyForm::WeightedDot => "wdot",
            StudyForm::Laplace => "laplace",
            StudyForm::Convection => "convect",
            StudyForm::Elasticity => "elastic",
        }
    }

    pub fn term(self) -> &'static str {
        match self {
            StudyForm::Dot => "i,i",
            StudyForm::WeightedDot => "ij,i,j",
            StudyForm::Laplace => "0.i,0.i",
            StudyForm::Convection => "i,i.j,j",
            StudyForm::Elasticity => "IK,s(i:j)->I,s(k:l)->K",
        }
    }

    /// Components of the test and state variables.
    pub fn components(self) -> usize {
        match self {
            StudyForm::Laplace => 1,
            _ => 3,
        }
    }

    pub fn is_linear(self) -> bool {
        self != StudyForm::Convection
    }

    pub fn material(self) -> Option<&'static str> {
        match self {
            StudyForm::WeightedDot => Some("m_M"),
            StudyForm::Elasticity => Some("m_D"),
            _ => None,
        }
    }

    /// Material axes per quadrature point.
    pub fn material_shape(self) -> &'static [usize] {
        match self {
            StudyForm::WeightedDot => &[3, 3],
            StudyForm::Elasticity => &[6, 6],
            _ => &[],
        }
    }

    /// Specs of the transpiled parts for `n_cells` cells of `order`, built
    /// from extents alone, so any order can be costed.
    pub fn cost_specs(self, mode: Mode, order: usize, n_cells: usize) -> Result<Vec<EinsumSpec>> {
        if order == 0 || n_cells == 0 {
            return Err(Error::Argument("order and cell count must be positive".into()));
        }
        let t = transpile(&self.expression(mode)?, mode, self.diff_var(mode))?;
        let n = (order + 1).pow(3);
        let d = self.components();
        t.parts
            .iter()
            .map(|part| {
                let shapes: Vec<Vec<usize>> = part
                    .operands
                    .iter()
                    .map(|op| match op.source {
                        OperandSource::Det => vec![n_cells, n],
                        OperandSource::Bf => vec![n, n],
                        OperandSource::Bfg => vec![n_cells, n, 3, n],
                        OperandSource::Identity => vec![d, d],
                        OperandSource::Psg => vec![3, 3, 6],
                        OperandSource::Dofs if d > 1 => vec![n_cells, d, n],
                        OperandSource::Dofs => vec![n_cells, n],
                        OperandSource::Material => [n_cells, n].iter().chain(self.material_shape()).copied().collect(),
                    })
                    .collect();
                let shapes: Vec<&[usize]> = shapes.iter().map(Vec::as_slice).collect();
                EinsumSpec::from_subscripts(&part.input_subscripts(), &part.output, &shapes)
            })
            .collect()
    }

    /// Arguments for `mode`. Eval mode puts the state variable in place of
    /// the test variable.
    pub fn args(self, mode: Mode) -> Vec<FormArg> {
        let d = self.components();
        let first = match mode {
            Mode::Eval => FormArg::trial(STATE_VAR, d),
            _ => FormArg::test(TEST_VAR, d),
        };
        let mut args = Vec::new();
        if let Some(m) = self.material() {
            args.push(FormArg::material(m));
        }
        args.push(first);
        args.push(FormArg::trial(STATE_VAR, d));
        if self == StudyForm::Convection {
            args.push(FormArg::trial(STATE_VAR, d));
        }
        args
    }

    pub fn expression(self, mode: Mode) -> Result<FormExpression> {
        parse_form(self.term(), &self.args(mode))
    }

    pub fn diff_var(self, mode: Mode) -> Option<&'static str> {
        (mode == Mode::Matrix).then_some(STATE_VAR)
    }

    /// Sets a seeded random state and material on `ops`.
    pub fn populate(self, ops: &mut FeOperandSet, seed: u64) -> Result<()> {
        let d = self.components();
        let state = seeded_uniform(ops.space.n_nodes() * d, seed, -1.0, 1.0);
        ops.set_field(STATE_VAR, d, &state)?;
        if let Some(name) = self.material() {
            let values = self.material_values(ops.n_cells(), ops.n_points(), seed ^ 0x9e37_79b9_7f4a_7c15)?;
            ops.set_material(name, values)?;
        }
        Ok(())
    }

    /// Seeded material values of shape `(n_c, n_q, ...)`.
    pub fn material_values(self, n_cells: usize, n_points: usize, seed: u64) -> Result<DenseTensor> {
        let n = n_cells * n_points;
        match self {
            StudyForm::WeightedDot => {
                let r = seeded_uniform(n * 9, seed, -0.5, 0.5);
                let mut data = vec![0.0; n * 9];
                for p in 0..n {
                    for i in 0..3 {
                        for j in 0..3 {
                            let sym = 0.5 * (r[p * 9 + i * 3 + j] + r[p * 9 + j * 3 + i]);
                            data[p * 9 + i * 3 + j] = sym + if i == j { 2.0 } else { 0.0 };
                        }
                    }
                }
                DenseTensor::from_vec(&[n_cells, n_points, 3, 3], data)
            }
            StudyForm::Elasticity => {
                let lame = seeded_uniform(n * 2, seed, 1.0, 2.0);
                let pairs = sym_storage_pairs(3)?;
                let ns = pairs.len();
                let mut data = vec![0.0; n * ns * ns];
                for p in 0..n {
                    let (lam, mu) = (lame[2 * p], lame[2 * p + 1]);
                    for (a, &(i, j)) in pairs.iter().enumerate() {
                        for (b, &(k, l)) in pairs.iter().enumerate() {
                            let v = if i == j && k == l {
                                lam + if a == b { 2.0 * mu } else { 0.0 }
                            } else if a == b {
                                mu
                            } else {
                                0.0
                            };
                            data[(p * ns + a) * ns + b] = v;
                        }
                    }
                }
                DenseTensor::from_vec(&[n_cells, n_points, ns, ns], data)
            }
            other => Err(Error::Argument(format!("form `{other}` has no material"))),
        }
    }
}

impl fmt::Display for StudyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" | "vector-dot" => Ok(StudyForm::Dot),
            "wdot" | "weighted-dot" => Ok(StudyForm::WeightedDot),
            "laplace" | "laplacian" => Ok(StudyForm::Laplace),
            "convect" | "convection" => Ok(StudyForm::Convection),
            "elastic" | "elasticity" => Ok(StudyForm::Elasticity),
            other => Err(Error::Argument(format!("unknown form `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in StudyForm::ALL {
            assert_eq!(f.name().parse::<StudyForm>().unwrap(), f);
            for mode in [Mode::Residual, Mode::Matrix, Mode::Eval] {
                f.expression(mode).unwrap();
            }
        }
        assert!("heat".parse::<StudyForm>().is_err());
    }

    #[test]
    fn cost_specs_for_high_orders() {
        let specs = StudyForm::Laplace.cost_specs(Mode::Matrix, 5, 16).unwrap();
        assert_eq!(specs[0].to_string(), "cq,cqjd,cqje->cde");
        assert_eq!(specs[0].dim('d'), 216);
        assert_eq!(StudyForm::Convection.cost_specs(Mode::Matrix, 4, 2).unwrap().len(), 2);
    }

    #[test]
    fn elasticity_material_is_symmetric() {
        let d = StudyForm::Elasticity.material_values(2, 8, 1).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(d.at(&[1, 3, a, b]), d.at(&[1, 3, b, a]));
            }
        }
        assert_eq!(d.at(&[0, 0, 0, 3]), 0.0);
    }
}
