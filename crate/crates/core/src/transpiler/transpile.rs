use std::fmt;
use std::str::FromStr;

use super::form::{ArgKind, Factor, FormArg, FormExpression};
use crate::error::{Error, Result};
use crate::tensor::LayoutSpec;

/// Basis-index letters by argument position.
const DOF_LETTERS: &str = "defgh";
/// Component letters, drawn in order of use.
const COMPONENT_LETTERS: &str = "rstuvwxyz";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Residual,
    Matrix,
    Eval,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Residual => "residual",
            Mode::Matrix => "matrix",
            Mode::Eval => "eval",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residual" => Ok(Mode::Residual),
            "matrix" => Ok(Mode::Matrix),
            "eval" => Ok(Mode::Eval),
            other => Err(Error::Mode(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperandSource {
    Det,
    Bf,
    Bfg,
    Identity,
    Dofs,
    Psg,
    Material,
}

impl OperandSource {
    pub fn name(self) -> &'static str {
        match self {
            OperandSource::Det => "det",
            OperandSource::Bf => "bf",
            OperandSource::Bfg => "bfg",
            OperandSource::Identity => "I",
            OperandSource::Dofs => "dofs",
            OperandSource::Psg => "Psg",
            OperandSource::Material => "arg",
        }
    }

    /// Role letters of the operand as emitted, aligned with its subscripts.
    /// `I` and `Psg` have none and are never permuted.
    pub fn default_layout(self, vector: bool, material_axes: usize) -> Option<LayoutSpec> {
        let s = match self {
            OperandSource::Det => "cq",
            OperandSource::Bf => "qd",
            OperandSource::Bfg => "cqgd",
            OperandSource::Dofs if vector => "cvd",
            OperandSource::Dofs => "cd",
            OperandSource::Material if material_axes > 0 => "cq0",
            OperandSource::Material => "cq",
            OperandSource::Identity | OperandSource::Psg => return None,
        };
        Some(LayoutSpec::new(s).expect("valid role letters"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperandDescriptor {
    pub source: OperandSource,
    pub owner: String,
    pub subscripts: String,
    /// Current axis roles; `None` for fixed operands.
    pub layout: Option<LayoutSpec>,
    /// Set by slicing: the cell axis of the bound operand to index.
    pub cell_axis: Option<usize>,
}

impl OperandDescriptor {
    fn new(source: OperandSource, owner: &str, subscripts: String, vector: bool) -> Self {
        let material_axes = subscripts.len().saturating_sub(2);
        OperandDescriptor {
            source,
            owner: owner.to_string(),
            layout: source.default_layout(vector, material_axes),
            subscripts,
            cell_axis: None,
        }
    }

    /// Display name such as `v.bfg` or `m_D.arg`.
    pub fn name(&self) -> String {
        format!("{}.{}", self.owner, self.source.name())
    }
}

/// One einsum summand of a transpiled form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExprPart {
    pub operands: Vec<OperandDescriptor>,
    pub output: String,
}

impl ExprPart {
    pub fn input_subscripts(&self) -> Vec<&str> {
        self.operands.iter().map(|o| o.subscripts.as_str()).collect()
    }

    /// The einsum string, e.g. `cq,cqjd,cqje->cde`.
    pub fn subscripts(&self) -> String {
        format!("{}->{}", self.input_subscripts().join(","), self.output)
    }

    fn rename(&mut self, from: char, to: char) {
        let swap = |c: char| {
            if c == from {
                to
            } else if c == to {
                from
            } else {
                c
            }
        };
        for op in &mut self.operands {
            op.subscripts = op.subscripts.chars().map(swap).collect();
        }
        self.output = self.output.chars().map(swap).collect();
    }
}

/// A form compiled to one or more einsum parts whose results are summed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TranspiledEinsum {
    pub parts: Vec<ExprPart>,
    pub mode: Mode,
    pub diff_var: Option<String>,
    /// Output axis groups that flatten to cell, row and column indices.
    pub merge_plan: Vec<Vec<usize>>,
    /// Global layout applied to the operands.
    pub layout: LayoutSpec,
    /// True for the per-cell expression produced by slicing.
    pub sliced: bool,
}

impl TranspiledEinsum {
    pub fn output(&self) -> &str {
        &self.parts[0].output
    }

    pub fn subscripts(&self) -> Vec<String> {
        self.parts.iter().map(|p| p.subscripts()).collect()
    }
}

struct Builder {
    parts: Vec<ExprPart>,
    groups: Vec<usize>,
    components: std::str::Chars<'static>,
}

impl Builder {
    fn fresh_component(&mut self) -> Result<char> {
        self.components
            .next()
            .ok_or_else(|| Error::Unsupported("too many vector arguments".into()))
    }

    fn push_all(&mut self, op: OperandDescriptor) {
        for part in &mut self.parts {
            part.operands.push(op.clone());
        }
    }

    fn push_output(&mut self, part: Option<usize>, letters: &str) {
        match part {
            Some(k) => self.parts[k].output.push_str(letters),
            None => {
                for p in &mut self.parts {
                    p.output.push_str(letters);
                }
            }
        }
    }

    fn basis(&mut self, arg: &FormArg, factor: &Factor, dof: char) {
        let op = match factor.gradient_letter() {
            Some(g) => OperandDescriptor::new(OperandSource::Bfg, &arg.name, format!("cq{g}{dof}"), false),
            None => OperandDescriptor::new(OperandSource::Bf, &arg.name, format!("q{dof}"), false),
        };
        self.push_all(op);
    }

    /// The operand keeping the component index symbolic: `I` or `Psg`.
    fn component_operand(arg: &FormArg, factor: &Factor, comp: char) -> Result<OperandDescriptor> {
        match *factor {
            Factor::SymStorage { grad, storage, .. } => Ok(OperandDescriptor::new(
                OperandSource::Psg,
                &arg.name,
                format!("{comp}{grad}{storage}"),
                false,
            )),
            Factor::SymGradient { .. } => Err(symmetric_unsupported(factor)),
            _ => {
                let c = factor.component_letter().expect("vector factor");
                Ok(OperandDescriptor::new(
                    OperandSource::Identity,
                    &arg.name,
                    format!("{c}{comp}"),
                    false,
                ))
            }
        }
    }

    /// Operands contracting a variable with its DOFs.
    fn dofs_operands(&mut self, arg: &FormArg, factor: &Factor, dof: char) -> Result<Vec<OperandDescriptor>> {
        let dofs = |s: String| OperandDescriptor::new(OperandSource::Dofs, &arg.name, s, arg.is_vector());
        match *factor {
            Factor::SymStorage { grad, storage, .. } => {
                let comp = self.fresh_component()?;
                Ok(vec![
                    OperandDescriptor::new(OperandSource::Psg, &arg.name, format!("{comp}{grad}{storage}"), false),
                    dofs(format!("c{comp}{dof}")),
                ])
            }
            Factor::SymGradient { .. } => Err(symmetric_unsupported(factor)),
            _ => match factor.component_letter() {
                Some(c) => Ok(vec![dofs(format!("c{c}{dof}"))]),
                None => Ok(vec![dofs(format!("c{dof}"))]),
            },
        }
    }
}

fn symmetric_unsupported(factor: &Factor) -> Error {
    Error::Unsupported(format!(
        "symmetric gradient `{factor}` needs vector storage, write it as `s(i:j)->I`"
    ))
}

/// Compiles a form for one evaluation mode.
///
/// In matrix mode `diff_var` names the trial variable to differentiate
/// with respect to; it must be `None` otherwise.
pub fn transpile(form: &FormExpression, mode: Mode, diff_var: Option<&str>) -> Result<TranspiledEinsum> {
    let args = form.args();
    if args.len() > DOF_LETTERS.len() {
        return Err(Error::Unsupported(format!(
            "forms with more than {} arguments",
            DOF_LETTERS.len()
        )));
    }
    let tests: Vec<usize> = (0..args.len()).filter(|&k| args[k].kind == ArgKind::Test).collect();
    if tests.len() > 1 {
        return Err(Error::Argument("more than one test variable".into()));
    }
    let test = tests.first().copied();
    match (mode, test) {
        (Mode::Eval, Some(k)) => {
            return Err(Error::Mode(format!(
                "eval mode cannot contract test variable `{}`",
                args[k].name
            )))
        }
        (Mode::Residual | Mode::Matrix, None) => {
            return Err(Error::Mode(format!("{mode} mode needs a test variable")));
        }
        _ => {}
    }

    let n_add = match (mode, diff_var) {
        (Mode::Matrix, None) => {
            return Err(Error::Mode("matrix mode needs a differentiation variable".into()));
        }
        (Mode::Matrix, Some(name)) => {
            let hits: Vec<&FormArg> = args.iter().filter(|a| a.name == name).collect();
            match hits.first() {
                None => return Err(Error::Argument(format!("differentiation variable `{name}` not found"))),
                Some(a) if a.kind != ArgKind::Trial => {
                    return Err(Error::Argument(format!(
                        "cannot differentiate with respect to {} argument `{name}`",
                        a.kind.name()
                    )))
                }
                Some(_) => hits.len(),
            }
        }
        (_, Some(name)) => {
            return Err(Error::Mode(format!(
                "{mode} mode takes no differentiation variable, got `{name}`"
            )))
        }
        (_, None) => 1,
    };

    let owner = match test {
        Some(k) => k,
        None => args
            .iter()
            .position(|a| a.kind == ArgKind::Trial)
            .ok_or_else(|| Error::Argument("form has no variable to integrate over".into()))?,
    };

    let mut b = Builder {
        parts: vec![
            ExprPart {
                operands: Vec::new(),
                output: "c".into(),
            };
            n_add
        ],
        groups: vec![1],
        components: COMPONENT_LETTERS.chars(),
    };
    b.push_all(OperandDescriptor::new(
        OperandSource::Det,
        &args[owner].name,
        "cq".into(),
        false,
    ));

    let dof_letter = |k: usize| DOF_LETTERS.as_bytes()[k] as char;

    if let Some(k) = test {
        let (arg, factor, dof) = (&args[k], &form.factors()[k], dof_letter(k));
        b.basis(arg, factor, dof);
        if arg.is_vector() {
            let comp = b.fresh_component()?;
            b.push_all(Builder::component_operand(arg, factor, comp)?);
            b.push_output(None, &format!("{comp}{dof}"));
            b.groups.push(2);
        } else {
            b.push_output(None, &dof.to_string());
            b.groups.push(1);
        }
    }

    let mut symbolic_part = 0;
    for (k, (arg, factor)) in args.iter().zip(form.factors()).enumerate() {
        if Some(k) == test {
            continue;
        }
        let dof = dof_letter(k);
        match arg.kind {
            ArgKind::Test => unreachable!("single test variable"),
            ArgKind::Material => {
                let letters = match factor {
                    Factor::Material { letters } => letters.iter().collect::<String>(),
                    _ => unreachable!("material factor"),
                };
                b.push_all(OperandDescriptor::new(
                    OperandSource::Material,
                    &arg.name,
                    format!("cq{letters}"),
                    false,
                ));
            }
            ArgKind::Trial => {
                b.basis(arg, factor, dof);
                if Some(arg.name.as_str()) != diff_var || mode != Mode::Matrix {
                    for op in b.dofs_operands(arg, factor, dof)? {
                        b.push_all(op);
                    }
                    continue;
                }
                let comp = if arg.is_vector() {
                    Some(b.fresh_component()?)
                } else {
                    None
                };
                for ia in 0..b.parts.len() {
                    if ia == symbolic_part {
                        if let Some(c) = comp {
                            let op = Builder::component_operand(arg, factor, c)?;
                            b.parts[ia].operands.push(op);
                        }
                    } else {
                        for op in b.dofs_operands(arg, factor, dof)? {
                            b.parts[ia].operands.push(op);
                        }
                    }
                }
                match comp {
                    Some(c) => b.push_output(Some(symbolic_part), &format!("{c}{dof}")),
                    None => b.push_output(Some(symbolic_part), &dof.to_string()),
                }
                if symbolic_part == 0 {
                    b.groups.push(if comp.is_some() { 2 } else { 1 });
                }
                symbolic_part += 1;
            }
        }
    }

    // letters used once that the output lacks are kept as free axes
    for part in &mut b.parts {
        let mut counts: std::collections::BTreeMap<char, usize> = Default::default();
        for op in &part.operands {
            for c in op.subscripts.chars() {
                *counts.entry(c).or_default() += 1;
            }
        }
        for (c, n) in counts {
            if n == 1 && !part.output.contains(c) {
                part.output.push(c);
            }
        }
    }
    let extra = b.parts[0].output.len() - b.groups.iter().sum::<usize>();
    b.groups.extend(std::iter::repeat_n(1, extra));

    let target: Vec<char> = b.parts[0].output.chars().collect();
    for part in b.parts.iter_mut().skip(1) {
        if part.output.len() != target.len() {
            return Err(Error::Unsupported("parts with different output ranks".into()));
        }
        for (k, &want) in target.iter().enumerate() {
            let have = part.output.chars().nth(k).expect("same length");
            if have != want {
                part.rename(have, want);
            }
        }
    }

    let mut merge_plan = Vec::with_capacity(b.groups.len());
    let mut axis = 0;
    for g in b.groups {
        merge_plan.push((axis..axis + g).collect());
        axis += g;
    }

    Ok(TranspiledEinsum {
        parts: b.parts,
        mode,
        diff_var: if mode == Mode::Matrix {
            diff_var.map(str::to_string)
        } else {
            None
        },
        merge_plan,
        layout: LayoutSpec::default_global(),
        sliced: false,
    })
}

/// Per-cell form of `t`: the cell letter is dropped from every subscript and
/// cell-indexed operands record which axis to index.
pub fn slice_per_cell(t: &TranspiledEinsum) -> TranspiledEinsum {
    if t.sliced || !t.output().contains('c') {
        return t.clone();
    }
    let mut out = t.clone();
    for part in &mut out.parts {
        for op in &mut part.operands {
            if let Some(pos) = op.subscripts.find('c') {
                op.cell_axis = Some(pos);
                op.subscripts.remove(pos);
            }
        }
        part.output = part.output.chars().filter(|&c| c != 'c').collect();
    }
    let cell_axis = t.output().find('c').expect("checked");
    out.merge_plan = t
        .merge_plan
        .iter()
        .filter(|g| !g.contains(&cell_axis))
        .map(|g| g.iter().map(|&a| if a > cell_axis { a - 1 } else { a }).collect())
        .collect();
    out.sliced = true;
    out
}

/// Reorders every operand's axes by the relative order of its role letters
/// in `layout`. `I` and `Psg` keep their order.
pub fn apply_layout(t: &TranspiledEinsum, layout: &LayoutSpec) -> Result<TranspiledEinsum> {
    if t.sliced {
        return Err(Error::Layout("apply the layout before slicing".into()));
    }
    let mut out = t.clone();
    for part in &mut out.parts {
        for op in &mut part.operands {
            let Some(current) = &op.layout else {
                continue;
            };
            let target = current.ordered_by(layout)?;
            let chars: Vec<char> = op.subscripts.chars().collect();
            let perm = current.permutation_to(&target, chars.len())?;
            op.subscripts = perm.iter().map(|&p| chars[p]).collect();
            op.layout = Some(target);
        }
    }
    out.layout = layout.clone();
    Ok(out)
}
