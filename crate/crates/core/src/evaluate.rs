//! Weak-form evaluation: transpile, apply the layout, bind FE operands,
//! choose contraction paths and execute.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, RwLock};

use rayon::prelude::*;

use crate::einsum::{cost_of_path, execute_path, optimize_path, ContractionPath, CostReport, EinsumSpec, PathStrategy};
use crate::error::{Error, Result};
use crate::fe::FeOperandSet;
use crate::forms::StudyForm;
use crate::reference::{eval_matrix_loop, eval_residual_loop, eval_scalar_loop};
use crate::tensor::{permute_to_layout, DenseTensor, LayoutSpec};
use crate::transpiler::{
    build_psg, render_dump, ExprPart, FormExpression, Mode, OperandDescriptor, OperandSource, TranspileCache,
    TranspiledEinsum,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Whole batch, one nested loop over every index.
    Naive,
    /// Whole batch along the greedy path.
    Greedy,
    /// Whole batch along the flop-optimal path.
    Optimal,
    /// One cell at a time with the sliced expression.
    CellLoop,
    /// Fixed-size cell chunks on a thread pool.
    Threaded,
    /// Hand-written loops; study forms only.
    Reference,
}

impl Strategy {
    pub const ENGINE: [Strategy; 5] = [
        Strategy::Naive,
        Strategy::Greedy,
        Strategy::Optimal,
        Strategy::CellLoop,
        Strategy::Threaded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Greedy => "greedy",
            Strategy::Optimal => "optimal",
            Strategy::CellLoop => "cell-loop",
            Strategy::Threaded => "threaded",
            Strategy::Reference => "reference",
        }
    }

    /// Path strategy for the batch contraction.
    pub fn path_strategy(self) -> PathStrategy {
        match self {
            Strategy::Naive => PathStrategy::Naive,
            Strategy::Optimal => PathStrategy::Optimal,
            _ => PathStrategy::Greedy,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "greedy" => Ok(Strategy::Greedy),
            "optimal" => Ok(Strategy::Optimal),
            "cell-loop" | "loop" => Ok(Strategy::CellLoop),
            "threaded" => Ok(Strategy::Threaded),
            "reference" => Ok(Strategy::Reference),
            other => Err(Error::Argument(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub strategy: Strategy,
    pub layout: LayoutSpec,
    /// Worker threads for [`Strategy::Threaded`]; 0 uses all cores.
    pub threads: usize,
    /// Cells per chunk for [`Strategy::Threaded`].
    pub chunk_cells: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            strategy: Strategy::Greedy,
            layout: LayoutSpec::default_global(),
            threads: 0,
            chunk_cells: 16,
        }
    }
}

impl EvalOptions {
    pub fn new(strategy: Strategy) -> Self {
        EvalOptions {
            strategy,
            ..Default::default()
        }
    }

    pub fn with_layout(mut self, layout: LayoutSpec) -> Self {
        self.layout = layout;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// Contraction plan of one expression part as bound to full-size operands.
#[derive(Debug, Clone)]
pub struct PartReport {
    pub subscripts: String,
    pub path: ContractionPath,
    pub cost: CostReport,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    /// Result in the output subscripts' shape, e.g. `(c, r, d, s, e)`.
    pub value: DenseTensor,
    pub mode: Mode,
    /// Output axis groups flattening to cell, row and column.
    pub merge_plan: Vec<Vec<usize>>,
    pub parts: Vec<PartReport>,
}

impl Evaluation {
    /// Sum over cells of an eval-mode result.
    pub fn total(&self) -> Option<f64> {
        (self.mode == Mode::Eval).then(|| self.value.sum())
    }

    /// `(c, rows)` or `(c, rows, cols)` view of the result.
    pub fn merged(&self) -> Result<DenseTensor> {
        self.value.merge_axes(&self.merge_plan)
    }

    pub fn result_bytes(&self) -> usize {
        self.value.len() * std::mem::size_of::<f64>()
    }
}

/// Operands and spec of one part bound to FE data.
#[derive(Debug, Clone)]
pub struct BoundPart {
    pub spec: EinsumSpec,
    pub operands: Vec<DenseTensor>,
    pub names: Vec<String>,
    /// Cell axis of each operand, `None` for cell-free operands.
    pub cell_axes: Vec<Option<usize>>,
}

impl BoundPart {
    /// The part restricted to the cell range `range`.
    fn chunk(&self, range: std::ops::Range<usize>) -> Result<(EinsumSpec, Vec<DenseTensor>)> {
        let operands: Vec<DenseTensor> = self
            .operands
            .iter()
            .zip(&self.cell_axes)
            .map(|(t, axis)| match axis {
                Some(a) => t.slice_axis(*a, range.clone()),
                None => Ok(t.clone()),
            })
            .collect::<Result<_>>()?;
        let spec = respec(&self.spec, &operands)?;
        Ok((spec, operands))
    }

    /// The sliced expression's operands for cell `c`.
    fn cell(&self, sliced: &ExprPart, c: usize) -> Result<Vec<DenseTensor>> {
        self.operands
            .iter()
            .zip(&sliced.operands)
            .map(|(t, d)| match d.cell_axis {
                Some(a) => t.index_axis(a, c),
                None => Ok(t.clone()),
            })
            .collect()
    }
}

fn respec(spec: &EinsumSpec, operands: &[DenseTensor]) -> Result<EinsumSpec> {
    let ins: Vec<String> = spec.inputs().iter().map(|s| s.iter().collect()).collect();
    let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
    let shapes: Vec<&[usize]> = operands.iter().map(|t| t.shape()).collect();
    EinsumSpec::from_subscripts(&ins, &spec.output_subscripts(), &shapes)
}

type PathKey = (String, Vec<(char, usize)>, PathStrategy);

/// Evaluates forms with cached transpilation, contraction paths and
/// thread pools. Safe to share between threads.
#[derive(Debug, Default)]
pub struct Evaluator {
    programs: TranspileCache,
    paths: RwLock<HashMap<PathKey, ContractionPath>>,
    pools: Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn program(
        &self,
        form: &FormExpression,
        mode: Mode,
        diff_var: Option<&str>,
        layout: &LayoutSpec,
        sliced: bool,
    ) -> Result<Arc<TranspiledEinsum>> {
        self.programs.get(form, mode, diff_var, layout, sliced)
    }

    /// Cached path for `spec`.
    pub fn path(&self, spec: &EinsumSpec, strategy: PathStrategy) -> ContractionPath {
        let key = (spec.to_string(), spec.sizes_in_order(), strategy);
        if let Some(p) = self.paths.read().expect("path lock").get(&key) {
            return p.clone();
        }
        let (path, _) = optimize_path(spec, strategy);
        self.paths.write().expect("path lock").insert(key, path.clone());
        path
    }

    /// Binds every part of `t` to operands from `ops`, permuted to the
    /// program's layout.
    pub fn bind(&self, t: &TranspiledEinsum, form: &FormExpression, ops: &FeOperandSet) -> Result<Vec<BoundPart>> {
        if t.sliced {
            return Err(Error::Argument("bind the unsliced program".into()));
        }
        let mut cache: HashMap<(String, String), DenseTensor> = HashMap::new();
        t.parts
            .iter()
            .map(|part| {
                let mut operands = Vec::with_capacity(part.operands.len());
                for d in &part.operands {
                    let key = (d.name(), d.layout.as_ref().map(|l| l.as_string()).unwrap_or_default());
                    let tensor = match cache.get(&key) {
                        Some(hit) => hit.clone(),
                        None => {
                            let bound = bind_operand(d, form, ops)?;
                            cache.insert(key, bound.clone());
                            bound
                        }
                    };
                    operands.push(tensor);
                }
                let ins = part.input_subscripts();
                let shapes: Vec<&[usize]> = operands.iter().map(|o| o.shape()).collect();
                let spec = EinsumSpec::from_subscripts(&ins, &part.output, &shapes)?;
                Ok(BoundPart {
                    spec,
                    names: part.operands.iter().map(OperandDescriptor::name).collect(),
                    cell_axes: part.operands.iter().map(|d| d.subscripts.find('c')).collect(),
                    operands,
                })
            })
            .collect()
    }

    /// Full evaluation pipeline for `form`.
    pub fn evaluate(
        &self,
        form: &FormExpression,
        mode: Mode,
        diff_var: Option<&str>,
        ops: &FeOperandSet,
        opts: &EvalOptions,
    ) -> Result<Evaluation> {
        if opts.strategy == Strategy::Reference {
            return Err(Error::Unsupported(
                "the reference strategy evaluates study forms only".into(),
            ));
        }
        let program = self.program(form, mode, diff_var, &opts.layout, false)?;
        let bound = self.bind(&program, form, ops)?;
        let path_strategy = opts.strategy.path_strategy();
        let mut parts = Vec::with_capacity(bound.len());
        for b in &bound {
            let path = self.path(&b.spec, path_strategy);
            let cost = cost_of_path(&b.spec, &path)?;
            parts.push(PartReport {
                subscripts: b.spec.to_string(),
                path,
                cost,
            });
        }

        let mut value: Option<DenseTensor> = None;
        for (k, b) in bound.iter().enumerate() {
            let r = match opts.strategy {
                Strategy::Naive | Strategy::Greedy | Strategy::Optimal => {
                    execute_path(&b.spec, &b.operands, &parts[k].path)?
                }
                Strategy::CellLoop => {
                    let sliced = self.program(form, mode, diff_var, &opts.layout, true)?;
                    self.run_cells(b, &sliced.parts[k])?
                }
                Strategy::Threaded => self.run_threaded(b, opts)?,
                Strategy::Reference => unreachable!("handled above"),
            };
            value = Some(match value {
                None => r,
                Some(acc) => add(&acc, &r)?,
            });
        }
        Ok(Evaluation {
            value: value.ok_or_else(|| Error::Argument("program has no parts".into()))?,
            mode,
            merge_plan: program.merge_plan.clone(),
            parts,
        })
    }

    /// Evaluates a study form; handles [`Strategy::Reference`] too.
    pub fn evaluate_study(
        &self,
        form: StudyForm,
        mode: Mode,
        ops: &FeOperandSet,
        opts: &EvalOptions,
    ) -> Result<Evaluation> {
        let expr = form.expression(mode)?;
        if opts.strategy != Strategy::Reference {
            return self.evaluate(&expr, mode, form.diff_var(mode), ops, opts);
        }
        let program = self.program(&expr, mode, form.diff_var(mode), &LayoutSpec::default_global(), false)?;
        let value = match mode {
            Mode::Residual => eval_residual_loop(form, ops)?,
            Mode::Matrix => eval_matrix_loop(form, ops)?,
            Mode::Eval => eval_scalar_loop(form, ops)?,
        };
        Ok(Evaluation {
            value,
            mode,
            merge_plan: program.merge_plan.clone(),
            parts: Vec::new(),
        })
    }

    fn run_cells(&self, bound: &BoundPart, sliced: &ExprPart) -> Result<DenseTensor> {
        let n_cells = bound.spec.dim('c');
        let first = bound.cell(sliced, 0)?;
        let ins = sliced.input_subscripts();
        let shapes: Vec<&[usize]> = first.iter().map(|t| t.shape()).collect();
        let spec = EinsumSpec::from_subscripts(&ins, &sliced.output, &shapes)?;
        let path = self.path(&spec, PathStrategy::Greedy);
        let per_cell: usize = spec.output_shape().iter().product();
        let mut out = Vec::with_capacity(n_cells * per_cell);
        for c in 0..n_cells {
            let operands = if c == 0 { first.clone() } else { bound.cell(sliced, c)? };
            let r = execute_path(&spec, &operands, &path)?;
            out.extend_from_slice(r.as_slice().expect("contiguous result"));
        }
        DenseTensor::from_vec(&bound.spec.output_shape(), out)
    }

    fn run_threaded(&self, bound: &BoundPart, opts: &EvalOptions) -> Result<DenseTensor> {
        if bound.spec.output().first() != Some(&'c') {
            return Err(Error::Shape("threaded evaluation needs the cell axis first".into()));
        }
        let n_cells = bound.spec.dim('c');
        let chunk = opts.chunk_cells.max(1);
        let ranges: Vec<std::ops::Range<usize>> = (0..n_cells)
            .step_by(chunk)
            .map(|s| s..(s + chunk).min(n_cells))
            .collect();
        let pool = self.pool(opts.threads)?;
        let pieces: Vec<Result<DenseTensor>> = pool.install(|| {
            ranges
                .par_iter()
                .map(|r| {
                    let (spec, operands) = bound.chunk(r.clone())?;
                    let path = self.path(&spec, PathStrategy::Greedy);
                    execute_path(&spec, &operands, &path)
                })
                .collect()
        });
        let mut out = Vec::with_capacity(bound.spec.output_shape().iter().product());
        for p in pieces {
            out.extend_from_slice(p?.as_slice().expect("contiguous result"));
        }
        DenseTensor::from_vec(&bound.spec.output_shape(), out)
    }

    fn pool(&self, threads: usize) -> Result<Arc<rayon::ThreadPool>> {
        let mut pools = self.pools.lock().expect("pool lock");
        if let Some(p) = pools.get(&threads) {
            return Ok(Arc::clone(p));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Argument(format!("cannot start thread pool: {e}")))?;
        let pool = Arc::new(pool);
        pools.insert(threads, Arc::clone(&pool));
        Ok(pool)
    }

    /// Text listing of the bound program: sizes, operands and path per part.
    pub fn dump(
        &self,
        form: &FormExpression,
        mode: Mode,
        diff_var: Option<&str>,
        ops: &FeOperandSet,
        opts: &EvalOptions,
    ) -> Result<String> {
        let program = self.program(form, mode, diff_var, &opts.layout, false)?;
        let bound = self.bind(&program, form, ops)?;
        let mut s = String::new();
        for (part, b) in program.parts.iter().zip(&bound) {
            let shapes: Vec<Vec<usize>> = b.operands.iter().map(|t| t.shape().to_vec()).collect();
            let path = self.path(&b.spec, opts.strategy.path_strategy());
            s.push_str(&render_dump(part, &shapes, &path));
        }
        Ok(s)
    }
}

/// The operand named by `d`, permuted from its emitted layout to `d.layout`.
pub fn bind_operand(d: &OperandDescriptor, form: &FormExpression, ops: &FeOperandSet) -> Result<DenseTensor> {
    let owner = form
        .args()
        .iter()
        .find(|a| a.name == d.owner)
        .ok_or_else(|| Error::Argument(format!("operand owner `{}` is not a form argument", d.owner)))?;
    let base = match d.source {
        OperandSource::Det => ops.det().clone(),
        OperandSource::Bf => ops.bf().clone(),
        OperandSource::Bfg => ops.bfg.clone(),
        OperandSource::Identity => identity(owner.components),
        OperandSource::Psg => {
            if owner.components != ops.dim() {
                return Err(Error::Argument(format!(
                    "symmetric storage needs {} components, `{}` has {}",
                    ops.dim(),
                    owner.name,
                    owner.components
                )));
            }
            build_psg(ops.dim())?
        }
        OperandSource::Dofs => {
            let field = ops.field(&owner.name)?;
            if field.components != owner.components {
                return Err(Error::Argument(format!(
                    "variable `{}` has {} components, DOFs have {}",
                    owner.name, owner.components, field.components
                )));
            }
            if owner.is_vector() {
                field.per_cell.clone()
            } else {
                let s = field.per_cell.shape();
                field.per_cell.reshape(&[s[0], s[2]])?
            }
        }
        OperandSource::Material => ops.material(&owner.name)?.clone(),
    };
    if base.ndim() != d.subscripts.len() {
        return Err(Error::Shape(format!(
            "operand {} has {} axes but subscripts `{}`",
            d.name(),
            base.ndim(),
            d.subscripts
        )));
    }
    match &d.layout {
        Some(to) => {
            let from = d
                .source
                .default_layout(owner.is_vector(), base.ndim().saturating_sub(2))
                .expect("layout roles");
            if &from == to {
                Ok(base)
            } else {
                permute_to_layout(&base, &from, to)
            }
        }
        None => Ok(base),
    }
}

fn identity(n: usize) -> DenseTensor {
    DenseTensor::from_fn(&[n, n], |i| if i[0] == i[1] { 1.0 } else { 0.0 })
}

fn add(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!("cannot add {:?} and {:?}", a.shape(), b.shape())));
    }
    let data: Vec<f64> = a.to_vec().iter().zip(b.to_vec()).map(|(x, y)| x + y).collect();
    DenseTensor::from_vec(a.shape(), data)
}
