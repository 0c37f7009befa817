//! Python bindings: tensors, einsum evaluation with cost reports, the
//! weak-form transpiler and FE evaluation of the benchmark forms.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use einform::einsum::{execute_path, explain, optimize_path};
use einform::{
    parse_form, transpile as transpile_form, DenseTensor, EinsumSpec, EvalOptions, Evaluator, FeOperandSet, FormArg,
    LayoutSpec, Mode, PathStrategy, Strategy, StudyForm,
};

fn value_error(e: einform::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = einform::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(value_error)
}

/// Dense row-major float64 tensor.
#[pyclass(name = "Tensor", module = "einform_py", frozen, from_py_object)]
#[derive(Clone)]
struct PyTensor {
    inner: DenseTensor,
}

#[pymethods]
impl PyTensor {
    #[new]
    fn new(shape: Vec<usize>, data: Vec<f64>) -> PyResult<Self> {
        DenseTensor::from_vec(&shape, data)
            .map(|inner| PyTensor { inner })
            .map_err(value_error)
    }

    #[getter]
    fn shape(&self) -> Vec<usize> {
        self.inner.shape().to_vec()
    }

    /// Entries in row-major order.
    fn tolist(&self) -> Vec<f64> {
        self.inner.to_vec()
    }

    fn get(&self, index: Vec<usize>) -> PyResult<f64> {
        self.inner.get(&index).map_err(value_error)
    }

    fn sum(&self) -> f64 {
        self.inner.sum()
    }

    /// Largest relative difference to `other`; `None` for shape mismatch.
    fn rel_diff(&self, other: &PyTensor) -> Option<f64> {
        self.inner.rel_diff(&other.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Tensor(shape={:?})", self.inner.shape())
    }
}

/// Einsum expression with operand shapes, for cost analysis.
#[pyclass(name = "EinsumSpec", module = "einform_py", frozen)]
struct PyEinsumSpec {
    inner: EinsumSpec,
}

#[pymethods]
impl PyEinsumSpec {
    #[new]
    fn new(expr: &str, shapes: Vec<Vec<usize>>) -> PyResult<Self> {
        let refs: Vec<&[usize]> = shapes.iter().map(Vec::as_slice).collect();
        EinsumSpec::parse(expr, &refs)
            .map(|inner| PyEinsumSpec { inner })
            .map_err(value_error)
    }

    /// Contraction path as a list of position tuples.
    #[pyo3(signature = (strategy = "greedy"))]
    fn path(&self, strategy: &str) -> PyResult<Vec<Vec<usize>>> {
        let (path, _) = optimize_path(&self.inner, parse::<PathStrategy>(strategy)?);
        Ok(path.steps().to_vec())
    }

    /// `(naive_flops, path_flops, largest_intermediate, speedup)`.
    #[pyo3(signature = (strategy = "greedy"))]
    fn cost(&self, strategy: &str) -> PyResult<(u128, u128, u128, f64)> {
        let (_, r) = optimize_path(&self.inner, parse::<PathStrategy>(strategy)?);
        Ok((r.naive_flops, r.path_flops, r.largest_intermediate, r.speedup()))
    }

    #[pyo3(signature = (strategy = "greedy"))]
    fn explain(&self, strategy: &str) -> PyResult<String> {
        Ok(explain(&self.inner, parse::<PathStrategy>(strategy)?))
    }

    fn __repr__(&self) -> String {
        format!("EinsumSpec('{}')", self.inner)
    }
}

/// Evaluates `expr` on `operands` along the path chosen by `strategy`.
#[pyfunction]
#[pyo3(signature = (expr, operands, strategy = "greedy"))]
fn einsum(expr: &str, operands: Vec<PyTensor>, strategy: &str) -> PyResult<PyTensor> {
    let tensors: Vec<DenseTensor> = operands.into_iter().map(|t| t.inner).collect();
    let shapes: Vec<&[usize]> = tensors.iter().map(|t| t.shape()).collect();
    let spec = EinsumSpec::parse(expr, &shapes).map_err(value_error)?;
    let (path, _) = optimize_path(&spec, parse::<PathStrategy>(strategy)?);
    execute_path(&spec, &tensors, &path)
        .map(|inner| PyTensor { inner })
        .map_err(value_error)
}

/// Transpiles a form term. `args` holds `(name, kind, components)` with kind
/// one of `test`, `trial`, `material`. Returns one einsum string per part.
#[pyfunction]
#[pyo3(signature = (term, args, mode = "matrix", diff_var = None))]
fn transpile(
    term: &str,
    args: Vec<(String, String, usize)>,
    mode: &str,
    diff_var: Option<&str>,
) -> PyResult<Vec<String>> {
    let args = args
        .iter()
        .map(|(name, kind, n)| match kind.as_str() {
            "test" => Ok(FormArg::test(name, *n)),
            "trial" => Ok(FormArg::trial(name, *n)),
            "material" => Ok(FormArg::material(name)),
            other => Err(PyValueError::new_err(format!("unknown argument kind `{other}`"))),
        })
        .collect::<PyResult<Vec<_>>>()?;
    let expr = parse_form(term, &args).map_err(value_error)?;
    let t = transpile_form(&expr, parse::<Mode>(mode)?, diff_var).map_err(value_error)?;
    Ok(t.subscripts())
}

/// One benchmark form on a bar mesh with seeded state and material.
#[pyclass(name = "Problem", module = "einform_py")]
struct PyProblem {
    form: StudyForm,
    ops: FeOperandSet,
    evaluator: Evaluator,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (form, order, n_cells, seed = 0, cell_size = 1.0))]
    fn new(form: &str, order: usize, n_cells: usize, seed: u64, cell_size: f64) -> PyResult<Self> {
        let form = parse::<StudyForm>(form)?;
        let mut ops = FeOperandSet::bar(order, n_cells, cell_size).map_err(value_error)?;
        form.populate(&mut ops, seed).map_err(value_error)?;
        Ok(PyProblem {
            form,
            ops,
            evaluator: Evaluator::new(),
        })
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.ops.n_cells()
    }

    #[getter]
    fn n_cell_dofs(&self) -> usize {
        self.ops.n_cell_dofs()
    }

    /// Einsum strings of the form in `mode`.
    fn subscripts(&self, mode: &str) -> PyResult<Vec<String>> {
        let mode = parse::<Mode>(mode)?;
        let expr = self.form.expression(mode).map_err(value_error)?;
        let t = self
            .evaluator
            .program(
                &expr,
                mode,
                self.form.diff_var(mode),
                &LayoutSpec::default_global(),
                false,
            )
            .map_err(value_error)?;
        Ok(t.subscripts())
    }

    #[pyo3(signature = (mode = "matrix", strategy = "greedy", layout = "cqgvd0", threads = 0))]
    fn evaluate(&self, py: Python<'_>, mode: &str, strategy: &str, layout: &str, threads: usize) -> PyResult<PyTensor> {
        let mode = parse::<Mode>(mode)?;
        let opts = EvalOptions::new(parse::<Strategy>(strategy)?)
            .with_layout(LayoutSpec::new(layout).map_err(value_error)?)
            .with_threads(threads);
        py.detach(|| self.evaluator.evaluate_study(self.form, mode, &self.ops, &opts))
            .map(|e| PyTensor { inner: e.value })
            .map_err(value_error)
    }

    /// Sizes, operand table and path of the bound expression.
    #[pyo3(signature = (mode = "matrix", strategy = "greedy"))]
    fn dump(&self, mode: &str, strategy: &str) -> PyResult<String> {
        let mode = parse::<Mode>(mode)?;
        let expr = self.form.expression(mode).map_err(value_error)?;
        let opts = EvalOptions::new(parse::<Strategy>(strategy)?);
        self.evaluator
            .dump(&expr, mode, self.form.diff_var(mode), &self.ops, &opts)
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(form='{}', order={}, n_cells={})",
            self.form,
            self.ops.order,
            self.ops.n_cells()
        )
    }
}

#[pymodule]
fn einform_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor>()?;
    m.add_class::<PyEinsumSpec>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(einsum, m)?)?;
    m.add_function(wrap_pyfunction!(transpile, m)?)?;
    m.add("FORMS", StudyForm::ALL.iter().map(|f| f.name()).collect::<Vec<_>>())?;
    Ok(())
}
