//! Tensor contraction engine and weak-form to einsum transpiler for
//! finite-element weak forms.
//!
//! - [`tensor`]: dense strided `f64` tensors and axis layouts.
//! - [`einsum`]: einsum parsing, nested-loop oracle, flop model, path
//!   optimization and pairwise execution.
//! - [`fe`]: hexahedral meshes, quadrature, Lagrange bases and mappings.
//! - [`transpiler`]: weak-form notation compiled to einsum programs.
//! - [`forms`]: the five benchmark forms.
//! - [`reference`]: hand-written cell loops used as the correctness oracle.
//! - [`evaluate`]: binding FE data to transpiled programs and running them.

pub mod einsum;
pub mod error;
pub mod evaluate;
pub mod fe;
pub mod forms;
pub mod reference;
pub mod tensor;
pub mod transpiler;

pub use einsum::{ContractionPath, CostReport, EinsumSpec, PathStrategy};
pub use error::{Error, Result};
pub use evaluate::{EvalOptions, Evaluation, Evaluator, Strategy};
pub use fe::FeOperandSet;
pub use forms::StudyForm;
pub use tensor::{DenseTensor, LayoutSpec};
pub use transpiler::{parse_form, transpile, FormArg, FormExpression, Mode, TranspiledEinsum};
