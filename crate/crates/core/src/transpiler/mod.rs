//! Weak-form notation and its compilation to einsum programs.
//!
//! Factor syntax: `0` scalar value, `0.i` scalar gradient, `i` vector
//! component, `i.j` vector gradient, `i:j` symmetric gradient,
//! `s(i:j)->I` symmetric gradient in vector storage, and plain letters such
//! as `ij` or `IK` for material arguments.

mod cache;
mod dump;
mod form;
mod psg;
mod transpile;

pub use cache::TranspileCache;
pub use dump::{render_dump, tuple_string};
pub use form::{parse_form, ArgKind, Factor, FormArg, FormExpression};
pub use psg::{build_psg, sym_storage_pairs};
pub use transpile::{
    apply_layout, slice_per_cell, transpile, ExprPart, Mode, OperandDescriptor, OperandSource, TranspiledEinsum,
};
