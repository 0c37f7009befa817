use std::fmt::Write as _;

use einform::einsum::render_report;
use einform::{EvalOptions, Evaluator, LayoutSpec, Mode, Strategy, StudyForm};

use crate::study::{build_operands, StudyConfig};
use crate::Result;

/// Transpilation listing and cost report of `form` on an `n_cells` bar.
pub fn explain_form(
    form: StudyForm,
    mode: Mode,
    order: usize,
    n_cells: usize,
    strategy: Strategy,
    layout: &LayoutSpec,
) -> Result<String> {
    let config = StudyConfig::default();
    let ops = build_operands(form, order, n_cells, &config)?;
    let expr = form.expression(mode)?;
    let ev = Evaluator::new();
    let opts = EvalOptions::new(strategy).with_layout(layout.clone());
    let mut s = String::new();
    let _ = writeln!(
        s,
        "form {form} `{}`, {mode} mode, order {order}, {n_cells} cells, {strategy}",
        form.term()
    );
    let program = ev.program(&expr, mode, form.diff_var(mode), layout, false)?;
    for sub in program.subscripts() {
        let _ = writeln!(s, "einsum('{sub}')");
    }
    s.push('\n');
    s.push_str(&ev.dump(&expr, mode, form.diff_var(mode), &ops, &opts)?);
    let bound = ev.bind(&program, &expr, &ops)?;
    for b in &bound {
        let path = ev.path(&b.spec, strategy.path_strategy());
        let report = einform::einsum::cost_of_path(&b.spec, &path)?;
        s.push('\n');
        s.push_str(&render_report(&b.spec, &path, &report));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_listing() {
        let text = explain_form(
            StudyForm::Laplace,
            Mode::Matrix,
            2,
            1024,
            Strategy::Greedy,
            &LayoutSpec::default_global(),
        )
        .unwrap();
        assert!(text.contains("einsum('cq,cqjd,cqje->cde')"));
        assert!(text.contains("cde (1024, 27, 27) ="));
        assert!(text.contains("  v.bfg     cqjd    (1024, 27, 3, 27)"));
        assert!(text.contains("path: [(0, 1), (0, 1)]"));
        assert!(text.contains("Naive FLOP count"));
    }
}
