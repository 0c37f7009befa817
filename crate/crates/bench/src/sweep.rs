use std::collections::HashSet;

use itertools::Itertools;

use einform::tensor::LAYOUT_LETTERS;
use einform::transpiler::apply_layout;
use einform::{transpile, LayoutSpec, Mode, Strategy, StudyForm};

use crate::record::RunRecord;
use crate::study::{build_operands, run_one, StudyConfig};
use crate::Result;

fn operand_layouts(form: StudyForm, mode: Mode, layout: &LayoutSpec) -> einform::Result<Vec<Option<String>>> {
    let t = transpile(&form.expression(mode)?, mode, form.diff_var(mode))?;
    let t = apply_layout(&t, layout)?;
    Ok(t.parts
        .iter()
        .flat_map(|p| &p.operands)
        .map(|o| o.layout.as_ref().map(LayoutSpec::as_string))
        .collect())
}

/// Global layout strings realizing every distinct combination of operand
/// axis orders for `form`, starting with the default layout.
///
/// The role letters the form's operands use are permuted in place within
/// `cqgvd0`, in lexicographic order; strings that permute the operands
/// identically to an earlier one are dropped.
pub fn sweep_layouts(form: StudyForm, mode: Mode) -> Result<Vec<LayoutSpec>> {
    let default = LayoutSpec::default_global();
    let used: Vec<char> = {
        let layouts = operand_layouts(form, mode, &default)?;
        LAYOUT_LETTERS
            .chars()
            .filter(|c| layouts.iter().flatten().any(|l| l.contains(*c)))
            .collect()
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for perm in used.iter().permutations(used.len()) {
        let mut letters = perm.into_iter();
        let s: String = LAYOUT_LETTERS
            .chars()
            .map(|c| {
                if used.contains(&c) {
                    *letters.next().expect("one per slot")
                } else {
                    c
                }
            })
            .collect();
        let layout = LayoutSpec::new(&s)?;
        if seen.insert(operand_layouts(form, mode, &layout)?) {
            out.push(layout);
        }
    }
    Ok(out)
}

/// Evaluates `form` under every layout of [`sweep_layouts`] for each mode and
/// strategy of `config`.
pub fn layout_sweep(form: StudyForm, order: usize, n_cells: usize, config: &StudyConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let ops = build_operands(form, order, n_cells, config)?;
    let mut records = Vec::new();
    for &mode in &config.modes {
        let layouts = sweep_layouts(form, mode)?;
        for &strategy in &config.strategies {
            if strategy == Strategy::Reference {
                records.push(run_one(
                    form,
                    mode,
                    strategy,
                    &LayoutSpec::default_global(),
                    &ops,
                    config,
                ));
                continue;
            }
            for layout in &layouts {
                records.push(run_one(form, mode, strategy, layout, &ops, config));
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_sweeps_four_letters() {
        let layouts = sweep_layouts(StudyForm::Laplace, Mode::Matrix).unwrap();
        assert_eq!(layouts.len(), 24);
        assert_eq!(layouts[0], LayoutSpec::default_global());
        let defaults = layouts.iter().filter(|l| **l == LayoutSpec::default_global()).count();
        assert_eq!(defaults, 1);
    }

    #[test]
    fn convection_sweep_count() {
        // cqgd orders (24) times the position of v relative to c and d (3).
        let layouts = sweep_layouts(StudyForm::Convection, Mode::Matrix).unwrap();
        assert_eq!(layouts.len(), 72);
    }
}
