use std::path::Path;

use einform::einsum::{naive_flops, optimize_path};
use einform::{Mode, PathStrategy, StudyForm};

use crate::{BenchError, Result};

/// Cost-model flops per cell of one form at one order.
#[derive(Debug, Clone, PartialEq)]
pub struct FlopsRow {
    pub form: StudyForm,
    pub order: usize,
    pub mode: Mode,
    pub naive_per_cell: u128,
    pub greedy_per_cell: u128,
    pub optimal_per_cell: u128,
}

/// Flops per cell for each form and order, from the cost model alone.
pub fn flops_per_cell(forms: &[StudyForm], orders: &[usize], mode: Mode, n_cells: usize) -> Result<Vec<FlopsRow>> {
    if n_cells == 0 {
        return Err(BenchError::Config("cell count must be positive".into()));
    }
    let mut rows = Vec::new();
    for &form in forms {
        for &order in orders {
            let specs = form.cost_specs(mode, order, n_cells)?;
            let sum = |f: &dyn Fn(&einform::EinsumSpec) -> u128| specs.iter().map(f).sum::<u128>() / n_cells as u128;
            rows.push(FlopsRow {
                form,
                order,
                mode,
                naive_per_cell: sum(&naive_flops),
                greedy_per_cell: sum(&|s| optimize_path(s, PathStrategy::Greedy).1.path_flops),
                optimal_per_cell: sum(&|s| optimize_path(s, PathStrategy::Optimal).1.path_flops),
            });
        }
    }
    Ok(rows)
}

pub fn write_flops_csv(rows: &[FlopsRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record([
        "form",
        "order",
        "mode",
        "naive_flops_per_cell",
        "greedy_flops_per_cell",
        "optimal_flops_per_cell",
    ])?;
    for r in rows {
        w.write_record([
            r.form.to_string(),
            r.order.to_string(),
            r.mode.to_string(),
            r.naive_per_cell.to_string(),
            r.greedy_per_cell.to_string(),
            r.optimal_per_cell.to_string(),
        ])?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_grows_with_order() {
        let rows = flops_per_cell(&StudyForm::ALL, &[1, 2, 3, 4, 5], Mode::Matrix, 1024).unwrap();
        assert_eq!(rows.len(), 25);
        for pair in rows.windows(2) {
            if pair[0].form == pair[1].form {
                assert!(pair[1].naive_per_cell > pair[0].naive_per_cell);
            }
        }
        assert!(rows.iter().all(|r| r.optimal_per_cell <= r.greedy_per_cell));
    }

    #[test]
    fn laplacian_order_two() {
        // 27 points, 3 gradient components, 27 x 27 DOF pairs, 3 flops each.
        let rows = flops_per_cell(&[StudyForm::Laplace], &[2], Mode::Matrix, 4).unwrap();
        assert_eq!(rows[0].naive_per_cell, 27 * 3 * 27 * 27 * 3);
    }
}
