use std::time::Instant;

use einform::einsum::{naive_flops, optimize_path};
use einform::{EvalOptions, Evaluator, FeOperandSet, LayoutSpec, Mode, Strategy, StudyForm};

use crate::record::RunRecord;
use crate::{BenchError, Result};

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub forms: Vec<StudyForm>,
    pub orders: Vec<usize>,
    pub cells: Vec<usize>,
    pub modes: Vec<Mode>,
    pub strategies: Vec<Strategy>,
    pub layouts: Vec<LayoutSpec>,
    pub repeats: usize,
    /// Worker threads for the threaded strategy; 0 uses all cores.
    pub threads: usize,
    pub seed: u64,
    /// Combinations whose estimated footprint exceeds this are recorded as
    /// failed instead of run.
    pub max_bytes: usize,
    /// Edge length of the bar mesh cells.
    pub cell_size: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            forms: StudyForm::ALL.to_vec(),
            orders: vec![1, 2, 3],
            cells: (7..=12).map(|k| 1 << k).collect(),
            modes: vec![Mode::Residual, Mode::Matrix],
            strategies: vec![
                Strategy::Greedy,
                Strategy::Optimal,
                Strategy::CellLoop,
                Strategy::Threaded,
                Strategy::Reference,
            ],
            layouts: vec![LayoutSpec::default_global()],
            repeats: 5,
            threads: 0,
            seed: 0,
            max_bytes: 2 << 30,
            cell_size: 1.0,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repeats < 2 {
            return Err(BenchError::Config("repeats must be at least 2".into()));
        }
        for (name, empty) in [
            ("forms", self.forms.is_empty()),
            ("orders", self.orders.is_empty()),
            ("cells", self.cells.is_empty()),
            ("modes", self.modes.is_empty()),
            ("strategies", self.strategies.is_empty()),
            ("layouts", self.layouts.is_empty()),
        ] {
            if empty {
                return Err(BenchError::Config(format!("no {name} selected")));
            }
        }
        if self.cells.contains(&0) {
            return Err(BenchError::Config("cell counts must be positive".into()));
        }
        Ok(())
    }
}

/// Runs every combination of `config` sequentially.
pub fn run_study(config: &StudyConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let mut records = Vec::new();
    for &form in &config.forms {
        for &order in &config.orders {
            for &n_cells in &config.cells {
                let ops = match build_operands(form, order, n_cells, config) {
                    Ok(ops) => ops,
                    Err(e) => {
                        for &mode in &config.modes {
                            for &strategy in &config.strategies {
                                for layout in &config.layouts {
                                    let mut r = blank(form, order, n_cells, mode, strategy, layout, config.repeats);
                                    r.failure = Some(e.to_string());
                                    records.push(r);
                                }
                            }
                        }
                        continue;
                    }
                };
                for &mode in &config.modes {
                    for &strategy in &config.strategies {
                        for layout in &config.layouts {
                            records.push(run_one(form, mode, strategy, layout, &ops, config));
                        }
                    }
                }
            }
        }
    }
    Ok(records)
}

pub(crate) fn build_operands(
    form: StudyForm,
    order: usize,
    n_cells: usize,
    config: &StudyConfig,
) -> einform::Result<FeOperandSet> {
    let mut ops = FeOperandSet::bar(order, n_cells, config.cell_size)?;
    form.populate(&mut ops, config.seed)?;
    Ok(ops)
}

fn blank(
    form: StudyForm,
    order: usize,
    n_cells: usize,
    mode: Mode,
    strategy: Strategy,
    layout: &LayoutSpec,
    repeats: usize,
) -> RunRecord {
    RunRecord {
        form,
        order,
        n_cells,
        mode,
        strategy,
        layout: layout.as_string(),
        repeats,
        elapsed: Vec::new(),
        result_bytes: 0,
        naive_flops: 0,
        path_flops: None,
        largest_intermediate: None,
        checksum: 0.0,
        failure: None,
    }
}

/// Result plus largest intermediate, in bytes, for the batch strategies.
fn estimated_bytes(
    form: StudyForm,
    mode: Mode,
    strategy: Strategy,
    order: usize,
    n_cells: usize,
) -> einform::Result<(u128, usize)> {
    let specs = form.cost_specs(mode, order, n_cells)?;
    let naive: u128 = specs.iter().map(naive_flops).sum();
    let result: u128 = specs[0].output_shape().iter().map(|&n| n as u128).product();
    let scratch = match strategy {
        Strategy::Greedy | Strategy::Optimal => specs
            .iter()
            .map(|s| optimize_path(s, strategy.path_strategy()).1.largest_intermediate)
            .max()
            .unwrap_or(0),
        _ => 0,
    };
    let bytes = (2 * result + scratch) * std::mem::size_of::<f64>() as u128;
    Ok((naive, usize::try_from(bytes).unwrap_or(usize::MAX)))
}

pub(crate) fn run_one(
    form: StudyForm,
    mode: Mode,
    strategy: Strategy,
    layout: &LayoutSpec,
    ops: &FeOperandSet,
    config: &StudyConfig,
) -> RunRecord {
    let (order, n_cells) = (ops.order, ops.n_cells());
    let mut record = blank(form, order, n_cells, mode, strategy, layout, config.repeats);
    match estimated_bytes(form, mode, strategy, order, n_cells) {
        Ok((naive, bytes)) => {
            record.naive_flops = naive;
            if bytes > config.max_bytes {
                record.failure = Some(format!(
                    "estimated {} MiB exceeds the {} MiB limit",
                    bytes >> 20,
                    config.max_bytes >> 20
                ));
                return record;
            }
        }
        Err(e) => {
            record.failure = Some(e.to_string());
            return record;
        }
    }

    // Fresh evaluator: the first sample pays for transpilation and paths.
    let ev = Evaluator::new();
    let opts = EvalOptions {
        strategy,
        layout: layout.clone(),
        threads: config.threads,
        ..EvalOptions::default()
    };
    for _ in 0..config.repeats {
        let t0 = Instant::now();
        let result = ev.evaluate_study(form, mode, ops, &opts);
        let dt = t0.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
        match result {
            Ok(evaluation) => {
                record.elapsed.push(dt);
                record.result_bytes = evaluation.result_bytes();
                record.checksum = evaluation.value.sum();
                if !evaluation.parts.is_empty() {
                    record.path_flops = Some(evaluation.parts.iter().map(|p| p.cost.path_flops).sum());
                    record.largest_intermediate = evaluation.parts.iter().map(|p| p.cost.largest_intermediate).max();
                }
            }
            Err(e) => {
                record.failure = Some(e.to_string());
                record.elapsed.clear();
                break;
            }
        }
    }
    record
}
