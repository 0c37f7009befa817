use einform::{Mode, Strategy, StudyForm};

/// Timings and cost figures of one benchmark combination.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub form: StudyForm,
    pub order: usize,
    pub n_cells: usize,
    pub mode: Mode,
    pub strategy: Strategy,
    pub layout: String,
    pub repeats: usize,
    /// Elapsed seconds per repetition, in run order.
    pub elapsed: Vec<f64>,
    pub result_bytes: usize,
    pub naive_flops: u128,
    /// Cost of the executed path; `None` for the hand-written loops.
    pub path_flops: Option<u128>,
    pub largest_intermediate: Option<u128>,
    /// Sum of the result entries, for run-to-run comparison.
    pub checksum: f64,
    /// Reason the combination could not run.
    pub failure: Option<String>,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    /// Mean elapsed time without the slowest repetition.
    pub fn t_ww(&self) -> Option<f64> {
        mean_without_worst(&self.elapsed)
    }

    /// Result size in MiB divided by [`RunRecord::t_ww`].
    pub fn throughput_mb_s(&self) -> Option<f64> {
        self.t_ww().map(|t| self.result_bytes as f64 / (1u64 << 20) as f64 / t)
    }

    /// Key shared by all strategies and layouts of one problem.
    pub fn problem_key(&self) -> (StudyForm, usize, usize, Mode) {
        (self.form, self.order, self.n_cells, self.mode)
    }
}

/// Mean of `samples` after dropping the largest one; `None` below two samples.
pub fn mean_without_worst(samples: &[f64]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let worst = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = samples.iter().sum::<f64>() - worst;
    Some(total / (samples.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_the_worst() {
        assert_eq!(mean_without_worst(&[1.0, 2.0, 3.0, 4.0, 10.0]), Some(2.5));
        assert_eq!(mean_without_worst(&[9.0, 1.0]), Some(1.0));
        assert_eq!(mean_without_worst(&[1.0]), None);
    }

    #[test]
    fn throughput_in_mib() {
        let r = RunRecord {
            form: StudyForm::Dot,
            order: 1,
            n_cells: 1,
            mode: Mode::Matrix,
            strategy: Strategy::Greedy,
            layout: "cqgvd0".into(),
            repeats: 3,
            elapsed: vec![0.5, 0.5, 4.0],
            result_bytes: 1 << 20,
            naive_flops: 1,
            path_flops: Some(1),
            largest_intermediate: Some(1),
            checksum: 0.0,
            failure: None,
        };
        assert_eq!(r.throughput_mb_s(), Some(2.0));
    }
}
