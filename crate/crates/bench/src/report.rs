use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::record::RunRecord;
use crate::{BenchError, Result};

pub const CSV_HEADER: [&str; 12] = [
    "form",
    "order",
    "n_cells",
    "mode",
    "strategy",
    "layout",
    "t_ww",
    "throughput_mb_s",
    "naive_flops",
    "path_flops",
    "largest_intermediate",
    "speedup_vs_reference",
];

/// Columns that depend on wall-clock time.
pub const TIMING_COLUMNS: [&str; 3] = ["t_ww", "throughput_mb_s", "speedup_vs_reference"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `T_ww(reference) / T_ww(record)` for the record's problem, if both ran.
pub fn speedups(records: &[RunRecord]) -> Vec<Option<f64>> {
    let mut reference = HashMap::new();
    for r in records {
        if r.strategy == einform::Strategy::Reference {
            if let Some(t) = r.t_ww() {
                reference.entry(r.problem_key()).or_insert(t);
            }
        }
    }
    records
        .iter()
        .map(|r| {
            let t_ref = reference.get(&r.problem_key())?;
            Some(t_ref / r.t_ww()?)
        })
        .collect()
}

fn rows(records: &[RunRecord]) -> Vec<[String; 12]> {
    records
        .iter()
        .zip(speedups(records))
        .map(|(r, speedup)| {
            [
                r.form.to_string(),
                r.order.to_string(),
                r.n_cells.to_string(),
                r.mode.to_string(),
                r.strategy.to_string(),
                r.layout.clone(),
                opt(r.t_ww()),
                opt(r.throughput_mb_s()),
                r.naive_flops.to_string(),
                opt(r.path_flops),
                opt(r.largest_intermediate),
                opt(speedup),
            ]
        })
        .collect()
}

/// Writes one CSV row per record under [`CSV_HEADER`].
pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(BenchError::Config("no records to report".into()));
    }
    let file = std::fs::File::create(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_HEADER)?;
    for row in rows(records) {
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

/// Aligned text table of the records; failed combinations show the reason.
pub fn format_table(records: &[RunRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<8} {:>2} {:>6} {:<8} {:<10} {:<7} {:>11} {:>10} {:>11} {:>11} {:>8}",
        "form", "p", "cells", "mode", "strategy", "layout", "t_ww [s]", "MB/s", "naive", "path", "speedup"
    );
    for (r, speedup) in records.iter().zip(speedups(records)) {
        let head = format!(
            "{:<8} {:>2} {:>6} {:<8} {:<10} {:<7}",
            r.form.to_string(),
            r.order,
            r.n_cells,
            r.mode.to_string(),
            r.strategy.to_string(),
            r.layout
        );
        match &r.failure {
            Some(reason) => {
                let _ = writeln!(s, "{head} failed: {reason}");
            }
            None => {
                let _ = writeln!(
                    s,
                    "{head} {:>11} {:>10} {:>11} {:>11} {:>8}",
                    r.t_ww().map_or("-".into(), |t| format!("{t:.3e}")),
                    r.throughput_mb_s().map_or("-".into(), |t| format!("{t:.1}")),
                    format!("{:.2e}", r.naive_flops as f64),
                    r.path_flops.map_or("-".into(), |f| format!("{:.2e}", f as f64)),
                    speedup.map_or("-".into(), |x| format!("{x:.2}")),
                );
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use einform::{Mode, Strategy, StudyForm};

    fn record(strategy: Strategy, elapsed: Vec<f64>) -> RunRecord {
        RunRecord {
            form: StudyForm::Laplace,
            order: 2,
            n_cells: 8,
            mode: Mode::Matrix,
            strategy,
            layout: "cqgvd0".into(),
            repeats: elapsed.len(),
            elapsed,
            result_bytes: 1 << 20,
            naive_flops: 100,
            path_flops: Some(10),
            largest_intermediate: Some(4),
            checksum: 0.0,
            failure: None,
        }
    }

    #[test]
    fn speedup_against_reference() {
        let recs = vec![
            record(Strategy::Reference, vec![4.0, 4.0, 9.0]),
            record(Strategy::Greedy, vec![1.0, 1.0, 3.0]),
        ];
        assert_eq!(speedups(&recs), vec![Some(1.0), Some(4.0)]);
    }

    #[test]
    fn two_records_two_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let recs = vec![
            record(Strategy::Greedy, vec![1.0, 2.0]),
            record(Strategy::Optimal, vec![1.0, 2.0]),
        ];
        write_csv(&recs, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert!(lines[1].starts_with("laplace,2,8,matrix,greedy,cqgvd0,1,1,100,10,4,"));
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let recs = vec![record(Strategy::Greedy, vec![1.0, 2.0])];
        let r = write_csv(&recs, Path::new("/nonexistent-dir/x.csv"));
        assert!(matches!(r, Err(BenchError::Io { .. })));
    }
}
