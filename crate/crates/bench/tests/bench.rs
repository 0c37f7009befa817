use std::process::Command;

use einform::{EvalOptions, Evaluator, FeOperandSet, Mode, Strategy, StudyForm};
use einform_bench::report::TIMING_COLUMNS;
use einform_bench::{run_study, sweep_layouts, write_csv, StudyConfig, CSV_HEADER};

fn small(seed: u64) -> StudyConfig {
    StudyConfig {
        forms: vec![StudyForm::Dot, StudyForm::Convection],
        orders: vec![1, 2],
        cells: vec![3],
        modes: vec![Mode::Residual, Mode::Matrix],
        strategies: vec![Strategy::Greedy, Strategy::Threaded, Strategy::Reference],
        repeats: 2,
        threads: 2,
        seed,
        ..StudyConfig::default()
    }
}

fn csv_without_timing(path: &std::path::Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let timing: Vec<usize> = CSV_HEADER
        .iter()
        .enumerate()
        .filter(|(_, h)| TIMING_COLUMNS.contains(h))
        .map(|(k, _)| k)
        .collect();
    text.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(k, _)| !timing.contains(k))
                .map(|(_, v)| v.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn sweeps_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_study(&small(42)).unwrap();
    let b = run_study(&small(42)).unwrap();
    assert_eq!(a.len(), 2 * 2 * 2 * 3);
    for (x, y) in a.iter().zip(&b) {
        assert!(x.succeeded(), "{x:?}");
        assert_eq!(x.checksum.to_bits(), y.checksum.to_bits());
    }
    let (pa, pb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_csv(&a, &pa).unwrap();
    write_csv(&b, &pb).unwrap();
    assert_eq!(csv_without_timing(&pa), csv_without_timing(&pb));

    let c = run_study(&small(43)).unwrap();
    assert_ne!(a[0].checksum, c[0].checksum);
}

#[test]
fn paper_scale_result_shapes() {
    let ev = Evaluator::new();
    for (form, order, shape) in [
        (StudyForm::Laplace, 2, vec![1024, 27, 27]),
        (StudyForm::Dot, 1, vec![1024, 3, 8, 3, 8]),
    ] {
        let mut ops = FeOperandSet::bar(order, 1024, 1.0).unwrap();
        form.populate(&mut ops, 0).unwrap();
        let r = ev
            .evaluate_study(form, Mode::Matrix, &ops, &EvalOptions::default())
            .unwrap();
        assert_eq!(r.value.shape(), shape.as_slice());
        assert_eq!(r.result_bytes(), shape.iter().product::<usize>() * 8);
    }
}

#[test]
fn swept_layouts_agree() {
    let form = StudyForm::Laplace;
    let mut ops = FeOperandSet::bar(2, 3, 1.0).unwrap();
    form.populate(&mut ops, 5).unwrap();
    let ev = Evaluator::new();
    let base = ev
        .evaluate_study(form, Mode::Matrix, &ops, &EvalOptions::default())
        .unwrap()
        .value;
    let layouts = sweep_layouts(form, Mode::Matrix).unwrap();
    assert_eq!(layouts.len(), 24);
    for layout in layouts {
        let r = ev
            .evaluate_study(
                form,
                Mode::Matrix,
                &ops,
                &EvalOptions::default().with_layout(layout.clone()),
            )
            .unwrap()
            .value;
        assert!(r.rel_diff(&base).unwrap() <= 1e-12, "{layout}");
    }
}

#[test]
fn cli_explain_and_csv() {
    let exe = env!("CARGO_BIN_EXE_einform-bench");
    let out = Command::new(exe)
        .args([
            "--explain",
            "dot",
            "--orders",
            "1",
            "--cells",
            "1024",
            "--modes",
            "matrix",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("einsum('cq,qd,ir,qe,is->crdse')"));
    assert!(text.contains("crdse (1024, 3, 8, 3, 8) ="));
    assert!(text.contains("Optimized FLOP count"));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    let status = Command::new(exe)
        .args([
            "--forms", "laplace", "--orders", "1", "--cells", "2,4", "--modes", "matrix",
        ])
        .args(["--strategies", "greedy,reference", "--repeats", "2", "--out"])
        .arg(&csv)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 5);

    let bad = Command::new(exe).args(["--forms", "heat"]).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn flops_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flops.csv");
    let exe = env!("CARGO_BIN_EXE_einform-bench");
    let out = Command::new(exe)
        .args(["--modes", "matrix", "--flops-out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 5 * 5);
}
