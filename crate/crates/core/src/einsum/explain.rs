use std::fmt::Write;

use super::cost::{format_sci, CostReport};
use super::path::{optimize_path, ContractionPath, PathStrategy};
use super::EinsumSpec;

/// Text report of the contraction cost: naive and optimized flop counts,
/// theoretical speedup, largest intermediate, and one line per step.
pub fn explain(spec: &EinsumSpec, strategy: PathStrategy) -> String {
    let (path, report) = optimize_path(spec, strategy);
    render_report(spec, &path, &report)
}

pub fn render_report(spec: &EinsumSpec, path: &ContractionPath, report: &CostReport) -> String {
    let rule = "-".repeat(80);
    let mut s = String::new();
    let _ = writeln!(s, "  Complete contraction:  {spec}");
    let _ = writeln!(s, "         Naive scaling:  {}", report.naive_scaling);
    let _ = writeln!(s, "     Optimized scaling:  {}", report.optimized_scaling());
    let _ = writeln!(s, "      Naive FLOP count:  {}", format_sci(report.naive_flops as f64));
    let _ = writeln!(s, "  Optimized FLOP count:  {}", format_sci(report.path_flops as f64));
    let _ = writeln!(s, "   Theoretical speedup:  {}", format_sci(report.speedup()));
    let _ = writeln!(
        s,
        "  Largest intermediate:  {} elements",
        format_sci(report.largest_intermediate as f64)
    );
    let _ = writeln!(s, "{rule}");
    let _ = writeln!(s, "{:<15}{:<36}{:>29}", "scaling", "current", "remaining");
    let _ = writeln!(s, "{rule}");
    for step in &report.steps {
        let _ = writeln!(
            s,
            "{:>4}{:<11}{:<36}{:>29}",
            step.scaling, "", step.subscripts, step.remaining
        );
    }
    let _ = writeln!(s, "path: {path}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chained_dot_report() {
        let spec = EinsumSpec::parse("ij,jk,kl->il", &[&[2, 2], &[2, 5], &[5, 2]]).unwrap();
        let text = explain(&spec, PathStrategy::Optimal);
        assert!(text.contains("Naive FLOP count:  1.200e+2"));
        assert!(text.contains("Optimized FLOP count:  5.600e+1"));
        assert!(text.contains("Theoretical speedup:  2.143e+0"));
        assert!(text.contains("Largest intermediate:  4.000e+0 elements"));
        assert!(text.contains("jk,kl->jl"));
        assert!(text.contains("ij,jl->il"));
    }

    #[test]
    fn two_operands_no_speedup() {
        let spec = EinsumSpec::parse("ij,jk->ik", &[&[3, 4], &[4, 5]]).unwrap();
        let text = explain(&spec, PathStrategy::Greedy);
        assert!(text.contains("Theoretical speedup:  1.000e+0"));
    }
}
