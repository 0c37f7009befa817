use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;

use einform::{LayoutSpec, Mode, Strategy, StudyForm};
use einform_bench::{
    explain_form, flops_per_cell, format_table, layout_sweep, run_study, write_csv, write_flops_csv, StudyConfig,
};

/// Benchmark sweeps of weak-form evaluation on bar meshes of hexahedra.
#[derive(Debug, Parser)]
#[command(name = "einform-bench", version)]
struct Args {
    /// Forms: dot, wdot, laplace, convect, elastic.
    #[arg(long, value_delimiter = ',', value_parser = parse::<StudyForm>, default_value = "dot,wdot,laplace,convect,elastic")]
    forms: Vec<StudyForm>,

    /// Approximation orders, 1 to 3.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    orders: Vec<usize>,

    /// Cell counts.
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024,2048,4096")]
    cells: Vec<usize>,

    /// Evaluation modes: residual, matrix, eval.
    #[arg(long, value_delimiter = ',', value_parser = parse::<Mode>, default_value = "residual,matrix")]
    modes: Vec<Mode>,

    /// Strategies: naive, greedy, optimal, cell-loop, threaded, reference.
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse::<Strategy>,
        default_value = "greedy,optimal,cell-loop,threaded,reference"
    )]
    strategies: Vec<Strategy>,

    /// Global layout strings, permutations of `cqgvd0`.
    #[arg(long, value_delimiter = ',', value_parser = parse::<LayoutSpec>, default_value = "cqgvd0", conflicts_with = "layout_sweep")]
    layouts: Vec<LayoutSpec>,

    /// Sweep every distinct operand layout of each form.
    #[arg(long)]
    layout_sweep: bool,

    #[arg(long, default_value_t = 5)]
    repeats: usize,

    /// Threads for the threaded strategy; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Skip combinations estimated to need more memory than this.
    #[arg(long, default_value_t = 2048)]
    max_memory_mb: usize,

    /// CSV file for the run records.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the transpilation listing and cost report of one form and exit.
    #[arg(long, value_parser = parse::<StudyForm>)]
    explain: Option<StudyForm>,

    /// Write naive/greedy/optimal flops per cell for orders 1 to 5 and exit.
    #[arg(long)]
    flops_out: Option<PathBuf>,
}

fn parse<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| e.to_string())
}

fn run(args: Args) -> einform_bench::Result<()> {
    if let Some(form) = args.explain {
        let order = args.orders.first().copied().unwrap_or(1);
        let n_cells = args.cells.first().copied().unwrap_or(1024);
        let strategy = args.strategies.first().copied().unwrap_or(Strategy::Greedy);
        let layout = args.layouts.first().cloned().unwrap_or_else(LayoutSpec::default_global);
        for &mode in &args.modes {
            println!("{}", explain_form(form, mode, order, n_cells, strategy, &layout)?);
        }
        return Ok(());
    }

    if let Some(path) = &args.flops_out {
        let mut rows = Vec::new();
        for &mode in &args.modes {
            rows.extend(flops_per_cell(&args.forms, &[1, 2, 3, 4, 5], mode, 1024)?);
        }
        write_flops_csv(&rows, path)?;
        for r in &rows {
            println!(
                "{:<8} p{} {:<8} naive {:>12} greedy {:>12} optimal {:>12}",
                r.form.to_string(),
                r.order,
                r.mode.to_string(),
                r.naive_per_cell,
                r.greedy_per_cell,
                r.optimal_per_cell
            );
        }
        return Ok(());
    }

    let config = StudyConfig {
        forms: args.forms,
        orders: args.orders,
        cells: args.cells,
        modes: args.modes,
        strategies: args.strategies,
        layouts: args.layouts,
        repeats: args.repeats,
        threads: args.threads,
        seed: args.seed,
        max_bytes: args.max_memory_mb << 20,
        ..StudyConfig::default()
    };
    let records = if args.layout_sweep {
        let mut all = Vec::new();
        for &form in &config.forms {
            for &order in &config.orders {
                for &n_cells in &config.cells {
                    all.extend(layout_sweep(form, order, n_cells, &config)?);
                }
            }
        }
        all
    } else {
        run_study(&config)?
    };
    print!("{}", format_table(&records));
    if let Some(path) = &args.out {
        write_csv(&records, path)?;
        eprintln!("wrote {} records to {}", records.len(), path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
