use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wedgelab_cli::output::{csv_table, json_report, text_summary, write_file};
use wedgelab_cli::{parse_model, run_suite, CliError, RunOptions, Suite};

#[derive(Parser)]
#[command(name = "wedgelab", version, about = "Validate scattering-data model documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run validation suites on a model document.
    Validate {
        model: PathBuf,
        /// Suites to run (repeatable); defaults to the document's selection.
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        #[arg(long)]
        nmax: Option<usize>,
        /// Nodes of the axiom-suite grid.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        qmax: Option<f64>,
        #[arg(long)]
        tol_algebraic: Option<f64>,
        #[arg(long)]
        tol_quadrature: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the structured (JSON) report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the "axiom,G,residual" table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Treat requested suites that do not apply to the model as failures.
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    let Command::Validate { model, suite, nmax, grid, qmax, tol_algebraic, tol_quadrature, seed, report, csv, strict } =
        Cli::parse().command;
    let opts = RunOptions {
        suites: if suite.is_empty() { None } else { Some(suite) },
        nmax,
        grid,
        qmax,
        tol_algebraic,
        tol_quadrature,
        seed,
        strict,
    };
    match validate(&model, &opts, report, csv) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn validate(model: &PathBuf, opts: &RunOptions, report: Option<PathBuf>, csv: Option<PathBuf>) -> Result<i32, CliError> {
    let doc = parse_model(model)?;
    let outcome = run_suite(&doc, opts)?;
    print!("{}", text_summary(&outcome));
    if let Some(path) = report.or_else(|| doc.output.report.as_ref().map(PathBuf::from)) {
        write_file(&path, &json_report(&outcome.report))?;
    }
    if let Some(path) = csv.or_else(|| doc.output.csv.as_ref().map(PathBuf::from)) {
        write_file(&path, &csv_table(&outcome.report))?;
    }
    Ok(outcome.exit_code())
}
