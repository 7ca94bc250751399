use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use varlen::distance::DistanceMeasure;
use varlen::experiment::{run_experiment, vary, Classifier, ExperimentConfig, Variation};
use varlen::preprocess::PreprocessorKind;
use varlen::report::{load_records, report, ReportOptions, Scope};
use varlen::synthetic::{shapes_dataset, ShapeSpec};
use varlen::ucr::{read_ucr_file, write_dataset};
use varlen::Result;

#[derive(Parser)]
#[command(name = "varlen", version, about = "Variable-length time series classification benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write length-varied copies of datasets to disk
    Generate(GenerateArgs),
    /// Run every applicable (mechanism, preprocessor, classifier) combination
    Run(RunArgs),
    /// Rank tables and critical-difference diagrams from stored results
    Report(ReportArgs),
    /// Distance between two series, for debugging
    Dist(DistArgs),
    /// Write a small synthetic shape dataset
    Synth(SynthArgs),
}

#[derive(Args)]
struct Selection {
    /// Comma-separated mechanisms, or `original` for data used as loaded
    #[arg(long, value_delimiter = ',', default_values_t = default_mechanisms())]
    mechanisms: Vec<Variation>,
}

fn default_mechanisms() -> Vec<Variation> {
    varlen::generators::Mechanism::ALL.into_iter().map(Variation::Generated).collect()
}

#[derive(Args)]
struct GenerateArgs {
    /// Directories holding <name>_TRAIN / <name>_TEST files
    #[arg(long, required = true)]
    data: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    selection: Selection,
}

#[derive(Args)]
struct RunArgs {
    /// Directories holding <name>_TRAIN / <name>_TEST files
    #[arg(long, required = true)]
    data: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0: one per core)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    selection: Selection,
    #[arg(long, value_delimiter = ',', default_values_t = PreprocessorKind::ALL.to_vec())]
    preprocessors: Vec<PreprocessorKind>,
    #[arg(long, value_delimiter = ',', default_values_t = Classifier::ALL.to_vec())]
    classifiers: Vec<Classifier>,
    /// Trees per Proximity Forest
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Also write reports into <out>/report
    #[arg(long)]
    report: bool,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

#[derive(Args)]
struct ReportArgs {
    /// results.csv, or a run directory containing it
    #[arg(long)]
    results: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', default_values_t = Scope::ALL.to_vec())]
    scope: Vec<Scope>,
}

#[derive(Args)]
struct DistArgs {
    #[arg(long, default_value = "dtw")]
    measure: DistanceMeasure,
    /// UCR file holding the first series
    a: PathBuf,
    /// UCR file holding the second series
    b: PathBuf,
    /// Zero-based row in the first file
    #[arg(long, default_value_t = 0)]
    row_a: usize,
    /// Zero-based row in the second file
    #[arg(long, default_value_t = 0)]
    row_b: usize,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "Shapes")]
    name: String,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 10)]
    train_per_class: usize,
    #[arg(long, default_value_t = 10)]
    test_per_class: usize,
    #[arg(long, default_value_t = 64)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn row(path: &Path, i: usize) -> Result<Vec<f64>> {
    let series = read_ucr_file(path)?;
    let n = series.len();
    series.into_iter().nth(i).map(|s| s.into_values()).ok_or_else(|| {
        varlen::Error::InvalidInput(format!("{} has {n} rows; row {i} requested", path.display()))
    })
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => {
            let mut cfg = ExperimentConfig::new(a.data, a.out.clone());
            cfg.master_seed = a.seed;
            for d in varlen::experiment::load_datasets(&cfg)? {
                for &m in &a.selection.mechanisms {
                    let varied = vary(&d, m, &cfg)?;
                    let (train, _) = write_dataset(&a.out.join(m.name()), &varied)?;
                    println!("{}", train.parent().unwrap_or(&a.out).display());
                }
            }
        }
        Command::Run(a) => {
            let mut cfg = ExperimentConfig::new(a.data, a.out.clone());
            cfg.master_seed = a.seed;
            cfg.jobs = a.jobs;
            cfg.mechanisms = a.selection.mechanisms;
            cfg.preprocessors = a.preprocessors;
            cfg.classifiers = a.classifiers;
            cfg.pf.num_trees = a.trees;
            let summary = run_experiment(&cfg)?;
            let failed = summary.failures().count();
            println!(
                "{} records ({} computed, {} reused, {failed} failed) in {}",
                summary.records.len(),
                summary.computed,
                summary.reused,
                a.out.join(varlen::experiment::RESULTS_FILE).display()
            );
            if a.report {
                let opts = ReportOptions {
                    alpha: a.alpha,
                    scopes: Scope::ALL.to_vec(),
                    out_dir: a.out.join("report"),
                };
                let out = report(&summary.records, &opts)?;
                println!("{} diagrams in {}", out.diagrams.len(), opts.out_dir.display());
            }
        }
        Command::Report(a) => {
            let records = load_records(&a.results)?;
            let opts = ReportOptions {
                alpha: a.alpha,
                scopes: a.scope,
                out_dir: a.out,
            };
            let out = report(&records, &opts)?;
            for d in &out.diagrams {
                let best = d.ranks.first().map_or("", |r| r.column.as_str());
                println!(
                    "{} {}: k={} N={} CD={:.4} best={best}",
                    d.scope, d.mechanism, d.k, d.n, d.cd
                );
            }
        }
        Command::Dist(a) => {
            let x = row(&a.a, a.row_a)?;
            let y = row(&a.b, a.row_b)?;
            println!("{}", a.measure.distance(&x, &y));
        }
        Command::Synth(a) => {
            let spec = ShapeSpec {
                classes: a.classes,
                train_per_class: a.train_per_class,
                test_per_class: a.test_per_class,
                length: a.length,
                ..ShapeSpec::default()
            };
            let d = shapes_dataset(&a.name, &spec, a.seed)?;
            let (train, _) = write_dataset(&a.out, &d)?;
            println!("{}", train.parent().unwrap_or(&a.out).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
