//! Command-line driver for the evidence benchmark harness.
//!
//! Exit codes: 0 on success, 1 on configuration errors (bad flags, bad
//! config file, I/O trouble), 2 on numerical failure inside a run.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use evidence_bench::csvio::{parse_csv, write_csv};
use evidence_bench::registry::MODELS;
use evidence_bench::{
    diagnostic_report, parse_config, render_summary, run_experiment, summarize, BenchError,
    ExperimentConfig, Result,
};

#[derive(Parser)]
#[command(
    name = "bench_cli",
    version,
    about = "Seeded replication benchmarks for log marginal likelihood estimators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file and emit one CSV row per
    /// (model, replication, estimator).
    Run {
        /// Experiment config file (flat key=value sections).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path; overrides the config file; stdout if neither
        /// names one.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall time per estimator (off by default so output bytes
        /// depend only on the seed).
        #[arg(long)]
        timing: bool,
    },
    /// Aggregate a row CSV into a Mean/SD/AE/RMSE table.
    Summarize {
        /// Row CSV produced by `run`.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Print the hybrid estimator's interpolation diagnostic for one
    /// replication of one model.
    Diag {
        /// Model name (see `list-models`).
        #[arg(long)]
        model: String,
        /// Optional config file supplying that model's section.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replication seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// List the benchmark models with their default parameters.
    ListModels,
}

fn read_to_string(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    parse_config(&read_to_string(path)?)
}

fn cmd_run(
    config: &PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    timing: bool,
) -> Result<()> {
    let mut cfg = load_config(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let records = run_experiment(&cfg, timing)?;
    let target = out.or_else(|| cfg.out.clone().map(PathBuf::from));
    match target {
        Some(path) => {
            let file = fs::File::create(&path).map_err(|e| {
                BenchError::Config(format!("cannot write {}: {e}", path.display()))
            })?;
            let mut w = std::io::BufWriter::new(file);
            write_csv(&mut w, &records)?;
            w.flush().map_err(BenchError::Io)?;
            eprintln!("wrote {} rows to {}", records.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(stdout.lock(), &records)?;
        }
    }
    Ok(())
}

fn cmd_summarize(input: &PathBuf) -> Result<()> {
    let records = parse_csv(&read_to_string(input)?)?;
    if records.is_empty() {
        return Err(BenchError::Config(format!(
            "{} holds no data rows",
            input.display()
        )));
    }
    print!("{}", render_summary(&summarize(&records)));
    Ok(())
}

fn cmd_diag(model: &str, config: Option<&PathBuf>, seed: u64) -> Result<()> {
    let cfg = config.map(load_config).transpose()?;
    let settings = cfg.as_ref().and_then(|c| c.model_settings.get(model));
    print!("{}", diagnostic_report(model, settings, seed)?);
    Ok(())
}

fn cmd_list_models() -> Result<()> {
    println!(
        "{:<18} {:>6} {:>7} {:>6}  {}",
        "model", "n_obs", "n_mcmc", "dim", "description"
    );
    for m in MODELS {
        let dim = m
            .dim
            .map(|d| d.to_string())
            .unwrap_or_else(|| "fixed".to_string());
        println!(
            "{:<18} {:>6} {:>7} {:>6}  {}",
            m.name, m.n_obs, m.n_mcmc, dim, m.notes
        );
    }
    println!(
        "\nconfig keys: [experiment] seed, reps, models, estimators, out; \
         per-model n_obs, n_mcmc, dim (where not fixed), delta and graph \
         (hiw_graphical), block (mvn_ig_meanfield)"
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Run {
            config,
            seed,
            out,
            timing,
        } => cmd_run(config, *seed, out.clone(), *timing),
        Command::Summarize { input } => cmd_summarize(input),
        Command::Diag {
            model,
            config,
            seed,
        } => cmd_diag(model, config.as_ref(), *seed),
        Command::ListModels => cmd_list_models(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
