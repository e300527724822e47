use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use conet_probe::config::{self, EmbeddingSource};
use conet_probe::{run_and_report, RunConfig};

#[derive(Parser)]
#[command(name = "conet-probe", version, about = "Co-occurrence network metric sweeps with shuffled baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write records.csv, informativeness.csv and variability.csv.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated document sizes in tokens.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Comma-separated virtual edge percentages.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Comma-separated strategies: original, global, local.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// keep, filter or both.
    #[arg(long)]
    stopwords: Option<String>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Path to a .vec file, or synthetic:<seed>[:<dim>].
    #[arg(long)]
    embeddings: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report signed distances in the d column.
    #[arg(long)]
    signed_distance: bool,
    /// Ignore and do not write the result cache.
    #[arg(long)]
    no_cache: bool,
}

fn build_config(args: &RunArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::from_file(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    if let Some(v) = &args.sizes {
        cfg.sizes = v.clone();
    }
    if let Some(v) = &args.fractions {
        cfg.fractions = v.clone();
    }
    if let Some(v) = &args.strategies {
        cfg.strategies = v
            .iter()
            .map(|s| config::parse_strategy(s))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = &args.stopwords {
        cfg.stopwords = config::parse_stopword_setting(v)?;
    }
    if let Some(v) = args.replicas {
        cfg.replicas = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.embeddings {
        cfg.embeddings = EmbeddingSource::parse(v, std::path::Path::new(""))?;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if let Some(v) = &args.out {
        cfg.out = v.clone();
    }
    if args.signed_distance {
        cfg.signed_distance = true;
    }
    if args.no_cache {
        cfg.cache = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match run_and_report(&cfg) {
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Ok(out) => {
            eprintln!(
                "{} records ({} cells computed, {} from cache) written to {}",
                out.records.len(),
                out.computed_cells,
                out.cached_cells,
                cfg.out.display()
            );
            if out.has_failures() {
                for f in &out.failures {
                    eprintln!("failed: {f}");
                }
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
