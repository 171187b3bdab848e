use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use somp_cli::commands::{self, DatasetOptions};
use somp_cli::config::{load_config, Overrides, OutputFormat};
use somp_cli::error::CliError;
use somp_cli::simulate;

#[derive(Parser)]
#[command(name = "somp", version, about = "Multi-task greedy screening and sparse regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicated synthetic experiment from a config file.
    Simulate {
        /// Flat `key = value` config file.
        #[arg(long)]
        config: PathBuf,
        /// Base RNG seed (overrides the config file).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (overrides the config file; default all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Report path (overrides the config file; default stdout).
        #[arg(long)]
        output: Option<PathBuf>,
        /// csv or json (overrides the config file).
        #[arg(long)]
        format: Option<String>,
    },
    /// Greedy screening of a CSV dataset: selection path plus support.
    Screen {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Full screening + per-task sparse refit of a CSV dataset.
    Fit {
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(clap::Args)]
struct DataArgs {
    /// Design matrix, n rows by p columns, one header row.
    #[arg(long)]
    x: PathBuf,
    /// Responses, n rows by T columns, one header row.
    #[arg(long)]
    y: PathBuf,
    /// Output path (default stdout).
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Center and scale design columns before fitting.
    #[arg(long)]
    standardize: bool,
    /// Ambient dimension for the selection penalty (default p).
    #[arg(long)]
    bic_p: Option<usize>,
    /// Worker threads (default all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn dataset_options(data: &DataArgs) -> Result<DatasetOptions, CliError> {
    Ok(DatasetOptions {
        standardize: data.standardize,
        bic_p_override: data.bic_p,
        format: OutputFormat::parse(&data.format)?,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            threads,
            output,
            format,
        } => {
            let overrides = Overrides {
                seed,
                threads,
                output,
                format: format.as_deref().map(OutputFormat::parse).transpose()?,
            };
            let run_config = load_config(&config, &overrides)?;
            set_threads(run_config.threads)?;
            simulate::simulate(&run_config)
        }
        Command::Screen { data } => {
            set_threads(data.threads)?;
            let opts = dataset_options(&data)?;
            commands::screen(&data.x, &data.y, data.output.as_deref(), &opts)
        }
        Command::Fit { data } => {
            set_threads(data.threads)?;
            let opts = dataset_options(&data)?;
            commands::fit(&data.x, &data.y, data.output.as_deref(), &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
