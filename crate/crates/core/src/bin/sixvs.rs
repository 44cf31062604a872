use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sixvs::config::{load_config, load_schema, ProfilerConfig};
use sixvs::ingest::load_dataset_path;
use sixvs::pipeline::run_pipeline;
use sixvs::recommend::{recommend_with, RuleSet};
use sixvs::report::{emit_report, summary_line, write_report, ReportFormat};
use sixvs::Error;

#[derive(Parser)]
#[command(name = "sixvs", version, about = "Profile timestamped sensor datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Machine,
    Human,
}

#[derive(Subcommand)]
enum Command {
    /// Run the profiling pipeline on a CSV file and emit a report.
    Profile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Profiler configuration (JSON). Defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report destination. Without it the report goes to stdout and the
        /// summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Machine)]
        format: Format,
        #[arg(long)]
        delimiter: Option<char>,
        #[arg(long)]
        timestamp_column: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Alternative recommendation rule table (JSON).
        #[arg(long)]
        rules: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> sixvs::Result<()> {
    let Command::Profile {
        input,
        schema,
        config,
        out,
        format,
        delimiter,
        timestamp_column,
        seed,
        rules,
    } = cli.command;

    let schema = load_schema(&schema)?;
    let mut config = match config {
        Some(path) => load_config(&path)?,
        None => ProfilerConfig::default(),
    };
    if let Some(d) = delimiter {
        config.delimiter = d;
    }
    if let Some(c) = timestamp_column {
        config.timestamp_column = c;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    let rules = match rules {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            RuleSet::parse(&text)?
        }
        None => RuleSet::builtin(),
    };

    let ds = load_dataset_path(&input, &schema, &config)?;
    let profile = run_pipeline(&ds, &config)?;
    let recs = recommend_with(&rules, &profile, &config);
    let format = match format {
        Format::Machine => ReportFormat::Machine,
        Format::Human => ReportFormat::Human,
    };
    let text = emit_report(&profile, &recs, format)?;
    match out {
        Some(path) => {
            write_report(&path, &text)?;
            println!("{}", summary_line(&profile));
        }
        None => {
            print!("{text}");
            eprintln!("{}", summary_line(&profile));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_configuration() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
