use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pubsolid::corpus::{load_corpus, validate_corpus, InterchangeFormat};
use pubsolid::pipeline::{
    emit_plot_data, matching_diagnostic, run_stages, run_synth, RunConfig, RunReport, Stage, StageStatus,
};
use pubsolid::synth::{RewireConfig, SynthConfig};
use pubsolid::Error;

#[derive(Parser)]
#[command(name = "pubsolid", version, about = "Citation-network analytics for journals, publishers and authors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the configuration and the corpus integrity rules.
    Validate,
    /// Run every enabled stage.
    Run,
    /// Run the synthetic ψ experiments.
    Synth,
    /// Select control journals.
    Match {
        /// Also compare size-binning schemes.
        #[arg(long)]
        diagnostic: bool,
    },
    /// Build journal networks and centralities, matching first.
    Net,
    /// Emit the data table of one figure panel.
    Report {
        #[arg(long)]
        figure: String,
    },
}

enum Failure {
    Validation(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Malformed { .. } | Error::DuplicatePaper { .. } | Error::DuplicateJournal(_) => {
                Failure::Validation(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Validation("--config is required for this command".into()))?;
    let mut config = RunConfig::load(path).map_err(|e| Failure::Validation(e.to_string()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
        config.synth.seed = seed;
        config.rewire.seed = seed;
    }
    if let Some(t) = cli.threads {
        config.threads = t;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    Ok(config)
}

fn summarize(report: &RunReport) -> Result<(), Failure> {
    for r in &report.stages {
        let (status, detail) = match &r.status {
            StageStatus::Completed => ("completed", String::new()),
            StageStatus::Failed(e) => ("failed", format!(": {e}")),
            StageStatus::Skipped(e) => ("skipped", format!(": {e}")),
            StageStatus::Disabled => continue,
        };
        eprintln!("{:<10} {status} ({:.2}s){detail}", r.stage.as_str(), r.seconds);
    }
    let corpus_failed = report
        .stages
        .iter()
        .any(|r| r.stage == Stage::Corpus && matches!(r.status, StageStatus::Failed(_)));
    if corpus_failed {
        Err(Failure::Validation("corpus could not be loaded".into()))
    } else if report.partial {
        Err(Failure::Other("run incomplete; see manifest.json".into()))
    } else {
        Ok(())
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate => {
            let config = load_config(cli)?;
            config.validate()?;
            let corpus = load_corpus(&config.corpus.paths(), InterchangeFormat::JsonlCsv, config.corpus.year_range())?;
            let report = validate_corpus(&corpus);
            for v in &report.violations {
                println!("{v}");
            }
            let loaded = corpus.load_report();
            eprintln!(
                "{} papers, {} journals, {} publishers; {} dangling references",
                corpus.paper_count(),
                corpus.journals().len(),
                corpus.publishers().len(),
                loaded.dangling.len()
            );
            if report.is_clean() {
                Ok(())
            } else {
                Err(Failure::Validation(format!("{} violation(s)", report.violations.len())))
            }
        }
        Command::Run => summarize(&run_stages(&load_config(cli)?, &Stage::ORDER)?),
        Command::Synth => {
            let (mut synth, mut rewire, mut out, mut threads) =
                (SynthConfig::default(), RewireConfig::default(), PathBuf::from("out"), 0);
            if cli.config.is_some() {
                let c = load_config(cli)?;
                (synth, rewire, out, threads) = (c.synth, c.rewire, c.out_dir, c.threads);
            }
            if let Some(seed) = cli.seed {
                synth.seed = seed;
                rewire.seed = seed;
            }
            threads = cli.threads.unwrap_or(threads);
            if let Some(o) = &cli.out {
                out = o.clone();
            }
            for p in run_synth(&synth, &rewire, &out, threads)? {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Match { diagnostic } => {
            let config = load_config(cli)?;
            summarize(&run_stages(&config, &[Stage::Impact, Stage::Matching])?)?;
            if *diagnostic {
                println!("{}", matching_diagnostic(&config)?.display());
            }
            Ok(())
        }
        Command::Net => summarize(&run_stages(&load_config(cli)?, &[Stage::Impact, Stage::Matching, Stage::Jnet])?),
        Command::Report { figure } => {
            println!("{}", emit_plot_data(&load_config(cli)?, figure)?.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
