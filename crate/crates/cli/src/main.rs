use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fxregime::experiment::{self, ExperimentConfig, OUTPUT_ROOT_ENV};
use fxregime::model::McmcSettings;

/// Markov-switching exchange-rate forecasting experiments.
///
/// Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "fxregime", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the fundamentals panel from the raw series.
    Transform(Common),
    /// Recursive forecasts for every grid cell and the random walk, then the report.
    Run(Common),
    /// Estimate one cell on the full panel and write state probability summaries.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// Model id of the cell, for example `ms-tvp_theoretical_k4_ssvs_common`.
        #[arg(long)]
        cell: String,
    },
    /// Rebuild the evaluation report from saved forecast records.
    Report(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, overriding the config.
    #[arg(long)]
    workers: Option<usize>,
    /// Short chains (200 sweeps, 100 burn-in, no thinning).
    #[arg(long)]
    smoke: bool,
    /// Directory that relative output paths are placed under.
    #[arg(long, env = OUTPUT_ROOT_ENV)]
    output_root: Option<PathBuf>,
    /// More log output; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn load(&self) -> fxregime::Result<ExperimentConfig> {
        let mut c = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(w) = self.workers {
            c.workers = w;
        }
        if self.smoke {
            c.mcmc = McmcSettings::SMOKE;
        }
        if self.output_root.is_some() {
            c.output_root = self.output_root.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

fn execute(command: Command) -> fxregime::Result<()> {
    match command {
        Command::Transform(common) => {
            init_logging(common.verbose);
            let config = common.load()?;
            let panel = experiment::transform(&config)?;
            println!(
                "wrote {} rows ({} to {}) to {}",
                panel.len(),
                panel.dates()[0],
                panel.dates()[panel.len() - 1],
                config.panel_path().display()
            );
        }
        Command::Run(common) => {
            init_logging(common.verbose);
            let config = common.load()?;
            let s = experiment::run(&config)?;
            println!(
                "{} cells x {} origins: {} tasks, {} from checkpoints; output in {}",
                s.cells,
                s.origins,
                s.tasks,
                s.resumed,
                config.output_dir().display()
            );
        }
        Command::Diagnose { common, cell } => {
            init_logging(common.verbose);
            let config = common.load()?;
            let dir = experiment::diagnose(&config, &cell)?;
            println!("wrote state summaries for {cell} to {}", dir.display());
        }
        Command::Report(common) => {
            init_logging(common.verbose);
            let config = common.load()?;
            let report = experiment::report(&config)?;
            for r in &report.rankings {
                let best = r.model_ids.first().map(String::as_str).unwrap_or("-");
                let value = r.terminal_lbf.first().copied().unwrap_or(f64::NAN);
                println!("{} h={}: best {best} (LBF {value:.4})", r.class.label(), r.horizon);
            }
            if !report.missing.is_empty() {
                println!("missing cells: {}", report.missing.join(", "));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
