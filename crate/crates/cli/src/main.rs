use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use torus_lab::{emit, standard_registry, CliError, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "torus-lab", version, about = "Run density-estimate experiments on the circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        experiment: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma separated: csv, json, svg.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        budget_seconds: Option<u64>,
    },
    /// List the registered experiments.
    List,
    /// Print the resolved configuration of an experiment.
    Defaults { experiment: String },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let registry = standard_registry();
    match cli.command {
        Command::List => {
            for e in registry.iter() {
                println!("{:<20} {}", e.name(), e.summary());
            }
            Ok(true)
        }
        Command::Defaults { experiment } => {
            print!("{}", registry.resolve(&experiment, &ExperimentConfig::default())?.to_text());
            Ok(true)
        }
        Command::Run {
            experiment,
            config,
            out,
            seed,
            format,
            budget_seconds,
        } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(name) = &cfg.experiment {
                if name != &experiment {
                    return Err(CliError::Config(format!(
                        "config is for `{name}`, not `{experiment}`"
                    )));
                }
            }
            if let Some(s) = seed {
                cfg.seed = Some(s);
            }
            if let Some(dir) = out {
                cfg.out = Some(dir);
            }
            if let Some(f) = format {
                cfg.set("format", &f)?;
            }
            if let Some(b) = budget_seconds {
                cfg.budget_seconds = Some(b);
            }
            let report = registry.run(&experiment, &cfg)?;
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let formats = cfg.format.clone().unwrap_or_else(|| vec![Format::Csv, Format::Json, Format::Svg]);
            for path in emit(&report, &dir, &formats)? {
                eprintln!("wrote {}", path.display());
            }
            for a in &report.assertions {
                println!(
                    "{} {}: observed {:e}, expected {}",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    a.observed,
                    a.expected
                );
            }
            if let Some(t) = report.wall_clock {
                eprintln!("{experiment} finished in {:.2}s", t.as_secs_f64());
            }
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
