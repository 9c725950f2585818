use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use corona_pdo::config::{OutputSpec, RunConfig};
use corona_pdo::runner::{preset_config, run, PRESETS};

#[derive(Parser)]
#[command(name = "corona-pdo", version, about = "Pseudodifferential operators on discretized LCA groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration or a built-in example.
    Run {
        /// Configuration file.
        #[arg(long, conflicts_with = "example", required_unless_present = "example")]
        config: Option<PathBuf>,
        /// Built-in example name (see `list-examples`).
        #[arg(long)]
        example: Option<String>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for report.json and sigma.csv; the report is always printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in examples.
    ListExamples,
}

fn threads() {
    if let Some(n) = std::env::var("CORONA_PDO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    threads();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::ListExamples => {
            for (name, about) in PRESETS {
                println!("{name:<10} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, example, seed, out } => {
            let (cfg, base_dir) = match (config, example) {
                (Some(path), _) => {
                    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                    (RunConfig::load(&path), dir)
                }
                (None, Some(name)) => (preset_config(&name), PathBuf::from(".")),
                (None, None) => unreachable!("clap requires one of --config and --example"),
            };
            let mut cfg = match cfg {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(dir) = out {
                let matrices = cfg.output.as_ref().is_some_and(|o| o.matrices);
                cfg.output = Some(OutputSpec { dir, matrices });
            }
            let outcome = match run(&cfg, &base_dir) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let written = match &cfg.output {
                Some(o) => outcome.write(&cfg, &o.dir),
                None => Ok(()),
            };
            match outcome.to_json(&cfg).and_then(|text| written.map(|_| text)) {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            for w in &outcome.warnings {
                log::warn!("{w}");
            }
            for v in &outcome.violations {
                eprintln!("VIOLATION: {v}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
    }
}
