use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use taylor_lab::experiment::{run, ExperimentError, RunConfig};

const JOBS_ENV: &str = "TAYLOR_LAB_JOBS";

#[derive(Parser)]
#[command(
    name = "taylor-lab",
    version,
    about = "Run a Taylor-model experiment from a JSON config"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the experiment described by CONFIG.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random seed (overrides `seed`).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; falls back to $TAYLOR_LAB_JOBS, then all cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn jobs_from_env() -> Result<Option<usize>, ExperimentError> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                ExperimentError::Config(format!("{JOBS_ENV}={v} is not a thread count"))
            })
        }
        Err(_) => Ok(None),
    }
}

fn execute(
    config: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<(), ExperimentError> {
    let mut cfg = RunConfig::load(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out_dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let jobs = match jobs {
        Some(j) => Some(j),
        None => jobs_from_env()?,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(ExperimentError::Config("jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;
    let report = pool.install(|| run(&cfg, &out_dir))?;
    for c in &report.checks {
        let status = match (c.passed, c.informational) {
            (true, _) => "PASS",
            (false, true) => "INFO",
            (false, false) => "FAIL",
        };
        println!(
            "{status} {} measured={:.3e} threshold={:.3e}",
            c.name, c.measured, c.threshold
        );
    }
    println!("report: {}", out_dir.join("report.json").display());
    report.into_result().map(|_| ())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let Cli {
        command:
            Command::Run {
                config,
                out,
                seed,
                jobs,
            },
    } = Cli::parse();
    match execute(config, out, seed, jobs) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
