use clap::{Parser, Subcommand};
use paradigm_lab::{config::ExperimentConfig, run_scenario, LabError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 all thresholds passed, 1 a threshold failed, 2 the config
/// was invalid or the run could not complete.
const EXIT_THRESHOLD_FAILURE: u8 = 1;
const EXIT_CONFIG_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "paradigm-lab",
    about = "Verification scenarios for congestion-window chains and their scaling limits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write report.json plus CSVs.
    Run {
        /// Experiment configuration (JSON).
        config: PathBuf,
        /// Override the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (falls back to PARADIGM_LAB_THREADS, then to the
        /// number of cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory (defaults to the config's output_path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a configuration, reporting the first problem.
    Validate {
        config: PathBuf,
    },
    /// Print the constants derived from the configured parameters.
    Params {
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            seed,
            threads,
            out,
        } => run(config, seed, threads, out),
        Command::Validate { config } => validate(config),
        Command::Params { config } => params(config),
    }
}

fn load(path: &std::path::Path) -> Result<ExperimentConfig, ExitCode> {
    ExperimentConfig::from_file(path).map_err(|err| {
        eprintln!("config error: {err}");
        ExitCode::from(EXIT_CONFIG_ERROR)
    })
}

fn resolve_threads(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("PARADIGM_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn run(
    config_path: PathBuf,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> ExitCode {
    let mut config = match load(&config_path) {
        Ok(config) => config,
        Err(code) => return code,
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    // --out redirects where files land but is not part of the experiment
    // identity, so it is not echoed into the report.
    let out_dir = out.unwrap_or_else(|| PathBuf::from(&config.output_path));

    let pool = match threaded_pool(resolve_threads(threads)) {
        Ok(pool) => pool,
        Err(err) => {
            eprintln!("thread pool error: {err}");
            return ExitCode::from(EXIT_CONFIG_ERROR);
        }
    };

    let output = match pool.install(|| run_scenario(&config)) {
        Ok(output) => output,
        Err(LabError::Config(err)) => {
            eprintln!("config error: {err}");
            return ExitCode::from(EXIT_CONFIG_ERROR);
        }
        Err(err) => {
            eprintln!("run failed: {err}");
            return ExitCode::from(EXIT_CONFIG_ERROR);
        }
    };

    if let Err(err) = output.write_to(&out_dir) {
        eprintln!("failed to write outputs to {}: {err}", out_dir.display());
        return ExitCode::from(EXIT_CONFIG_ERROR);
    }

    for (check, p) in output.report.all_checks() {
        let place = p.map(|p| format!(" [p={p}]")).unwrap_or_default();
        let bounds = match (check.lower, check.upper) {
            (Some(lo), Some(hi)) => format!("in [{lo}, {hi}]"),
            (Some(lo), None) => format!(">= {lo}"),
            (None, Some(hi)) => format!("<= {hi}"),
            (None, None) => String::new(),
        };
        println!(
            "[{}] {}{}: {} {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            place,
            check.value,
            bounds
        );
    }
    eprintln!("timings (s):");
    for (label, seconds) in &output.timings.0 {
        eprintln!("  {label}: {seconds:.3}");
    }
    println!(
        "{}: {}",
        output.report.scenario.name(),
        if output.report.pass { "PASS" } else { "FAIL" }
    );

    if output.report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_THRESHOLD_FAILURE)
    }
}

fn threaded_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build()
}

fn validate(config_path: PathBuf) -> ExitCode {
    match load(&config_path) {
        Ok(config) => {
            println!(
                "ok: scenario {} over {} grid point(s)",
                config.scenario.name(),
                config.params.p.values_descending().len()
            );
            ExitCode::SUCCESS
        }
        Err(code) => code,
    }
}

fn params(config_path: PathBuf) -> ExitCode {
    let config = match load(&config_path) {
        Ok(config) => config,
        Err(code) => return code,
    };
    for p in config.params.p.values_descending() {
        let params = match config.params_at(p) {
            Ok(params) => params,
            Err(err) => {
                eprintln!("config error: {err}");
                return ExitCode::from(EXIT_CONFIG_ERROR);
            }
        };
        let exps = params.exponents();
        println!("p = {p}");
        println!("  gamma = {}", exps.gamma);
        println!("  nu    = {}", exps.nu);
        println!("  tau   = {}", exps.tau);
        println!("  c_p   = {}", params.equilibrium(p));
        println!("  c0    = {}", params.equilibrium(0.0));
        if let Ok(ou) = params.ou_coefficients() {
            println!("  mu    = {}", ou.mu);
            println!("  sigma = {}", ou.sigma);
            println!("  ou stationary variance = {}", ou.stationary_variance);
        }
    }
    ExitCode::SUCCESS
}
