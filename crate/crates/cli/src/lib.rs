//! `chernoff`: runs Chernoff-approximation evolutions, property suites,
//! convergence sweeps and solver comparisons from a TOML config, writing
//! CSV tables, wavefunction dumps and a JSON manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod output;
pub mod setup;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use chernoff_core::operators::Mutation;
use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;
use output::RunOutputs;
use setup::Setup;

pub const SEED_ENV: &str = "CHERNOFF_SEED";
pub const DEFAULT_OUT: &str = "chernoff-out";

#[derive(Debug, Parser)]
#[command(name = "chernoff", version, about = "Chernoff-approximation Schrödinger experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate the initial state to time t and write dumps and a density profile.
    Evolve(CommonArgs),
    /// Run the property suite; exit 3 if any property fails.
    Verify(CommonArgs),
    /// Error-vs-n and error-vs-j tables against a reference solution.
    Converge(CommonArgs),
    /// Chernoff, split-step and dense solvers side by side (multi-d family only).
    Compare(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. `--set grid.n=128`; repeatable, applied in order.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for sweeps and property checks.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use t^(1/k) instead of t^(1/2k) in the Chernoff family, as a control.
    #[arg(long)]
    inject_broken_shift: bool,
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Evolve(a) => ("evolve", a),
            Command::Verify(a) => ("verify", a),
            Command::Converge(a) => ("converge", a),
            Command::Compare(a) => ("compare", a),
        }
    }
}

/// Loads the config with `CHERNOFF_SEED` applied below the `--set` overrides.
pub fn load_config(path: &Path, overrides: &[String], env_seed: Option<&str>) -> Result<RunConfig, CliError> {
    let mut all = Vec::new();
    if let Some(raw) = env_seed {
        let seed: u64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be a non-negative integer, got `{raw}`")))?;
        all.push(format!("seed={seed}"));
    }
    all.extend(overrides.iter().cloned());
    RunConfig::load(path, &all)
}

/// Runs one command and writes its outputs and manifest into `out_dir`.
pub fn execute(command: &str, cfg: &RunConfig, out_dir: &Path, mutation: Mutation) -> Result<RunOutputs, CliError> {
    let mut outputs = RunOutputs::create(out_dir, command)?;
    let result = Setup::build(cfg).and_then(|setup| match command {
        "evolve" => commands::evolve(cfg, &setup, mutation, &mut outputs),
        "verify" => commands::verify(cfg, &setup, mutation, &mut outputs),
        "converge" => commands::converge(cfg, &setup, mutation, &mut outputs),
        "compare" => commands::compare(cfg, &setup, mutation, &mut outputs),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    });
    outputs.finish(cfg, &result)?;
    result.map(|()| outputs)
}

/// Full command line in, process exit code out.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (name, args) = cli.command.parts();
    match run_parsed(name, args) {
        Ok(dir) => {
            println!("{name}: ok ({})", dir.display());
            0
        }
        Err(e) => {
            eprintln!("chernoff {name}: {e}");
            e.exit_code()
        }
    }
}

fn run_parsed(name: &str, args: &CommonArgs) -> Result<PathBuf, CliError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = load_config(&args.config, &args.set, env_seed.as_deref())?;
    let out_dir = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mutation = if args.inject_broken_shift { Mutation::WrongRootExponent } else { Mutation::None };
    let mut pool = rayon::ThreadPoolBuilder::new();
    match args.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => pool = pool.num_threads(j),
        None => {}
    }
    let pool = pool.build().map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| execute(name, &cfg, &out_dir, mutation))?;
    Ok(out_dir)
}
