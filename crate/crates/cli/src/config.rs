use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Environment variable holding the default worker-thread cap.
pub const THREADS_ENV: &str = "MASSTRANSPORT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "masstransport",
    version,
    about = "Records, mass transport and ergodic checks on stationary sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Process-spec JSON file.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Monte Carlo trials.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,

    /// Largest n (identity), N (maximal, survival).
    #[arg(long, global = true, default_value_t = 8)]
    pub horizon: u64,

    /// Trajectory length for `birkhoff`.
    #[arg(long = "n-max", global = true, default_value_t = 1024)]
    pub n_max: u64,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Mc)]
    pub mode: ModeArg,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker-thread cap. Results do not depend on it.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Tolerance of the A_epsilon surrogate in `birkhoff`.
    #[arg(long, global = true, default_value_t = 0.1)]
    pub epsilon: f64,

    #[arg(long, global = true, default_value_t = -4, allow_hyphen_values = true)]
    pub lo: i64,

    #[arg(long, global = true, default_value_t = 4, allow_hyphen_values = true)]
    pub hi: i64,

    /// Normal quantile for confidence intervals.
    #[arg(long, global = true, default_value_t = masstransport::stats::DEFAULT_Z)]
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dump sampled windows.
    Sample,
    /// Dump records, ladder epochs and mass rows of one sampled window.
    Transport,
    /// Check E[M(0,n)] = E[M(-n,0)] for n = 1..horizon.
    VerifyIdentity,
    /// Check E[X_1; S_n <= 0 for some n <= N] <= 0.
    VerifyMaximal,
    /// Estimate P(S_n > 0 for all n <= N).
    Survival,
    /// Ergodic averages against their conditional-mean limits.
    Birkhoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Mc,
    Both,
}

impl ModeArg {
    pub fn exact(self) -> bool {
        matches!(self, ModeArg::Exact | ModeArg::Both)
    }

    pub fn mc(self) -> bool {
        matches!(self, ModeArg::Mc | ModeArg::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub spec: PathBuf,
    pub seed: u64,
    pub trials: u64,
    pub horizon: u64,
    pub n_max: u64,
    pub mode: ModeArg,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub epsilon: f64,
    pub lo: i64,
    pub hi: i64,
    pub z: f64,
}

impl RunConfig {
    /// Checks flag combinations that clap cannot express. Errors name the flag.
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let spec = cli.spec.ok_or("--spec is required")?;
        let uses_mc = match cli.command {
            Command::VerifyIdentity | Command::VerifyMaximal | Command::Survival => cli.mode.mc(),
            Command::Birkhoff => true,
            Command::Sample | Command::Transport => false,
        };
        if uses_mc && cli.trials < 2 {
            return Err("--trials must be at least 2 for Monte Carlo".into());
        }
        if cli.command == Command::Sample && cli.trials == 0 {
            return Err("--trials must be positive".into());
        }
        if cli.horizon == 0 {
            return Err("--horizon must be positive".into());
        }
        if cli.n_max == 0 {
            return Err("--n-max must be positive".into());
        }
        if cli.threads == Some(0) {
            return Err("--threads must be positive".into());
        }
        if !(cli.z.is_finite() && cli.z > 0.0) {
            return Err("--z must be positive".into());
        }
        if !(cli.epsilon.is_finite() && cli.epsilon > 0.0) {
            return Err("--epsilon must be positive".into());
        }
        if cli.lo > 0 || cli.hi < 0 || cli.hi - cli.lo < 1 {
            return Err("--lo/--hi need lo <= 0 <= hi and hi - lo >= 1".into());
        }
        Ok(RunConfig {
            command: cli.command,
            spec,
            seed: cli.seed,
            trials: cli.trials,
            horizon: cli.horizon,
            n_max: cli.n_max,
            mode: cli.mode,
            format: cli.format,
            out: cli.out,
            threads: cli.threads,
            epsilon: cli.epsilon,
            lo: cli.lo,
            hi: cli.hi,
            z: cli.z,
        })
    }
}
