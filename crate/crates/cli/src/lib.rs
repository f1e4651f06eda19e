//! Command-line front end. `run` is the whole program minus process exit,
//! so tests can drive it in-process.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use masstransport::{Process, ProcessSpec};

use crate::config::{Cli, Command, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args`, runs the subcommand and returns the exit code.
pub fn run<I, T, W, E>(args: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let process = match ProcessSpec::from_path(&cfg.spec).and_then(Process::new) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", cfg.spec.display());
            return EXIT_USAGE;
        }
    };
    let outcome = match cfg.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&process, &cfg)),
            Err(e) => {
                let _ = writeln!(stderr, "error: --threads: {e}");
                return EXIT_USAGE;
            }
        },
        None => dispatch(&process, &cfg),
    };
    let rendered = match outcome {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, rendered.body.as_bytes())
            .map_err(|e| format!("--out {}: {e}", path.display())),
        None => stdout.write_all(rendered.body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    let _ = stderr.write_all(rendered.notes.as_bytes());
    if rendered.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn dispatch(process: &Process, cfg: &RunConfig) -> commands::CommandResult {
    match cfg.command {
        Command::Sample => commands::sample(process, cfg),
        Command::Transport => commands::transport(process, cfg),
        Command::VerifyIdentity => commands::verify_identity(process, cfg),
        Command::VerifyMaximal => commands::verify_maximal(process, cfg),
        Command::Survival => commands::survival(process, cfg),
        Command::Birkhoff => commands::birkhoff(process, cfg),
    }
}
