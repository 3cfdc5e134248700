//! Command line, configuration, on-disk cache and report formats for
//! `halfint-core`.
//!
//! Exit codes: 0 success, 1 failed verification or computation error,
//! 2 usage error.

pub mod cache;
pub mod cli;
pub mod codec;
pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::Cli;
use crate::config::{ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] halfint_core::Error),
    #[error(transparent)]
    Cache(#[from] cache::CacheError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Defaults, then the config file, then the cache-directory variable, then flags.
pub fn resolve_config(cli: &Cli, env_cache_dir: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    if let Some(dir) = env_cache_dir.filter(|d| !d.as_os_str().is_empty()) {
        cfg.cache_dir = Some(dir);
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    if cli.no_cache {
        cfg.cache_dir = None;
    }
    if let Some(f) = cli.format {
        cfg.format = f.into();
    }
    Ok(cfg)
}

/// Parse, run and write the report; returns the exit code.
pub fn run_with<I, T>(
    args: I,
    env_cache_dir: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(&cli, env_cache_dir, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(
    cli: &Cli,
    env_cache_dir: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = resolve_config(cli, env_cache_dir)?;
    let ctx = commands::Context::new(cfg)?;
    let report = commands::run(&ctx, &cli.command)?;
    let text = report.render(cli.command.name(), &cli.command.args_json(), &ctx.cfg)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    for f in &report.failures {
        writeln!(
            stderr,
            "verification failed: {}: {} vs {}",
            f.identity, f.lhs, f.rhs
        )?;
    }
    Ok(if report.passed() { 0 } else { 1 })
}

/// Entry point for the binary.
pub fn run_from_env() -> i32 {
    let env_dir = std::env::var_os(config::CACHE_DIR_ENV).map(PathBuf::from);
    run_with(
        std::env::args_os(),
        env_dir,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
