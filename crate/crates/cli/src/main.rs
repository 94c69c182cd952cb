mod cmd;
mod error;
mod input;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tracing::Level;

use spokeud_core::backend::BackendMode;
use spokeud_core::config::ToolkitConfig;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "spokeud", version, about = "Spoken code-switched UD parsing and evaluation")]
struct Cli {
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Repeat for more log output on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the staged parser over a manifest.
    Parse(cmd::parse::ParseArgs),
    /// Score system parses against gold trees.
    Eval(cmd::eval::EvalArgs),
    /// Check trees for structural problems.
    Validate(cmd::validate::ValidateArgs),
    /// Rebuild tables from per-sentence scores.
    Report(cmd::report::ReportArgs),
    /// Record a replay store from scripted stage replies.
    #[command(hide = true)]
    RecordScript(cmd::parse::RecordArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Live,
    Record,
    Replay,
    Stub,
}

impl From<ModeArg> for BackendMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Live => BackendMode::Live,
            ModeArg::Record => BackendMode::Record,
            ModeArg::Replay => BackendMode::Replay,
            ModeArg::Stub => BackendMode::Stub,
        }
    }
}

/// Flags that override the `[backend]` and `[pipeline]` sections.
#[derive(Debug, Clone, Args)]
pub struct BackendArgs {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    replay_dir: Option<PathBuf>,
    #[arg(long)]
    stub_table: Option<PathBuf>,
    #[arg(long)]
    base_url: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Name of the environment variable that holds the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

impl BackendArgs {
    pub fn apply(&self, cfg: &mut ToolkitConfig) {
        if let Some(m) = self.mode {
            cfg.backend.mode = m.into();
        }
        if let Some(d) = &self.replay_dir {
            cfg.backend.replay_dir = Some(d.clone());
        }
        if let Some(t) = &self.stub_table {
            cfg.backend.stub_table = Some(t.clone());
        }
        if let Some(u) = &self.base_url {
            cfg.backend.base_url = Some(u.clone());
        }
        if let Some(m) = &self.model {
            cfg.backend.model_name = m.clone();
        }
        if let Some(v) = &self.api_key_env {
            cfg.backend.api_key_env = v.clone();
        }
        if let Some(w) = self.workers {
            cfg.pipeline.workers = w;
        }
    }
}

pub fn load_config(path: Option<&PathBuf>) -> Result<ToolkitConfig, CliError> {
    match path {
        Some(p) => Ok(ToolkitConfig::load(p)?),
        None => Ok(ToolkitConfig::default()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => Level::WARN,
        1 => Level::INFO,
        2 => Level::DEBUG,
        _ => Level::TRACE,
    };
    tracing_subscriber::fmt()
        .with_max_level(level)
        .with_writer(std::io::stderr)
        .with_target(false)
        .with_ansi(std::io::stderr().is_terminal())
        .init();

    let config = cli.config.as_ref();
    let result = match &cli.command {
        Command::Parse(a) => cmd::parse::run(a, config),
        Command::Eval(a) => cmd::eval::run(a, config),
        Command::Validate(a) => cmd::validate::run(a),
        Command::Report(a) => cmd::report::run(a),
        Command::RecordScript(a) => cmd::parse::record(a, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
