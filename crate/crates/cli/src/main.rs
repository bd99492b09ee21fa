//! `qbch`: build codes, synthesize and verify protocols, simulate and tabulate thresholds.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }
}

impl From<qbch::Error> for CliError {
    fn from(e: qbch::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(format!("I/O error: {e}"))
    }
}

/// 0 on success or pass, 1 when a verdict fails.
pub enum Outcome {
    Success,
    VerdictFail,
}

#[derive(Parser)]
#[command(name = "qbch", version, about = "Quantum BCH codes and symmetry-optimized distillation")]
struct Cli {
    /// TOML config file, or a JSON sidecar of an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $QBCH_OUT_DIR, else ./qbch-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CodeArgs {
    /// Code length 2^m - 1.
    #[arg(long)]
    n: Option<usize>,
    /// Designed distance.
    #[arg(long)]
    delta: Option<usize>,
    /// Code descriptor JSON instead of n/delta.
    #[arg(long)]
    code: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ProtocolArgs {
    /// `synth` or a circuit file.
    #[arg(long)]
    circuit: Option<String>,
    /// Protocol descriptor JSON.
    #[arg(long)]
    protocol: Option<PathBuf>,
    /// `m1,m2` (default t+1,t+1).
    #[arg(long)]
    shape: Option<String>,
    /// Per-block automorphisms, groups separated by `;`, members by `,`:
    /// `I,R^14;R^28,R^17 F^4`. Default: all identity.
    #[arg(long)]
    perms: Option<String>,
    /// `zero` or `plus`.
    #[arg(long)]
    target: Option<String>,
    /// Check only the stabilizer parities, not logical ones, at acceptance.
    #[arg(long)]
    no_logical_checks: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a quantum BCH code and write its descriptor.
    BuildCode {
        #[command(flatten)]
        code: CodeArgs,
        /// Also compute weight enumerators and the true distance.
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        enum_budget: Option<usize>,
    },
    /// Synthesize the non-FT block preparation circuit.
    Synth {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Check a distillation protocol for strict fault tolerance.
    VerifyFt {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Only preparation faults, no network faults.
        #[arg(long)]
        prep_only: bool,
        #[arg(long)]
        max_w: Option<usize>,
        #[arg(long)]
        memory_budget: Option<u128>,
    },
    /// Search permutation assignments that pass the strict check.
    SearchPerms {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Candidate automorphisms, `,`-separated; default all of C_n ⋊ F_m.
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        memory_budget: Option<u128>,
    },
    /// Monte Carlo sweep over a noise grid.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Comma-separated physical error rates.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        w_max: Option<usize>,
        /// Also run the fixed-fault-count estimator up to this many faults.
        #[arg(long)]
        stratified_k: Option<usize>,
    },
    /// Scaling thresholds for every dual-containing BCH code.
    Threshold {
        /// Largest field degree (n = 2^m - 1).
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        enum_budget: Option<usize>,
        /// Override α for every level, as a rational like `8/15`.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
    },
}

fn code_settings(s: &mut Settings, c: CodeArgs) {
    s.n = c.n;
    s.delta = c.delta;
    s.code = c.code;
}

fn protocol_settings(s: &mut Settings, p: ProtocolArgs) {
    s.circuit = p.circuit;
    s.protocol = p.protocol;
    s.shape = p.shape;
    s.perms = p.perms;
    s.target = p.target;
    s.logical_checks = p.no_logical_checks.then_some(false);
}

fn flag_settings(cli: Cli) -> (Option<PathBuf>, Settings) {
    let mut s = Settings {
        out_dir: cli.out_dir,
        threads: cli.threads,
        ..Default::default()
    };
    let name = match cli.command {
        Command::BuildCode { code, enumerate, enum_budget } => {
            code_settings(&mut s, code);
            s.enumerate = enumerate.then_some(true);
            s.enum_budget = enum_budget;
            "build-code"
        }
        Command::Synth { code } => {
            code_settings(&mut s, code);
            "synth"
        }
        Command::VerifyFt { code, protocol, prep_only, max_w, memory_budget } => {
            code_settings(&mut s, code);
            protocol_settings(&mut s, protocol);
            s.prep_only = prep_only.then_some(true);
            s.max_w = max_w;
            s.memory_budget = memory_budget;
            "verify-ft"
        }
        Command::SearchPerms { code, protocol, generators, budget, memory_budget } => {
            code_settings(&mut s, code);
            protocol_settings(&mut s, protocol);
            s.generators = generators;
            s.budget = budget;
            s.memory_budget = memory_budget;
            "search-perms"
        }
        Command::Simulate { code, protocol, grid, shots, seed, w_max, stratified_k } => {
            code_settings(&mut s, code);
            protocol_settings(&mut s, protocol);
            s.grid = grid;
            s.shots = shots;
            s.seed = seed;
            s.w_max = w_max;
            s.stratified_k = stratified_k;
            "simulate"
        }
        Command::Threshold { m_max, enum_budget, alpha, beta } => {
            s.m_max = m_max;
            s.enum_budget = enum_budget;
            s.alpha = alpha;
            s.beta = beta;
            "threshold"
        }
    };
    s.command = Some(name.to_string());
    (cli.config, s)
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (config, flags) = flag_settings(cli);
    let base = match &config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let (Some(a), Some(b)) = (&base.command, &flags.command) {
        if a != b {
            return Err(CliError::usage(format!("config was written for `{a}`, not `{b}`")));
        }
    }
    let settings = base.overlay(&flags);
    if let Some(t) = settings.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    commands::dispatch(settings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerdictFail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
