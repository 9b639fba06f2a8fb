use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuntzr_cli::{
    parse_spec, run_scenario, to_canonical_string, ScenarioKind, ScenarioSpec, SpecError,
};
use cuntzr_core::states::StateDescriptor;

/// Verifies identities of the Cuntz-algebra bialgebra and its state-induced
/// local R-matrices, emitting JSON reports.
#[derive(Parser)]
#[command(name = "cuntzr", version)]
struct Cli {
    /// Pass threshold for residual checks.
    #[arg(long, global = true, env = "CUNTZR_TOL")]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (the output is then no longer reproducible).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check (Δ⊗id)Δ = (id⊗Δ)Δ on all monomials of O_n up to a length.
    VerifyCoassoc {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        max_len: usize,
    },
    /// The ⊠ product of two states, checked against the ⋆ product.
    StateProduct {
        #[command(flatten)]
        states: States,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Build R(ω₁, ω₂) on a finite-depth span.
    BuildR {
        #[command(flatten)]
        states: States,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Write the matrix export here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Run one of the R-matrix verifications.
    Verify {
        #[arg(long, value_enum)]
        check: CheckKind,
        #[command(flatten)]
        states: States,
        /// Third state, for `ybe`.
        #[arg(long, value_parser = parse_state)]
        omega3: Option<StateDescriptor>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Reproduce the non-commuting counterexample.
    Counterexample,
    /// Run the default suite.
    All,
    /// Run a scenario file.
    Run { spec: PathBuf },
}

#[derive(Args)]
struct States {
    /// State as inline JSON or `@file`, e.g. '{"standard": 2}'.
    #[arg(long, value_parser = parse_state)]
    omega1: StateDescriptor,
    #[arg(long, value_parser = parse_state)]
    omega2: StateDescriptor,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Intertwine,
    Symmetry,
    Ybe,
}

fn read_arg(raw: &str) -> Result<String, String> {
    match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(raw.to_string()),
    }
}

fn parse_state(raw: &str) -> Result<StateDescriptor, String> {
    let text = read_arg(raw)?;
    serde_json::from_str(&text).map_err(|e| format!("invalid state {text:?}: {e}"))
}

fn build_spec(cli: &Cli) -> Result<ScenarioSpec, SpecError> {
    let with_states = |kind, states: &States| {
        let mut spec = ScenarioSpec::new(kind);
        spec.omega1 = Some(states.omega1.clone());
        spec.omega2 = Some(states.omega2.clone());
        spec
    };
    let mut spec = match &cli.command {
        Command::VerifyCoassoc { n, max_len } => {
            let mut spec = ScenarioSpec::new(ScenarioKind::Coassoc);
            spec.n = Some(*n);
            spec.max_len = *max_len;
            spec
        }
        Command::StateProduct { states, max_len } => {
            let mut spec = with_states(ScenarioKind::StateProduct, states);
            spec.max_len = *max_len;
            spec
        }
        Command::BuildR {
            states,
            depth,
            export,
        } => {
            let mut spec = with_states(ScenarioKind::BuildR, states);
            spec.depth = *depth;
            spec.export = export.clone();
            spec
        }
        Command::Verify {
            check,
            states,
            omega3,
            depth,
        } => {
            let kind = match check {
                CheckKind::Intertwine => ScenarioKind::Intertwine,
                CheckKind::Symmetry => ScenarioKind::Symmetry,
                CheckKind::Ybe => ScenarioKind::Ybe,
            };
            let mut spec = with_states(kind, states);
            spec.omega3 = omega3.clone();
            spec.depth = *depth;
            spec
        }
        Command::Counterexample => ScenarioSpec::new(ScenarioKind::Counterexample),
        Command::All => ScenarioSpec::new(ScenarioKind::All),
        Command::Run { spec } => {
            let text = fs::read_to_string(spec)?;
            parse_spec(&text)?
        }
    };
    // command-line flags override the scenario file
    if cli.tol.is_some() {
        spec.tol = cli.tol;
    }
    if cli.out.is_some() {
        spec.out = cli.out.clone();
    }
    Ok(spec)
}

fn run(cli: &Cli) -> Result<bool, SpecError> {
    let spec = build_spec(cli)?;
    let report = run_scenario(&spec)?;
    for (path, export) in &report.exports {
        fs::write(path, to_canonical_string(export))?;
    }
    let text = to_canonical_string(&report.to_json(cli.timings));
    match &spec.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(report.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("cuntzr: {e}");
            ExitCode::from(2)
        }
    }
}
