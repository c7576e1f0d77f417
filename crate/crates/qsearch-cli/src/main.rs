//! One binary, one subcommand per scenario. Everything interesting lives
//! in the library modules so tests can drive runs in-process; this file
//! only maps flags onto a config and prints the results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsearch_cli::config::{ConfigError, ExperimentConfig, Scenario};
use qsearch_cli::scenario::{run_scenario, RunFailure, ScenarioOutput};
use qsearch_cli::sweep::run_sweep;

#[derive(Parser)]
#[command(
    name = "qsearch",
    about = "Deterministic search-algorithm experiments on exact state vectors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude amplification with exact (or perturbed) inversions.
    Grover(RunArgs),
    /// Amplitude amplification under mismatched rotation angles.
    Mismatch(RunArgs),
    /// The phase-robust iterative operator.
    Iterative(RunArgs),
    /// The three-fold recursive construction.
    Recursive(RunArgs),
    /// Continuous-time search generators.
    Hamiltonian(RunArgs),
    /// Selective operators conjugated by fixed basis changes.
    Nondiagonal(RunArgs),
    /// Oracles acting on an attached workspace register.
    Workspace(RunArgs),
    /// Run the configured scenario across a list of parameter values.
    Sweep(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Grover(a)
            | Command::Mismatch(a)
            | Command::Iterative(a)
            | Command::Recursive(a)
            | Command::Hamiltonian(a)
            | Command::Nondiagonal(a)
            | Command::Workspace(a)
            | Command::Sweep(a) => a,
        }
    }

    fn scenario(&self) -> Option<Scenario> {
        match self {
            Command::Grover(_) => Some(Scenario::GroverBaseline),
            Command::Mismatch(a) => Some(if a.exploratory {
                Scenario::PerTargetMatching
            } else {
                Scenario::PhaseMismatch
            }),
            Command::Iterative(_) => Some(Scenario::Iterative),
            Command::Recursive(_) => Some(Scenario::Recursive),
            Command::Hamiltonian(_) => Some(Scenario::Hamiltonian),
            Command::Nondiagonal(_) => Some(Scenario::Nondiagonal),
            Command::Workspace(_) => Some(Scenario::Workspace),
            Command::Sweep(_) => None,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root of all randomness. Required: there is no wall-clock default.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the CSV here instead of only printing the summary.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n_qubits: Option<usize>,
    /// Comma-separated indices, or count:K for a seeded draw.
    #[arg(long)]
    targets: Option<String>,
    /// Target-side phase angle.
    #[arg(long)]
    phi: Option<f64>,
    /// Zero-side phase angle.
    #[arg(long)]
    varphi: Option<f64>,
    /// Target-side perturbation bound.
    #[arg(long)]
    delta_t: Option<f64>,
    /// Zero-side perturbation bound.
    #[arg(long)]
    delta_0: Option<f64>,
    /// Recursion depth.
    #[arg(long)]
    levels: Option<u32>,
    /// Opt into exploratory studies excluded from the stable surface.
    #[arg(long)]
    exploratory: bool,
}

fn build_config(cmd: &Command) -> Result<ExperimentConfig, RunFailure> {
    let args = cmd.args();
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                RunFailure::Config(ConfigError::new(
                    "config",
                    format!("cannot read {}: {e}", path.display()),
                ))
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(scenario) = cmd.scenario() {
        cfg.scenario = scenario;
    } else if cfg.sweep.is_none() {
        return Err(ConfigError::new(
            "sweep.parameter",
            "the sweep subcommand needs a config with a [sweep] block",
        )
        .into());
    }
    if cfg.scenario == Scenario::PerTargetMatching && !args.exploratory {
        return Err(ConfigError::new(
            "experiment.scenario",
            "per_target_matching is exploratory; pass --exploratory to run it",
        )
        .into());
    }
    if let Some(v) = args.seed {
        cfg.apply("experiment", "seed", &v.to_string())?;
    }
    if let Some(v) = args.n_qubits {
        cfg.apply("experiment", "n_qubits", &v.to_string())?;
    }
    if let Some(v) = &args.targets {
        cfg.apply("experiment", "targets", v)?;
    }
    if let Some(v) = args.phi {
        cfg.apply("experiment", "phi", &format!("{v:?}"))?;
    }
    if let Some(v) = args.varphi {
        cfg.apply("experiment", "varphi", &format!("{v:?}"))?;
    }
    if let Some(v) = args.delta_t {
        cfg.apply("noise", "delta_t", &format!("{v:?}"))?;
    }
    if let Some(v) = args.delta_0 {
        cfg.apply("noise", "delta_0", &format!("{v:?}"))?;
    }
    if let Some(v) = args.levels {
        cfg.apply("experiment", "levels", &v.to_string())?;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: &Command) -> Result<(), RunFailure> {
    let cfg = build_config(cmd)?;
    let is_sweep = matches!(cmd, Command::Sweep(_));
    let ScenarioOutput { doc, summary, warnings } = if is_sweep {
        run_sweep(&cfg)?
    } else {
        run_scenario(&cfg)?
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &cfg.out {
        doc.write(path)?;
        println!("csv = {}", path.display());
    }
    print!("{}", summary.render());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
