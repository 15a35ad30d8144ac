//! `vodcap`: plan, simulate and validate VOD capacity scenarios.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vodcap::planner::{self, FailureKind, OutputFormat, Scenario, ScenarioError};
use vodcap::validation;

mod exit {
    pub const PARSE: u8 = 3;
    pub const VALIDATION: u8 = 4;
    pub const INFEASIBLE: u8 = 5;
    pub const DISAGREEMENT: u8 = 6;
    pub const IO: u8 = 7;
    pub const SIMULATION: u8 = 8;
    pub const SELF_CHECK: u8 = 9;
}

#[derive(Parser)]
#[command(
    name = "vodcap",
    version,
    about = "Erlang-B capacity planning for video-on-demand networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form ports and bandwidth for every sweep point.
    Plan(RunArgs),
    /// Closed forms plus a loss-system simulation at the provisioned ports.
    Simulate(SimArgs),
    /// Run the built-in invariant and oracle checks.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skip the simulation check.
        #[arg(long)]
        no_sim: bool,
    },
    /// List bundled scenarios, or print one.
    Scenarios {
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Report,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    scenario: Option<PathBuf>,
    /// Name of a bundled scenario instead of a file.
    #[arg(long)]
    builtin: Option<String>,
    /// Output path; standard output when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for sweep points.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Overrides the scenario's simulation seed.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,
    /// Overrides the scenario's replication count.
    #[arg(long)]
    replications: Option<u64>,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn scenario_failure(e: ScenarioError) -> Failure {
    let code = match e {
        ScenarioError::Parse { .. } => exit::PARSE,
        ScenarioError::Validation { .. } | ScenarioError::Unit { .. } => exit::VALIDATION,
        ScenarioError::Io { .. } => exit::IO,
    };
    fail(code, e.to_string())
}

fn load(args: &RunArgs) -> Result<Scenario, Failure> {
    match (&args.scenario, &args.builtin) {
        (Some(path), _) => planner::load_scenario(path).map_err(scenario_failure),
        (None, Some(name)) => planner::bundled_scenario(name)
            .ok_or_else(|| {
                fail(
                    exit::VALIDATION,
                    format!("no bundled scenario named `{name}`"),
                )
            })?
            .map_err(scenario_failure),
        (None, None) => Err(fail(
            exit::VALIDATION,
            "--scenario or --builtin is required",
        )),
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let res = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().write_all(text.as_bytes()),
    };
    res.map_err(|e| fail(exit::IO, format!("writing output: {e}")))
}

fn run_scenario(args: &RunArgs, scenario: Scenario, with_sim: bool) -> Result<(), Failure> {
    let result = planner::run_sweep(&scenario, with_sim, args.workers)
        .map_err(|e| fail(exit::IO, e.to_string()))?;
    let format = match args.format {
        Format::Csv => OutputFormat::Csv,
        Format::Report => OutputFormat::Report,
    };
    write_output(&args.out, &planner::render(&result, format))?;

    let failures: Vec<_> = result.failures().collect();
    if let Some(f) = failures.iter().find(|f| f.kind == FailureKind::Infeasible) {
        return Err(fail(
            exit::INFEASIBLE,
            format!(
                "{} row(s) failed; first infeasible: {}",
                failures.len(),
                f.message
            ),
        ));
    }
    if let Some(f) = failures.iter().find(|f| f.kind == FailureKind::Simulation) {
        return Err(fail(exit::SIMULATION, f.message.clone()));
    }
    if let Some(f) = failures.first() {
        return Err(fail(
            exit::VALIDATION,
            format!("{} row(s) failed: {}", failures.len(), f.message),
        ));
    }
    let disagreements = result.disagreements();
    if disagreements > 0 {
        return Err(fail(
            exit::DISAGREEMENT,
            format!("{disagreements} row(s) exceed the blocking target beyond tolerance"),
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Plan(args) => {
            let scenario = load(&args)?;
            run_scenario(&args, scenario, false)
        }
        Command::Simulate(sim) => {
            let mut scenario = load(&sim.run)?;
            if let Some(seed) = sim.seed {
                scenario.simulation.seed = seed;
            }
            if let Some(r) = sim.replications {
                if r == 0 {
                    return Err(fail(exit::VALIDATION, "--replications must be at least 1"));
                }
                scenario.simulation.replications = r;
            }
            run_scenario(&sim.run, scenario, true)
        }
        Command::Validate { seed, no_sim } => {
            let summary = validation::run_all(seed, !no_sim);
            let mut out = String::new();
            for c in &summary.checks {
                out.push_str(&format!(
                    "[{}] {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            out.push_str("\nZipf approximation quality, k in [N/100, N]:\n");
            for line in &summary.zipf_table {
                out.push_str(&format!("  {line}\n"));
            }
            write_output(&None, &out)?;
            if summary.passed() {
                Ok(())
            } else {
                Err(fail(exit::SELF_CHECK, "one or more checks failed"))
            }
        }
        Command::Scenarios { show } => match show {
            None => {
                let names: String = planner::BUNDLED
                    .iter()
                    .map(|(n, _)| format!("{n}\n"))
                    .collect();
                write_output(&None, &names)
            }
            Some(name) => {
                let src = planner::BUNDLED
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| {
                        fail(
                            exit::VALIDATION,
                            format!("no bundled scenario named `{name}`"),
                        )
                    })?;
                write_output(&None, src)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("vodcap: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
