use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use integrasym::cli::{emit_report, load_system, run_pipeline, Command, RunOptions};

#[derive(Parser)]
#[command(
    name = "integrasym",
    version,
    about = "Analyze completely integrable ODE systems and their symmetries"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Conservation, independence, realization and admissibility checks.
    Check(Common),
    /// Build the linearizing chart and check the linearization identity.
    Linearize(Common),
    /// Certify a symmetry for every kernel element.
    Symmetrize(Common),
    /// Certificates plus the orbit-permutation check for each valid one.
    DemoFlow(Common),
    /// Every stage in order, stopping at the first that does not pass.
    All(Common),
}

#[derive(Args)]
struct Common {
    /// System definition (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value for `{name}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Check(a) => (Command::Check, a),
        Sub::Linearize(a) => (Command::Linearize, a),
        Sub::Symmetrize(a) => (Command::Symmetrize, a),
        Sub::DemoFlow(a) => (Command::DemoFlow, a),
        Sub::All(a) => (Command::All, a),
    };
    let options = RunOptions {
        seed: args.seed,
        samples: args.samples,
        tolerances: args.tol.into_iter().collect::<BTreeMap<_, _>>(),
    };
    let mut doc = match load_system(&args.input) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = doc.apply_options(&options) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let report = run_pipeline(&doc, command);
    if let Err(e) = emit_report(&report, args.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    for (stage, verdict) in &report.verdicts {
        eprintln!("{stage}: {verdict}");
    }
    ExitCode::from(report.exit_code() as u8)
}
