//! `quadcert`: reads an instance document, runs the matching solver and
//! prints a verified result.
//!
//! Exit codes: 0 verified certificate or solution, 1 verified counterexample,
//! 2 inconclusive, 3 hypothesis or Slater violation, 4 input error.

mod document;
mod output;
mod run;

use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use document::{Document, Kind};
use output::{Exit, Format, Report};
use quadcert_core::pdcomb::DEFAULT_MAX_ITER;
use run::Settings;

#[derive(Parser, Debug)]
#[command(name = "quadcert", version, about = "Certificates for systems of quadratic forms")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Positive semidefiniteness margin (relative to the matrix scale).
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    /// Feasibility tolerance.
    #[arg(long, global = true)]
    tol_feas: Option<f64>,
    /// Relative duality gap tolerance.
    #[arg(long, global = true)]
    tol_gap: Option<f64>,
    /// Seed for every random choice; overrides the document seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Iteration budget per start of the positive definite combination search.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    out: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank and basis of the span of the matrices.
    Basis(Input),
    /// Positive definite linear combination search.
    Pdcomb(Input),
    /// Simplex combination PSD on a subspace, or a common negative direction.
    Yuan(Input),
    /// S-lemma multipliers or a counterexample.
    Slemma(Input),
    /// Homogeneous quadratic program with two two-sided constraints.
    Hqpb(Input),
    /// Generalized trust-region subproblem with a two-sided constraint.
    Gtrs(Input),
    /// Total least squares over a spherical shell.
    Trtls(Input),
    /// Second-order sufficiency at a KKT point.
    Soc(Input),
    /// Joint numerical range probes.
    Jnr(Input),
}

#[derive(Args, Debug)]
struct Input {
    /// Instance document, or `-` for standard input.
    path: PathBuf,
}

impl Command {
    fn split(&self) -> (Kind, &Input) {
        match self {
            Command::Basis(i) => (Kind::Basis, i),
            Command::Pdcomb(i) => (Kind::Pdcomb, i),
            Command::Yuan(i) => (Kind::Yuan, i),
            Command::Slemma(i) => (Kind::Slemma, i),
            Command::Hqpb(i) => (Kind::Hqpb, i),
            Command::Gtrs(i) => (Kind::Gtrs, i),
            Command::Trtls(i) => (Kind::Trtls, i),
            Command::Soc(i) => (Kind::Soc, i),
            Command::Jnr(i) => (Kind::Jnr, i),
        }
    }
}

fn read_input(path: &PathBuf) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn settings(doc: &Document, g: &GlobalArgs) -> Result<Settings, String> {
    let mut tol = doc.tolerances.unwrap_or_default();
    if let Some(v) = g.tol_psd {
        tol.tol_psd = v;
    }
    if let Some(v) = g.tol_feas {
        tol.tol_feas = v;
    }
    if let Some(v) = g.tol_gap {
        tol.tol_gap = v;
    }
    tol.validate().map_err(|e| e.to_string())?;
    if g.max_iter == 0 {
        return Err("--max-iter must be positive".into());
    }
    Ok(Settings {
        tol,
        seed: g.seed.or(doc.seed).unwrap_or(0),
        max_iter: g.max_iter,
    })
}

fn process(cli: &Cli) -> Report {
    let (kind, input) = cli.command.split();
    let text = match read_input(&input.path) {
        Ok(t) => t,
        Err(e) => {
            return Report::error("inputError", Exit::Input, format!("cannot read {}: {e}", input.path.display()))
        }
    };
    let doc = match Document::parse(&text, kind) {
        Ok(d) => d,
        Err(msg) => return Report::error("inputError", Exit::Input, msg),
    };
    if cli.global.out == Format::Csv && !run::csv_capable(&doc) {
        return Report::error(
            "inputError",
            Exit::Input,
            "CSV output is available for jnr sample and closureDemo probes only",
        );
    }
    let s = match settings(&doc, &cli.global) {
        Ok(s) => s,
        Err(msg) => return Report::error("inputError", Exit::Input, msg),
    };
    run::execute(kind, &doc, &s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Input as u8 } else { 0 });
        }
    };
    let start = Instant::now();
    let mut report = process(&cli);
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    let exit = report.exit_code();

    let mut stdout = io::stdout().lock();
    let written = match (&report.table, cli.global.out) {
        (Some(table), Format::Csv) => output::write_csv(table, &mut stdout).map_err(|e| e.to_string()),
        _ => output::write_json(&report, &mut stdout).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("quadcert: failed to write output: {e}");
        return ExitCode::from(Exit::Input as u8);
    }
    if cli.global.out == Format::Csv && exit != Exit::Verified {
        eprintln!("quadcert: {}", report.outcome);
    }
    ExitCode::from(exit as u8)
}
