//! `qsynth`: synthesize, verify and inspect qudit circuits.
//!
//! Exit codes: 0 on success (or a passing verification), 2 when a
//! verification fails, 1 on any error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qsynth::{
    gate_stats, haar_random_unitary, serialize, synthesize, verify, ComplexMatrix, SynthOptions,
};

#[derive(Parser)]
#[command(
    name = "qsynth",
    version,
    about = "Exact gate synthesis for qubit and qutrit registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a circuit for a unitary matrix.
    Synth {
        /// Matrix JSON file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        radix: u8,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        wires: u32,
        /// Circuit file to write.
        #[arg(long)]
        out: PathBuf,
        /// Per-dimension tolerance; verification passes below `tol · N`.
        #[arg(long, env = "QSYNTH_TOL", default_value_t = qsynth::DEFAULT_TOL)]
        tol: f64,
        /// Lower single-control primitives to CNOT / CTRANS circuits.
        #[arg(long)]
        expand_lambda: bool,
        /// Rebuild the circuit's matrix and compare it with the input.
        #[arg(long)]
        verify: bool,
    },
    /// Compare a circuit with a target matrix, up to global phase.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, env = "QSYNTH_TOL", default_value_t = qsynth::DEFAULT_TOL)]
        tol: f64,
    },
    /// Write a Haar-random unitary.
    Random {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        dim: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print gate counts for a circuit file.
    Stats {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Done,
    Pass,
    Fail,
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ComplexMatrix::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_circuit(path: &Path) -> Result<qsynth::Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    qsynth::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn check_tol(tol: f64) -> Result<()> {
    anyhow::ensure!(
        tol.is_finite() && tol > 0.0,
        "tolerance must be positive, got {tol}"
    );
    Ok(())
}

fn report(residual: f64, threshold: f64, passed: bool) -> Outcome {
    println!("residual {residual:.3e} (threshold {threshold:.3e})");
    if passed {
        println!("PASS");
        Outcome::Pass
    } else {
        println!("FAIL");
        Outcome::Fail
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Synth {
            input,
            radix,
            wires,
            out,
            tol,
            expand_lambda,
            verify: check,
        } => {
            check_tol(tol)?;
            let m = read_matrix(&input)?;
            let opts = SynthOptions { expand_lambda, tol };
            let c = synthesize(&m, radix as usize, wires as usize, &opts)
                .with_context(|| format!("synthesizing {}", input.display()))?;
            write(&out, &serialize(&c))?;
            println!("wrote {} ({} gates)", out.display(), c.len());
            if !check {
                return Ok(Outcome::Done);
            }
            let threshold = tol * m.dim() as f64;
            let r = verify(&c, &m, threshold)?;
            Ok(report(r.residual, threshold, r.passed))
        }
        Command::Verify {
            circuit,
            target,
            tol,
        } => {
            check_tol(tol)?;
            let c = read_circuit(&circuit)?;
            let m = read_matrix(&target)?;
            let threshold = tol * m.dim() as f64;
            let r = verify(&c, &m, threshold)?;
            Ok(report(r.residual, threshold, r.passed))
        }
        Command::Random { dim, seed, out } => {
            let m = haar_random_unitary(dim as usize, seed);
            write(&out, &m.to_json())?;
            println!("wrote {}", out.display());
            Ok(Outcome::Done)
        }
        Command::Stats { circuit, json } => {
            let c = read_circuit(&circuit)?;
            let stats = gate_stats(&c);
            if json {
                println!("{}", serde_json::to_string_pretty(&stats)?);
            } else {
                println!("{stats}");
            }
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done | Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
