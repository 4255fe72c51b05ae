//! `ccft`: plan, cost, encode, decode, verify and benchmark partial CCFTs.

mod bench;
mod codec;
mod common;
mod plan;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::UsageError;

#[derive(Parser)]
#[command(name = "ccft", version, about = "Partial composite cyclotomic FFTs and Reed-Solomon decoding over GF(2^m)")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (and prune) a transform plan, print its cost, optionally save it.
    Plan(plan::PlanArgs),
    /// Compare partial CCFT, single-tier partial CFFT and Horner costs.
    Cost(plan::CostArgs),
    /// Systematically encode a message stream.
    Encode(codec::EncodeArgs),
    /// Decode a received stream block by block.
    Decode(codec::DecodeArgs),
    /// Run the oracle suites.
    Verify(verify::VerifyArgs),
    /// Measure syndrome and decode throughput for both backends.
    Bench(bench::BenchArgs),
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    /// Verification or decoding failed; the output has been reported.
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().expect("thread pool");
    }
    let result = match cli.command {
        Command::Plan(a) => plan::run_plan(a),
        Command::Cost(a) => plan::run_cost(a),
        Command::Encode(a) => codec::run_encode(a),
        Command::Decode(a) => codec::run_decode(a),
        Command::Verify(a) => verify::run(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
