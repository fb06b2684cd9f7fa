use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slotsolve_cli::generate::{generate, GenParams};
use slotsolve_cli::{
    batch_exit_code, render, run_batch, run_document, Problem, RunOptions, EXIT_ERROR,
};

/// Exact solvers for equal-length scheduling, tall/small unit-job scheduling
/// and offline prefetching.
#[derive(Parser)]
#[command(name = "slotsolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equal-length jobs on parallel machines, minimum total completion time.
    Equal(SolveArgs),
    /// Unit small and tall jobs, feasibility and minimum tall completion time.
    Tallsmall(SolveArgs),
    /// Offline prefetching, minimum total stall time.
    Prefetch(SolveArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file, or a directory of `*.json` instances (needs --out).
    /// Reads standard input when neither --input nor --json is given.
    #[arg(long, conflicts_with = "json")]
    input: Option<PathBuf>,
    /// Instance JSON given inline.
    #[arg(long)]
    json: Option<String>,
    /// Check the solution with the independent verifier (default).
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    #[arg(long)]
    no_verify: bool,
    /// Compare the objective with the brute-force oracle (tiny instances).
    #[arg(long)]
    oracle_check: bool,
    /// Output file, or output directory in batch mode.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Problem,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    params: GenParams,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Equal(a) => solve(Problem::Equal, a),
        Command::Tallsmall(a) => solve(Problem::TallSmall, a),
        Command::Prefetch(a) => solve(Problem::Prefetch, a),
        Command::Gen(a) => gen(a),
    };
    ExitCode::from(code as u8)
}

fn fail(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_ERROR
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn solve(problem: Problem, args: SolveArgs) -> i32 {
    let opts = RunOptions {
        verify: !args.no_verify,
        oracle_check: args.oracle_check,
    };
    if let Some(dir) = args.input.as_ref().filter(|p| p.is_dir()) {
        let Some(out) = &args.out else {
            return fail("batch mode (--input DIR) needs --out DIR");
        };
        return match run_batch(problem, dir, out, opts) {
            Ok(entries) => {
                for e in &entries {
                    if let Some(msg) = &e.error {
                        eprintln!("{}: {msg}", e.input.display());
                    }
                }
                let summary = serde_json::json!({ "files": entries });
                print!("{}", render(&summary));
                batch_exit_code(&entries)
            }
            Err(e) => fail(e),
        };
    }

    let text = match (&args.input, &args.json) {
        (Some(path), _) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(format!("cannot read {}: {e}", path.display())),
        },
        (None, Some(inline)) => inline.clone(),
        (None, None) => {
            let mut buf = String::new();
            if let Err(e) = std::io::stdin().read_to_string(&mut buf) {
                return fail(format!("cannot read standard input: {e}"));
            }
            buf
        }
    };
    match run_document(problem, &text, opts) {
        Ok(outcome) => {
            if let Some(e) = &outcome.error {
                eprintln!("error: {e}");
            }
            match emit(&render(&outcome.document), args.out.as_ref()) {
                Ok(()) => outcome.exit_code,
                Err(e) => fail(e),
            }
        }
        Err(e) => fail(e),
    }
}

fn gen(args: GenArgs) -> i32 {
    match generate(args.kind, args.seed, &args.params) {
        Ok(text) => match emit(&text, args.out.as_ref()) {
            Ok(()) => 0,
            Err(e) => fail(e),
        },
        Err(e) => fail(e),
    }
}
