//! Library side of the `slotsolve` command: solving one instance document,
//! batch runs over a directory, and the seeded instance generator.

pub mod generate;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use slotsolve::equal::{self, EqualInstance};
use slotsolve::graphlp::DiffSystem;
use slotsolve::oracle::{self, OracleResult};
use slotsolve::prefetch::{self, PrefetchInstance};
use slotsolve::tallsmall::{self, TallSmallInstance};
use slotsolve::{Certificate, FORMAT_VERSION};

pub const EXIT_OPTIMAL: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Equal,
    #[value(name = "tallsmall")]
    #[serde(rename = "tallsmall")]
    TallSmall,
    Prefetch,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Equal => "equal",
            Problem::TallSmall => "tallsmall",
            Problem::Prefetch => "prefetch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub verify: bool,
    pub oracle_check: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            verify: true,
            oracle_check: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse {problem} instance: {source}")]
    Parse {
        problem: &'static str,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Io(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("solver objective {solver:?} disagrees with the oracle's {oracle:?}")]
    OracleDisagrees {
        solver: Option<i64>,
        oracle: Option<i64>,
    },
}

/// A finished run: the output document and the process exit code. Runs that
/// produce a document but fail a check carry the error alongside it.
#[derive(Debug)]
pub struct Outcome {
    pub document: Value,
    pub exit_code: i32,
    pub error: Option<CliError>,
}

struct Solved {
    objective: Option<i64>,
    solution: Option<Value>,
    certificate: Option<Value>,
    /// `Err` carries the first verifier complaint.
    verification: Result<(), String>,
}

/// Parses and solves one instance document.
pub fn run_document(problem: Problem, text: &str, opts: RunOptions) -> Result<Outcome, CliError> {
    let parse_err = |source| CliError::Parse {
        problem: problem.name(),
        source,
    };
    let (solved, oracle) = match problem {
        Problem::Equal => {
            let inst: EqualInstance = serde_json::from_str(text).map_err(parse_err)?;
            let solved = solve_equal(&inst)?;
            let oracle = opts
                .oracle_check
                .then(|| oracle::brute_equal(&inst).map(|r| r.objective()));
            (solved, oracle)
        }
        Problem::TallSmall => {
            let inst: TallSmallInstance = serde_json::from_str(text).map_err(parse_err)?;
            let solved = solve_tallsmall(&inst)?;
            let oracle = opts
                .oracle_check
                .then(|| oracle::brute_tallsmall(&inst).map(|r| r.objective()));
            (solved, oracle)
        }
        Problem::Prefetch => {
            let inst: PrefetchInstance = serde_json::from_str(text).map_err(parse_err)?;
            let solved = solve_prefetch(&inst)?;
            let oracle = opts
                .oracle_check
                .then(|| oracle::brute_prefetch(&inst).map(|r| r.objective()));
            (solved, oracle)
        }
    };

    let status = if solved.objective.is_some() {
        "optimal"
    } else {
        "infeasible"
    };
    let mut doc = json!({
        "format": FORMAT_VERSION,
        "problem": problem.name(),
        "status": status,
    });
    let obj = doc.as_object_mut().unwrap();
    if let Some(v) = solved.objective {
        obj.insert("objective".into(), v.into());
    }
    if let Some(s) = solved.solution {
        obj.insert("solution".into(), s);
    }
    if let Some(c) = solved.certificate {
        obj.insert("certificate".into(), c);
    }
    let mut error = None;
    let verified = opts.verify && solved.verification.is_ok();
    if opts.verify {
        if let Err(msg) = solved.verification {
            error = Some(CliError::Verification(msg));
        }
    }
    obj.insert("verified".into(), verified.into());
    match oracle {
        Some(Ok(expected)) => {
            let agree = expected == solved.objective;
            obj.insert("oracle_agreement".into(), agree.into());
            if !agree && error.is_none() {
                error = Some(CliError::OracleDisagrees {
                    solver: solved.objective,
                    oracle: expected,
                });
            }
        }
        Some(Err(guard)) => {
            eprintln!("oracle check skipped: {guard}");
        }
        None => {}
    }
    let exit_code = match (&error, solved.objective) {
        (Some(_), _) => EXIT_ERROR,
        (None, Some(_)) => EXIT_OPTIMAL,
        (None, None) => EXIT_INFEASIBLE,
    };
    Ok(Outcome {
        document: doc,
        exit_code,
        error,
    })
}

fn solve_equal(inst: &EqualInstance) -> Result<Solved, CliError> {
    match equal::solve(inst) {
        Ok(sol) => {
            let assignments: Vec<Value> = sol
                .schedule
                .assignments
                .iter()
                .enumerate()
                .map(|(job, a)| json!({"job": job, "machine": a.machine, "start": a.start}))
                .collect();
            let verification = match equal::verify_equal(inst, &sol.schedule) {
                Ok(v) if v == sol.total_completion => Ok(()),
                Ok(v) => Err(format!(
                    "schedule completes at {v}, solver reported {}",
                    sol.total_completion
                )),
                Err(bad) => Err(bad[0].to_string()),
            };
            Ok(Solved {
                objective: Some(sol.total_completion),
                solution: Some(json!({
                    "total_completion": sol.total_completion,
                    "assignments": assignments,
                })),
                certificate: None,
                verification,
            })
        }
        Err(equal::SolveError::Infeasible(cert)) => {
            let (_, system) = equal::build_system(inst);
            Ok(infeasible(
                &cert,
                Some(&system).filter(|sys| cert.cycle.verify(sys)),
            ))
        }
        Err(e) => Err(CliError::Solver(e.to_string())),
    }
}

fn solve_tallsmall(inst: &TallSmallInstance) -> Result<Solved, CliError> {
    match tallsmall::solve(inst) {
        Ok(sol) => {
            let tall: Vec<Value> = sol
                .schedule
                .tall
                .iter()
                .enumerate()
                .map(|(job, slot)| json!({"job": job, "slot": slot}))
                .collect();
            let small: Vec<Value> = sol
                .schedule
                .small
                .iter()
                .enumerate()
                .map(|(job, p)| json!({"job": job, "machine": p.machine, "slot": p.slot}))
                .collect();
            let verification = match tallsmall::verify_tallsmall(inst, &sol.schedule) {
                Ok(v) if v == sol.tall_completion => Ok(()),
                Ok(v) => Err(format!(
                    "tall jobs complete at {v}, solver reported {}",
                    sol.tall_completion
                )),
                Err(bad) => Err(bad[0].to_string()),
            };
            Ok(Solved {
                objective: Some(sol.tall_completion),
                solution: Some(json!({
                    "tall_completion": sol.tall_completion,
                    "tall": tall,
                    "small": small,
                    "idle_tall_slots": sol.idle_tall_slots,
                })),
                certificate: None,
                verification,
            })
        }
        Err(tallsmall::SolveError::Infeasible(cert)) => {
            // the cycle lives in the system of one independent part
            let system = tallsmall::normalize(inst)
                .iter()
                .map(|p| tallsmall::build_system(&p.instance))
                .find(|sys| cert.cycle.verify(sys));
            Ok(infeasible(&cert, system.as_ref()))
        }
        Err(e) => Err(CliError::Solver(e.to_string())),
    }
}

/// `system` is the system the certificate's cycle checks out against, if any.
fn infeasible(cert: &Certificate, system: Option<&DiffSystem>) -> Solved {
    let bounds: Vec<i64> = match system {
        Some(sys) => cert
            .cycle
            .constraints
            .iter()
            .map(|&i| sys.constraints()[i].bound)
            .collect(),
        None => Vec::new(),
    };
    Solved {
        objective: None,
        solution: None,
        certificate: Some(json!({
            "nodes": cert.labels,
            "bounds": bounds,
            "weight": cert.cycle.weight,
        })),
        verification: system
            .map(|_| ())
            .ok_or_else(|| "certificate is not a negative cycle of the system".to_string()),
    }
}

fn solve_prefetch(inst: &PrefetchInstance) -> Result<Solved, CliError> {
    let sol = prefetch::solve(inst).map_err(|e| CliError::Solver(e.to_string()))?;
    let fetches: Vec<Value> = sol
        .schedule
        .fetches
        .iter()
        .map(|f| {
            json!({
                "start": f.start,
                "evict": inst.page_name(f.evict),
                "end": f.end,
                "fetch": inst.page_name(f.fetch),
            })
        })
        .collect();
    let verification = match prefetch::replay(inst, &sol.schedule) {
        Ok(r) if r.stall != sol.objective => Err(format!(
            "schedule stalls {}, LP optimum is {}",
            r.stall, sol.objective
        )),
        Ok(r) => prefetch::invariant_check(inst, &sol.profile, &r.caches)
            .map_err(|bad| format!("fetch invariant fails at (s, t) = {:?}", bad[0])),
        Err(v) => Err(v.to_string()),
    };
    Ok(Solved {
        objective: Some(sol.objective),
        solution: Some(json!({"stall": sol.objective, "fetches": fetches})),
        certificate: None,
        verification,
    })
}

/// Compact JSON followed by a newline; the byte-exact form of all output.
pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string(doc).expect("values always serialize");
    s.push('\n');
    s
}

/// One input file of a batch run.
#[derive(Debug, Clone, Serialize)]
pub struct BatchEntry {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Solves every `*.json` file in `dir` concurrently and writes
/// `<stem>.solution.json` into `out`. Entries come back sorted by input path.
pub fn run_batch(
    problem: Problem,
    dir: &Path,
    out: &Path,
    opts: RunOptions,
) -> Result<Vec<BatchEntry>, CliError> {
    let io = |what: &str, p: &Path, e: std::io::Error| {
        CliError::Io(format!("{what} {}: {e}", p.display()))
    };
    let mut inputs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io("cannot read directory", dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    inputs.sort();
    fs::create_dir_all(out).map_err(|e| io("cannot create", out, e))?;

    let entries = inputs
        .par_iter()
        .map(|input| {
            let text = match fs::read_to_string(input) {
                Ok(t) => t,
                Err(e) => {
                    return BatchEntry {
                        input: input.clone(),
                        output: None,
                        exit_code: EXIT_ERROR,
                        error: Some(io("cannot read", input, e).to_string()),
                    }
                }
            };
            match run_document(problem, &text, opts) {
                Ok(outcome) => {
                    let stem = input.file_stem().unwrap_or_default().to_string_lossy();
                    let target = out.join(format!("{stem}.solution.json"));
                    let (exit_code, error) = match fs::write(&target, render(&outcome.document)) {
                        Ok(()) => (outcome.exit_code, outcome.error.map(|e| e.to_string())),
                        Err(e) => (EXIT_ERROR, Some(io("cannot write", &target, e).to_string())),
                    };
                    BatchEntry {
                        input: input.clone(),
                        output: Some(target),
                        exit_code,
                        error,
                    }
                }
                Err(e) => BatchEntry {
                    input: input.clone(),
                    output: None,
                    exit_code: EXIT_ERROR,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(entries)
}

/// Exit code of a batch: any error wins, then any infeasible instance.
pub fn batch_exit_code(entries: &[BatchEntry]) -> i32 {
    if entries.iter().any(|e| e.exit_code == EXIT_ERROR) {
        EXIT_ERROR
    } else if entries.iter().any(|e| e.exit_code == EXIT_INFEASIBLE) {
        EXIT_INFEASIBLE
    } else {
        EXIT_OPTIMAL
    }
}

/// Oracle objective for an instance document, for tests and tooling.
pub fn oracle_objective(problem: Problem, text: &str) -> Result<Option<i64>, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let obj = |r: Result<Option<i64>, oracle::SizeGuard>| r.map_err(|e| err(&e));
    match problem {
        Problem::Equal => {
            let inst: EqualInstance = serde_json::from_str(text).map_err(|e| err(&e))?;
            obj(oracle::brute_equal(&inst).map(|r| r.objective()))
        }
        Problem::TallSmall => {
            let inst: TallSmallInstance = serde_json::from_str(text).map_err(|e| err(&e))?;
            obj(oracle::brute_tallsmall(&inst).map(|r| r.objective()))
        }
        Problem::Prefetch => {
            let inst: PrefetchInstance = serde_json::from_str(text).map_err(|e| err(&e))?;
            obj(oracle::brute_prefetch(&inst).map(|r: OracleResult<_>| r.objective()))
        }
    }
}
