//! The `rhowalk` command line. Output is line-delimited; exit codes are
//! 0 (ok), 1 (property violation), 2 (usage or input error) and 3 (search
//! exhausted).

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cseq::CSequence;
use crate::ordinal::Ordinal;
use crate::qspace::{crowding_check, kernel, Crowding, PointEnumeration};
use crate::refine::{self, Labeling, RefineError, RefineParams, ResultRecord};
use crate::walks::{universe_from_spec, Walker};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rhowalk",
    about = "Walks on countable ordinals and rho-bar refinement"
)]
pub struct Cli {
    /// Aligned, human-oriented rendering instead of key=value records.
    #[arg(long, global = true)]
    pub human: bool,
    /// C-sequence override file (`CNF: CNF, CNF, ... [;canonical]` per line).
    #[arg(long, global = true, value_name = "FILE")]
    pub cseq: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ρ(A, B) for A ≤ B.
    Rho { a: String, b: String },
    /// ρ̄(A, B) for A < B.
    Rhobar { a: String, b: String },
    /// The walk from B down to A.
    Walk { a: String, b: String },
    /// {ξ ≤ A : ρ(ξ, A) ≤ N}.
    Fiber { a: String, n: u64 },
    /// The first COUNT elements of C_A.
    Cseq { a: String, count: u64 },
    /// Check every triple of a universe `w<k>:<c>`.
    CheckUniverse {
        spec: String,
        /// Emit one record per triple.
        #[arg(long)]
        records: bool,
    },
    /// A_{I,J} restricted to indices below N.
    Ball {
        i: usize,
        j: u64,
        n: usize,
        #[arg(long, value_name = "FILE")]
        space: Option<String>,
    },
    /// Largest subset of a space crowded at depth J.
    Kernel { file: String, j: u64 },
    /// Crowding certificate for a whole space at depth J.
    Crowd { file: String, j: u64 },
    /// The finite sequence with code S.
    Sigma { s: u64 },
    /// Build a strongly increasing, ball-respecting prefix.
    Refine {
        /// identity | omega2-diagonal | seeded-sample:<k> | file:<path>
        #[arg(long)]
        labeling: String,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        window: usize,
        #[arg(long, default_value_t = 2)]
        depth: u64,
        #[arg(long, default_value_t = 2)]
        lookahead: u64,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 8)]
        beam: usize,
        #[arg(long, default_value_t = 256)]
        span: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Space file; the canonical enumeration of [0,1] by default.
        #[arg(long, value_name = "FILE")]
        space: Option<String>,
        /// Write the full result record (JSON) here.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
        /// Also print the pairwise r-matrix.
        #[arg(long)]
        matrix: bool,
    },
    /// Re-check a result record written by `refine --output`.
    Verify { file: PathBuf },
}

/// A failure mapped to an exit code.
struct Failure {
    code: i32,
    message: String,
}

fn input_error(e: impl Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn ordinal(text: &str) -> Result<Ordinal, Failure> {
    text.parse::<Ordinal>()
        .map_err(|e| input_error(format!("`{text}`: {e}")))
}

fn list<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    let body: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("[{}]", body.join(","))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

/// `canonical:<N>` or a space file.
fn load_space(spec: &str) -> Result<PointEnumeration, Failure> {
    if let Some(n) = spec.strip_prefix("canonical:") {
        let n: usize = n
            .parse()
            .map_err(|_| input_error(format!("bad point count in `{spec}`")))?;
        return Ok(PointEnumeration::canonical(n));
    }
    PointEnumeration::parse(&read(Path::new(spec))?).map_err(input_error)
}

fn walker(cli: &Cli) -> Result<Walker, Failure> {
    let cseq = match &cli.cseq {
        Some(path) => CSequence::parse_overrides(&read(path)?).map_err(input_error)?,
        None => CSequence::canonical(),
    };
    Ok(Walker::new(cseq))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let mut emit = |line: String| -> Result<(), Failure> {
        writeln!(out, "{line}").map_err(|e| input_error(format!("write failed: {e}")))
    };
    match &cli.command {
        Command::Rho { a, b } => {
            let v = walker(cli)?
                .rho(&ordinal(a)?, &ordinal(b)?)
                .map_err(input_error)?;
            emit(v.to_string())?;
        }
        Command::Rhobar { a, b } => {
            let v = walker(cli)?
                .rhobar(&ordinal(a)?, &ordinal(b)?)
                .map_err(input_error)?;
            emit(v.to_string())?;
        }
        Command::Walk { a, b } => {
            let t = walker(cli)?
                .walk_trace(&ordinal(a)?, &ordinal(b)?)
                .map_err(input_error)?;
            if cli.human {
                for (i, step) in t.steps.iter().enumerate() {
                    emit(format!("{i:>4}  {step}"))?;
                }
            } else {
                emit(list(&t.steps))?;
            }
        }
        Command::Fiber { a, n } => {
            let f = walker(cli)?.fiber(&ordinal(a)?, *n).map_err(input_error)?;
            emit(list(&f.members))?;
        }
        Command::Cseq { a, count } => {
            let a = ordinal(a)?;
            emit(list(walker(cli)?.cseq().prefix(&a, *count)))?;
        }
        Command::CheckUniverse { spec, records } => {
            let universe = universe_from_spec(spec)
                .ok_or_else(|| input_error(format!("bad universe spec `{spec}`")))?;
            let w = walker(cli)?;
            if *records {
                for i in 0..universe.len() {
                    for j in i + 1..universe.len() {
                        for k in j + 1..universe.len() {
                            let r = w
                                .check_triple(&universe[i], &universe[j], &universe[k])
                                .map_err(input_error)?;
                            emit(r.to_record())?;
                        }
                    }
                }
            }
            let summary = w.check_universe(&universe).map_err(input_error)?;
            if cli.human {
                emit(format!("universe   {spec} ({} ordinals)", summary.size))?;
                emit(format!("triples    {}", summary.triples))?;
                for (name, n) in ["p1", "p2", "p3", "d1", "d2"]
                    .iter()
                    .zip(summary.property_failures)
                {
                    emit(format!("{name:<10} {n} failures"))?;
                }
            } else {
                emit(summary.to_record())?;
            }
            if let Some(first) = &summary.first_failure {
                emit(format!("first_failure {}", first.to_record()))?;
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::Ball { i, j, n, space } => {
            let space = match space {
                Some(s) => load_space(s)?,
                None => PointEnumeration::canonical((*n).max(i + 1)),
            };
            if *i >= space.len() || *n > space.len() {
                return Err(input_error("index or window outside the space"));
            }
            emit(list(space.ball_members(*i, *j, *n)))?;
        }
        Command::Kernel { file, j } => {
            let space = load_space(file)?;
            let all: Vec<usize> = (0..space.len()).collect();
            let k = kernel(&space, &all, *j);
            emit(format!("size={} members={}", k.len(), list(&k)))?;
        }
        Command::Crowd { file, j } => {
            let space = load_space(file)?;
            let all: Vec<usize> = (0..space.len()).collect();
            match crowding_check(&space, &all, *j).map_err(input_error)? {
                Crowding::Certified(cert) => {
                    for (i, j, n) in &cert.witnesses {
                        emit(format!("witness i={i} j={j} n={n}"))?;
                    }
                    emit("certified=true".to_string())?;
                }
                Crowding::Failed { i, j } => {
                    emit(format!("certified=false i={i} j={j}"))?;
                    return Ok(EXIT_VIOLATION);
                }
            }
        }
        Command::Sigma { s } => emit(list(refine::sigma(*s)))?,
        Command::Refine {
            labeling,
            target,
            window,
            depth,
            lookahead,
            budget,
            beam,
            span,
            seed,
            space,
            output,
            matrix,
        } => {
            let params = RefineParams {
                target: *target,
                window: *window,
                depth: *depth,
                lookahead: *lookahead,
                budget: *budget,
                beam: *beam,
                span: *span,
            };
            let (space, space_kind) = match space {
                Some(s) => (load_space(s)?, "custom"),
                None => (PointEnumeration::canonical(*window), "canonical"),
            };
            let (labels, name) = match labeling.strip_prefix("file:") {
                Some(path) => (
                    Labeling::parse_file(&read(Path::new(path))?).map_err(input_error)?,
                    "file",
                ),
                None => (
                    Labeling::from_name(labeling, *seed, *window).map_err(input_error)?,
                    labeling.as_str(),
                ),
            };
            let result = match refine::refine(&space, &labels, &params) {
                Ok(r) => r,
                Err(RefineError::SearchExhausted {
                    deepest,
                    visited,
                    budget_hit,
                }) => {
                    emit(format!(
                        "status=exhausted visited={visited} budget_hit={budget_hit} deepest_length={} deepest={}",
                        deepest.len(),
                        list(&deepest)
                    ))?;
                    return Ok(EXIT_EXHAUSTED);
                }
                Err(e) => return Err(input_error(e)),
            };
            let record =
                ResultRecord::build(&result, &space, space_kind, &labels, name, *seed, &params)
                    .map_err(input_error)?;
            if cli.human {
                emit(format!(
                    "{:>4} {:>8} {:>12} {:>16}",
                    "s", "index", "point", "label"
                ))?;
                for s in 0..record.chosen.len() {
                    emit(format!(
                        "{s:>4} {:>8} {:>12} {:>16}",
                        record.chosen[s], record.points[s], record.labels[s]
                    ))?;
                }
                emit(record.report.to_record())?;
            } else {
                for line in record.to_lines(*matrix) {
                    emit(line)?;
                }
            }
            if let Some(path) = output {
                let json = serde_json::to_string_pretty(&record).map_err(input_error)?;
                fs::write(path, json + "\n")
                    .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            }
            if !result.report.passed() {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::Verify { file } => {
            let record: ResultRecord = serde_json::from_str(&read(file)?).map_err(input_error)?;
            let check = record.recheck().map_err(input_error)?;
            emit(check.report.to_record())?;
            for item in &check.report.items {
                emit(format!("failure {item:?}"))?;
            }
            for m in &check.mismatches {
                emit(format!("mismatch {m}"))?;
            }
            if !check.passed() {
                return Ok(EXIT_VIOLATION);
            }
        }
    }
    Ok(EXIT_OK)
}
