//! Command line front end for the `egtrs` confluence analyzer.
//!
//! The binary reads problem files, runs the analysis and prints reports.
//! The parsing, rendering and dispatch code lives here so that tests can
//! drive it without spawning a process.

pub mod annotations;
pub mod problem;
pub mod report;
pub mod sexpr;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use egtrs::joinability::join_terms;
use egtrs::pairs::generate_family;
use egtrs::theory::{build_theory, emit_theory, Format, TheoryKind};
use egtrs::{analyze, Bounds, Egtrs, Engine, Family, JoinMode, JoinVerdict, Options, RouteChoice, Verdict};

use crate::annotations::{parse_annotations, parse_bounds, set_bound, AnnotationFile};
use crate::problem::{parse_problem, Scope};
use crate::sexpr::read_one;

/// Exit status for a proof of E-confluence.
pub const EXIT_CONFLUENT: i32 = 0;
/// Exit status for a disproof.
pub const EXIT_NOT_CONFLUENT: i32 = 1;
/// Exit status when neither could be established.
pub const EXIT_MAYBE: i32 = 2;
/// Exit status for unreadable or invalid input files.
pub const EXIT_INPUT: i32 = 3;
/// Exit status for an analysis that could not be carried out.
pub const EXIT_ANALYSIS: i32 = 4;
/// Exit status for command line misuse.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "egtrs", version, about = "Confluence modulo equations for conditional rewrite systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Assume that rewriting modulo the equations terminates.
    #[arg(long, global = true)]
    assume_e_termination: bool,

    /// Annotation file with assumed joinability, infeasibility or bounds.
    #[arg(long, global = true, value_name = "FILE")]
    annotations: Option<PathBuf>,

    /// Search bounds, e.g. `depth=8,size=40,class=64,solutions=32`.
    #[arg(long, global = true, value_name = "LIST")]
    bounds: Option<String>,

    /// Also write a JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Proof routes to attempt: huet, jk or both.
    #[arg(long, global = true, default_value = "both")]
    route: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full analysis and print a verdict.
    Check { file: PathBuf },
    /// List the conditional pairs of one family.
    Pairs {
        file: PathBuf,
        /// Family id, e.g. CCP-R, CVPto-R, LCCP-ER, DCP-R.
        #[arg(long)]
        family: String,
    },
    /// Emit a first-order theory of the system.
    Theory {
        file: PathBuf,
        /// Th-E, Th-R, Th-RE, Th-RmodE, CR-theory or CR-ext.
        #[arg(long)]
        kind: String,
        /// Output format: plain or tptp.
        #[arg(long, default_value = "plain")]
        format: String,
        /// Atoms whose existential closure is appended as a goal.
        #[arg(long)]
        goal: Option<String>,
    },
    /// Decide whether two terms join.
    Join {
        file: PathBuf,
        left: String,
        right: String,
        /// Joinability mode, e.g. R, e-R, ls-e-RE, e-RmodE.
        #[arg(long, default_value = "e-RmodE")]
        mode: String,
    },
    /// Print the problem back in normalized form.
    Print { file: PathBuf },
}

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn input_error(path: &Path, message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT, message: format!("{}: {message}", path.display()) }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(path, e))
}

fn load(path: &Path) -> Result<Egtrs, Failure> {
    parse_problem(&read(path)?).map_err(|e| input_error(path, e))
}

struct Settings {
    options: Options,
    annotations: AnnotationFile,
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let annotations = match &cli.annotations {
        Some(path) => parse_annotations(&read(path)?).map_err(|e| input_error(path, e))?,
        None => AnnotationFile::default(),
    };
    let mut bounds = Bounds::default();
    for (name, value) in &annotations.bounds {
        set_bound(&mut bounds, name, *value).map_err(usage)?;
    }
    if let Some(list) = &cli.bounds {
        bounds = parse_bounds(list, bounds).map_err(|e| usage(format!("--bounds: {e}")))?;
    }
    let route =
        RouteChoice::parse(&cli.route).ok_or_else(|| usage(format!("--route: unknown route `{}`", cli.route)))?;
    Ok(Settings { options: Options { bounds, route, assume_e_termination: cli.assume_e_termination }, annotations })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input_error(path, e))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let settings = settings(cli)?;
    let emit = |out: &mut dyn Write, text: &str| {
        out.write_all(text.as_bytes()).map_err(|e| Failure { code: EXIT_INPUT, message: e.to_string() })
    };
    match &cli.command {
        Command::Check { file } => {
            let sys = load(file)?;
            let report = analyze(&sys, &settings.options, &settings.annotations.annotations)
                .map_err(|e| Failure { code: EXIT_ANALYSIS, message: e.to_string() })?;
            if let Some(path) = &cli.json {
                write_file(path, &report::json_text(&report))?;
            }
            emit(out, &report::text(&report))?;
            Ok(match report.verdict {
                Verdict::EConfluent { .. } => EXIT_CONFLUENT,
                Verdict::NotEConfluent { .. } => EXIT_NOT_CONFLUENT,
                Verdict::Maybe { .. } => EXIT_MAYBE,
            })
        }
        Command::Pairs { file, family } => {
            let fam = Family::parse(family).ok_or_else(|| usage(format!("--family: unknown family `{family}`")))?;
            let sys = load(file)?;
            let pairs = generate_family(&sys, fam);
            let mut text = String::new();
            for p in &pairs {
                text.push_str(&format!("{}  {}\n", p.id, p));
            }
            if let Some(path) = &cli.json {
                let rows: Vec<serde_json::Value> = pairs
                    .iter()
                    .map(|p| {
                        serde_json::json!({
                            "id": p.id,
                            "peak": {"left": p.left.to_string(), "right": p.right.to_string(), "source": p.peak()},
                            "condition": p.cond.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let doc = serde_json::json!({"id": fam.id(), "pairs": rows});
                write_file(path, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes")))?;
            }
            emit(out, &text)?;
            Ok(0)
        }
        Command::Theory { file, kind, format, goal } => {
            let kind = TheoryKind::parse(kind).ok_or_else(|| usage(format!("--kind: unknown theory `{kind}`")))?;
            let format = match format.to_ascii_lowercase().as_str() {
                "plain" => Format::Plain,
                "tptp" => Format::Tptp,
                other => return Err(usage(format!("--format: unknown format `{other}`"))),
            };
            let sys = load(file)?;
            let goal = match goal {
                Some(text) => {
                    let scope = Scope::of(&sys);
                    let atoms = sexpr::read_all(text)
                        .map_err(|e| usage(format!("--goal: {e}")))?
                        .iter()
                        .map(|x| scope.atom(x, true))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| usage(format!("--goal: {e}")))?;
                    Some(atoms)
                }
                None => None,
            };
            let text = emit_theory(&build_theory(&sys, kind), format, goal.as_deref());
            emit(out, &text)?;
            Ok(0)
        }
        Command::Join { file, left, right, mode } => {
            let mode = JoinMode::parse(mode).ok_or_else(|| usage(format!("--mode: unknown mode `{mode}`")))?;
            let sys = load(file)?;
            let scope = Scope::of(&sys);
            let term = |text: &str| {
                read_one(text)
                    .map_err(|e| e.to_string())
                    .and_then(|x| scope.term(&x).map_err(|e| e.to_string()))
                    .map_err(|e| usage(format!("term `{text}`: {e}")))
            };
            let (s, t) = (term(left)?, term(right)?);
            let engine = Engine::new(&sys, settings.options.bounds);
            let (text, code) = match join_terms(&engine, &s, &t, mode) {
                JoinVerdict::Joinable(w) => (format!("Joinable in {mode}\n  {w}\n"), 0),
                JoinVerdict::NotJoinable(c) => (format!("NotJoinable in {mode}\n  {c}\n"), 1),
                JoinVerdict::Unknown => (format!("Unknown in {mode} within the bounds\n"), 2),
            };
            emit(out, &text)?;
            Ok(code)
        }
        Command::Print { file } => {
            let sys = load(file)?;
            emit(out, &problem::print_problem(&sys))?;
            Ok(0)
        }
    }
}

/// Runs the command line with `args` (including the program name) and
/// returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "egtrs: {}", f.message);
            f.code
        }
    }
}
