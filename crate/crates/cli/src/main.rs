//! `enricat`: command-line front end.
//!
//! Every command prints a report document (or a short text rendering with
//! `--format text`) and exits with 0 for yes/success, 1 for no, 2 for
//! unknown and 3 for input errors.  A report document can be fed back with
//! `--replay` to re-verify it.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use enricat::io::{self, Document, Object};
use enricat::replay::{self, Command, Options, Record, DEFAULT_BOUND};
use enricat::scenarios::{self, Params};
use enricat::verdict::Outcome;

const INPUT_ERROR: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "enricat", version, about = "Flatness, filteredness and Cauchy completeness at finite scale")]
struct Cli {
    /// Search bound (defaults to $ENRICAT_BOUND, then 3).
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Seed for generated corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Re-verify a report document instead of running a command.
    #[arg(long, value_name = "REPORT")]
    replay: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and validate any document.
    Validate { file: PathBuf },
    /// Filteredness of a finite category, or of the category of elements of a weight.
    CheckFiltered { file: PathBuf },
    /// Finality of an ordinary functor.
    CheckFinal { file: PathBuf },
    /// Flatness of a weight by the base-specific criterion.
    CheckFlat {
        file: PathBuf,
        /// Also run the limit-preservation oracle.
        #[arg(long)]
        oracle: bool,
        /// Also test filteredness after matrix completion with tuples up to this length.
        #[arg(long)]
        completion: Option<usize>,
    },
    /// Whether a weight is a Cauchy (absolute) weight.
    CheckCauchyWeight { file: PathBuf },
    /// Cauchy completion of a V-category.
    CauchyComplete {
        file: PathBuf,
        /// Longest tuple in the matrix completion (FinVec only).
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Weighted colimit of a covariant functor (a weight on the opposite category).
    Colimit { weight: PathBuf, functor: PathBuf },
    /// Category of elements of a weight.
    Elements {
        file: PathBuf,
        /// Use this generator of the base as the stage instead of the unit.
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Double category of elements of a weight over FinCat.
    DoubleElements { file: PathBuf },
    /// Flatness by exhaustive limit-preservation tests.
    Oracle { file: PathBuf },
    /// Named end-to-end scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioCmd,
    },
    /// Generate a seeded corpus and compare the decider with the oracle.
    Corpus {
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ScenarioCmd {
    List,
    Run {
        name: String,
        /// z<k> for a cyclic group or s3.
        #[arg(long, default_value = "z2")]
        group: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Literal truncation of the G-set ladder.
        #[arg(long)]
        literal: bool,
        /// One-object variant of the additive example.
        #[arg(long)]
        degenerate: bool,
    },
}

fn default_bound() -> Result<usize, String> {
    match std::env::var("ENRICAT_BOUND") {
        Ok(s) => s.trim().parse().map_err(|_| format!("ENRICAT_BOUND={s:?} is not a number")),
        Err(_) => Ok(DEFAULT_BOUND),
    }
}

fn load_all(paths: &[&PathBuf]) -> Result<Vec<Document>, String> {
    paths.iter().map(|p| io::load(p).map_err(|e| e.to_string())).collect()
}

fn render_text(r: &Record) -> String {
    let mut out = format!("{}: {}\n", serde_json::to_value(r.command).unwrap().as_str().unwrap_or(""), r.outcome);
    let res = &r.result;
    match r.command {
        Command::CheckFlat => {
            for c in res["criteria"].as_array().into_iter().flatten() {
                let tag = if c["decisive"].as_bool() == Some(true) { " (decisive)" } else { "" };
                out += &format!(
                    "  {}{}: {}\n",
                    c["name"].as_str().unwrap_or("?"),
                    tag,
                    c["outcome"].as_str().unwrap_or("?")
                );
            }
        }
        Command::Scenario => {
            for s in res["stages"].as_array().into_iter().flatten() {
                let exp = s["expected"]
                    .as_str()
                    .map(|e| format!(" (expected {e})"))
                    .unwrap_or_else(|| " (informational)".into());
                out += &format!(
                    "  {}: {}{}\n",
                    s["name"].as_str().unwrap_or("?"),
                    s["outcome"].as_str().unwrap_or("?"),
                    exp
                );
            }
        }
        Command::Corpus => out += &format!("  {}\n", res["summary"]),
        _ => {
            if let Some(c) = res.get("certificate") {
                out += &format!("  certificate: {c}\n");
            }
            if let Some(b) = res.get("bound").filter(|b| !b.is_null()) {
                out += &format!("  bound: {b}\n");
            }
        }
    }
    out
}

fn emit(format: Format, doc: &Document, text: impl FnOnce() -> String) {
    match format {
        Format::Json => print!("{}", doc.to_text()),
        Format::Text => print!("{}", text()),
    }
}

fn run(cli: Cli) -> Result<Outcome, String> {
    if let Some(path) = &cli.replay {
        let record = match io::load(path).and_then(|d| d.decode()).map_err(|e| e.to_string())? {
            Object::Report(r) => *r,
            other => return Err(format!("--replay needs a report document, got {}", other.kind())),
        };
        let rep = replay::replay(&record).map_err(|e| e.to_string())?;
        let doc = Document::new(io::Kind::Report, &rep);
        emit(cli.format, &doc, || {
            format!(
                "replay: {}\n  recorded {} / replayed {}\n  identical: {}\n  certificate checked: {}\n",
                rep.outcome,
                rep.recorded,
                rep.replayed,
                rep.identical,
                rep.certificate_checked.map_or("n/a".to_string(), |b| b.to_string())
            )
        });
        return Ok(rep.outcome);
    }
    let Some(cmd) = cli.command else {
        return Err("no command given; see --help".into());
    };
    let mut options =
        Options { bound: cli.bound.map_or_else(default_bound, Ok)?, seed: cli.seed, ..Options::default() };
    let (command, files): (Command, Vec<&PathBuf>) = match &cmd {
        Cmd::Validate { file } => (Command::Validate, vec![file]),
        Cmd::CheckFiltered { file } => (Command::CheckFiltered, vec![file]),
        Cmd::CheckFinal { file } => (Command::CheckFinal, vec![file]),
        Cmd::CheckFlat { file, oracle, completion } => {
            options.with_oracle = *oracle;
            options.completion = *completion;
            (Command::CheckFlat, vec![file])
        }
        Cmd::CheckCauchyWeight { file } => (Command::CheckCauchyWeight, vec![file]),
        Cmd::CauchyComplete { file, k } => {
            options.completion = Some(*k);
            (Command::CauchyComplete, vec![file])
        }
        Cmd::Colimit { weight, functor } => (Command::Colimit, vec![weight, functor]),
        Cmd::Elements { file, stage } => {
            options.stage = *stage;
            (Command::Elements, vec![file])
        }
        Cmd::DoubleElements { file } => (Command::DoubleElements, vec![file]),
        Cmd::Oracle { file } => (Command::Oracle, vec![file]),
        Cmd::Scenario { action: ScenarioCmd::List } => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(scenarios::list()).unwrap()),
                Format::Text => scenarios::list().iter().for_each(|s| println!("{s}")),
            }
            return Ok(Outcome::Yes);
        }
        Cmd::Scenario { action: ScenarioCmd::Run { name, group, n, p, literal, degenerate } } => {
            options.scenario = Some(name.clone());
            options.params = Some(Params {
                group: group.clone(),
                n: *n,
                p: *p,
                bound: options.bound,
                literal: *literal,
                degenerate: *degenerate,
            });
            (Command::Scenario, vec![])
        }
        Cmd::Corpus { count } => {
            options.count = *count;
            (Command::Corpus, vec![])
        }
    };
    let inputs = load_all(&files)?;
    let record = replay::execute(command, &options, &inputs).map_err(|e| e.to_string())?;
    emit(cli.format, &record.document(), || render_text(&record));
    Ok(record.outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
