use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use notional::authoring::{batch_diagnose, gen_distractors, load_corpus, CorpusError};
use notional::diagnosis::{diagnose, Explanation, MatchMode, Observation, SearchConfig, Verdict};
use notional::exec::{run_reference, ExecResult, ExecStatus, Limits};
use notional::lang::{parse, Program};
use notional::registry::{load_registry, shipped, CatalogEntry, Registry};
use notional::variant::{profile_from_literal, run_variant};
use notional::MisconceptionCode;

/// Trace, diagnose and generate answers for selection and iteration tasks
/// under catalogued novice misconceptions.
#[derive(Debug, Parser)]
#[command(name = "notional", version)]
struct Cli {
    /// Catalog file to use instead of the bundled one.
    #[arg(long, global = true, value_name = "FILE")]
    registry: Option<PathBuf>,
    /// Execution caps, e.g. `events=10000,outputs=1000`.
    #[arg(long, global = true, value_name = "SPEC")]
    limits: Option<Limits>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a program under the reference semantics.
    Run {
        file: PathBuf,
        /// Write the event trace as JSON lines.
        #[arg(long, value_name = "OUT")]
        trace: Option<PathBuf>,
    },
    /// Run a program as a student holding the given misconceptions would.
    Simulate {
        file: PathBuf,
        /// Comma-separated codes, e.g. `ITER.3.b.ii.A,ITER.5.a.i(k=2)`.
        #[arg(long, value_name = "PROFILE")]
        profile: String,
        #[arg(long, value_name = "OUT")]
        trace: Option<PathBuf>,
    },
    /// Explain a student's answer by minimal misconception profiles.
    Diagnose {
        file: PathBuf,
        /// File holding the answer, one output line per line.
        #[arg(long, value_name = "FILE", conflicts_with = "answer_text", required_unless_present = "answer_text")]
        answer: Option<PathBuf>,
        #[arg(long, value_name = "TEXT")]
        answer_text: Option<String>,
        #[arg(long, value_name = "K", default_value_t = 2, value_parser = clap::value_parser!(u8).range(0..=3))]
        max_k: u8,
        #[arg(long = "match", value_name = "MODE", default_value = "exact")]
        mode: MatchMode,
    },
    /// Generate wrong answers for a tracing question.
    Distractors {
        file: PathBuf,
        #[arg(long, value_name = "K", default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=3))]
        max_k: u8,
    },
    /// Inspect the catalog.
    Taxonomy {
        #[command(subcommand)]
        action: TaxonomyAction,
    },
    /// Diagnose every response in a corpus file and aggregate.
    Batch {
        corpus: PathBuf,
        #[arg(long, value_name = "K", default_value_t = 2, value_parser = clap::value_parser!(u8).range(0..=3))]
        max_k: u8,
        #[arg(long = "match", value_name = "MODE", default_value = "exact")]
        mode: MatchMode,
    },
}

#[derive(Debug, Subcommand)]
enum TaxonomyAction {
    /// List entries, optionally under a code prefix.
    List { prefix: Option<String> },
    /// Show one entry or category.
    Show { code: String },
}

enum Failure {
    Usage(String),
    Parse(String),
    Internal(String),
}

impl Failure {
    fn exit(&self) -> (u8, &str) {
        match self {
            Failure::Usage(m) => (1, m),
            Failure::Parse(m) => (2, m),
            Failure::Internal(m) => (4, m),
        }
    }
}

struct Outcome {
    stdout: String,
    negative: bool,
}

impl From<String> for Outcome {
    fn from(stdout: String) -> Self {
        Outcome {
            stdout,
            negative: false,
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
    match dispatch(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(if out.negative { 3 } else { 0 })
        }
        Err(f) => {
            let (code, message) = f.exit();
            eprintln!("notional: {message}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse(&read(path)?).map_err(|e| Failure::Parse(format!("{}:{e}", path.display())))
}

fn registry(cli: &Cli) -> Result<Registry, Failure> {
    match &cli.registry {
        None => Ok(shipped().clone()),
        Some(path) => load_registry(&read(path)?).map_err(|e| Failure::Parse(format!("{}: {e}", path.display()))),
    }
}

fn json_line(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let limits = cli.limits.unwrap_or_default();
    match &cli.command {
        Command::Run { file, trace } => {
            let result = run_reference(&load_program(file)?, limits);
            emit_run(cli, &result, trace.as_deref())
        }
        Command::Simulate { file, profile, trace } => {
            let program = load_program(file)?;
            let reg = registry(cli)?;
            let profile = profile_from_literal(&reg, profile).map_err(|e| Failure::Usage(e.to_string()))?;
            emit_run(cli, &run_variant(&program, &profile, limits), trace.as_deref())
        }
        Command::Diagnose {
            file,
            answer,
            answer_text,
            max_k,
            mode,
        } => {
            let program = load_program(file)?;
            let reg = registry(cli)?;
            let raw = match (answer, answer_text) {
                (Some(path), _) => read(path)?,
                (None, Some(text)) => text.clone(),
                (None, None) => return Err(Failure::Usage("an answer is required".into())),
            };
            let cfg = SearchConfig {
                limits,
                ..SearchConfig::with_k(usize::from(*max_k))
            };
            let report = diagnose(&reg, &program, &Observation::from_text(&raw, *mode), &cfg);
            let stdout = if cli.json {
                json_line(&report.to_json())
            } else {
                let mut s = format!("verdict: {}\n", report.verdict);
                match report.verdict {
                    Verdict::Explained => {
                        let _ = writeln!(s, "explanations: {}", report.ambiguity);
                        list_explanations(&mut s, &report.explanations);
                    }
                    Verdict::Correct if !report.masked_candidates.is_empty() => {
                        let _ = writeln!(s, "masked candidates:");
                        list_explanations(&mut s, &report.masked_candidates);
                    }
                    _ => {}
                }
                let _ = writeln!(s, "profiles searched: {}", report.searched);
                s
            };
            Ok(Outcome {
                stdout,
                negative: report.verdict == Verdict::Unexplained,
            })
        }
        Command::Distractors { file, max_k } => {
            let program = load_program(file)?;
            let reg = registry(cli)?;
            let ds = gen_distractors(&program, &reg, usize::from(*max_k), limits);
            if cli.json {
                return Ok(json_line(&serde_json::Value::Array(ds.iter().map(|d| d.to_json()).collect())).into());
            }
            let mut s = String::new();
            for (i, d) in ds.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{}. [{}] {}",
                    i + 1,
                    d.plausibility_rank,
                    d.generating_profiles.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | ")
                );
                for line in &d.transcript {
                    let _ = writeln!(s, "    {line}");
                }
            }
            Ok(s.into())
        }
        Command::Taxonomy { action } => taxonomy(cli, action),
        Command::Batch { corpus, max_k, mode } => {
            let reg = registry(cli)?;
            let corpus = load_corpus(corpus).map_err(|e| match e {
                CorpusError::Io(_) => Failure::Usage(e.to_string()),
                _ => Failure::Parse(e.to_string()),
            })?;
            let cfg = SearchConfig {
                limits,
                ..SearchConfig::with_k(usize::from(*max_k))
            };
            let out = batch_diagnose(&reg, &corpus.tasks, *mode, &cfg);
            for skip in &out.skipped {
                eprintln!("notional: skipped task `{}`: {}", skip.task, skip.error);
            }
            if cli.json {
                return Ok(json_line(&out.to_json()).into());
            }
            let st = &out.stats;
            let mut s = format!(
                "responses: {}\ncorrect: {}\nexplained: {}\nunexplained: {}\nambiguous: {}\nskipped tasks: {}\n",
                st.responses,
                st.correct,
                st.explained,
                st.unexplained,
                st.ambiguous,
                out.skipped.len()
            );
            for (code, w) in &st.weights {
                let _ = writeln!(s, "{code:<18} {w:>8.3} {:>4}", st.counts.get(code).copied().unwrap_or(0));
            }
            Ok(s.into())
        }
    }
}

fn list_explanations(s: &mut String, list: &[Explanation]) {
    for e in list {
        let _ = writeln!(s, "  {{{}}} [{}]", e.profile, e.status);
    }
}

fn emit_run(cli: &Cli, result: &ExecResult, trace: Option<&Path>) -> Result<Outcome, Failure> {
    if let Some(path) = trace {
        fs::write(path, result.trace_jsonl())
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    if cli.json {
        return Ok(json_line(&result.to_json()).into());
    }
    if result.status != ExecStatus::Completed {
        eprintln!("notional: stopped: {}", result.status);
    }
    let mut s = String::new();
    for line in &result.transcript {
        s.push_str(line);
        s.push('\n');
    }
    Ok(s.into())
}

fn taxonomy(cli: &Cli, action: &TaxonomyAction) -> Result<Outcome, Failure> {
    let reg = registry(cli)?;
    let parse_code = |text: &str| -> Result<MisconceptionCode, Failure> {
        text.parse().map_err(|e| Failure::Usage(format!("{e}")))
    };
    match action {
        TaxonomyAction::List { prefix } => {
            let entries: Vec<&CatalogEntry> = match prefix {
                None => reg.entries.iter().collect(),
                Some(p) => {
                    let p = parse_code(p)?;
                    reg.entries
                        .iter()
                        .filter(|e| e.code == p || e.code.has_proper_prefix(&p))
                        .collect()
                }
            };
            if cli.json {
                return Ok(json_line(&serde_json::to_value(&entries).expect("entries serialize")).into());
            }
            let mut s = String::new();
            for e in entries {
                let _ = writeln!(s, "{:<16} {:<14} {}", e.code.to_string(), status_name(e), e.title);
            }
            Ok(s.into())
        }
        TaxonomyAction::Show { code } => {
            let code = parse_code(code)?;
            if let Ok(e) = reg.lookup(&code) {
                if cli.json {
                    return Ok(json_line(&serde_json::to_value(e).expect("entry serializes")).into());
                }
                let mut s = format!("{}  {}\n", e.code, e.title);
                let _ = writeln!(s, "quote: \"{}\"", e.quote);
                let _ = writeln!(s, "status: {}", status_name(e));
                if let Some(slot) = &e.slot {
                    let _ = writeln!(s, "slot: {slot}");
                }
                for (name, p) in &e.params {
                    let _ = writeln!(s, "param {name}: {}..{} (default {})", p.min, p.max, p.default);
                }
                if !e.applicability.is_empty() {
                    let _ = writeln!(s, "applies to: {}", e.applicability.join(" + "));
                }
                if let Some(r) = &e.rationale {
                    let _ = writeln!(s, "rationale: {r}");
                }
                return Ok(s.into());
            }
            if let Some(c) = reg.category(&code) {
                if cli.json {
                    return Ok(json_line(&serde_json::to_value(c).expect("category serializes")).into());
                }
                let mut s = format!("{}  {}\n", c.code, c.title);
                for e in reg.children(&code) {
                    let _ = writeln!(s, "  {:<16} {}", e.code.to_string(), e.title);
                }
                return Ok(s.into());
            }
            Err(Failure::Usage(format!("unknown code {code}")))
        }
    }
}

fn status_name(e: &CatalogEntry) -> String {
    serde_json::to_value(e.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}
