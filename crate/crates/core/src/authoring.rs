//! Quiz authoring: distractor generation, corpus files and batch diagnosis.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::code::MisconceptionCode;
use crate::diagnosis::{diagnose, search_space, simulate_all, MatchMode, Observation, SearchConfig, Verdict};
use crate::exec::{run_reference, Limits};
use crate::lang::{parse, Program, SyntaxError};
use crate::registry::Registry;
use crate::variant::SemanticProfile;

pub const CORPUS_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distractor {
    pub transcript: Vec<String>,
    /// Ranked smallest first.
    pub generating_profiles: Vec<SemanticProfile>,
    /// Cardinality of the smallest generating profile.
    pub plausibility_rank: usize,
}

impl Distractor {
    pub fn to_json(&self) -> Json {
        json!({
            "transcript": self.transcript,
            "generatingProfiles": self.generating_profiles.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "plausibilityRank": self.plausibility_rank,
        })
    }
}

struct Group {
    transcript: Vec<String>,
    clean: Vec<SemanticProfile>,
    dirty: Vec<SemanticProfile>,
}

/// Wrong answers produced by profiles of up to `max_cardinality` codes,
/// one per distinct transcript, most plausible first. Runs that crash or
/// print nothing are kept only when nothing else is left.
pub fn gen_distractors(program: &Program, reg: &Registry, max_cardinality: usize, limits: Limits) -> Vec<Distractor> {
    let reference = run_reference(program, limits).transcript;
    let mut groups: Vec<Group> = Vec::new();
    for layer in search_space(reg, program, max_cardinality) {
        let results = simulate_all(program, &layer, limits);
        for (profile, r) in layer.into_iter().zip(results) {
            if r.transcript == reference {
                continue;
            }
            let clean = !r.status.is_error() && !r.transcript.is_empty();
            let idx = match groups.iter().position(|g| g.transcript == r.transcript) {
                Some(i) => i,
                None => {
                    groups.push(Group {
                        transcript: r.transcript,
                        clean: Vec::new(),
                        dirty: Vec::new(),
                    });
                    groups.len() - 1
                }
            };
            let g = &mut groups[idx];
            if clean {
                g.clean.push(profile);
            } else {
                g.dirty.push(profile);
            }
        }
    }
    let any_clean = groups.iter().any(|g| !g.clean.is_empty());
    let mut out: Vec<Distractor> = groups
        .into_iter()
        .filter_map(|g| {
            let mut profiles = if any_clean { g.clean } else { g.dirty };
            if profiles.is_empty() {
                return None;
            }
            profiles.sort_by(|a, b| {
                (a.len(), a.non_default_params(), a.to_string()).cmp(&(b.len(), b.non_default_params(), b.to_string()))
            });
            Some(Distractor {
                transcript: g.transcript,
                plausibility_rank: profiles[0].len(),
                generating_profiles: profiles,
            })
        })
        .collect();
    out.sort_by(|a, b| (a.plausibility_rank, &a.transcript).cmp(&(b.plausibility_rank, &b.transcript)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Response {
    #[serde(rename = "studentId", default, skip_serializing_if = "Option::is_none")]
    pub student_id: Option<String>,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRecord {
    pub id: String,
    pub source: String,
    #[serde(rename = "referenceTranscript")]
    pub reference_transcript: Vec<String>,
    #[serde(default)]
    pub responses: Vec<Response>,
}

impl TaskRecord {
    /// A task whose cached transcript is computed from `source`.
    pub fn new(id: impl Into<String>, source: impl Into<String>) -> Result<Self, SyntaxError> {
        let source = source.into();
        let program = parse(&source)?;
        Ok(TaskRecord {
            id: id.into(),
            reference_transcript: run_reference(&program, Limits::default()).transcript,
            source,
            responses: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    pub version: String,
    pub tasks: Vec<TaskRecord>,
}

impl Corpus {
    pub fn new(tasks: Vec<TaskRecord>) -> Self {
        Corpus {
            version: CORPUS_VERSION.to_string(),
            tasks,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("corpus serializes");
        s.push('\n');
        s
    }

    /// Parses and validates cached reference transcripts. Tasks whose source
    /// does not parse are left for `batch_diagnose` to report.
    pub fn from_json_str(text: &str) -> Result<Self, CorpusError> {
        let corpus: Corpus = serde_json::from_str(text).map_err(|e| CorpusError::Malformed(e.to_string()))?;
        if corpus.version != CORPUS_VERSION {
            return Err(CorpusError::Malformed(format!("unsupported version `{}`", corpus.version)));
        }
        for task in &corpus.tasks {
            if let Ok(program) = parse(&task.source) {
                let fresh = run_reference(&program, Limits::default()).transcript;
                if fresh != task.reference_transcript {
                    return Err(CorpusError::StaleReference {
                        task: task.id.clone(),
                        expected: fresh,
                    });
                }
            }
        }
        Ok(corpus)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot access corpus file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed corpus: {0}")]
    Malformed(String),
    #[error("task `{task}`: cached reference transcript is stale (source prints {expected:?})")]
    StaleReference { task: String, expected: Vec<String> },
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    Corpus::from_json_str(&std::fs::read_to_string(path)?)
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    std::fs::write(path, corpus.to_json_string())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AggregateStats {
    pub responses: usize,
    pub correct: usize,
    pub explained: usize,
    pub unexplained: usize,
    /// Explained responses with more than one explanation.
    pub ambiguous: usize,
    /// Responses whose explanations mention the code.
    pub counts: BTreeMap<MisconceptionCode, usize>,
    /// Each explained response spreads weight 1 evenly over its
    /// explanations, and each explanation evenly over its codes.
    pub weights: BTreeMap<MisconceptionCode, f64>,
}

impl AggregateStats {
    pub fn to_json(&self) -> Json {
        let weights: BTreeMap<String, f64> = self.weights.iter().map(|(c, w)| (c.to_string(), *w)).collect();
        let counts: BTreeMap<String, usize> = self.counts.iter().map(|(c, n)| (c.to_string(), *n)).collect();
        json!({
            "weights": weights,
            "counts": counts,
            "totals": {
                "responses": self.responses,
                "correct": self.correct,
                "explained": self.explained,
                "unexplained": self.unexplained,
                "ambiguous": self.ambiguous,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub task: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatchOutcome {
    pub stats: AggregateStats,
    pub skipped: Vec<SkipReport>,
}

impl BatchOutcome {
    pub fn to_json(&self) -> Json {
        let mut v = self.stats.to_json();
        v["skipped"] = json!(self.skipped);
        v
    }
}

/// Diagnoses every response in every parseable task, in corpus order.
pub fn batch_diagnose(reg: &Registry, corpus: &[TaskRecord], mode: MatchMode, cfg: &SearchConfig) -> BatchOutcome {
    let mut out = BatchOutcome::default();
    for task in corpus {
        let program = match parse(&task.source) {
            Ok(p) => p,
            Err(e) => {
                out.skipped.push(SkipReport {
                    task: task.id.clone(),
                    error: e.to_string(),
                });
                continue;
            }
        };
        for response in &task.responses {
            let report = diagnose(reg, &program, &Observation::from_text(&response.answer, mode), cfg);
            let stats = &mut out.stats;
            stats.responses += 1;
            match report.verdict {
                Verdict::Correct => stats.correct += 1,
                Verdict::Unexplained => stats.unexplained += 1,
                Verdict::Explained => {
                    stats.explained += 1;
                    let minimal = &report.explanations;
                    if minimal.len() > 1 {
                        stats.ambiguous += 1;
                    }
                    let mut mentioned: Vec<MisconceptionCode> = Vec::new();
                    for e in minimal {
                        let codes = e.codes();
                        let share = 1.0 / (minimal.len() * codes.len()) as f64;
                        for code in codes {
                            *stats.weights.entry(code.clone()).or_default() += share;
                            if !mentioned.contains(&code) {
                                mentioned.push(code);
                            }
                        }
                    }
                    for code in mentioned {
                        *stats.counts.entry(code).or_default() += 1;
                    }
                }
            }
        }
    }
    out
}
