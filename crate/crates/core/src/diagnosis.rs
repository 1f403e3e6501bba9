//! Explaining an observed answer by the smallest misconception profiles that
//! reproduce it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::code::MisconceptionCode;
use crate::exec::{run_reference, ExecResult, ExecStatus, Limits};
use crate::lang::{features, Program};
use crate::registry::Registry;
use crate::variant::{applicable_variants, enumerate_profiles, run_variant, SemanticProfile};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    #[default]
    Exact,
    /// Exact, or a capped run and an observation where one is a prefix of
    /// the other.
    Prefix,
    /// The whole transcript compared as one string with whitespace runs
    /// collapsed.
    Normalized,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Exact => "exact",
            MatchMode::Prefix => "prefix",
            MatchMode::Normalized => "normalized",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(MatchMode::Exact),
            "prefix" => Ok(MatchMode::Prefix),
            "normalized" => Ok(MatchMode::Normalized),
            other => Err(format!("unknown match mode `{other}` (expected exact, prefix or normalized)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub transcript: Vec<String>,
    pub mode: MatchMode,
}

impl Observation {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>, mode: MatchMode) -> Self {
        Observation {
            transcript: tokens.into_iter().map(Into::into).collect(),
            mode,
        }
    }

    /// One token per line, trimmed; blank lines carry no token.
    pub fn from_text(raw: &str, mode: MatchMode) -> Self {
        Observation::new(raw.lines().map(str::trim).filter(|l| !l.is_empty()), mode)
    }
}

fn collapse<'a>(tokens: impl IntoIterator<Item = &'a String>) -> String {
    let mut out = String::new();
    for word in tokens.into_iter().flat_map(|t| t.split_whitespace()) {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

pub fn match_transcript(expected: &Observation, actual: &ExecResult) -> bool {
    if actual.status.is_error() {
        return false;
    }
    let (obs, got) = (&expected.transcript, &actual.transcript);
    match expected.mode {
        MatchMode::Exact => obs == got,
        MatchMode::Prefix => {
            obs == got || (actual.status.is_capped() && (got.starts_with(obs) || obs.starts_with(got)))
        }
        MatchMode::Normalized => collapse(obs) == collapse(got),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest profile cardinality searched, 0..=3.
    pub max_cardinality: usize,
    pub limits: Limits,
    /// Stop after the first cardinality that yields a match.
    pub minimum_only: bool,
}

impl SearchConfig {
    pub const MAX_CARDINALITY: usize = 3;

    pub fn with_k(k: usize) -> Self {
        SearchConfig {
            max_cardinality: k.min(Self::MAX_CARDINALITY),
            ..SearchConfig::default()
        }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_cardinality: 2,
            limits: Limits::default(),
            minimum_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub profile: SemanticProfile,
    pub mode: MatchMode,
    pub status: ExecStatus,
}

impl Explanation {
    pub fn codes(&self) -> Vec<MisconceptionCode> {
        self.profile.codes().cloned().collect()
    }

    pub fn to_json(&self) -> Json {
        let params: BTreeMap<String, &BTreeMap<String, i64>> = self
            .profile
            .active()
            .iter()
            .filter(|a| !a.params.is_empty())
            .map(|a| (a.code.to_string(), &a.params))
            .collect();
        json!({
            "codes": self.profile.codes().map(ToString::to_string).collect::<Vec<_>>(),
            "params": params,
            "profile": self.profile.to_string(),
            "matchMode": self.mode,
            "status": self.status.to_string(),
        })
    }
}

fn rank_key(p: &SemanticProfile) -> (usize, usize, Vec<&MisconceptionCode>, String) {
    (p.len(), p.non_default_params(), p.codes().collect(), p.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Explained,
    Unexplained,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Correct => "correct",
            Verdict::Explained => "explained",
            Verdict::Unexplained => "unexplained",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagnosisReport {
    pub verdict: Verdict,
    /// Irredundant matching profiles, ranked; empty unless the verdict is
    /// `Explained`.
    pub explanations: Vec<Explanation>,
    /// Irredundant nonempty profiles that also reproduce a correct answer.
    pub masked_candidates: Vec<Explanation>,
    /// Number of distinct explanations.
    pub ambiguity: usize,
    /// Profiles simulated, the empty one included.
    pub searched: usize,
}

impl DiagnosisReport {
    pub fn to_json(&self) -> Json {
        json!({
            "verdict": self.verdict,
            "explanations": self.explanations.iter().map(Explanation::to_json).collect::<Vec<_>>(),
            "maskedCandidates": self.masked_candidates.iter().map(Explanation::to_json).collect::<Vec<_>>(),
            "ambiguity": self.ambiguity,
            "searched": self.searched,
        })
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn simulate_all(program: &Program, profiles: &[SemanticProfile], limits: Limits) -> Vec<ExecResult> {
    use rayon::prelude::*;
    profiles.par_iter().map(|p| run_variant(program, p, limits)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn simulate_all(program: &Program, profiles: &[SemanticProfile], limits: Limits) -> Vec<ExecResult> {
    profiles.iter().map(|p| run_variant(program, p, limits)).collect()
}

/// Profiles up to `max_cardinality` over the codes applicable to `program`,
/// smallest first. The empty profile is not included.
pub fn search_space(reg: &Registry, program: &Program, max_cardinality: usize) -> Vec<Vec<SemanticProfile>> {
    let candidates = applicable_variants(reg, &features(program));
    (1..=max_cardinality.min(SearchConfig::MAX_CARDINALITY))
        .map(|c| enumerate_profiles(reg, &candidates, c))
        .collect()
}

/// True when every active variant of `small` is also active, with the same
/// parameters, in `big`.
fn is_subprofile(small: &SemanticProfile, big: &SemanticProfile) -> bool {
    small.active().iter().all(|a| big.active().contains(a))
}

/// Searches profiles by increasing cardinality for irredundant matches: a
/// profile is reported only if no proper subprofile of it matches, and such
/// supersets are not simulated at all.
pub fn diagnose(reg: &Registry, program: &Program, obs: &Observation, cfg: &SearchConfig) -> DiagnosisReport {
    let reference = run_reference(program, cfg.limits);
    let correct = match_transcript(obs, &reference);
    let mut searched = 1;
    let mut found: Vec<Explanation> = Vec::new();
    for layer in search_space(reg, program, cfg.max_cardinality) {
        if cfg.minimum_only && !found.is_empty() {
            break;
        }
        let layer: Vec<SemanticProfile> = layer
            .into_iter()
            .filter(|p| !found.iter().any(|e| is_subprofile(&e.profile, p)))
            .collect();
        searched += layer.len();
        let results = simulate_all(program, &layer, cfg.limits);
        found.extend(
            layer
                .into_iter()
                .zip(results)
                .filter(|(_, r)| match_transcript(obs, r))
                .map(|(profile, r)| Explanation {
                    profile,
                    mode: obs.mode,
                    status: r.status,
                }),
        );
    }
    found.sort_by(|a, b| rank_key(&a.profile).cmp(&rank_key(&b.profile)));
    if correct {
        DiagnosisReport {
            verdict: Verdict::Correct,
            explanations: Vec::new(),
            masked_candidates: found,
            ambiguity: 0,
            searched,
        }
    } else {
        DiagnosisReport {
            verdict: if found.is_empty() {
                Verdict::Unexplained
            } else {
                Verdict::Explained
            },
            ambiguity: found.len(),
            explanations: found,
            masked_candidates: Vec::new(),
            searched,
        }
    }
}

/// Profiles sharing one outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Indices into the input, ascending.
    pub members: Vec<usize>,
    pub transcript: Vec<String>,
    pub status: ExecStatus,
}

/// Groups profiles by identical transcript and status; classes are ordered
/// by their first member.
pub fn equivalence_classes(program: &Program, profiles: &[SemanticProfile], limits: Limits) -> Vec<EquivalenceClass> {
    let results = simulate_all(program, profiles, limits);
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match classes
            .iter_mut()
            .find(|c| c.status == r.status && c.transcript == r.transcript)
        {
            Some(c) => c.members.push(i),
            None => classes.push(EquivalenceClass {
                members: vec![i],
                transcript: r.transcript,
                status: r.status,
            }),
        }
    }
    classes
}
