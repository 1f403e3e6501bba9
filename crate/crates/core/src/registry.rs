//! The machine-readable taxonomy: hierarchical codes, titles, anchoring
//! quotes, executability status, hook slots and parameter schemas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::MisconceptionCode;
use crate::lang::FEATURE_NAMES;

const SHIPPED: &str = include_str!("../catalog/taxonomy.json");

/// Interpreter hook points. A variant claims one slot (two for the bundled
/// entry/cycle variants); variants compose iff their slots are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HookSlot {
    SelBranchSelect,
    SelBodyExtent,
    SelPost,
    SelRepeat,
    SelTrigger,
    SelCondEval,
    SelNesting,
    LoopNesting,
    LoopEntryOrder,
    LoopCycleOrder,
    LoopBodySchedule,
    LoopBodyExtent,
    LoopPost,
    LoopPhaseSkip,
    LoopCondSemantics,
    LoopCondEval,
    LoopUpdateSemantics,
    LoopStateView,
    JumpBreak,
    JumpContinue,
}

impl HookSlot {
    pub const ALL: [HookSlot; 20] = [
        HookSlot::SelBranchSelect,
        HookSlot::SelBodyExtent,
        HookSlot::SelPost,
        HookSlot::SelRepeat,
        HookSlot::SelTrigger,
        HookSlot::SelCondEval,
        HookSlot::SelNesting,
        HookSlot::LoopNesting,
        HookSlot::LoopEntryOrder,
        HookSlot::LoopCycleOrder,
        HookSlot::LoopBodySchedule,
        HookSlot::LoopBodyExtent,
        HookSlot::LoopPost,
        HookSlot::LoopPhaseSkip,
        HookSlot::LoopCondSemantics,
        HookSlot::LoopCondEval,
        HookSlot::LoopUpdateSemantics,
        HookSlot::LoopStateView,
        HookSlot::JumpBreak,
        HookSlot::JumpContinue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HookSlot::SelBranchSelect => "sel.branch_select",
            HookSlot::SelBodyExtent => "sel.body_extent",
            HookSlot::SelPost => "sel.post",
            HookSlot::SelRepeat => "sel.repeat",
            HookSlot::SelTrigger => "sel.trigger",
            HookSlot::SelCondEval => "sel.cond_eval",
            HookSlot::SelNesting => "sel.nesting",
            HookSlot::LoopNesting => "loop.nesting",
            HookSlot::LoopEntryOrder => "loop.entry_order",
            HookSlot::LoopCycleOrder => "loop.cycle_order",
            HookSlot::LoopBodySchedule => "loop.body_schedule",
            HookSlot::LoopBodyExtent => "loop.body_extent",
            HookSlot::LoopPost => "loop.post",
            HookSlot::LoopPhaseSkip => "loop.phase_skip",
            HookSlot::LoopCondSemantics => "loop.cond_semantics",
            HookSlot::LoopCondEval => "loop.cond_eval",
            HookSlot::LoopUpdateSemantics => "loop.update_semantics",
            HookSlot::LoopStateView => "loop.state_view",
            HookSlot::JumpBreak => "jump.break",
            HookSlot::JumpContinue => "jump.continue",
        }
    }

    pub fn from_name(name: &str) -> Option<HookSlot> {
        HookSlot::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Parses a slot field; bundled slots are joined with `+`.
    pub fn parse_list(field: &str) -> Option<Vec<HookSlot>> {
        field.split('+').map(|s| HookSlot::from_name(s.trim())).collect()
    }
}

impl fmt::Display for HookSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Executable,
    Parameterized,
    Descriptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    RuntimeHook,
    StructuralRewrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    #[serde(rename = "type")]
    pub ty: String,
    pub default: i64,
    pub min: i64,
    pub max: i64,
}

impl ParamSpec {
    pub fn contains(&self, v: i64) -> bool {
        (self.min..=self.max).contains(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub code: MisconceptionCode,
    pub title: String,
    pub quote: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, ParamSpec>,
    /// Feature names that must all be present for the variant to apply.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub applicability: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

impl CatalogEntry {
    pub fn is_runnable(&self) -> bool {
        self.status != Status::Descriptive
    }

    /// Parsed slots; empty when absent or unknown.
    pub fn slots(&self) -> Vec<HookSlot> {
        self.slot
            .as_deref()
            .and_then(HookSlot::parse_list)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Category {
    pub code: MisconceptionCode,
    pub title: String,
    pub quote: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Registry {
    pub version: String,
    #[serde(default)]
    pub categories: Vec<Category>,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("malformed registry document: {0}")]
    Malformed(String),
    #[error("duplicate code {0}")]
    DuplicateCode(MisconceptionCode),
    #[error("{code} has no entry or category for its prefix {prefix}")]
    DanglingPrefix {
        code: MisconceptionCode,
        prefix: MisconceptionCode,
    },
    #[error("descriptive entry {0} must not name a slot")]
    DescriptiveWithSlot(MisconceptionCode),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown code {0}")]
pub struct UnknownCode(pub String);

/// One invariant violation found by [`validate_registry`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: Option<MisconceptionCode>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.code {
            Some(c) => write!(f, "{c}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Parses and checks a registry document. Entries are kept in code order.
pub fn load_registry(source: &str) -> Result<Registry, RegistryError> {
    let mut reg: Registry = serde_json::from_str(source).map_err(|e| RegistryError::Malformed(e.to_string()))?;
    let mut seen = BTreeSet::new();
    for code in reg.categories.iter().map(|c| &c.code).chain(reg.entries.iter().map(|e| &e.code)) {
        if !seen.insert(code.clone()) {
            return Err(RegistryError::DuplicateCode(code.clone()));
        }
    }
    for e in &reg.entries {
        if let Some(prefix) = dangling_prefix(&e.code, &seen) {
            return Err(RegistryError::DanglingPrefix {
                code: e.code.clone(),
                prefix,
            });
        }
        if e.status == Status::Descriptive && e.slot.is_some() {
            return Err(RegistryError::DescriptiveWithSlot(e.code.clone()));
        }
    }
    reg.categories.sort_by(|a, b| a.code.cmp(&b.code));
    reg.entries.sort_by(|a, b| a.code.cmp(&b.code));
    Ok(reg)
}

/// Domain roots are implicit; every deeper proper prefix must be declared.
fn dangling_prefix(code: &MisconceptionCode, declared: &BTreeSet<MisconceptionCode>) -> Option<MisconceptionCode> {
    code.proper_prefixes()
        .into_iter()
        .find(|p| !p.is_root() && !declared.contains(p))
}

/// The catalog bundled with the library.
pub fn shipped() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| load_registry(SHIPPED).expect("bundled catalog loads"))
}

pub fn shipped_source() -> &'static str {
    SHIPPED
}

impl Registry {
    pub fn lookup(&self, code: &MisconceptionCode) -> Result<&CatalogEntry, UnknownCode> {
        self.entries
            .iter()
            .find(|e| &e.code == code)
            .ok_or_else(|| UnknownCode(code.to_string()))
    }

    pub fn lookup_str(&self, code: &str) -> Result<&CatalogEntry, UnknownCode> {
        let parsed: MisconceptionCode = code.parse().map_err(|_| UnknownCode(code.to_string()))?;
        self.lookup(&parsed)
    }

    pub fn category(&self, code: &MisconceptionCode) -> Option<&Category> {
        self.categories.iter().find(|c| &c.code == code)
    }

    /// Entries strictly below `prefix`, in code order.
    pub fn children(&self, prefix: &MisconceptionCode) -> Vec<&CatalogEntry> {
        self.entries
            .iter()
            .filter(|e| e.code.has_proper_prefix(prefix))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }
}

pub fn validate_registry(reg: &Registry) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut issue = |code: &MisconceptionCode, message: String| {
        issues.push(Issue {
            code: Some(code.clone()),
            message,
        })
    };
    let mut declared = BTreeSet::new();
    for code in reg.categories.iter().map(|c| &c.code).chain(reg.entries.iter().map(|e| &e.code)) {
        if !declared.insert(code.clone()) {
            issue(code, "duplicate code".into());
        }
    }
    for e in &reg.entries {
        let c = &e.code;
        if let Some(p) = dangling_prefix(c, &declared) {
            issue(c, format!("prefix {p} is not declared"));
        }
        if reg.entries.iter().any(|o| o.code.has_proper_prefix(c)) {
            issue(c, "entry has entries below it".into());
        }
        match (e.status, &e.slot) {
            (Status::Descriptive, Some(_)) => issue(c, "descriptive entry names a slot".into()),
            (Status::Descriptive, None) => {}
            (_, None) => issue(c, "runnable entry has no slot".into()),
            (_, Some(s)) => {
                if HookSlot::parse_list(s).is_none() {
                    issue(c, format!("unknown slot `{s}`"));
                }
            }
        }
        if e.status == Status::Descriptive {
            if e.rationale.as_deref().is_none_or(|r| r.trim().is_empty()) {
                issue(c, "descriptive entry has no rationale".into());
            }
        } else if e.kind.is_none() {
            issue(c, "runnable entry has no kind".into());
        }
        match (e.status == Status::Parameterized, e.params.is_empty()) {
            (true, true) => issue(c, "parameterized entry has no params".into()),
            (false, false) => issue(c, "only parameterized entries take params".into()),
            _ => {}
        }
        for (name, p) in &e.params {
            if p.ty != "int" {
                issue(c, format!("param `{name}` has unsupported type `{}`", p.ty));
            }
            if p.min > p.max || !p.contains(p.default) {
                issue(c, format!("param `{name}` default {} outside {}..{}", p.default, p.min, p.max));
            }
        }
        for f in &e.applicability {
            if !FEATURE_NAMES.contains(&f.as_str()) {
                issue(c, format!("unknown feature `{f}`"));
            }
        }
        if e.quote.trim().is_empty() || e.title.trim().is_empty() {
            issue(c, "title and quote are required".into());
        }
    }
    issues
}
