use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value as Json};

use super::value::{Phase, RuntimeErrorKind, Value};
use crate::lang::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpKind {
    Break,
    Continue,
}

/// Arm chosen by a selection: a conditional branch index or the else arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchRef {
    Index(usize),
    Else,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    CondCheck { node: NodeId, value: bool },
    PhaseEnter { node: NodeId, phase: Phase },
    BranchTaken { node: NodeId, branch: BranchRef },
    /// `live` is false for output produced in shadow mode or later rolled
    /// back; only live outputs are in the transcript.
    Output { node: NodeId, text: String, live: bool },
    VarWrite { node: NodeId, name: String, value: Value },
    Jump { node: NodeId, kind: JumpKind },
    Halt { node: Option<NodeId>, reason: String },
    RolledBack { node: Option<NodeId> },
}

impl Event {
    pub fn node(&self) -> Option<NodeId> {
        match self {
            Event::CondCheck { node, .. }
            | Event::PhaseEnter { node, .. }
            | Event::BranchTaken { node, .. }
            | Event::Output { node, .. }
            | Event::VarWrite { node, .. }
            | Event::Jump { node, .. } => Some(*node),
            Event::Halt { node, .. } | Event::RolledBack { node } => *node,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Event::CondCheck { .. } => "CondCheck",
            Event::PhaseEnter { .. } => "PhaseEnter",
            Event::BranchTaken { .. } => "BranchTaken",
            Event::Output { .. } => "Output",
            Event::VarWrite { .. } => "VarWrite",
            Event::Jump { .. } => "Jump",
            Event::Halt { .. } => "Halt",
            Event::RolledBack { .. } => "RolledBack",
        }
    }

    fn payload(&self) -> Json {
        match self {
            Event::CondCheck { value, .. } => json!({ "value": value }),
            Event::PhaseEnter { phase, .. } => json!({ "phase": phase }),
            Event::BranchTaken { branch, .. } => match branch {
                BranchRef::Index(i) => json!({ "branch": i }),
                BranchRef::Else => json!({ "branch": "else" }),
            },
            Event::Output { text, live, .. } => json!({ "text": text, "live": live }),
            Event::VarWrite { name, value, .. } => json!({ "name": name, "value": value }),
            Event::Jump { kind, .. } => json!({ "kind": kind }),
            Event::Halt { reason, .. } => json!({ "reason": reason }),
            Event::RolledBack { .. } => json!({}),
        }
    }

    pub fn to_json(&self, seq: usize) -> Json {
        json!({
            "seq": seq,
            "nodeId": self.node().map(|n| n.0),
            "kind": self.kind(),
            "payload": self.payload(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecStatus {
    Completed,
    StepCap,
    OutputCap,
    HaltedByVariant,
    RuntimeError(RuntimeErrorKind),
}

impl ExecStatus {
    /// Stopped by a resource limit, so the transcript may be truncated.
    pub fn is_capped(self) -> bool {
        matches!(self, ExecStatus::StepCap | ExecStatus::OutputCap)
    }

    pub fn is_error(self) -> bool {
        matches!(self, ExecStatus::RuntimeError(_))
    }
}

impl fmt::Display for ExecStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecStatus::Completed => f.write_str("completed"),
            ExecStatus::StepCap => f.write_str("step_cap"),
            ExecStatus::OutputCap => f.write_str("output_cap"),
            ExecStatus::HaltedByVariant => f.write_str("halted_by_variant"),
            ExecStatus::RuntimeError(k) => write!(f, "runtime_error({})", k.as_str()),
        }
    }
}

impl Serialize for ExecStatus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Limits {
    pub max_events: usize,
    pub max_outputs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_events: 10_000,
            max_outputs: 1_000,
        }
    }
}

/// Parses `events=N,outputs=M`; either key may be omitted.
impl FromStr for Limits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut limits = Limits::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let n: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("`{value}` is not a non-negative integer"))?;
            match key.trim() {
                "events" => limits.max_events = n,
                "outputs" => limits.max_outputs = n,
                other => return Err(format!("unknown limit `{other}`")),
            }
        }
        Ok(limits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecResult {
    pub transcript: Vec<String>,
    pub trace: Vec<Event>,
    pub status: ExecStatus,
}

impl ExecResult {
    /// One JSON object per line: `{seq, nodeId, kind, payload}`.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.trace.iter().enumerate() {
            out.push_str(&e.to_json(i).to_string());
            out.push('\n');
        }
        out
    }

    pub fn transcript_json(&self) -> String {
        serde_json::to_string(&self.transcript).expect("strings serialize")
    }

    pub fn to_json(&self) -> Json {
        json!({ "status": self.status, "transcript": self.transcript })
    }
}
