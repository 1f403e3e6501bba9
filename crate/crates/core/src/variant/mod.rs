//! Executable misconception variants: the canonical catalog table, profile
//! compilation and execution under a profile.

mod rewrite;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::code::MisconceptionCode;
use crate::exec::hooks::*;
use crate::exec::{run_with_hooks, ExecResult, Limits, RelSwap};
use crate::lang::{FeatureSet, Program};
use crate::registry::{CatalogEntry, HookSlot, Issue, Kind, Registry, Status};

pub use rewrite::Rewrite;

/// One row of the normative table: code, slot field and status.
pub struct CanonicalRow {
    pub code: &'static str,
    pub slot: Option<&'static str>,
    pub status: Status,
}

const fn row(code: &'static str, slot: &'static str, status: Status) -> CanonicalRow {
    CanonicalRow {
        code,
        slot: Some(slot),
        status,
    }
}

const fn descriptive(code: &'static str) -> CanonicalRow {
    CanonicalRow {
        code,
        slot: None,
        status: Status::Descriptive,
    }
}

use Status::{Executable as X, Parameterized as P};

/// Every taxonomy leaf, in code order.
pub const CANONICAL: &[CanonicalRow] = &[
    row("SEL.1.a.i", "sel.branch_select", X),
    row("SEL.1.a.ii", "sel.branch_select", P),
    row("SEL.1.b.i", "sel.branch_select", X),
    row("SEL.1.b.ii", "sel.branch_select", X),
    row("SEL.1.c", "sel.branch_select", X),
    row("SEL.2.a", "sel.body_extent", P),
    row("SEL.2.b", "sel.body_extent", X),
    descriptive("SEL.3.a.i"),
    row("SEL.3.b.i", "sel.post", X),
    row("SEL.3.b.ii", "sel.post", X),
    row("SEL.3.c.i", "sel.branch_select", X),
    row("SEL.3.c.ii", "sel.body_extent", X),
    descriptive("SEL.4.a.i"),
    row("SEL.4.a.ii.A", "sel.repeat", X),
    row("SEL.4.a.ii.B", "sel.repeat", P),
    row("SEL.4.b.i", "sel.trigger", X),
    row("SEL.4.b.ii", "sel.trigger", X),
    row("SEL.4.c.i", "sel.cond_eval", X),
    row("SEL.4.c.ii.A.I", "sel.cond_eval", X),
    row("SEL.4.c.ii.A.II", "sel.cond_eval", X),
    row("SEL.4.c.ii.B", "sel.cond_eval", X),
    row("SEL.4.d.i", "sel.branch_select", P),
    row("SEL.4.d.ii.A", "sel.branch_select", X),
    row("SEL.4.d.ii.B", "sel.nesting", X),
    row("SEL.5.a.i", "sel.nesting", X),
    row("SEL.5.a.ii", "sel.nesting", X),
    row("SEL.5.b", "sel.branch_select", X),
    row("ITER.1.a", "loop.nesting", X),
    row("ITER.1.b", "loop.entry_order+loop.cycle_order", X),
    descriptive("ITER.1.c"),
    row("ITER.1.d", "loop.body_schedule", X),
    row("ITER.2.a.i", "loop.body_extent", X),
    row("ITER.2.a.ii", "loop.body_extent", P),
    row("ITER.2.b.i", "loop.post", X),
    row("ITER.2.b.ii", "loop.post", X),
    row("ITER.3.a.i", "loop.phase_skip", X),
    row("ITER.3.a.ii", "loop.entry_order", X),
    row("ITER.3.a.iii", "loop.phase_skip", X),
    row("ITER.3.a.iv", "loop.phase_skip", X),
    row("ITER.3.a.v", "loop.phase_skip", X),
    row("ITER.3.b.i", "loop.entry_order", X),
    row("ITER.3.b.ii.A", "loop.cycle_order", X),
    row("ITER.3.b.ii.B", "loop.cycle_order", X),
    row("ITER.3.b.iii", "loop.entry_order+loop.cycle_order", X),
    row("ITER.3.b.iv", "loop.cond_semantics", X),
    row("ITER.3.b.v", "loop.body_schedule", X),
    row("ITER.4.a.i.A", "loop.update_semantics", X),
    row("ITER.4.a.i.B", "loop.update_semantics", X),
    row("ITER.4.a.i.C", "loop.update_semantics", X),
    row("ITER.4.a.ii.A", "loop.state_view", X),
    row("ITER.4.a.ii.B", "loop.state_view", X),
    descriptive("ITER.4.a.iii.A"),
    descriptive("ITER.4.a.iii.B"),
    row("ITER.4.b", "loop.state_view", X),
    row("ITER.5.a.i", "loop.cond_semantics", P),
    row("ITER.5.a.ii.A", "loop.cond_semantics", X),
    row("ITER.5.a.ii.B", "loop.cond_semantics", X),
    row("ITER.5.a.iii.A", "loop.cond_semantics", X),
    row("ITER.5.a.iii.B", "loop.cond_semantics", X),
    row("ITER.5.b.i.A", "loop.cond_eval", X),
    row("ITER.5.b.i.B", "loop.cond_eval", X),
    descriptive("ITER.5.b.ii"),
    row("ITER.6.a", "loop.nesting", X),
    row("ITER.6.b", "loop.nesting", X),
    row("ITER.6.c", "loop.nesting", X),
    row("ITER.6.d", "loop.nesting", X),
    row("ITER.6.e", "loop.nesting", X),
    row("ITER.6.f", "loop.nesting", X),
    row("ITER.7.a.i", "jump.break", X),
    row("ITER.7.a.ii", "jump.break", X),
    row("ITER.7.a.iii", "jump.break", X),
    row("ITER.7.b.i", "jump.continue", X),
];

/// What activating a variant does to the interpreter.
#[derive(Debug, Clone, Copy)]
pub enum Effect {
    Hook(fn(&mut Hooks, &BTreeMap<String, i64>)),
    Rewrite(Rewrite),
}

fn param(params: &BTreeMap<String, i64>, name: &str) -> i64 {
    params.get(name).copied().unwrap_or_default()
}

fn count(params: &BTreeMap<String, i64>, name: &str) -> usize {
    usize::try_from(param(params, name)).unwrap_or_default()
}

/// The implementation behind a code; `None` for descriptive or unknown
/// codes. Parameters must already be bound.
pub fn effect(code: &str, params: &BTreeMap<String, i64>) -> Option<Effect> {
    use Effect::{Hook, Rewrite as R};
    let k = count(params, "k");
    Some(match code {
        "SEL.1.a.i" => Hook(|h, _| h.branch_select = Some(BranchSelect::RunAll)),
        "SEL.1.a.ii" => Hook(|h, p| h.branch_select = Some(BranchSelect::ForceArm(count(p, "k")))),
        "SEL.1.b.i" => Hook(|h, _| h.branch_select = Some(BranchSelect::AllTrue)),
        "SEL.1.b.ii" => Hook(|h, _| h.branch_select = Some(BranchSelect::ExitAtFirstFalse)),
        "SEL.1.c" => Hook(|h, _| h.branch_select = Some(BranchSelect::Negate)),
        "SEL.2.a" => R(Rewrite::AbsorbIntoLastArm(k)),
        "SEL.2.b" => R(Rewrite::HoistLastOfArms),
        "SEL.3.b.i" => Hook(|h, _| h.sel_post = Some(SelPost::Restart)),
        "SEL.3.b.ii" => Hook(|h, _| h.sel_post = Some(SelPost::Halt)),
        "SEL.3.c.i" => Hook(|h, _| h.branch_select = Some(BranchSelect::ElseAlways)),
        "SEL.3.c.ii" => R(Rewrite::NextIsElse),
        "SEL.4.a.ii.A" => Hook(|h, _| h.sel_repeat = Some(SelRepeat::WhileTaken)),
        "SEL.4.a.ii.B" => Hook(|h, p| {
            h.sel_repeat = Some(SelRepeat::Times(u32::try_from(param(p, "n")).unwrap_or(2)))
        }),
        "SEL.4.b.i" => Hook(|h, _| h.sel_trigger = Some(SelTrigger::AfterStatement)),
        "SEL.4.b.ii" => Hook(|h, _| h.sel_trigger = Some(SelTrigger::WholeProgram)),
        "SEL.4.c.i" => Hook(|h, _| h.sel_cond_eval = Some(SelCondEval::Hindsight)),
        "SEL.4.c.ii.A.I" => Hook(|h, _| h.sel_cond_eval = Some(SelCondEval::ShadowToEnd)),
        "SEL.4.c.ii.A.II" => Hook(|h, _| h.sel_cond_eval = Some(SelCondEval::ShadowWhileTrue)),
        "SEL.4.c.ii.B" => Hook(|h, _| h.sel_cond_eval = Some(SelCondEval::ShadowThenWhole)),
        "SEL.4.d.i" => Hook(|h, p| h.branch_select = Some(BranchSelect::Permuted(count(p, "perm")))),
        "SEL.4.d.ii.A" => Hook(|h, _| h.branch_select = Some(BranchSelect::RecheckForElse)),
        "SEL.4.d.ii.B" => R(Rewrite::FuseComplementary),
        "SEL.5.a.i" => R(Rewrite::LiftNestedIfs),
        "SEL.5.a.ii" => R(Rewrite::NestConsecutive),
        "SEL.5.b" => Hook(|h, _| h.branch_select = Some(BranchSelect::IgnoreInLoop)),
        "ITER.1.a" => R(Rewrite::InlineLoopBody),
        "ITER.1.b" => Hook(|h, _| h.entry = Some(EntryOrder::LoopIsIf)),
        "ITER.1.d" => Hook(|h, _| h.body_schedule = Some(BodySchedule::CountsStatements)),
        "ITER.2.a.i" => R(Rewrite::HoistLastOfLoop),
        "ITER.2.a.ii" => R(Rewrite::AbsorbIntoLoop(k)),
        "ITER.2.b.i" => Hook(|h, _| h.loop_post = Some(LoopPost::Halt)),
        "ITER.2.b.ii" => Hook(|h, _| h.loop_post = Some(LoopPost::IterateFollowing)),
        "ITER.3.a.i" => Hook(|h, _| h.phase_skip = Some(PhaseSkip::Body)),
        "ITER.3.a.ii" => Hook(|h, _| h.entry = Some(EntryOrder::BodyFirst)),
        "ITER.3.a.iii" => Hook(|h, _| h.phase_skip = Some(PhaseSkip::Cond)),
        "ITER.3.a.iv" => Hook(|h, _| h.phase_skip = Some(PhaseSkip::Update)),
        "ITER.3.a.v" => Hook(|h, _| h.phase_skip = Some(PhaseSkip::Init)),
        "ITER.3.b.i" => Hook(|h, _| h.entry = Some(EntryOrder::DeferredInit)),
        "ITER.3.b.ii.A" => Hook(|h, _| h.cycle = Some(CycleOrder::UpdateBeforeBody)),
        "ITER.3.b.ii.B" => Hook(|h, _| h.cycle = Some(CycleOrder::UpdateBeforeBodyIfPrefix)),
        "ITER.3.b.iii" => Hook(|h, _| h.entry = Some(EntryOrder::UpdateFirst)),
        "ITER.3.b.iv" => Hook(|h, _| h.cond_semantics = Some(CondSemantics::RecheckInBody)),
        "ITER.3.b.v" => Hook(|h, _| h.body_schedule = Some(BodySchedule::Grouped)),
        "ITER.4.a.i.A" => Hook(|h, _| h.update_semantics = Some(UpdateSemantics::Alternating)),
        "ITER.4.a.i.B" => Hook(|h, _| h.update_semantics = Some(UpdateSemantics::UnitStep)),
        "ITER.4.a.i.C" => Hook(|h, _| h.update_semantics = Some(UpdateSemantics::DoubleIncDec)),
        "ITER.4.a.ii.A" => Hook(|h, _| h.state_view = Some(StateView::ShadowControlInHeader)),
        "ITER.4.a.ii.B" => Hook(|h, _| h.state_view = Some(StateView::FrozenControlInBody)),
        "ITER.4.b" => Hook(|h, _| h.state_view = Some(StateView::FrozenCarriedInBody)),
        "ITER.5.a.i" => Hook(|h, p| {
            h.cond_semantics = Some(CondSemantics::Extra(u32::try_from(param(p, "k")).unwrap_or(1)))
        }),
        "ITER.5.a.ii.A" => Hook(|h, _| h.cond_semantics = Some(CondSemantics::UntilIfFirstFalse)),
        "ITER.5.a.ii.B" => Hook(|h, _| h.cond_semantics = Some(CondSemantics::Until)),
        "ITER.5.a.iii.A" => Hook(|h, _| h.cond_semantics = Some(CondSemantics::WaitThenIterate)),
        "ITER.5.a.iii.B" => Hook(|h, _| h.cond_semantics = Some(CondSemantics::WaitSkippingBody)),
        "ITER.5.b.i.A" => Hook(|h, _| h.rel_swap = Some(RelSwap::Strictness)),
        "ITER.5.b.i.B" => Hook(|h, _| h.rel_swap = Some(RelSwap::Direction)),
        "ITER.6.a" => R(Rewrite::FuseNestedLoops),
        "ITER.6.b" => R(Rewrite::SequenceNestedLoops),
        "ITER.6.c" => R(Rewrite::SwapLoopHeaders),
        "ITER.6.d" => Hook(|h, _| h.nesting = Some(Nesting::OuterOnce)),
        "ITER.6.e" => R(Rewrite::InnerHeaderWins),
        "ITER.6.f" => Hook(|h, _| h.nesting = Some(Nesting::SkipRestOnEmptyInner)),
        "ITER.7.a.i" => Hook(|h, _| h.on_break = Some(JumpAs::Continue)),
        "ITER.7.a.ii" => Hook(|h, _| h.on_break = Some(JumpAs::Halt)),
        "ITER.7.a.iii" => Hook(|h, _| h.on_break = Some(JumpAs::Ignore)),
        "ITER.7.b.i" => Hook(|h, _| h.on_continue = Some(JumpAs::Ignore)),
        _ => return None,
    })
}

/// Differences between a registry and the canonical table.
pub fn audit_catalog(reg: &Registry) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut push = |code: Option<MisconceptionCode>, message: String| issues.push(Issue { code, message });
    for row in CANONICAL {
        let code: MisconceptionCode = row.code.parse().expect("canonical code");
        match reg.lookup(&code) {
            Err(_) => push(Some(code), "missing from registry".into()),
            Ok(e) => {
                if e.status != row.status {
                    push(Some(code.clone()), format!("status {:?}, expected {:?}", e.status, row.status));
                }
                if e.slot.as_deref() != row.slot {
                    push(Some(code.clone()), format!("slot {:?}, expected {:?}", e.slot, row.slot));
                }
                let defaults = default_params(e);
                let expected_kind = effect(row.code, &defaults).map(|eff| match eff {
                    Effect::Hook(_) => Kind::RuntimeHook,
                    Effect::Rewrite(_) => Kind::StructuralRewrite,
                });
                if e.kind != expected_kind {
                    push(Some(code), format!("kind {:?}, expected {:?}", e.kind, expected_kind));
                }
            }
        }
    }
    for e in &reg.entries {
        if !CANONICAL.iter().any(|r| r.code == e.code.to_string()) {
            push(Some(e.code.clone()), "not in the canonical table".into());
        }
    }
    issues
}

fn default_params(e: &CatalogEntry) -> BTreeMap<String, i64> {
    e.params.iter().map(|(n, p)| (n.clone(), p.default)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActiveVariant {
    pub code: MisconceptionCode,
    pub params: BTreeMap<String, i64>,
}

impl fmt::Display for ActiveVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)?;
        if !self.params.is_empty() {
            let list: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", list.join(","))?;
        }
        Ok(())
    }
}

/// A validated, conflict-free set of active variants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SemanticProfile {
    active: Vec<ActiveVariant>,
    hooks: Hooks,
    rewrites: Vec<Rewrite>,
    non_default: usize,
}

impl SemanticProfile {
    pub fn empty() -> Self {
        SemanticProfile::default()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    /// Active variants in code order.
    pub fn active(&self) -> &[ActiveVariant] {
        &self.active
    }

    pub fn codes(&self) -> impl Iterator<Item = &MisconceptionCode> {
        self.active.iter().map(|a| &a.code)
    }

    pub fn hooks(&self) -> &Hooks {
        &self.hooks
    }

    /// Structural rewrites in code order.
    pub fn rewrites(&self) -> &[Rewrite] {
        &self.rewrites
    }

    /// How many parameters are bound to something other than their default.
    pub fn non_default_params(&self) -> usize {
        self.non_default
    }
}

impl fmt::Display for SemanticProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.active.iter().map(ToString::to_string).collect();
        f.write_str(&list.join(","))
    }
}

impl Serialize for SemanticProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.active.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("bad profile literal: {0}")]
    Syntax(String),
    #[error("unknown code {0}")]
    UnknownCode(String),
    #[error("{0} is descriptive only and cannot be executed")]
    Descriptive(MisconceptionCode),
    #[error("{0} has no executable implementation")]
    NotImplemented(MisconceptionCode),
    #[error("{0} requested twice")]
    Duplicate(MisconceptionCode),
    #[error("{first} and {second} both claim slot {slot}")]
    SlotConflict {
        first: MisconceptionCode,
        second: MisconceptionCode,
        slot: HookSlot,
    },
    #[error("{code} has no parameter `{name}`")]
    UnknownParam { code: MisconceptionCode, name: String },
    #[error("{code}: {name}={value} outside {min}..{max}")]
    ParamOutOfRange {
        code: MisconceptionCode,
        name: String,
        value: i64,
        min: i64,
        max: i64,
    },
}

pub type Request = (MisconceptionCode, BTreeMap<String, i64>);

/// Builds a profile from requested codes, filling parameter defaults.
pub fn compile_profile(reg: &Registry, requested: &[Request]) -> Result<SemanticProfile, ProfileError> {
    let mut active = Vec::with_capacity(requested.len());
    let mut claimed: BTreeMap<HookSlot, MisconceptionCode> = BTreeMap::new();
    let mut non_default = 0;
    for (code, given) in requested {
        let entry = reg.lookup(code).map_err(|_| ProfileError::UnknownCode(code.to_string()))?;
        if entry.status == Status::Descriptive {
            return Err(ProfileError::Descriptive(code.clone()));
        }
        if active.iter().any(|a: &ActiveVariant| &a.code == code) {
            return Err(ProfileError::Duplicate(code.clone()));
        }
        for name in given.keys() {
            if !entry.params.contains_key(name) {
                return Err(ProfileError::UnknownParam {
                    code: code.clone(),
                    name: name.clone(),
                });
            }
        }
        let mut params = BTreeMap::new();
        for (name, spec) in &entry.params {
            let value = given.get(name).copied().unwrap_or(spec.default);
            if !spec.contains(value) {
                return Err(ProfileError::ParamOutOfRange {
                    code: code.clone(),
                    name: name.clone(),
                    value,
                    min: spec.min,
                    max: spec.max,
                });
            }
            if value != spec.default {
                non_default += 1;
            }
            params.insert(name.clone(), value);
        }
        if effect(&code.to_string(), &params).is_none() {
            return Err(ProfileError::NotImplemented(code.clone()));
        }
        for slot in entry.slots() {
            if let Some(first) = claimed.get(&slot) {
                let (first, second) = if first < code {
                    (first.clone(), code.clone())
                } else {
                    (code.clone(), first.clone())
                };
                return Err(ProfileError::SlotConflict { first, second, slot });
            }
            claimed.insert(slot, code.clone());
        }
        active.push(ActiveVariant {
            code: code.clone(),
            params,
        });
    }
    active.sort_by(|a, b| a.code.cmp(&b.code));
    let mut hooks = Hooks::default();
    let mut rewrites = Vec::new();
    for a in &active {
        match effect(&a.code.to_string(), &a.params).expect("checked above") {
            Effect::Hook(install) => install(&mut hooks, &a.params),
            Effect::Rewrite(r) => rewrites.push(r),
        }
    }
    Ok(SemanticProfile {
        active,
        hooks,
        rewrites,
        non_default,
    })
}

/// Parses `CODE[(name=int,...)]` items separated by commas, e.g.
/// `ITER.3.b.ii.A,ITER.5.a.i(k=2)`. An empty literal is the empty profile.
pub fn parse_profile_literal(text: &str) -> Result<Vec<Request>, ProfileError> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| ProfileError::Syntax(format!("unbalanced `)` in `{text}`")))?
            }
            ',' if depth == 0 => {
                items.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(ProfileError::Syntax(format!("unclosed `(` in `{text}`")));
    }
    items.push(&text[start..]);
    if items.len() == 1 && items[0].trim().is_empty() {
        return Ok(Vec::new());
    }
    items.into_iter().map(parse_item).collect()
}

fn parse_item(item: &str) -> Result<Request, ProfileError> {
    let item = item.trim();
    let (code_text, args) = match item.find('(') {
        Some(open) => {
            let inner = item[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| ProfileError::Syntax(format!("trailing text after `)` in `{item}`")))?;
            (&item[..open], Some(inner))
        }
        None => (item, None),
    };
    let code: MisconceptionCode = code_text
        .trim()
        .parse()
        .map_err(|_| ProfileError::UnknownCode(code_text.trim().to_string()))?;
    let mut params = BTreeMap::new();
    for pair in args.into_iter().flat_map(|a| a.split(',')).map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| ProfileError::Syntax(format!("expected name=value, got `{pair}`")))?;
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|_| ProfileError::Syntax(format!("`{}` is not an integer", value.trim())))?;
        params.insert(name.trim().to_string(), value);
    }
    Ok((code, params))
}

/// Parses and compiles a profile literal in one step.
pub fn profile_from_literal(reg: &Registry, text: &str) -> Result<SemanticProfile, ProfileError> {
    compile_profile(reg, &parse_profile_literal(text)?)
}

/// Runnable, implemented codes whose applicability holds for `features`, in
/// code order.
pub fn applicable_variants(reg: &Registry, features: &FeatureSet) -> Vec<MisconceptionCode> {
    reg.entries
        .iter()
        .filter(|e| e.is_runnable())
        .filter(|e| effect(&e.code.to_string(), &default_params(e)).is_some())
        .filter(|e| e.applicability.iter().all(|f| features.contains(f)))
        .map(|e| e.code.clone())
        .collect()
}

/// Every parameter binding for `entry`, defaults first.
pub fn param_grid(entry: &CatalogEntry) -> Vec<BTreeMap<String, i64>> {
    let mut grid = vec![BTreeMap::new()];
    for (name, spec) in &entry.params {
        let values = std::iter::once(spec.default).chain((spec.min..=spec.max).filter(|v| *v != spec.default));
        let values: Vec<i64> = values.collect();
        grid = grid
            .into_iter()
            .flat_map(|m| {
                values.iter().map(move |v| {
                    let mut m = m.clone();
                    m.insert(name.clone(), *v);
                    m
                })
            })
            .collect();
    }
    grid
}

/// Every conflict-free profile of exactly `cardinality` codes drawn from
/// `candidates`, crossed with each code's parameter grid. Codes combine in
/// the order given; the result order is deterministic.
pub fn enumerate_profiles(
    reg: &Registry,
    candidates: &[MisconceptionCode],
    cardinality: usize,
) -> Vec<SemanticProfile> {
    let atoms: Vec<Atom<'_>> = candidates
        .iter()
        .filter_map(|c| reg.lookup(c).ok().map(|e| (c, e.slots(), param_grid(e))))
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(cardinality);
    combine(&atoms, cardinality, 0, &mut chosen, &mut |picked| {
        let mut requests: Vec<Vec<Request>> = vec![Vec::new()];
        for &i in picked {
            let (code, _, grid) = &atoms[i];
            requests = requests
                .into_iter()
                .flat_map(|r| {
                    grid.iter().map(move |params| {
                        let mut r = r.clone();
                        r.push(((*code).clone(), params.clone()));
                        r
                    })
                })
                .collect();
        }
        out.extend(requests.iter().filter_map(|r| compile_profile(reg, r).ok()));
    });
    out
}

type Atom<'a> = (&'a MisconceptionCode, Vec<HookSlot>, Vec<BTreeMap<String, i64>>);

fn combine(atoms: &[Atom<'_>], left: usize, from: usize, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if left == 0 {
        emit(chosen);
        return;
    }
    for i in from..atoms.len() {
        let clash = chosen
            .iter()
            .any(|&j| atoms[j].1.iter().any(|s| atoms[i].1.contains(s)));
        if clash {
            continue;
        }
        chosen.push(i);
        combine(atoms, left - 1, i + 1, chosen, emit);
        chosen.pop();
    }
}

pub fn rewrite_structural(program: &Program, profile: &SemanticProfile) -> Program {
    rewrite::apply(program, &profile.rewrites)
}

/// Runs `program` as a student holding `profile` would trace it.
pub fn run_variant(program: &Program, profile: &SemanticProfile, limits: Limits) -> ExecResult {
    if profile.rewrites.is_empty() {
        return run_with_hooks(program, &profile.hooks, limits);
    }
    let rewritten = rewrite_structural(program, profile);
    run_with_hooks(&rewritten, &profile.hooks, limits)
}
