//! Reference interpreter with hook points for alternative semantics.
//!
//! Every observable step is recorded as an [`Event`]. The step cap bounds the
//! number of events, so any non-terminating behaviour ends in `step_cap`.

pub mod hooks;
mod trace;
mod value;

use thiserror::Error;

pub use hooks::Hooks;
pub use trace::{BranchRef, Event, ExecResult, ExecStatus, JumpKind, Limits};
pub use value::{
    binary, compute_simple, eval_expr, eval_with, Phase, RelSwap, RuntimeError, RuntimeErrorKind, State, Value,
    ViewFrame, ViewScope,
};

use hooks::*;

use crate::lang::{
    constant_trip_count, frozen_candidates, AssignOp, BinaryOp, Body, Branch, Expr, LoopKind, LoopParts, NodeId,
    PrintArg, Program, Stmt, StmtKind,
};

/// Runs `program` under the reference semantics.
pub fn run_reference(program: &Program, limits: Limits) -> ExecResult {
    run_with_hooks(program, &Hooks::default(), limits)
}

pub fn run_with_hooks(program: &Program, hooks: &Hooks, limits: Limits) -> ExecResult {
    Machine::new(hooks, limits).run(program)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Stop {
    StepCap,
    OutputCap,
    Halted { node: Option<NodeId>, reason: String },
    Error { node: NodeId, err: RuntimeError },
}

type Exec<T> = Result<T, Stop>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Normal,
    Break,
    Continue,
    Restart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LoopExit {
    Normal,
    Break,
    Flow(Flow),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BodyOut {
    Flow(Flow),
    CondFalse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decision {
    Enter,
    SkipBody,
    Exit,
}

#[derive(Debug, Default)]
struct CondState {
    checked: bool,
    extra_left: Option<u32>,
    until: bool,
    waiting: bool,
}

/// Outcome of one pass over an `if` statement.
#[derive(Debug, Clone, Copy)]
struct Pass {
    flow: Flow,
    ran_arm: bool,
    ran_branch: bool,
}

impl Pass {
    const NONE: Pass = Pass {
        flow: Flow::Normal,
        ran_arm: false,
        ran_branch: false,
    };
}

#[derive(Debug, Clone, Copy)]
struct Watcher<'p> {
    node: NodeId,
    cond: &'p Expr,
    body: &'p Body,
    armed: bool,
}

#[derive(Debug, Clone)]
struct Saved<'p> {
    serial: u64,
    state: State,
    transcript_len: usize,
    trace_len: usize,
    watchers: Vec<Watcher<'p>>,
}

/// Handle for one saved state; snapshots nest and must be released or
/// restored innermost first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotToken(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SnapshotError {
    #[error("snapshot token is not the innermost live snapshot")]
    StaleToken,
    #[error("event limit reached while recording the rollback")]
    StepCap,
}

pub struct Machine<'p> {
    hooks: &'p Hooks,
    limits: Limits,
    state: State,
    transcript: Vec<String>,
    trace: Vec<Event>,
    snapshots: Vec<Saved<'p>>,
    next_serial: u64,
    mute: u32,
    loop_depth: u32,
    watchers: Vec<Watcher<'p>>,
}

impl<'p> Machine<'p> {
    pub fn new(hooks: &'p Hooks, limits: Limits) -> Self {
        Machine {
            hooks,
            limits,
            state: State::default(),
            transcript: Vec::new(),
            trace: Vec::new(),
            snapshots: Vec::new(),
            next_serial: 0,
            mute: 0,
            loop_depth: 0,
            watchers: Vec::new(),
        }
    }

    pub fn run(mut self, program: &'p Program) -> ExecResult {
        let status = self.execute(program);
        self.finish(status)
    }

    /// Executes `program` against the current state, which is not reset.
    pub fn execute(&mut self, program: &'p Program) -> ExecStatus {
        if self.hooks.sel_trigger == Some(SelTrigger::WholeProgram) {
            let mut found = Vec::new();
            program.walk(&mut |s| {
                if let StmtKind::If { branches, .. } = &s.kind {
                    found.push(Watcher {
                        node: s.id,
                        cond: &branches[0].cond,
                        body: &branches[0].body,
                        armed: true,
                    });
                }
            });
            self.watchers.extend(found);
        }
        let outcome = loop {
            match self.exec_list(&program.statements) {
                Ok(Flow::Restart) => continue,
                Ok(_) => break Ok(()),
                Err(stop) => break Err(stop),
            }
        };
        match outcome {
            Ok(()) => ExecStatus::Completed,
            Err(Stop::StepCap) => ExecStatus::StepCap,
            Err(Stop::OutputCap) => ExecStatus::OutputCap,
            Err(Stop::Halted { node, reason }) => {
                self.final_halt(node, reason);
                ExecStatus::HaltedByVariant
            }
            Err(Stop::Error { node, err }) => {
                let kind = err.kind;
                self.final_halt(Some(node), err.to_string());
                ExecStatus::RuntimeError(kind)
            }
        }
    }

    fn final_halt(&mut self, node: Option<NodeId>, reason: String) {
        if self.trace.len() < self.limits.max_events {
            self.trace.push(Event::Halt { node, reason });
        }
    }

    pub fn finish(self, status: ExecStatus) -> ExecResult {
        ExecResult {
            transcript: self.transcript,
            trace: self.trace,
            status,
        }
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn trace(&self) -> &[Event] {
        &self.trace
    }

    /// While muted, output is recorded in the trace as not live and kept out
    /// of the transcript.
    pub fn set_mute(&mut self, muted: bool) {
        self.mute = u32::from(muted);
    }

    pub fn snapshot(&mut self) -> SnapshotToken {
        SnapshotToken(self.save())
    }

    pub fn restore(&mut self, token: SnapshotToken) -> Result<(), SnapshotError> {
        if self.snapshots.last().map(|s| s.serial) != Some(token.0) {
            return Err(SnapshotError::StaleToken);
        }
        self.rollback(None).map_err(|_| SnapshotError::StepCap)
    }

    pub fn release(&mut self, token: SnapshotToken) -> Result<(), SnapshotError> {
        if self.snapshots.last().map(|s| s.serial) != Some(token.0) {
            return Err(SnapshotError::StaleToken);
        }
        self.snapshots.pop();
        Ok(())
    }

    fn save(&mut self) -> u64 {
        let serial = self.next_serial;
        self.next_serial += 1;
        self.snapshots.push(Saved {
            serial,
            state: self.state.clone(),
            transcript_len: self.transcript.len(),
            trace_len: self.trace.len(),
            watchers: self.watchers.clone(),
        });
        serial
    }

    fn rollback(&mut self, node: Option<NodeId>) -> Exec<()> {
        let saved = self.snapshots.pop().expect("rollback without snapshot");
        self.state = saved.state;
        self.transcript.truncate(saved.transcript_len);
        self.watchers = saved.watchers;
        for e in &mut self.trace[saved.trace_len..] {
            if let Event::Output { live, .. } = e {
                *live = false;
            }
        }
        self.emit(Event::RolledBack { node })
    }

    fn discard_snapshot(&mut self) {
        self.snapshots.pop();
    }

    fn emit(&mut self, e: Event) -> Exec<()> {
        if self.trace.len() >= self.limits.max_events {
            return Err(Stop::StepCap);
        }
        self.trace.push(e);
        Ok(())
    }

    fn output(&mut self, node: NodeId, text: String) -> Exec<()> {
        let live = self.mute == 0;
        if live && self.transcript.len() >= self.limits.max_outputs {
            return Err(Stop::OutputCap);
        }
        self.emit(Event::Output {
            node,
            text: text.clone(),
            live,
        })?;
        if live {
            self.transcript.push(text);
        }
        Ok(())
    }

    fn write(&mut self, node: NodeId, name: &str, value: Value) -> Exec<()> {
        self.state.vars.insert(name.to_string(), value);
        self.emit(Event::VarWrite {
            node,
            name: name.to_string(),
            value,
        })
    }

    fn eval(&self, node: NodeId, e: &Expr) -> Exec<Value> {
        eval_expr(e, &self.state).map_err(|err| Stop::Error { node, err })
    }

    fn read(&self, node: NodeId, name: &str) -> Exec<Value> {
        self.state.read(name).map_err(|err| Stop::Error { node, err })
    }

    fn halt(node: NodeId, reason: &str) -> Stop {
        Stop::Halted {
            node: Some(node),
            reason: reason.to_string(),
        }
    }

    fn exec_list(&mut self, stmts: &'p [Stmt]) -> Exec<Flow> {
        for (i, s) in stmts.iter().enumerate() {
            let flow = self.exec_stmt(s, stmts.get(i + 1))?;
            if flow != Flow::Normal {
                return Ok(flow);
            }
        }
        Ok(Flow::Normal)
    }

    /// `following` is the next statement in the enclosing list, if any.
    fn exec_stmt(&mut self, s: &'p Stmt, following: Option<&'p Stmt>) -> Exec<Flow> {
        let flow = match &s.kind {
            StmtKind::Assign { .. } | StmtKind::IncDec { .. } => {
                self.exec_simple(s)?;
                Flow::Normal
            }
            StmtKind::Print(args) => {
                let mut parts = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        PrintArg::Str(text) => parts.push(text.clone()),
                        PrintArg::Expr(e) => parts.push(self.eval(s.id, e)?.to_string()),
                    }
                }
                self.output(s.id, parts.join(" "))?;
                Flow::Normal
            }
            StmtKind::Block(stmts) => self.exec_list(stmts)?,
            StmtKind::If {
                branches,
                else_body,
            } => self.exec_if(s, branches, else_body.as_ref())?,
            StmtKind::While { .. } | StmtKind::DoWhile { .. } | StmtKind::For { .. } => {
                self.exec_loop(s, following)?
            }
            StmtKind::Break => self.exec_jump(s.id, JumpKind::Break)?,
            StmtKind::Continue => self.exec_jump(s.id, JumpKind::Continue)?,
        };
        if flow == Flow::Normal && !self.watchers.is_empty() {
            return self.poll_watchers();
        }
        Ok(flow)
    }

    fn exec_simple(&mut self, s: &Stmt) -> Exec<()> {
        match compute_simple(s, &self.state).map_err(|err| Stop::Error { node: s.id, err })? {
            Some((name, v)) => self.write(s.id, &name, v),
            None => Ok(()),
        }
    }

    fn exec_jump(&mut self, node: NodeId, kind: JumpKind) -> Exec<Flow> {
        self.emit(Event::Jump { node, kind })?;
        // outside any loop a jump has nowhere to go
        if self.loop_depth == 0 {
            return Ok(Flow::Normal);
        }
        let (standard, hook) = match kind {
            JumpKind::Break => (Flow::Break, self.hooks.on_break),
            JumpKind::Continue => (Flow::Continue, self.hooks.on_continue),
        };
        match hook {
            None => Ok(standard),
            Some(JumpAs::Continue) => Ok(Flow::Continue),
            Some(JumpAs::Ignore) => Ok(Flow::Normal),
            Some(JumpAs::Halt) => Err(Self::halt(node, "break ends the program")),
        }
    }

    // ---- selection ----

    fn exec_if(&mut self, s: &'p Stmt, branches: &'p [Branch], else_body: Option<&'p Body>) -> Exec<Flow> {
        let mut pass = self.if_pass(s, branches, else_body)?;
        match self.hooks.sel_repeat {
            Some(SelRepeat::WhileTaken) => {
                while pass.flow == Flow::Normal && pass.ran_branch {
                    pass = self.if_pass(s, branches, else_body)?;
                }
            }
            Some(SelRepeat::Times(n)) => {
                for _ in 1..n {
                    if pass.flow != Flow::Normal {
                        break;
                    }
                    pass = self.if_pass(s, branches, else_body)?;
                }
            }
            None => {}
        }
        if pass.flow != Flow::Normal {
            return Ok(pass.flow);
        }
        if !pass.ran_arm && else_body.is_none() {
            match self.hooks.sel_post {
                Some(SelPost::Restart) => return Ok(Flow::Restart),
                Some(SelPost::Halt) => return Err(Self::halt(s.id, "no branch taken and no else")),
                None => {}
            }
        }
        Ok(Flow::Normal)
    }

    fn if_pass(&mut self, s: &'p Stmt, branches: &'p [Branch], else_body: Option<&'p Body>) -> Exec<Pass> {
        let n = branches.len();
        match self.hooks.branch_select {
            Some(BranchSelect::RunAll) => {
                let arms = branches
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (BranchRef::Index(i), &b.body))
                    .chain(else_body.map(|b| (BranchRef::Else, b)));
                let mut flow = Flow::Normal;
                for (arm, body) in arms {
                    flow = self.run_arm(s.id, arm, body)?;
                    if flow != Flow::Normal {
                        break;
                    }
                }
                Ok(Pass {
                    flow,
                    ran_arm: true,
                    ran_branch: n > 0,
                })
            }
            Some(BranchSelect::ForceArm(k)) => {
                let arm = match (k, else_body) {
                    (0, Some(_)) => BranchRef::Else,
                    (0, None) => BranchRef::Index(0),
                    (k, _) => BranchRef::Index((k - 1).min(n - 1)),
                };
                let body = match arm {
                    BranchRef::Index(i) => &branches[i].body,
                    BranchRef::Else => else_body.expect("else arm"),
                };
                let flow = self.run_arm(s.id, arm, body)?;
                Ok(Pass {
                    flow,
                    ran_arm: true,
                    ran_branch: arm != BranchRef::Else,
                })
            }
            Some(BranchSelect::IgnoreInLoop) if self.loop_depth > 0 => {
                let flow = self.run_arm(s.id, BranchRef::Index(0), &branches[0].body)?;
                Ok(Pass {
                    flow,
                    ran_arm: true,
                    ran_branch: true,
                })
            }
            Some(BranchSelect::AllTrue) => {
                let mut any = false;
                for i in 0..n {
                    let (taken, flow) = self.try_branch(s.id, branches, i)?;
                    any |= taken;
                    if flow != Flow::Normal {
                        return Ok(Pass {
                            flow,
                            ran_arm: true,
                            ran_branch: true,
                        });
                    }
                }
                if any {
                    Ok(Pass {
                        flow: Flow::Normal,
                        ran_arm: true,
                        ran_branch: true,
                    })
                } else {
                    self.run_else(s.id, else_body)
                }
            }
            Some(BranchSelect::ExitAtFirstFalse) => {
                let (taken, flow) = self.try_branch(s.id, branches, 0)?;
                Ok(if taken {
                    Pass {
                        flow,
                        ran_arm: true,
                        ran_branch: true,
                    }
                } else {
                    Pass::NONE
                })
            }
            Some(BranchSelect::Permuted(p)) => {
                let order: Vec<usize> = if p == 0 {
                    (0..n).rev().collect()
                } else {
                    (0..n).map(|i| (i + p) % n).collect()
                };
                self.chain(s.id, branches, else_body, order)
            }
            Some(BranchSelect::ElseAlways) => {
                let mut pass = self.chain(s.id, branches, None, 0..n)?;
                if pass.flow == Flow::Normal {
                    if let Some(e) = else_body {
                        pass.flow = self.run_arm(s.id, BranchRef::Else, e)?;
                        pass.ran_arm = true;
                    }
                }
                Ok(pass)
            }
            Some(BranchSelect::RecheckForElse) => {
                for i in 0..n {
                    let (taken, flow) = self.try_branch(s.id, branches, i)?;
                    if !taken {
                        continue;
                    }
                    let mut flow = flow;
                    if let (Flow::Normal, Some(e)) = (flow, else_body) {
                        if !self.test_branch(s.id, &branches[i].cond)? {
                            flow = self.run_arm(s.id, BranchRef::Else, e)?;
                        }
                    }
                    return Ok(Pass {
                        flow,
                        ran_arm: true,
                        ran_branch: true,
                    });
                }
                self.run_else(s.id, else_body)
            }
            _ => self.chain(s.id, branches, else_body, 0..n),
        }
    }

    /// Standard first-true-wins chain over `order`, falling back to else.
    fn chain(
        &mut self,
        node: NodeId,
        branches: &'p [Branch],
        else_body: Option<&'p Body>,
        order: impl IntoIterator<Item = usize>,
    ) -> Exec<Pass> {
        for i in order {
            let (taken, flow) = self.try_branch(node, branches, i)?;
            if taken {
                return Ok(Pass {
                    flow,
                    ran_arm: true,
                    ran_branch: true,
                });
            }
        }
        self.run_else(node, else_body)
    }

    fn run_else(&mut self, node: NodeId, else_body: Option<&'p Body>) -> Exec<Pass> {
        match else_body {
            Some(b) => Ok(Pass {
                flow: self.run_arm(node, BranchRef::Else, b)?,
                ran_arm: true,
                ran_branch: false,
            }),
            None => Ok(Pass::NONE),
        }
    }

    fn take(&mut self, node: NodeId, arm: BranchRef) -> Exec<()> {
        if arm == BranchRef::Index(0) {
            for w in self.watchers.iter_mut().filter(|w| w.node == node) {
                w.armed = false;
            }
        }
        self.emit(Event::BranchTaken { node, branch: arm })
    }

    fn run_arm(&mut self, node: NodeId, arm: BranchRef, body: &'p Body) -> Exec<Flow> {
        self.take(node, arm)?;
        self.exec_list(&body.stmts)
    }

    fn test_branch(&mut self, node: NodeId, cond: &Expr) -> Exec<bool> {
        let mut v = self.eval(node, cond)?.truthy();
        if self.hooks.branch_select == Some(BranchSelect::Negate) {
            v = !v;
        }
        self.emit(Event::CondCheck { node, value: v })?;
        Ok(v)
    }

    /// Tests branch `i` and runs it if taken.
    fn try_branch(&mut self, node: NodeId, branches: &'p [Branch], i: usize) -> Exec<(bool, Flow)> {
        let b = &branches[i];
        let mode = self.hooks.sel_cond_eval;
        if mode == Some(SelCondEval::Hindsight) {
            self.save();
            let flow = self.run_arm(node, BranchRef::Index(i), &b.body)?;
            if flow == Flow::Restart || self.test_branch(node, &b.cond)? {
                self.discard_snapshot();
                return Ok((true, flow));
            }
            self.rollback(Some(node))?;
            return Ok((false, Flow::Normal));
        }
        if self.test_branch(node, &b.cond)? {
            let flow = self.run_arm(node, BranchRef::Index(i), &b.body)?;
            return Ok((true, flow));
        }
        if i == 0 && self.hooks.sel_trigger == Some(SelTrigger::AfterStatement) {
            self.arm_watcher(node, b);
        }
        match mode {
            Some(m) => self.shadow_branch(node, i, b, m),
            None => Ok((false, Flow::Normal)),
        }
    }

    /// Runs a branch whose condition was false in shadow, re-testing before
    /// each statement; the first true test decides how the branch proceeds.
    fn shadow_branch(&mut self, node: NodeId, i: usize, b: &'p Branch, mode: SelCondEval) -> Exec<(bool, Flow)> {
        let stmts = &b.body.stmts;
        if stmts.len() < 2 {
            return Ok((false, Flow::Normal));
        }
        self.save();
        self.mute += 1;
        let mut start = None;
        for j in 0..stmts.len() {
            if j > 0 && self.test_branch(node, &b.cond)? {
                start = Some(j);
                break;
            }
            if self.exec_stmt(&stmts[j], stmts.get(j + 1))? != Flow::Normal {
                break;
            }
        }
        self.mute -= 1;
        let Some(j) = start else {
            self.rollback(Some(node))?;
            return Ok((false, Flow::Normal));
        };
        let arm = BranchRef::Index(i);
        match mode {
            SelCondEval::ShadowToEnd => {
                self.discard_snapshot();
                self.take(node, arm)?;
                Ok((true, self.exec_list(&stmts[j..])?))
            }
            SelCondEval::ShadowWhileTrue => {
                self.discard_snapshot();
                self.take(node, arm)?;
                for k in j..stmts.len() {
                    if k > j && !self.test_branch(node, &b.cond)? {
                        break;
                    }
                    let flow = self.exec_stmt(&stmts[k], stmts.get(k + 1))?;
                    if flow != Flow::Normal {
                        return Ok((true, flow));
                    }
                }
                Ok((true, Flow::Normal))
            }
            SelCondEval::ShadowThenWhole | SelCondEval::Hindsight => {
                self.rollback(Some(node))?;
                Ok((true, self.run_arm(node, arm, &b.body)?))
            }
        }
    }

    fn arm_watcher(&mut self, node: NodeId, b: &'p Branch) {
        match self.watchers.iter_mut().find(|w| w.node == node) {
            Some(w) => w.armed = true,
            None => self.watchers.push(Watcher {
                node,
                cond: &b.cond,
                body: &b.body,
                armed: true,
            }),
        }
    }

    /// Fires every armed watcher whose condition now holds. A failing
    /// evaluation counts as false.
    fn poll_watchers(&mut self) -> Exec<Flow> {
        let mut i = 0;
        while i < self.watchers.len() {
            let w = self.watchers[i];
            i += 1;
            if !w.armed || !eval_expr(w.cond, &self.state).is_ok_and(Value::truthy) {
                continue;
            }
            self.watchers[i - 1].armed = false;
            self.emit(Event::CondCheck {
                node: w.node,
                value: true,
            })?;
            self.emit(Event::BranchTaken {
                node: w.node,
                branch: BranchRef::Index(0),
            })?;
            let flow = self.exec_list(&w.body.stmts)?;
            if flow != Flow::Normal {
                return Ok(flow);
            }
        }
        Ok(Flow::Normal)
    }

    // ---- iteration ----

    fn phase(&mut self, node: NodeId, phase: Phase) -> Exec<()> {
        self.set_view_phase(node, phase);
        self.emit(Event::PhaseEnter { node, phase })
    }

    fn set_view_phase(&mut self, node: NodeId, phase: Phase) {
        if let Some(f) = self.state.overlays.iter_mut().rev().find(|f| f.loop_node == node) {
            f.phase = phase;
        }
    }

    fn push_view(&mut self, node: NodeId, parts: &LoopParts<'_>) -> bool {
        let (scope, values) = match self.hooks.state_view {
            None => return false,
            Some(StateView::ShadowControlInHeader) if parts.control_var().is_some() => {
                (ViewScope::CondAndUpdate, Default::default())
            }
            Some(StateView::FrozenControlInBody) if parts.control_var().is_some() => {
                (ViewScope::Body, Default::default())
            }
            Some(StateView::FrozenCarriedInBody) => {
                let values: std::collections::BTreeMap<_, _> = frozen_candidates(parts)
                    .into_iter()
                    .filter_map(|n| self.state.get(&n).map(|v| (n, v)))
                    .collect();
                if values.is_empty() {
                    return false;
                }
                (ViewScope::Body, values)
            }
            Some(_) => return false,
        };
        self.state.overlays.push(ViewFrame {
            loop_node: node,
            scope,
            values,
            phase: Phase::Init,
        });
        true
    }

    /// Copies the real control value into this loop's view after the header
    /// assigned it.
    fn sync_view(&mut self, node: NodeId, parts: &LoopParts<'_>, after_init: bool) {
        let refresh = match self.hooks.state_view {
            Some(StateView::ShadowControlInHeader) => true,
            Some(StateView::FrozenControlInBody) => after_init,
            _ => false,
        };
        if !refresh {
            return;
        }
        let Some(v) = parts.control_var() else { return };
        let real = self.state.get(v);
        if let Some(f) = self.state.overlays.iter_mut().rev().find(|f| f.loop_node == node) {
            match real {
                Some(val) => f.values.insert(v.to_string(), val),
                None => f.values.remove(v),
            };
        }
    }

    fn exec_loop(&mut self, s: &'p Stmt, following: Option<&'p Stmt>) -> Exec<Flow> {
        let parts = s.kind.loop_parts().expect("loop statement");
        let viewed = self.push_view(s.id, &parts);
        let result = self.loop_dispatch(s.id, &parts, following);
        if viewed {
            self.state.overlays.pop();
        }
        match result? {
            LoopExit::Normal if self.hooks.loop_post == Some(LoopPost::Halt) => {
                Err(Self::halt(s.id, "program ends after the loop"))
            }
            LoopExit::Normal | LoopExit::Break => Ok(Flow::Normal),
            LoopExit::Flow(f) => Ok(f),
        }
    }

    fn loop_dispatch(&mut self, node: NodeId, parts: &LoopParts<'p>, following: Option<&'p Stmt>) -> Exec<LoopExit> {
        let outer_once = self.hooks.nesting == Some(Nesting::OuterOnce) && contains_loop(parts.body);
        if self.hooks.entry == Some(EntryOrder::LoopIsIf) || outer_once {
            return self.loop_once(node, parts);
        }
        match self.hooks.body_schedule {
            Some(BodySchedule::CountsStatements) if !parts.body.stmts.is_empty() => {
                if let Some(n) = constant_trip_count(parts) {
                    return self.loop_counting(node, parts, n);
                }
            }
            Some(BodySchedule::Grouped) if parts.kind == LoopKind::For && !parts.body.stmts.is_empty() => {
                if let Some(v) = parts.control_var() {
                    return self.loop_grouped(node, parts, v);
                }
            }
            _ => {}
        }
        self.loop_phases(node, parts, following)
    }

    fn run_init(&mut self, node: NodeId, parts: &LoopParts<'p>) -> Exec<()> {
        if !parts.init.is_empty() {
            self.phase(node, Phase::Init)?;
            for st in parts.init {
                self.exec_simple(st)?;
            }
        }
        self.sync_view(node, parts, true);
        Ok(())
    }

    fn test_loop(&mut self, node: NodeId, parts: &LoopParts<'p>) -> Exec<bool> {
        let value = match parts.cond {
            None => true,
            Some(c) => eval_with(c, &self.state, self.hooks.rel_swap)
                .map_err(|err| Stop::Error { node, err })?
                .truthy(),
        };
        self.emit(Event::CondCheck { node, value })?;
        Ok(value)
    }

    fn run_body(&mut self, node: NodeId, parts: &LoopParts<'p>, recheck: bool) -> Exec<BodyOut> {
        self.loop_depth += 1;
        let out = self.body_stmts(node, parts, recheck);
        self.loop_depth -= 1;
        out
    }

    fn body_stmts(&mut self, node: NodeId, parts: &LoopParts<'p>, recheck: bool) -> Exec<BodyOut> {
        let stmts = &parts.body.stmts;
        for (j, st) in stmts.iter().enumerate() {
            let flow = self.exec_stmt(st, stmts.get(j + 1))?;
            if flow != Flow::Normal {
                return Ok(BodyOut::Flow(flow));
            }
            if recheck {
                self.set_view_phase(node, Phase::Cond);
                let holds = self.test_loop(node, parts)?;
                self.set_view_phase(node, Phase::Body);
                if !holds {
                    return Ok(BodyOut::CondFalse);
                }
            }
        }
        Ok(BodyOut::Flow(Flow::Normal))
    }

    fn body_exit(flow: Flow) -> Option<LoopExit> {
        match flow {
            Flow::Break => Some(LoopExit::Break),
            Flow::Restart => Some(LoopExit::Flow(Flow::Restart)),
            Flow::Normal | Flow::Continue => None,
        }
    }

    /// One conditional pass: the header is consulted once and the body runs
    /// at most once.
    fn loop_once(&mut self, node: NodeId, parts: &LoopParts<'p>) -> Exec<LoopExit> {
        if self.hooks.phase_skip != Some(PhaseSkip::Init) {
            self.run_init(node, parts)?;
        }
        let enter = parts.kind == LoopKind::DoWhile || {
            self.phase(node, Phase::Cond)?;
            self.test_loop(node, parts)?
        };
        let mut exit = LoopExit::Normal;
        if enter {
            self.phase(node, Phase::Body)?;
            if let BodyOut::Flow(f) = self.run_body(node, parts, false)? {
                if let Some(e) = Self::body_exit(f) {
                    if e != LoopExit::Break {
                        return Ok(e);
                    }
                    exit = e;
                }
            }
        }
        self.phase(node, Phase::Exit)?;
        Ok(exit)
    }

    /// `n` single-statement executions drawn cyclically from the body, each
    /// followed by the header update.
    fn loop_counting(&mut self, node: NodeId, parts: &LoopParts<'p>, n: u64) -> Exec<LoopExit> {
        self.run_init(node, parts)?;
        let stmts = &parts.body.stmts;
        let mut updates = 0;
        let mut exit = LoopExit::Normal;
        for t in 0..n {
            let j = (t % stmts.len() as u64) as usize;
            self.phase(node, Phase::Body)?;
            self.loop_depth += 1;
            let flow = self.exec_stmt(&stmts[j], stmts.get(j + 1));
            self.loop_depth -= 1;
            if let Some(e) = Self::body_exit(flow?) {
                if e != LoopExit::Break {
                    return Ok(e);
                }
                exit = e;
                break;
            }
            self.phase(node, Phase::Update)?;
            self.run_updates(node, parts, &mut updates)?;
        }
        self.phase(node, Phase::Exit)?;
        Ok(exit)
    }

    /// The control sequence is computed from the header alone; each body
    /// statement then runs once per control value before the next starts.
    fn loop_grouped(&mut self, node: NodeId, parts: &LoopParts<'p>, var: &str) -> Exec<LoopExit> {
        self.run_init(node, parts)?;
        let err = |err| Stop::Error { node, err };
        let mut scratch = State {
            vars: self.state.vars.clone(),
            overlays: Vec::new(),
        };
        let mut seq = Vec::new();
        loop {
            self.phase(node, Phase::Cond)?;
            let value = match parts.cond {
                None => true,
                Some(c) => eval_with(c, &scratch, self.hooks.rel_swap).map_err(err)?.truthy(),
            };
            self.emit(Event::CondCheck { node, value })?;
            if !value {
                break;
            }
            seq.push(scratch.read(var).map_err(err)?);
            if !parts.update.is_empty() {
                self.phase(node, Phase::Update)?;
                for u in parts.update {
                    if let Some((name, v)) = compute_simple(u, &scratch).map_err(err)? {
                        scratch.vars.insert(name, v);
                    }
                }
            }
        }
        let final_value = scratch.get(var);
        let stmts = &parts.body.stmts;
        for (j, st) in stmts.iter().enumerate() {
            for v in &seq {
                self.write(node, var, *v)?;
                self.phase(node, Phase::Body)?;
                self.loop_depth += 1;
                let flow = self.exec_stmt(st, stmts.get(j + 1));
                self.loop_depth -= 1;
                if let Some(e) = Self::body_exit(flow?) {
                    if e != LoopExit::Break {
                        return Ok(e);
                    }
                    self.phase(node, Phase::Exit)?;
                    return Ok(e);
                }
            }
        }
        if let Some(v) = final_value {
            self.write(node, var, v)?;
        }
        self.phase(node, Phase::Exit)?;
        Ok(LoopExit::Normal)
    }

    fn loop_phases(&mut self, node: NodeId, parts: &LoopParts<'p>, following: Option<&'p Stmt>) -> Exec<LoopExit> {
        use Phase::*;
        let h = *self.hooks;
        let modifiable = parts.kind != LoopKind::DoWhile;
        let prefix_only = !parts.update.is_empty()
            && parts
                .update
                .iter()
                .all(|u| matches!(&u.kind, StmtKind::IncDec { form, .. } if form.is_prefix()));
        let update_early = modifiable
            && match h.cycle {
                Some(CycleOrder::UpdateBeforeBody) => true,
                Some(CycleOrder::UpdateBeforeBodyIfPrefix) => prefix_only,
                None => false,
            };
        let cycle = if update_early {
            [Cond, Update, Body]
        } else {
            [Cond, Body, Update]
        };
        let entry = if modifiable { h.entry } else { None };
        let skip = h.phase_skip;

        let mut init_pending = false;
        if skip == Some(PhaseSkip::Init) {
        } else if entry == Some(EntryOrder::DeferredInit) {
            init_pending = !parts.init.is_empty();
        } else {
            self.run_init(node, parts)?;
        }
        let start = match (parts.kind, entry) {
            (LoopKind::DoWhile, _) | (_, Some(EntryOrder::BodyFirst)) => Body,
            (_, Some(EntryOrder::UpdateFirst)) => Update,
            _ => Cond,
        };
        let mut pc = cycle.iter().position(|p| *p == start).expect("phase in cycle");
        let mut cs = CondState::default();
        let mut skip_body = false;
        let mut body_ran = false;
        let mut updates = 0;
        let recheck = h.cond_semantics == Some(CondSemantics::RecheckInBody);

        let exit = loop {
            let phase = cycle[pc];
            pc = (pc + 1) % cycle.len();
            match phase {
                Cond => {
                    if skip == Some(PhaseSkip::Cond) {
                        continue;
                    }
                    self.phase(node, Cond)?;
                    let first = !cs.checked;
                    match self.loop_decision(node, parts, &mut cs)? {
                        Decision::Enter => {}
                        Decision::SkipBody => skip_body = true,
                        Decision::Exit => {
                            if first
                                && h.nesting == Some(Nesting::SkipRestOnEmptyInner)
                                && self.loop_depth > 0
                                && modifiable
                            {
                                self.phase(node, Exit)?;
                                return Ok(LoopExit::Flow(Flow::Continue));
                            }
                            if let (Some(LoopPost::IterateFollowing), Some(next)) = (h.loop_post, following) {
                                match self.exec_stmt(next, None)? {
                                    Flow::Normal => {
                                        pc = 0;
                                        continue;
                                    }
                                    Flow::Break => break LoopExit::Break,
                                    f => return Ok(LoopExit::Flow(f)),
                                }
                            }
                            break LoopExit::Normal;
                        }
                    }
                }
                Body => {
                    if skip == Some(PhaseSkip::Body) {
                        continue;
                    }
                    if skip_body {
                        skip_body = false;
                        continue;
                    }
                    self.phase(node, Body)?;
                    body_ran = true;
                    match self.run_body(node, parts, recheck)? {
                        BodyOut::CondFalse => break LoopExit::Normal,
                        BodyOut::Flow(f) => {
                            if let Some(e) = Self::body_exit(f) {
                                if e == LoopExit::Break {
                                    break e;
                                }
                                return Ok(e);
                            }
                        }
                    }
                }
                Update => {
                    if skip == Some(PhaseSkip::Update) {
                        continue;
                    }
                    if init_pending && body_ran {
                        init_pending = false;
                        self.run_init(node, parts)?;
                    } else if !parts.update.is_empty() {
                        self.phase(node, Update)?;
                        self.run_updates(node, parts, &mut updates)?;
                    }
                }
                Init | Exit => unreachable!("not part of the cycle"),
            }
        };
        self.phase(node, Exit)?;
        Ok(exit)
    }

    fn loop_decision(&mut self, node: NodeId, parts: &LoopParts<'p>, cs: &mut CondState) -> Exec<Decision> {
        if let Some(left) = cs.extra_left {
            if left == 0 {
                return Ok(Decision::Exit);
            }
            cs.extra_left = Some(left - 1);
            return Ok(Decision::Enter);
        }
        let raw = self.test_loop(node, parts)?;
        let first = !cs.checked;
        cs.checked = true;
        let standard = |holds: bool| if holds { Decision::Enter } else { Decision::Exit };
        Ok(match self.hooks.cond_semantics {
            None | Some(CondSemantics::RecheckInBody) => standard(raw),
            Some(CondSemantics::Extra(k)) => {
                if raw {
                    Decision::Enter
                } else if k == 0 {
                    Decision::Exit
                } else {
                    cs.extra_left = Some(k - 1);
                    Decision::Enter
                }
            }
            Some(CondSemantics::Until) => standard(!raw),
            Some(CondSemantics::UntilIfFirstFalse) => {
                if first {
                    cs.until = !raw;
                }
                standard(raw != cs.until)
            }
            Some(mode @ (CondSemantics::WaitThenIterate | CondSemantics::WaitSkippingBody)) => {
                if first && !raw {
                    cs.waiting = true;
                }
                if !cs.waiting {
                    standard(raw)
                } else if raw {
                    cs.waiting = false;
                    Decision::Enter
                } else if mode == CondSemantics::WaitSkippingBody {
                    Decision::SkipBody
                } else {
                    Decision::Enter
                }
            }
        })
    }

    fn run_updates(&mut self, node: NodeId, parts: &LoopParts<'p>, count: &mut u64) -> Exec<()> {
        self.set_view_phase(node, Phase::Update);
        for u in parts.update {
            let semantics = self.hooks.update_semantics;
            let step = match semantics {
                None => None,
                Some(UpdateSemantics::Alternating) => self
                    .additive_delta(u)?
                    .map(|(t, d)| (t, if *count % 2 == 1 { d.checked_neg() } else { Some(d) })),
                Some(UpdateSemantics::UnitStep) => match self.additive_delta(u)? {
                    Some((t, d)) => Some((t, Some(if d < 0 { -1 } else { 1 }))),
                    None => u.kind.simple_target().map(|t| (t, Some(1))),
                },
                Some(UpdateSemantics::DoubleIncDec) => match &u.kind {
                    StmtKind::IncDec { target, form } => Some((target.as_str(), Some(form.delta() * 2))),
                    _ => None,
                },
            };
            match step {
                None => self.exec_simple(u)?,
                Some((target, delta)) => {
                    let overflow = || Stop::Error {
                        node: u.id,
                        err: RuntimeError::new(RuntimeErrorKind::Overflow, "integer overflow"),
                    };
                    let delta = delta.ok_or_else(overflow)?;
                    let current = self.read(u.id, target)?;
                    let v = binary(BinaryOp::Add, current, Value::Int(delta))
                        .map_err(|err| Stop::Error { node: u.id, err })?;
                    self.write(u.id, target, v)?;
                }
            }
        }
        *count += 1;
        self.sync_view(node, parts, false);
        Ok(())
    }

    /// Target and signed step of an additive update, evaluated now.
    fn additive_delta<'s>(&self, u: &'s Stmt) -> Exec<Option<(&'s str, i64)>> {
        let int = |e: &Expr| -> Exec<i64> {
            self.eval(u.id, e)?
                .as_int()
                .map_err(|err| Stop::Error { node: u.id, err })
        };
        let neg = |v: i64| {
            v.checked_neg().ok_or_else(|| Stop::Error {
                node: u.id,
                err: RuntimeError::new(RuntimeErrorKind::Overflow, "integer overflow"),
            })
        };
        Ok(match &u.kind {
            StmtKind::IncDec { target, form } => Some((target, form.delta())),
            StmtKind::Assign { target, op, value } => match (op, value) {
                (AssignOp::Add, e) => Some((target, int(e)?)),
                (AssignOp::Sub, e) => Some((target, neg(int(e)?)?)),
                (AssignOp::Set, Expr::Binary(BinaryOp::Add, l, r)) => match (&**l, &**r) {
                    (Expr::Var(v), e) if v == target => Some((target, int(e)?)),
                    (e, Expr::Var(v)) if v == target => Some((target, int(e)?)),
                    _ => None,
                },
                (AssignOp::Set, Expr::Binary(BinaryOp::Sub, l, r)) => match &**l {
                    Expr::Var(v) if v == target => Some((target, neg(int(r)?)?)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        })
    }
}

fn contains_loop(body: &Body) -> bool {
    let mut found = false;
    for s in &body.stmts {
        s.walk(&mut |x| found |= x.kind.is_loop());
    }
    found
}
