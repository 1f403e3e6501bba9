//! Construct-presence features of a program. Variant applicability is stated
//! in terms of these names.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::ast::*;

/// Every feature name `features` can produce.
pub const FEATURE_NAMES: &[&str] = &[
    "break",
    "complementary-consecutive-ifs",
    "consecutive-ifs",
    "constant-trip-count-loop",
    "continue",
    "control-variable-read-in-body",
    "control-variable-written-in-body",
    "do-while",
    "else",
    "else-if-chain",
    "else-less-if",
    "for",
    "if",
    "incdec",
    "jump",
    "loop",
    "loop-carried-variable",
    "loop-relational-condition",
    "multi-arm-if",
    "multi-statement-branch-body",
    "multi-statement-loop-body",
    "nested-if-in-if",
    "nested-if-in-loop",
    "nested-loops",
    "pre-increment",
    "statement-after-loop",
    "statement-after-selection",
    "unbraced-body",
    "while",
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct FeatureSet(BTreeSet<&'static str>);

impl FeatureSet {
    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().copied()
    }

    fn add(&mut self, name: &'static str) {
        debug_assert!(FEATURE_NAMES.contains(&name), "{name}");
        self.0.insert(name);
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().copied().collect::<Vec<_>>().join(", "))
    }
}

pub fn features(program: &Program) -> FeatureSet {
    let mut fs = FeatureSet::default();
    scan_list(&program.statements, &mut fs, Ctx::default());
    fs
}

#[derive(Clone, Copy, Default)]
struct Ctx {
    in_loop: bool,
}

fn is_plain_if(s: &Stmt) -> Option<&Expr> {
    match &s.kind {
        StmtKind::If {
            branches,
            else_body: None,
        } if branches.len() == 1 => Some(&branches[0].cond),
        _ => None,
    }
}

fn scan_list(list: &[Stmt], fs: &mut FeatureSet, ctx: Ctx) {
    for (i, s) in list.iter().enumerate() {
        let has_next = i + 1 < list.len();
        if let (Some(next), StmtKind::If { .. }) = (list.get(i + 1), &s.kind) {
            if matches!(next.kind, StmtKind::If { .. }) {
                fs.add("consecutive-ifs");
            }
            if let (Some(a), Some(b)) = (is_plain_if(s), is_plain_if(next)) {
                if complementary(a, b) {
                    fs.add("complementary-consecutive-ifs");
                }
            }
        }
        scan_stmt(s, has_next, fs, ctx);
    }
}

fn scan_body(b: &Body, fs: &mut FeatureSet, ctx: Ctx) {
    if !b.braced {
        fs.add("unbraced-body");
    }
    scan_list(&b.stmts, fs, ctx);
}

fn scan_stmt(s: &Stmt, has_next: bool, fs: &mut FeatureSet, ctx: Ctx) {
    match &s.kind {
        StmtKind::Assign { .. } | StmtKind::Print(_) => {}
        StmtKind::IncDec { form, .. } => {
            fs.add("incdec");
            if form.is_prefix() {
                fs.add("pre-increment");
            }
        }
        StmtKind::Break => {
            fs.add("break");
            fs.add("jump");
        }
        StmtKind::Continue => {
            fs.add("continue");
            fs.add("jump");
        }
        StmtKind::Block(stmts) => scan_list(stmts, fs, ctx),
        StmtKind::If {
            branches,
            else_body,
        } => {
            fs.add("if");
            if ctx.in_loop {
                fs.add("nested-if-in-loop");
            }
            if has_next {
                fs.add("statement-after-selection");
            }
            match else_body {
                Some(_) => fs.add("else"),
                None => fs.add("else-less-if"),
            }
            if branches.len() >= 2 {
                fs.add("else-if-chain");
            }
            if branches.len() + else_body.iter().count() >= 2 {
                fs.add("multi-arm-if");
            }
            if branches.iter().any(|b| b.body.stmts.len() >= 2) {
                fs.add("multi-statement-branch-body");
            }
            let arms = branches.iter().map(|b| &b.body).chain(else_body.iter());
            for body in arms {
                if body.stmts.iter().any(|s| matches!(s.kind, StmtKind::If { .. })) {
                    fs.add("nested-if-in-if");
                }
                scan_body(body, fs, ctx);
            }
        }
        StmtKind::While { .. } | StmtKind::DoWhile { .. } | StmtKind::For { .. } => {
            let parts = s.kind.loop_parts().expect("loop");
            fs.add("loop");
            fs.add(match parts.kind {
                LoopKind::While => "while",
                LoopKind::DoWhile => "do-while",
                LoopKind::For => "for",
            });
            if ctx.in_loop {
                fs.add("nested-loops");
            }
            if has_next {
                fs.add("statement-after-loop");
            }
            if parts.body.stmts.len() >= 2 {
                fs.add("multi-statement-loop-body");
            }
            if parts.cond.is_some_and(Expr::has_relational) {
                fs.add("loop-relational-condition");
            }
            if constant_trip_count(&parts).is_some() {
                fs.add("constant-trip-count-loop");
            }
            let (reads, writes) = body_reads_writes(parts.body);
            let control = parts.control_var();
            if let Some(v) = control {
                if reads.contains(v) {
                    fs.add("control-variable-read-in-body");
                }
                if writes.contains(v) {
                    fs.add("control-variable-written-in-body");
                }
            }
            if !frozen_candidates(&parts).is_empty() {
                fs.add("loop-carried-variable");
            }
            for st in parts.init.iter().chain(parts.update) {
                scan_stmt(st, false, fs, ctx);
            }
            scan_body(parts.body, fs, Ctx { in_loop: true });
        }
    }
}

pub(crate) fn body_reads_writes(body: &Body) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut reads = BTreeSet::new();
    let mut writes = BTreeSet::new();
    for s in &body.stmts {
        s.collect_reads(&mut reads);
        s.collect_writes(&mut writes);
    }
    (reads, writes)
}

/// Variables a loop body both writes and reads, excluding the control
/// variable and anything the loop condition reads.
pub(crate) fn frozen_candidates(parts: &LoopParts<'_>) -> BTreeSet<String> {
    let (reads, writes) = body_reads_writes(parts.body);
    let mut cond_reads = BTreeSet::new();
    if let Some(c) = parts.cond {
        c.collect_reads(&mut cond_reads);
    }
    let control = parts.control_var();
    writes
        .intersection(&reads)
        .filter(|v| Some(v.as_str()) != control && !cond_reads.contains(*v))
        .cloned()
        .collect()
}

/// Additive step of a header update on `var`, if it is a constant.
pub(crate) fn constant_step(update: &Stmt, var: &str) -> Option<i64> {
    match &update.kind {
        StmtKind::IncDec { target, form } if target == var => Some(form.delta()),
        StmtKind::Assign { target, op, value } if target == var => match op {
            AssignOp::Add => value.const_int(),
            AssignOp::Sub => value.const_int()?.checked_neg(),
            AssignOp::Set => match value {
                Expr::Binary(BinaryOp::Add, l, r) => match (&**l, &**r) {
                    (Expr::Var(v), c) | (c, Expr::Var(v)) if v == var => c.const_int(),
                    _ => None,
                },
                Expr::Binary(BinaryOp::Sub, l, r) => match &**l {
                    Expr::Var(v) if v == var => r.const_int()?.checked_neg(),
                    _ => None,
                },
                _ => None,
            },
            AssignOp::Mul => None,
        },
        _ => None,
    }
}

const TRIP_LIMIT: u64 = 10_000;

/// Trip count of a counted `for` loop whose header alone determines the
/// number of iterations: literal initializer, comparison of the control
/// variable against a literal, constant additive step, and a body that never
/// assigns the control variable.
pub fn constant_trip_count(parts: &LoopParts<'_>) -> Option<u64> {
    if parts.kind != LoopKind::For || parts.init.len() != 1 || parts.update.len() != 1 {
        return None;
    }
    let (var, start) = match &parts.init[0].kind {
        StmtKind::Assign {
            target,
            op: AssignOp::Set,
            value,
        } => (target.as_str(), value.const_int()?),
        _ => return None,
    };
    let step = constant_step(&parts.update[0], var)?;
    let (op, bound, var_on_left) = match parts.cond? {
        Expr::Binary(op, l, r) => match (&**l, &**r) {
            (Expr::Var(v), c) if v == var => (*op, c.const_int()?, true),
            (c, Expr::Var(v)) if v == var => (*op, c.const_int()?, false),
            _ => return None,
        },
        _ => return None,
    };
    let (_, writes) = body_reads_writes(parts.body);
    if writes.contains(var) {
        return None;
    }
    let holds = |x: i64| {
        let (a, b) = if var_on_left { (x, bound) } else { (bound, x) };
        match op {
            BinaryOp::Lt => Some(a < b),
            BinaryOp::Le => Some(a <= b),
            BinaryOp::Gt => Some(a > b),
            BinaryOp::Ge => Some(a >= b),
            BinaryOp::Eq => Some(a == b),
            BinaryOp::Ne => Some(a != b),
            _ => None,
        }
    };
    let mut x = start;
    let mut n = 0;
    while holds(x)? {
        n += 1;
        if n > TRIP_LIMIT {
            return None;
        }
        x = x.checked_add(step)?;
    }
    Some(n)
}
