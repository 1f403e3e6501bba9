use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize)]
pub struct SourceLoc {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub statements: Vec<Stmt>,
    /// Smallest id not used by any node; rewrites allocate from here.
    pub next_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub id: NodeId,
    pub loc: SourceLoc,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncDecForm {
    PreInc,
    PostInc,
    PreDec,
    PostDec,
}

impl IncDecForm {
    pub fn delta(self) -> i64 {
        match self {
            IncDecForm::PreInc | IncDecForm::PostInc => 1,
            IncDecForm::PreDec | IncDecForm::PostDec => -1,
        }
    }

    pub fn is_prefix(self) -> bool {
        matches!(self, IncDecForm::PreInc | IncDecForm::PreDec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrintArg {
    Str(String),
    Expr(Expr),
}

/// Statement list of a branch or loop. `braced` records whether the source
/// used `{ ... }`; an unbraced body always holds exactly one statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Body {
    pub braced: bool,
    pub stmts: Vec<Stmt>,
}

impl Body {
    pub fn braced(stmts: Vec<Stmt>) -> Self {
        Body { braced: true, stmts }
    }

    pub fn single(stmt: Stmt) -> Self {
        Body {
            braced: false,
            stmts: vec![stmt],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub cond: Expr,
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign {
        target: String,
        op: AssignOp,
        value: Expr,
    },
    IncDec {
        target: String,
        form: IncDecForm,
    },
    Print(Vec<PrintArg>),
    If {
        branches: Vec<Branch>,
        else_body: Option<Body>,
    },
    While {
        cond: Expr,
        body: Body,
    },
    DoWhile {
        body: Body,
        cond: Expr,
    },
    /// `init` and `update` hold simple statements (assign or inc/dec). The
    /// surface syntax allows a comma-separated list; hand-written programs
    /// normally use zero or one.
    For {
        init: Vec<Stmt>,
        cond: Option<Expr>,
        update: Vec<Stmt>,
        body: Body,
    },
    Break,
    Continue,
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            And => "&&",
            Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Or => 1,
            And => 2,
            Eq | Ne => 3,
            Lt | Le | Gt | Ge => 4,
            Add | Sub => 5,
            Mul | Div | Rem => 6,
        }
    }

    pub fn is_relational(self) -> bool {
        matches!(self, BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge)
    }

    /// The operator that holds exactly when `self` does not.
    pub fn complement(self) -> Option<BinaryOp> {
        use BinaryOp::*;
        Some(match self {
            Lt => Ge,
            Ge => Lt,
            Gt => Le,
            Le => Gt,
            Eq => Ne,
            Ne => Eq,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn negated(e: Expr) -> Expr {
        Expr::Unary(UnaryOp::Not, Box::new(e))
    }

    /// Folds an integer literal, allowing a leading unary minus.
    pub fn const_int(&self) -> Option<i64> {
        match self {
            Expr::Int(v) => Some(*v),
            Expr::Unary(UnaryOp::Neg, e) => e.const_int()?.checked_neg(),
            _ => None,
        }
    }

    pub fn collect_reads(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Unary(_, e) => e.collect_reads(out),
            Expr::Binary(_, l, r) => {
                l.collect_reads(out);
                r.collect_reads(out);
            }
        }
    }

    pub fn has_relational(&self) -> bool {
        match self {
            Expr::Binary(op, l, r) => op.is_relational() || l.has_relational() || r.has_relational(),
            Expr::Unary(_, e) => e.has_relational(),
            _ => false,
        }
    }
}

/// Whether `a` and `b` are syntactic complements: `!(C)` against `C`, or the
/// same operands under complementary comparison operators.
pub fn complementary(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Unary(UnaryOp::Not, inner), other) | (other, Expr::Unary(UnaryOp::Not, inner))
            if **inner == *other =>
        {
            true
        }
        (Expr::Binary(op1, l1, r1), Expr::Binary(op2, l2, r2)) => {
            op1.complement() == Some(*op2) && l1 == l2 && r1 == r2
        }
        _ => false,
    }
}

/// Read-only view of a loop statement's parts, shared by all three loop forms.
#[derive(Debug, Clone, Copy)]
pub struct LoopParts<'a> {
    pub kind: LoopKind,
    pub init: &'a [Stmt],
    pub cond: Option<&'a Expr>,
    pub update: &'a [Stmt],
    pub body: &'a Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopKind {
    While,
    DoWhile,
    For,
}

impl StmtKind {
    pub fn loop_parts(&self) -> Option<LoopParts<'_>> {
        match self {
            StmtKind::While { cond, body } => Some(LoopParts {
                kind: LoopKind::While,
                init: &[],
                cond: Some(cond),
                update: &[],
                body,
            }),
            StmtKind::DoWhile { body, cond } => Some(LoopParts {
                kind: LoopKind::DoWhile,
                init: &[],
                cond: Some(cond),
                update: &[],
                body,
            }),
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => Some(LoopParts {
                kind: LoopKind::For,
                init,
                cond: cond.as_ref(),
                update,
                body,
            }),
            _ => None,
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(
            self,
            StmtKind::While { .. } | StmtKind::DoWhile { .. } | StmtKind::For { .. }
        )
    }

    pub fn loop_body_mut(&mut self) -> Option<&mut Body> {
        match self {
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::For { body, .. } => {
                Some(body)
            }
            _ => None,
        }
    }
}

impl<'a> LoopParts<'a> {
    /// Variable driven by the loop header: the target of the first update,
    /// falling back to the first initializer. Only `for` loops have one.
    pub fn control_var(&self) -> Option<&'a str> {
        self.update
            .iter()
            .chain(self.init.iter())
            .find_map(|s| s.kind.simple_target())
    }
}

impl StmtKind {
    /// Target variable of an assignment or increment/decrement.
    pub fn simple_target(&self) -> Option<&str> {
        match self {
            StmtKind::Assign { target, .. } | StmtKind::IncDec { target, .. } => Some(target),
            _ => None,
        }
    }
}

impl Stmt {
    /// Direct child statement lists, in source order.
    pub fn child_lists(&self) -> Vec<&[Stmt]> {
        match &self.kind {
            StmtKind::If {
                branches,
                else_body,
            } => branches
                .iter()
                .map(|b| b.body.stmts.as_slice())
                .chain(else_body.iter().map(|b| b.stmts.as_slice()))
                .collect(),
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } => vec![&body.stmts],
            StmtKind::For {
                init, update, body, ..
            } => vec![init, update, &body.stmts],
            StmtKind::Block(stmts) => vec![stmts],
            _ => Vec::new(),
        }
    }

    /// Pre-order walk over this statement and everything nested in it.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        for list in self.child_lists() {
            for s in list {
                s.walk(f);
            }
        }
    }

    /// Variables read anywhere in this statement, including compound
    /// assignment targets.
    pub fn collect_reads(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |s| match &s.kind {
            StmtKind::Assign { target, op, value } => {
                if *op != AssignOp::Set {
                    out.insert(target.clone());
                }
                value.collect_reads(out);
            }
            StmtKind::IncDec { target, .. } => {
                out.insert(target.clone());
            }
            StmtKind::Print(args) => {
                for a in args {
                    if let PrintArg::Expr(e) = a {
                        e.collect_reads(out);
                    }
                }
            }
            StmtKind::If { branches, .. } => {
                for b in branches {
                    b.cond.collect_reads(out);
                }
            }
            StmtKind::While { cond, .. } | StmtKind::DoWhile { cond, .. } => cond.collect_reads(out),
            StmtKind::For { cond: Some(c), .. } => c.collect_reads(out),
            _ => {}
        });
    }

    pub fn collect_writes(&self, out: &mut BTreeSet<String>) {
        self.walk(&mut |s| {
            if let Some(t) = s.kind.simple_target() {
                out.insert(t.to_string());
            }
        });
    }
}

impl Program {
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        for s in &self.statements {
            s.walk(f);
        }
    }

    pub fn find(&self, id: NodeId) -> Option<&Stmt> {
        let mut found = None;
        self.walk(&mut |s| {
            if s.id == id && found.is_none() {
                found = Some(s);
            }
        });
        found
    }

    /// Copy with every node id and source location zeroed, for structural
    /// comparison.
    pub fn erased(&self) -> Program {
        fn erase_list(list: &[Stmt]) -> Vec<Stmt> {
            list.iter().map(erase).collect()
        }
        fn erase_body(b: &Body) -> Body {
            Body {
                braced: b.braced,
                stmts: erase_list(&b.stmts),
            }
        }
        fn erase(s: &Stmt) -> Stmt {
            let kind = match &s.kind {
                StmtKind::If {
                    branches,
                    else_body,
                } => StmtKind::If {
                    branches: branches
                        .iter()
                        .map(|b| Branch {
                            cond: b.cond.clone(),
                            body: erase_body(&b.body),
                        })
                        .collect(),
                    else_body: else_body.as_ref().map(erase_body),
                },
                StmtKind::While { cond, body } => StmtKind::While {
                    cond: cond.clone(),
                    body: erase_body(body),
                },
                StmtKind::DoWhile { body, cond } => StmtKind::DoWhile {
                    body: erase_body(body),
                    cond: cond.clone(),
                },
                StmtKind::For {
                    init,
                    cond,
                    update,
                    body,
                } => StmtKind::For {
                    init: erase_list(init),
                    cond: cond.clone(),
                    update: erase_list(update),
                    body: erase_body(body),
                },
                StmtKind::Block(stmts) => StmtKind::Block(erase_list(stmts)),
                other => other.clone(),
            };
            Stmt {
                id: NodeId(0),
                loc: SourceLoc::default(),
                kind,
            }
        }
        Program {
            statements: erase_list(&self.statements),
            next_id: 0,
        }
    }

    pub fn structurally_eq(&self, other: &Program) -> bool {
        self.erased() == other.erased()
    }
}
