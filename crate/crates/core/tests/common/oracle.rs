//! A second, deliberately naive interpreter for the reference semantics.
//! It shares only the AST with the library and counts executed statements
//! instead of trace events.

use std::collections::HashMap;

use notional::lang::{AssignOp, BinaryOp, Body, Expr, PrintArg, Program, Stmt, StmtKind, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum V {
    I(i64),
    B(bool),
}

impl V {
    fn truth(self) -> bool {
        match self {
            V::I(v) => v != 0,
            V::B(b) => b,
        }
    }

    fn int(self) -> Result<i64, Stop> {
        match self {
            V::I(v) => Ok(v),
            V::B(_) => Err(Stop::Error("type-error")),
        }
    }

    fn show(self) -> String {
        match self {
            V::I(v) => v.to_string(),
            V::B(b) => b.to_string(),
        }
    }
}

#[derive(Debug)]
enum Stop {
    Error(&'static str),
    OutputCap,
    Fuel,
}

enum Jump {
    None,
    Break,
    Continue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Same spelling as the library's status display.
    Finished(String),
    /// Ran out of statement fuel; the transcript is a prefix.
    OutOfFuel,
}

pub struct OracleRun {
    pub transcript: Vec<String>,
    pub outcome: Outcome,
}

struct Oracle {
    vars: HashMap<String, V>,
    out: Vec<String>,
    max_outputs: usize,
    fuel: u64,
    depth: usize,
}

pub fn run(program: &Program, max_outputs: usize, fuel: u64) -> OracleRun {
    let mut o = Oracle {
        vars: HashMap::new(),
        out: Vec::new(),
        max_outputs,
        fuel,
        depth: 0,
    };
    let outcome = match o.list(&program.statements) {
        Ok(_) => Outcome::Finished("completed".into()),
        Err(Stop::Error(kind)) => Outcome::Finished(format!("runtime_error({kind})")),
        Err(Stop::OutputCap) => Outcome::Finished("output_cap".into()),
        Err(Stop::Fuel) => Outcome::OutOfFuel,
    };
    OracleRun {
        transcript: o.out,
        outcome,
    }
}

fn checked(v: Option<i64>) -> Result<V, Stop> {
    v.map(V::I).ok_or(Stop::Error("overflow"))
}

impl Oracle {
    fn get(&self, name: &str) -> Result<V, Stop> {
        self.vars.get(name).copied().ok_or(Stop::Error("uninitialized-read"))
    }

    fn eval(&self, e: &Expr) -> Result<V, Stop> {
        Ok(match e {
            Expr::Int(v) => V::I(*v),
            Expr::Bool(b) => V::B(*b),
            Expr::Var(n) => self.get(n)?,
            Expr::Unary(UnaryOp::Not, x) => V::B(!self.eval(x)?.truth()),
            Expr::Unary(UnaryOp::Neg, x) => checked(self.eval(x)?.int()?.checked_neg())?,
            Expr::Binary(BinaryOp::And, l, r) => V::B(self.eval(l)?.truth() && self.eval(r)?.truth()),
            Expr::Binary(BinaryOp::Or, l, r) => V::B(self.eval(l)?.truth() || self.eval(r)?.truth()),
            Expr::Binary(op, l, r) => {
                let (a, b) = (self.eval(l)?, self.eval(r)?);
                if matches!(op, BinaryOp::Eq | BinaryOp::Ne) {
                    let same = match (a, b) {
                        (V::I(x), V::I(y)) => x == y,
                        (V::B(x), V::B(y)) => x == y,
                        _ => return Err(Stop::Error("type-error")),
                    };
                    return Ok(V::B(same == (*op == BinaryOp::Eq)));
                }
                let (x, y) = (a.int()?, b.int()?);
                match op {
                    BinaryOp::Lt => V::B(x < y),
                    BinaryOp::Le => V::B(x <= y),
                    BinaryOp::Gt => V::B(x > y),
                    BinaryOp::Ge => V::B(x >= y),
                    BinaryOp::Add => checked(x.checked_add(y))?,
                    BinaryOp::Sub => checked(x.checked_sub(y))?,
                    BinaryOp::Mul => checked(x.checked_mul(y))?,
                    BinaryOp::Div | BinaryOp::Rem if y == 0 => return Err(Stop::Error("div-by-zero")),
                    BinaryOp::Div => checked(x.checked_div(y))?,
                    BinaryOp::Rem => checked(x.checked_rem(y))?,
                    _ => unreachable!(),
                }
            }
        })
    }

    fn cond(&self, c: Option<&Expr>) -> Result<bool, Stop> {
        c.map_or(Ok(true), |c| Ok(self.eval(c)?.truth()))
    }

    fn list(&mut self, stmts: &[Stmt]) -> Result<Jump, Stop> {
        for s in stmts {
            match self.stmt(s)? {
                Jump::None => {}
                j => return Ok(j),
            }
        }
        Ok(Jump::None)
    }

    fn body(&mut self, b: &Body) -> Result<Jump, Stop> {
        self.list(&b.stmts)
    }

    fn in_loop(&mut self, b: &Body) -> Result<Jump, Stop> {
        self.depth += 1;
        let r = self.body(b);
        self.depth -= 1;
        r
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Jump, Stop> {
        if self.fuel == 0 {
            return Err(Stop::Fuel);
        }
        self.fuel -= 1;
        match &s.kind {
            StmtKind::Assign { target, op, value } => {
                let v = self.eval(value)?;
                let new = match op {
                    AssignOp::Set => v,
                    AssignOp::Add => checked(self.get(target)?.int()?.checked_add(v.int()?))?,
                    AssignOp::Sub => checked(self.get(target)?.int()?.checked_sub(v.int()?))?,
                    AssignOp::Mul => checked(self.get(target)?.int()?.checked_mul(v.int()?))?,
                };
                self.vars.insert(target.clone(), new);
            }
            StmtKind::IncDec { target, form } => {
                let v = checked(self.get(target)?.int()?.checked_add(form.delta()))?;
                self.vars.insert(target.clone(), v);
            }
            StmtKind::Print(args) => {
                let mut parts = Vec::new();
                for a in args {
                    parts.push(match a {
                        PrintArg::Str(s) => s.clone(),
                        PrintArg::Expr(e) => self.eval(e)?.show(),
                    });
                }
                if self.out.len() >= self.max_outputs {
                    return Err(Stop::OutputCap);
                }
                self.out.push(parts.join(" "));
            }
            StmtKind::If { branches, else_body } => {
                for b in branches {
                    if self.eval(&b.cond)?.truth() {
                        return self.body(&b.body);
                    }
                }
                if let Some(e) = else_body {
                    return self.body(e);
                }
            }
            StmtKind::While { cond, body } => {
                while self.cond(Some(cond))? {
                    if let Jump::Break = self.in_loop(body)? {
                        break;
                    }
                    self.tick()?;
                }
            }
            StmtKind::DoWhile { body, cond } => loop {
                if let Jump::Break = self.in_loop(body)? {
                    break;
                }
                if !self.cond(Some(cond))? {
                    break;
                }
                self.tick()?;
            },
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.list(init)?;
                while self.cond(cond.as_ref())? {
                    if let Jump::Break = self.in_loop(body)? {
                        break;
                    }
                    self.list(update)?;
                    self.tick()?;
                }
            }
            StmtKind::Break if self.depth > 0 => return Ok(Jump::Break),
            StmtKind::Continue if self.depth > 0 => return Ok(Jump::Continue),
            StmtKind::Break | StmtKind::Continue => {}
            StmtKind::Block(stmts) => return self.list(stmts),
        }
        Ok(Jump::None)
    }

    /// Loops with empty bodies still consume fuel per cycle.
    fn tick(&mut self) -> Result<(), Stop> {
        if self.fuel == 0 {
            return Err(Stop::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }
}
