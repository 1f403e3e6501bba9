use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::lang::{AssignOp, BinaryOp, Expr, NodeId, Stmt, StmtKind, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl Value {
    /// C-style truthiness: nonzero integers are true.
    pub fn truthy(self) -> bool {
        match self {
            Value::Int(v) => v != 0,
            Value::Bool(b) => b,
        }
    }

    pub fn as_int(self) -> Result<i64, RuntimeError> {
        match self {
            Value::Int(v) => Ok(v),
            Value::Bool(_) => Err(RuntimeError::new(
                RuntimeErrorKind::TypeError,
                "arithmetic on a boolean",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuntimeErrorKind {
    UninitializedRead,
    DivByZero,
    Overflow,
    TypeError,
}

impl RuntimeErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuntimeErrorKind::UninitializedRead => "uninitialized-read",
            RuntimeErrorKind::DivByZero => "div-by-zero",
            RuntimeErrorKind::Overflow => "overflow",
            RuntimeErrorKind::TypeError => "type-error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub detail: String,
}

impl RuntimeError {
    pub fn new(kind: RuntimeErrorKind, detail: impl Into<String>) -> Self {
        RuntimeError {
            kind,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.as_str(), self.detail)
    }
}

/// Loop phase a view frame is currently in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Init,
    Cond,
    Body,
    Update,
    Exit,
}

/// Which reads a view frame intercepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewScope {
    CondAndUpdate,
    Body,
}

/// A shadow mapping installed for the duration of one loop: while the loop
/// is in a phase covered by `scope`, reads of the listed names see these
/// values instead of the real variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewFrame {
    pub loop_node: NodeId,
    pub scope: ViewScope,
    pub values: BTreeMap<String, Value>,
    pub phase: Phase,
}

impl ViewFrame {
    fn active(&self) -> bool {
        match self.scope {
            ViewScope::CondAndUpdate => matches!(self.phase, Phase::Cond | Phase::Update),
            ViewScope::Body => self.phase == Phase::Body,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct State {
    pub vars: BTreeMap<String, Value>,
    pub overlays: Vec<ViewFrame>,
}

impl State {
    pub fn read(&self, name: &str) -> Result<Value, RuntimeError> {
        for frame in self.overlays.iter().rev() {
            if frame.active() {
                if let Some(v) = frame.values.get(name) {
                    return Ok(*v);
                }
            }
        }
        self.vars.get(name).copied().ok_or_else(|| {
            RuntimeError::new(
                RuntimeErrorKind::UninitializedRead,
                format!("`{name}` read before assignment"),
            )
        })
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.vars.get(name).copied()
    }
}

/// Relational-operator substitution applied while evaluating a condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelSwap {
    /// `<` and `<=` trade places, as do `>` and `>=`.
    Strictness,
    /// `<` and `>` trade places, as do `<=` and `>=`.
    Direction,
}

impl RelSwap {
    fn apply(self, op: BinaryOp) -> BinaryOp {
        use BinaryOp::*;
        match (self, op) {
            (RelSwap::Strictness, Lt) => Le,
            (RelSwap::Strictness, Le) => Lt,
            (RelSwap::Strictness, Gt) => Ge,
            (RelSwap::Strictness, Ge) => Gt,
            (RelSwap::Direction, Lt) => Gt,
            (RelSwap::Direction, Gt) => Lt,
            (RelSwap::Direction, Le) => Ge,
            (RelSwap::Direction, Ge) => Le,
            (_, other) => other,
        }
    }
}

/// Strict evaluation with short-circuiting `&&` and `||`.
pub fn eval_expr(expr: &Expr, state: &State) -> Result<Value, RuntimeError> {
    eval_with(expr, state, None)
}

pub fn eval_with(expr: &Expr, state: &State, swap: Option<RelSwap>) -> Result<Value, RuntimeError> {
    match expr {
        Expr::Int(v) => Ok(Value::Int(*v)),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Var(name) => state.read(name),
        Expr::Unary(UnaryOp::Not, e) => Ok(Value::Bool(!eval_with(e, state, swap)?.truthy())),
        Expr::Unary(UnaryOp::Neg, e) => {
            let v = eval_with(e, state, swap)?.as_int()?;
            v.checked_neg().map(Value::Int).ok_or_else(overflow)
        }
        Expr::Binary(BinaryOp::And, l, r) => {
            if !eval_with(l, state, swap)?.truthy() {
                return Ok(Value::Bool(false));
            }
            Ok(Value::Bool(eval_with(r, state, swap)?.truthy()))
        }
        Expr::Binary(BinaryOp::Or, l, r) => {
            if eval_with(l, state, swap)?.truthy() {
                return Ok(Value::Bool(true));
            }
            Ok(Value::Bool(eval_with(r, state, swap)?.truthy()))
        }
        Expr::Binary(op, l, r) => {
            let a = eval_with(l, state, swap)?;
            let b = eval_with(r, state, swap)?;
            let op = swap.map_or(*op, |s| s.apply(*op));
            binary(op, a, b)
        }
    }
}

fn overflow() -> RuntimeError {
    RuntimeError::new(RuntimeErrorKind::Overflow, "integer overflow")
}

pub fn binary(op: BinaryOp, a: Value, b: Value) -> Result<Value, RuntimeError> {
    use BinaryOp::*;
    match op {
        Eq | Ne => {
            let same = match (a, b) {
                (Value::Int(x), Value::Int(y)) => x == y,
                (Value::Bool(x), Value::Bool(y)) => x == y,
                _ => {
                    return Err(RuntimeError::new(
                        RuntimeErrorKind::TypeError,
                        "comparing an integer with a boolean",
                    ))
                }
            };
            Ok(Value::Bool(if op == Eq { same } else { !same }))
        }
        And => Ok(Value::Bool(a.truthy() && b.truthy())),
        Or => Ok(Value::Bool(a.truthy() || b.truthy())),
        _ => {
            let (x, y) = (a.as_int()?, b.as_int()?);
            let v = match op {
                Lt => return Ok(Value::Bool(x < y)),
                Le => return Ok(Value::Bool(x <= y)),
                Gt => return Ok(Value::Bool(x > y)),
                Ge => return Ok(Value::Bool(x >= y)),
                Add => x.checked_add(y),
                Sub => x.checked_sub(y),
                Mul => x.checked_mul(y),
                Div | Rem => {
                    if y == 0 {
                        return Err(RuntimeError::new(RuntimeErrorKind::DivByZero, "division by zero"));
                    }
                    if op == Div {
                        x.checked_div(y)
                    } else {
                        x.checked_rem(y)
                    }
                }
                Eq | Ne | And | Or => unreachable!(),
            };
            v.map(Value::Int).ok_or_else(overflow)
        }
    }
}

/// Computes the value an assignment or increment would store, without
/// storing it.
pub fn compute_simple(stmt: &Stmt, state: &State) -> Result<Option<(String, Value)>, RuntimeError> {
    match &stmt.kind {
        StmtKind::Assign { target, op, value } => {
            let rhs = eval_expr(value, state)?;
            let v = match op {
                AssignOp::Set => rhs,
                AssignOp::Add => binary(BinaryOp::Add, state.read(target)?, rhs)?,
                AssignOp::Sub => binary(BinaryOp::Sub, state.read(target)?, rhs)?,
                AssignOp::Mul => binary(BinaryOp::Mul, state.read(target)?, rhs)?,
            };
            Ok(Some((target.clone(), v)))
        }
        StmtKind::IncDec { target, form } => {
            let v = binary(BinaryOp::Add, state.read(target)?, Value::Int(form.delta()))?;
            Ok(Some((target.clone(), v)))
        }
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;

    fn eval(src: &str, vars: &[(&str, i64)]) -> Result<Value, RuntimeErrorKind> {
        let mut st = State::default();
        for (k, v) in vars {
            st.vars.insert(k.to_string(), Value::Int(*v));
        }
        eval_expr(&parse_expr(src).unwrap(), &st).map_err(|e| e.kind)
    }

    #[test]
    fn basics() {
        assert_eq!(eval("3 < 5", &[]), Ok(Value::Bool(true)));
        assert_eq!(eval("x", &[]), Err(RuntimeErrorKind::UninitializedRead));
        assert_eq!(eval("i > 0", &[("i", 10)]), Ok(Value::Bool(true)));
        assert_eq!(eval("7 / 2 * 2 + 7 % 2", &[]), Ok(Value::Int(7)));
        assert_eq!(eval("-7 / 2", &[]), Ok(Value::Int(-3)));
    }

    #[test]
    fn errors() {
        assert_eq!(eval("1 / 0", &[]), Err(RuntimeErrorKind::DivByZero));
        assert_eq!(eval("1 % 0", &[]), Err(RuntimeErrorKind::DivByZero));
        assert_eq!(eval("9223372036854775807 + 1", &[]), Err(RuntimeErrorKind::Overflow));
        assert_eq!(eval("true + 1", &[]), Err(RuntimeErrorKind::TypeError));
        assert_eq!(eval("true < 1", &[]), Err(RuntimeErrorKind::TypeError));
        assert_eq!(eval("true == 1", &[]), Err(RuntimeErrorKind::TypeError));
        assert_eq!(eval("-true", &[]), Err(RuntimeErrorKind::TypeError));
    }

    #[test]
    fn short_circuit_and_truthiness() {
        assert_eq!(eval("0 && x", &[]), Ok(Value::Bool(false)));
        assert_eq!(eval("2 || x", &[]), Ok(Value::Bool(true)));
        assert_eq!(eval("!5", &[]), Ok(Value::Bool(false)));
        assert_eq!(eval("!0", &[]), Ok(Value::Bool(true)));
    }

    #[test]
    fn relational_swaps() {
        let st = State::default();
        let e = parse_expr("3 < 3").unwrap();
        assert_eq!(eval_with(&e, &st, Some(RelSwap::Strictness)), Ok(Value::Bool(true)));
        let e = parse_expr("2 < 3").unwrap();
        assert_eq!(eval_with(&e, &st, Some(RelSwap::Direction)), Ok(Value::Bool(false)));
        let e = parse_expr("2 == 3").unwrap();
        assert_eq!(eval_with(&e, &st, Some(RelSwap::Direction)), Ok(Value::Bool(false)));
    }

    #[test]
    fn overlays_shadow_reads_in_scope() {
        let mut st = State::default();
        st.vars.insert("i".into(), Value::Int(5));
        st.overlays.push(ViewFrame {
            loop_node: NodeId(0),
            scope: ViewScope::Body,
            values: [("i".to_string(), Value::Int(1))].into(),
            phase: Phase::Cond,
        });
        assert_eq!(st.read("i"), Ok(Value::Int(5)));
        st.overlays[0].phase = Phase::Body;
        assert_eq!(st.read("i"), Ok(Value::Int(1)));
    }
}
