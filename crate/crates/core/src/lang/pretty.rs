use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

/// Renders a program as source text that parses back to the same structure.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.statements {
        stmt(&mut out, s, 0);
    }
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e);
    out
}

/// Single-line rendering of an assignment or increment, as used in `for`
/// headers.
pub fn simple_to_string(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Assign { target, op, value } => {
            format!("{target} {} {}", op.symbol(), expr_to_string(value))
        }
        StmtKind::IncDec { target, form } => match form {
            IncDecForm::PreInc => format!("++{target}"),
            IncDecForm::PostInc => format!("{target}++"),
            IncDecForm::PreDec => format!("--{target}"),
            IncDecForm::PostDec => format!("{target}--"),
        },
        _ => String::new(),
    }
}

fn pad(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    pad(out, depth);
    match &s.kind {
        StmtKind::Assign { .. } | StmtKind::IncDec { .. } => {
            out.push_str(&simple_to_string(s));
            out.push_str(";\n");
        }
        StmtKind::Print(args) => {
            out.push_str("print(");
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                match a {
                    PrintArg::Str(text) => string_literal(out, text),
                    PrintArg::Expr(e) => expr(out, e),
                }
            }
            out.push_str(");\n");
        }
        StmtKind::Break => out.push_str("break;\n"),
        StmtKind::Continue => out.push_str("continue;\n"),
        StmtKind::Block(stmts) => {
            out.push_str("{\n");
            for s in stmts {
                stmt(out, s, depth + 1);
            }
            pad(out, depth);
            out.push_str("}\n");
        }
        StmtKind::If {
            branches,
            else_body,
        } => {
            for (i, b) in branches.iter().enumerate() {
                if i > 0 {
                    pad(out, depth);
                    out.push_str("else ");
                }
                let _ = write!(out, "if ({})", expr_to_string(&b.cond));
                body(out, &b.body, depth);
            }
            if let Some(e) = else_body {
                pad(out, depth);
                out.push_str("else");
                body(out, e, depth);
            }
        }
        StmtKind::While { cond, body: b } => {
            let _ = write!(out, "while ({})", expr_to_string(cond));
            body(out, b, depth);
        }
        StmtKind::DoWhile { body: b, cond } => {
            out.push_str("do");
            body(out, b, depth);
            pad(out, depth);
            let _ = writeln!(out, "while ({});", expr_to_string(cond));
        }
        StmtKind::For {
            init,
            cond,
            update,
            body: b,
        } => {
            let list = |l: &[Stmt]| l.iter().map(simple_to_string).collect::<Vec<_>>().join(", ");
            let _ = write!(out, "for ({};", list(init));
            if let Some(c) = cond {
                let _ = write!(out, " {}", expr_to_string(c));
            }
            out.push(';');
            if !update.is_empty() {
                let _ = write!(out, " {}", list(update));
            }
            out.push(')');
            body(out, b, depth);
        }
    }
}

/// Emits a body after its header. Braced bodies open on the header line;
/// an unbraced single statement goes on the next line, indented.
fn body(out: &mut String, b: &Body, depth: usize) {
    if b.braced {
        out.push_str(" {\n");
        for s in &b.stmts {
            stmt(out, s, depth + 1);
        }
        pad(out, depth);
        out.push_str("}\n");
    } else {
        out.push('\n');
        for s in &b.stmts {
            stmt(out, s, depth + 1);
        }
    }
}

fn string_literal(out: &mut String, text: &str) {
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Unary(..) => 7,
        _ => 8,
    }
}

fn expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Var(n) => out.push_str(n),
        Expr::Unary(op, inner) => {
            out.push(match op {
                UnaryOp::Neg => '-',
                UnaryOp::Not => '!',
            });
            // `- -x` must not collapse into `--x`
            let needs_parens = expr_prec(inner) < 7
                || (*op == UnaryOp::Neg && matches!(**inner, Expr::Unary(UnaryOp::Neg, _)))
                || (*op == UnaryOp::Neg && matches!(**inner, Expr::Int(v) if v < 0));
            wrap(out, inner, needs_parens);
        }
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            wrap(out, l, expr_prec(l) < p);
            let _ = write!(out, " {} ", op.symbol());
            wrap(out, r, expr_prec(r) <= p);
        }
    }
}

fn wrap(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        expr(out, e);
        out.push(')');
    } else {
        expr(out, e);
    }
}
