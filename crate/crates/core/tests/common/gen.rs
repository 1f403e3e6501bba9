//! Grammar-based program generator producing minilang source text with
//! statement nesting depth at most `MAX_DEPTH`.

use proptest::prelude::*;

pub const MAX_DEPTH: u32 = 4;

const VARS: &[&str] = &["a", "b", "c", "n", "i", "j"];

fn var() -> impl Strategy<Value = String> {
    prop_oneof![
        20 => prop::sample::select(VARS).prop_map(str::to_string),
        1 => Just("u".to_string()),
    ]
}

fn atom() -> BoxedStrategy<String> {
    prop_oneof![
        4 => (-3i64..10).prop_map(|v| v.to_string()),
        5 => var(),
        1 => prop::bool::ANY.prop_map(|b| b.to_string()),
    ]
    .boxed()
}

pub fn expr(depth: u32) -> BoxedStrategy<String> {
    if depth == 0 {
        return atom();
    }
    let ops = prop::sample::select(&["+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||"][..]);
    prop_oneof![
        3 => atom(),
        4 => (expr(depth - 1), ops, expr(depth - 1)).prop_map(|(l, op, r)| format!("({l} {op} {r})")),
        1 => (prop::sample::select(&["!", "-"][..]), expr(depth - 1)).prop_map(|(op, e)| format!("{op}({e})")),
    ]
    .boxed()
}

pub fn cond() -> BoxedStrategy<String> {
    let rel = prop::sample::select(&["<", "<=", ">", ">=", "==", "!="][..]);
    prop_oneof![
        4 => (var(), rel, -2i64..6).prop_map(|(v, op, k)| format!("{v} {op} {k}")),
        1 => expr(2),
    ]
    .boxed()
}

fn simple() -> BoxedStrategy<String> {
    prop_oneof![
        4 => (var(), expr(2)).prop_map(|(v, e)| format!("{v} = {e}")),
        2 => (var(), prop::sample::select(&["+=", "-="][..]), expr(1)).prop_map(|(v, op, e)| format!("{v} {op} {e}")),
        1 => (var(), -2i64..3).prop_map(|(v, k)| format!("{v} *= {k}")),
        3 => (var(), prop::sample::select(&["++", "--"][..]), any::<bool>())
            .prop_map(|(v, op, pre)| if pre { format!("{op}{v}") } else { format!("{v}{op}") }),
    ]
    .boxed()
}

fn print_stmt() -> BoxedStrategy<String> {
    let arg = prop_oneof![
        1 => prop::sample::select(&["\"x\"", "\"Birne\"", "\"\""][..]).prop_map(str::to_string),
        3 => expr(1),
    ];
    prop::collection::vec(arg, 1..3)
        .prop_map(|args| format!("print({});", args.join(", ")))
        .boxed()
}

pub fn leaf() -> BoxedStrategy<String> {
    prop_oneof![
        6 => simple().prop_map(|s| format!("{s};")),
        5 => print_stmt(),
        1 => Just("break;".to_string()),
        1 => Just("continue;".to_string()),
    ]
    .boxed()
}

fn block(inner: BoxedStrategy<String>) -> BoxedStrategy<String> {
    prop::collection::vec(inner, 1..4)
        .prop_map(|s| format!("{{ {} }}", s.join(" ")))
        .boxed()
}

fn header_list() -> BoxedStrategy<String> {
    prop_oneof![
        1 => Just(String::new()),
        6 => simple(),
        1 => (simple(), simple()).prop_map(|(a, b)| format!("{a}, {b}")),
    ]
    .boxed()
}

pub fn stmt(depth: u32) -> BoxedStrategy<String> {
    if depth == 0 {
        return leaf();
    }
    let inner = stmt(depth - 1);
    let body = block(inner.clone());
    let branch = (cond(), body.clone());
    prop_oneof![
        5 => leaf(),
        3 => (
            branch.clone(),
            prop::collection::vec(branch, 0..2),
            prop::option::of(body.clone()),
        )
            .prop_map(|((c, b), elifs, els)| {
                let mut s = format!("if ({c}) {b}");
                for (c, b) in elifs {
                    s.push_str(&format!(" else if ({c}) {b}"));
                }
                if let Some(e) = els {
                    s.push_str(&format!(" else {e}"));
                }
                s
            }),
        1 => (cond(), inner).prop_map(|(c, s)| format!("if ({c}) {s}")),
        2 => (prop::sample::select(&["i", "j", "n"][..]), 0i64..2, 1i64..4, body.clone()).prop_map(|(v, lo, hi, b)| {
            format!("for ({v} = {lo}; {v} < {hi}; {v}++) {b}")
        }),
        1 => (header_list(), prop::option::of(cond()), header_list(), body.clone())
            .prop_map(|(i, c, u, b)| format!("for ({i}; {}; {u}) {b}", c.unwrap_or_default())),
        2 => (prop::sample::select(&["a", "b", "c"][..]), 1i64..4, body.clone()).prop_map(|(v, k, b)| {
            let body = &b[..b.len() - 1];
            format!("while ({v} < {k}) {body} {v} = {v} + 1; }}")
        }),
        1 => (cond(), body.clone()).prop_map(|(c, b)| format!("while ({c}) {b}")),
        1 => (body.clone(), cond()).prop_map(|(b, c)| format!("do {b} while ({c});")),
    ]
    .boxed()
}

/// A whole program: a prelude binding most variables, then statements.
pub fn program() -> BoxedStrategy<String> {
    (
        prop::collection::vec(-2i64..5, VARS.len()),
        prop::collection::vec(stmt(MAX_DEPTH), 1..5),
    )
        .prop_map(|(init, body)| {
            let mut s: String = VARS.iter().zip(init).map(|(v, k)| format!("{v} = {k}; ")).collect();
            s.push_str(&body.join("\n"));
            s
        })
        .boxed()
}
