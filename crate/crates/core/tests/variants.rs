mod common;

use std::collections::BTreeSet;

use common::fixtures::{Fixture, BIRNE, FIXTURES, NESTED};
use common::{profile, program, simulate, tokens};
use notional::exec::{run_reference, Event, Limits};
use notional::lang::{pretty_print, FeatureSet};
use notional::registry::shipped;
use notional::variant::{applicable_variants, rewrite_structural, run_variant};

fn limits(f: &Fixture) -> Limits {
    Limits {
        max_outputs: f.max_outputs.unwrap_or(Limits::default().max_outputs),
        ..Limits::default()
    }
}

#[test]
fn every_fixture_matches_its_hand_trace() {
    let mut failures = Vec::new();
    for f in FIXTURES {
        let r = run_variant(&program(f.source), &profile(f.profile), limits(f));
        if r.transcript != tokens(f.expected) || r.status.to_string() != f.status {
            failures.push(format!(
                "{} on `{}`: got {:?} ({}), expected {:?} ({})",
                f.profile, f.source, r.transcript, r.status, f.expected, f.status
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn every_runnable_leaf_has_a_distinguishing_fixture() {
    let mut covered = BTreeSet::new();
    for f in FIXTURES {
        let p = program(f.source);
        let reference = run_reference(&p, limits(f));
        let prof = profile(f.profile);
        if prof.len() == 1 && reference.transcript != tokens(f.expected) {
            covered.insert(prof.active()[0].code.to_string());
        }
    }
    let missing: Vec<String> = shipped()
        .entries
        .iter()
        .filter(|e| e.is_runnable())
        .map(|e| e.code.to_string())
        .filter(|c| !covered.contains(c))
        .collect();
    assert!(missing.is_empty(), "no distinguishing fixture for {missing:?}");
}

#[test]
fn birne_reproduction() {
    assert_eq!(simulate(BIRNE, "").transcript, ["Birne 10", "Birne 6", "Birne 2", "Apfel"]);
    assert_eq!(simulate(BIRNE, "ITER.3.b.ii.A").transcript, ["Birne 6", "Birne 2", "Birne -2", "Apfel"]);
    assert_eq!(
        simulate(BIRNE, "ITER.3.b.ii.A,ITER.3.a.ii").transcript,
        ["Birne 10", "Birne 6", "Birne 2", "Birne -2", "Apfel"]
    );
    assert_eq!(simulate(BIRNE, "ITER.3.a.ii").transcript, ["Birne 10", "Birne 6", "Birne 2", "Apfel"]);
}

#[test]
fn applicability_on_birne() {
    let codes: Vec<String> = applicable_variants(shipped(), &notional::lang::features(&program(BIRNE)))
        .iter()
        .map(ToString::to_string)
        .collect();
    for c in ["ITER.3.b.ii.A", "ITER.3.a.ii", "ITER.2.b.i"] {
        assert!(codes.contains(&c.to_string()), "{c}");
    }
    assert!(!codes.iter().any(|c| c.starts_with("ITER.7") || c.starts_with("ITER.6")));
    assert!(applicable_variants(shipped(), &FeatureSet::default()).is_empty());
    let with_break = notional::lang::features(&program("while (true) { break; }"));
    let jumps = applicable_variants(shipped(), &with_break)
        .iter()
        .filter(|c| c.to_string().starts_with("ITER.7"))
        .count();
    assert_eq!(jumps, 4);
}

#[test]
fn structural_rewrites_print_as_expected() {
    let cases = [
        ("SEL.5.a.i", "if (a) { if (b) { print(1); } }", "if (a) { } if (b) { print(1); }"),
        (
            "SEL.4.d.ii.B",
            "if (c) { x = 1; } if (!c) { x = 2; }",
            "if (c) { x = 1; } else { x = 2; }",
        ),
        (
            "ITER.6.c",
            NESTED,
            "for (j = 0; j < 2; j = j + 1) { for (i = 0; i < 2; i = i + 1) { print(\"X\", i, j); } }",
        ),
    ];
    for (code, src, expected) in cases {
        let got = rewrite_structural(&program(src), &profile(code));
        assert_eq!(pretty_print(&got), pretty_print(&program(expected)), "{code}");
    }
}

#[test]
fn inapplicable_rewrites_are_no_ops() {
    let p = program("x = 1; print(x);");
    for code in ["ITER.6.a", "SEL.5.a.ii", "ITER.2.a.i", "SEL.2.b"] {
        assert_eq!(rewrite_structural(&p, &profile(code)), p, "{code}");
    }
}

fn outputs_of(r: &notional::exec::ExecResult, node: u32) -> Vec<String> {
    r.trace
        .iter()
        .filter_map(|e| match e {
            Event::Output { node: n, text, live: true } if n.0 == node => Some(text.clone()),
            _ => None,
        })
        .collect()
}

/// Two loops governed by disjoint slots: composing the profiles leaves each
/// loop's own output as it was under its single profile.
#[test]
fn composition_is_local() {
    let src = "for (i = 0; i < 5; i = i + 2) { print(\"a\", i); } for (k = 0; k < 3; ++k) { print(\"b\", k); }";
    let p = program(src);
    let body_print = |idx: usize| match &p.statements[idx].kind {
        notional::lang::StmtKind::For { body, .. } => body.stmts[0].id.0,
        _ => unreachable!(),
    };
    let (a_node, b_node) = (body_print(0), body_print(1));
    let lim = Limits::default();
    let first = run_variant(&p, &profile("ITER.4.a.i.B"), lim);
    let second = run_variant(&p, &profile("ITER.3.b.ii.B"), lim);
    let both = run_variant(&p, &profile("ITER.4.a.i.B,ITER.3.b.ii.B"), lim);
    assert_eq!(outputs_of(&first, a_node), outputs_of(&both, a_node));
    assert_eq!(outputs_of(&second, b_node), outputs_of(&both, b_node));
    assert_eq!(both.transcript, ["a 0", "a 1", "a 2", "a 3", "a 4", "b 1", "b 2", "b 3"]);
}

/// Trace deviations from the reference stay on the nodes a variant governs.
#[test]
fn deviations_stay_on_governed_nodes() {
    let src = "print(\"start\"); x = 5; if (x > 3) { print(\"a\"); } else { print(\"b\"); } \
               for (i = 0; i < 2; i++) { print(i); } print(\"end\");";
    let p = program(src);
    let reference = run_reference(&p, Limits::default());
    let loop_id = p.statements[3].id;
    let if_id = p.statements[2].id;
    for (code, governed) in [("ITER.5.b.i.A", loop_id), ("SEL.1.c", if_id)] {
        let r = run_variant(&p, &profile(code), Limits::default());
        let mut inside = BTreeSet::new();
        p.find(governed).unwrap().walk(&mut |s| {
            inside.insert(s.id.0);
        });
        let outside = |res: &notional::exec::ExecResult| -> Vec<Event> {
            res.trace
                .iter()
                .filter(|e| e.node().is_some_and(|n| !inside.contains(&n.0)))
                .cloned()
                .collect()
        };
        assert_eq!(outside(&r), outside(&reference), "{code}");
        assert_ne!(r.trace, reference.trace, "{code}");
    }
}
