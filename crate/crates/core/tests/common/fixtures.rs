//! Hand-traced expectations for every runnable catalog code. Each row's
//! transcript was worked out from the rule alone.

pub const BIRNE: &str = "for (i = 10; i > 0; i = i - 4) { print(\"Birne\", i); } print(\"Apfel\");";
pub const NESTED: &str = "for (i = 0; i < 2; i = i + 1) { for (j = 0; j < 2; j = j + 1) { print(\"X\", i, j); } }";

pub const BIRNE_RIGHT: [&str; 4] = ["Birne 10", "Birne 6", "Birne 2", "Apfel"];
pub const BIRNE_WRONG_1: [&str; 4] = ["Birne 6", "Birne 2", "Birne -2", "Apfel"];
pub const BIRNE_WRONG_2: [&str; 5] = ["Birne 10", "Birne 6", "Birne 2", "Birne -2", "Apfel"];

const CHAIN3: &str = "x = 5; if (x > 10) { print(\"a\"); } else if (x > 3) { print(\"b\"); } else { print(\"c\"); }";
const CHAIN4: &str = "x = 5; if (x > 3) { print(\"a\"); } else if (x > 1) { print(\"b\"); } \
                      else if (x > 0) { print(\"c\"); } else { print(\"d\"); }";
const IF_ELSE: &str = "x = 5; if (x > 3) { print(\"a\"); } else { print(\"b\"); }";
const COUNT3: &str = "for (i = 0; i < 3; i++) { print(i); }";
const COUNT2: &str = "for (i = 0; i < 2; i++) { print(i); }";
const BREAK_AT_1: &str = "for (i = 0; i < 3; i = i + 1) { if (i == 1) { break; } print(i); } print(\"end\");";

pub struct Fixture {
    pub profile: &'static str,
    pub source: &'static str,
    /// `None` means default limits.
    pub max_outputs: Option<usize>,
    pub expected: &'static [&'static str],
    pub status: &'static str,
}

const fn fx(profile: &'static str, source: &'static str, expected: &'static [&'static str]) -> Fixture {
    Fixture {
        profile,
        source,
        max_outputs: None,
        expected,
        status: "completed",
    }
}

const fn capped(
    profile: &'static str,
    source: &'static str,
    outputs: usize,
    expected: &'static [&'static str],
) -> Fixture {
    Fixture {
        profile,
        source,
        max_outputs: Some(outputs),
        expected,
        status: "output_cap",
    }
}

const fn halted(profile: &'static str, source: &'static str, expected: &'static [&'static str]) -> Fixture {
    Fixture {
        profile,
        source,
        max_outputs: None,
        expected,
        status: "halted_by_variant",
    }
}

pub const FIXTURES: &[Fixture] = &[
    fx("SEL.1.a.i", CHAIN3, &["a", "b", "c"]),
    fx("SEL.1.a.ii", CHAIN3, &["c"]),
    fx("SEL.1.a.ii(k=1)", CHAIN3, &["a"]),
    fx("SEL.1.a.ii", "x = 0; if (x > 3) { print(\"a\"); } print(\"z\");", &["a", "z"]),
    fx(
        "SEL.1.b.i",
        "x = 5; if (x > 3) print(\"a\"); else if (x > 1) print(\"b\"); else print(\"c\");",
        &["a", "b"],
    ),
    fx("SEL.1.b.ii", CHAIN3, &[]),
    fx("SEL.1.c", IF_ELSE, &["b"]),
    fx(
        "SEL.2.a",
        "x = 1; if (x > 5) { print(\"a\"); } print(\"b\"); print(\"c\");",
        &["c"],
    ),
    fx(
        "SEL.2.a(k=2)",
        "x = 1; if (x > 5) { print(\"a\"); } print(\"b\"); print(\"c\");",
        &[],
    ),
    fx(
        "SEL.2.b",
        "x = 1; if (x > 5) { print(\"a\"); print(\"b\"); } print(\"c\");",
        &["b", "c"],
    ),
    capped(
        "SEL.3.b.i",
        "print(\"go\"); x = 1; if (x > 1) { print(\"big\"); }",
        3,
        &["go", "go", "go"],
    ),
    halted(
        "SEL.3.b.ii",
        "x = 1; if (x > 1) { print(\"big\"); } print(\"end\");",
        &[],
    ),
    fx("SEL.3.c.i", IF_ELSE, &["a", "b"]),
    fx(
        "SEL.3.c.ii",
        "x = 5; if (x > 3) { print(\"a\"); } print(\"b\"); print(\"c\");",
        &["a", "c"],
    ),
    fx("SEL.4.a.ii.A", "x = 0; if (x < 3) { print(x); x = x + 1; }", &["0", "1", "2"]),
    fx("SEL.4.a.ii.B", "x = 0; if (x < 3) { print(x); x = x + 1; }", &["0", "1"]),
    fx(
        "SEL.4.a.ii.B(n=3)",
        "x = 0; if (x < 5) { print(x); x = x + 1; }",
        &["0", "1", "2"],
    ),
    fx(
        "SEL.4.b.i",
        "x = 0; if (x > 0) { print(\"pos\"); } x = 1; print(\"end\");",
        &["pos", "end"],
    ),
    fx(
        "SEL.4.b.ii",
        "x = 5; print(\"a\"); x = 0; if (x > 3) { print(\"b\"); }",
        &["b", "a"],
    ),
    fx(
        "SEL.4.c.i",
        "x = 0; if (x > 0) { x = x + 1; print(\"in\"); } print(x);",
        &["in", "1"],
    ),
    fx(
        "SEL.4.c.i",
        "x = 1; if (x > 0) { x = x - 5; print(\"in\"); } print(x);",
        &["1"],
    ),
    fx(
        "SEL.4.c.ii.A.I",
        "x = 0; if (x > 0) { x = x + 1; print(x); x = x - 1; print(x); print(\"end\"); }",
        &["1", "0", "end"],
    ),
    fx(
        "SEL.4.c.ii.A.II",
        "x = 0; if (x > 0) { x = x + 1; print(x); x = x - 1; print(x); print(\"end\"); }",
        &["1"],
    ),
    fx(
        "SEL.4.c.ii.B",
        "x = 0; if (x > 0) { print(\"a\"); x = x + 1; print(\"b\"); } print(x);",
        &["a", "b", "1"],
    ),
    fx("SEL.4.d.i", CHAIN4, &["c"]),
    fx("SEL.4.d.i(perm=1)", CHAIN4, &["b"]),
    fx(
        "SEL.4.d.ii.A",
        "x = 5; if (x > 3) { x = 0; print(\"a\"); } else { print(\"b\"); }",
        &["a", "b"],
    ),
    fx(
        "SEL.4.d.ii.B",
        "x = 5; if (x > 3) { x = 0; print(\"a\"); } if (x <= 3) { print(\"b\"); }",
        &["a"],
    ),
    fx(
        "SEL.5.a.i",
        "x = 0; y = 1; if (x > 3) { if (y > 0) { print(\"b\"); } } print(\"c\");",
        &["b", "c"],
    ),
    fx(
        "SEL.5.a.ii",
        "x = 0; y = 1; if (x > 3) { print(\"a\"); } if (y > 0) { print(\"b\"); }",
        &[],
    ),
    fx(
        "SEL.5.b",
        "for (i = 0; i < 2; i++) { if (i > 5) { print(\"a\"); } else { print(\"b\"); } }",
        &["a", "a"],
    ),
    fx("ITER.1.a", "i = 0; while (i < 3) { print(i); i = i + 1; }", &["0"]),
    fx("ITER.1.b", "i = 3; while (i > 0) { print(i); i = i - 1; }", &["3"]),
    fx(
        "ITER.1.d",
        "for (i = 0; i < 3; i++) { print(\"a\", i); print(\"b\", i); }",
        &["a 0", "b 1", "a 2"],
    ),
    fx(
        "ITER.2.a.i",
        "for (i = 0; i < 3; i++) { print(i); print(\"x\"); }",
        &["0", "1", "2", "x"],
    ),
    fx(
        "ITER.2.a.ii",
        "for (i = 0; i < 2; i++) { print(i); } print(\"end\");",
        &["0", "end", "1", "end"],
    ),
    fx(
        "ITER.2.a.ii(k=2)",
        "for (i = 0; i < 2; i++) { print(i); } print(\"end\"); print(\"fin\");",
        &["0", "end", "fin", "1", "end", "fin"],
    ),
    halted(
        "ITER.2.b.i",
        "for (i = 0; i < 2; i++) { print(i); } print(\"end\");",
        &["0", "1"],
    ),
    capped(
        "ITER.2.b.ii",
        "i = 0; while (i < 2) { print(i); i = i + 1; } print(\"after\");",
        5,
        &["0", "1", "after", "after", "after"],
    ),
    fx("ITER.3.a.i", "for (i = 0; i < 3; i++) { print(i); } print(i);", &["3"]),
    fx("ITER.3.a.ii", "i = 5; while (i < 3) { print(i); i = i + 1; }", &["5"]),
    capped("ITER.3.a.iii", COUNT2, 4, &["0", "1", "2", "3"]),
    capped("ITER.3.a.iv", COUNT2, 3, &["0", "0", "0"]),
    fx("ITER.3.a.v", "i = 7; for (i = 0; i < 9; i++) { print(i); }", &["7", "8"]),
    fx(
        "ITER.3.b.i",
        "i = 1; for (i = 0; i < 3; i++) { print(i); }",
        &["1", "0", "1", "2"],
    ),
    fx("ITER.3.b.ii.A", BIRNE, &BIRNE_WRONG_1),
    fx("ITER.3.b.ii.B", "for (i = 0; i < 2; ++i) { print(i); }", &["1", "2"]),
    fx("ITER.3.b.iii", COUNT3, &["1", "2"]),
    fx("ITER.3.b.iv", "x = 0; while (x < 2) { x = x + 5; print(x); }", &[]),
    fx(
        "ITER.3.b.v",
        "for (i = 0; i < 2; i++) { print(\"a\", i); print(\"b\", i); }",
        &["a 0", "a 1", "b 0", "b 1"],
    ),
    capped("ITER.4.a.i.A", COUNT3, 5, &["0", "1", "0", "1", "0"]),
    fx("ITER.4.a.i.B", "for (i = 0; i < 5; i = i + 2) { print(i); }", &["0", "1", "2", "3", "4"]),
    fx("ITER.4.a.i.C", "for (i = 0; i < 5; i++) { print(i); }", &["0", "2", "4"]),
    fx(
        "ITER.4.a.ii.A",
        "for (i = 0; i < 3; i++) { print(i); i = i + 1; }",
        &["0", "1", "2"],
    ),
    fx("ITER.4.a.ii.B", COUNT3, &["0", "0", "0"]),
    fx(
        "ITER.4.b",
        "s = 0; for (i = 0; i < 3; i++) { s = s + i; print(s); } print(s);",
        &["0", "0", "0", "2"],
    ),
    fx("ITER.5.a.i", COUNT2, &["0", "1", "2"]),
    fx("ITER.5.a.i(k=2)", COUNT2, &["0", "1", "2", "3"]),
    fx(
        "ITER.5.a.ii.A",
        "i = 5; while (i < 3) { print(i); i = i - 1; }",
        &["5", "4", "3"],
    ),
    fx("ITER.5.a.ii.B", COUNT3, &[]),
    fx(
        "ITER.5.a.iii.A",
        "for (i = 0; i > 2 && i < 5; i++) { print(i); }",
        &["0", "1", "2", "3", "4"],
    ),
    fx(
        "ITER.5.a.iii.B",
        "for (i = 0; i > 2 && i < 5; i++) { print(i); }",
        &["3", "4"],
    ),
    fx("ITER.5.b.i.A", COUNT3, &["0", "1", "2", "3"]),
    fx("ITER.5.b.i.B", COUNT3, &[]),
    fx("ITER.6.a", NESTED, &["X 0 0", "X 1 1"]),
    fx("ITER.6.b", NESTED, &["X 2 0", "X 2 1"]),
    fx("ITER.6.c", NESTED, &["X 0 0", "X 1 0", "X 0 1", "X 1 1"]),
    fx("ITER.6.d", NESTED, &["X 0 0", "X 0 1"]),
    fx("ITER.6.e", NESTED, &["X 0 0", "X 0 1"]),
    fx(
        "ITER.6.f",
        "for (i = 0; i < 3; i++) { for (j = 0; j < i; j++) { print(\"in\", i, j); } print(\"out\", i); }",
        &["in 1 0", "out 1", "in 2 0", "in 2 1", "out 2"],
    ),
    fx(
        "ITER.7.a.i",
        "for (i = 0; i < 3; i = i + 1) { if (i == 1) { break; } print(i); }",
        &["0", "2"],
    ),
    halted("ITER.7.a.ii", BREAK_AT_1, &["0"]),
    fx("ITER.7.a.iii", BREAK_AT_1, &["0", "1", "2", "end"]),
    fx(
        "ITER.7.b.i",
        "for (i = 0; i < 3; i = i + 1) { if (i == 1) { continue; } print(i); }",
        &["0", "1", "2"],
    ),
    fx("ITER.3.b.ii.A,ITER.3.a.ii", BIRNE, &BIRNE_WRONG_2),
    fx("ITER.3.a.ii", BIRNE, &BIRNE_RIGHT),
];
