#![allow(dead_code)]

pub mod fixtures;
pub mod gen;
pub mod oracle;

use notional::exec::{ExecResult, Limits};
use notional::lang::{parse, Program};
use notional::registry::shipped;
use notional::variant::{profile_from_literal, run_variant, SemanticProfile};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};

pub fn program(src: &str) -> Program {
    parse(src).unwrap_or_else(|e| panic!("fixture does not parse: {e}\n{src}"))
}

pub fn profile(literal: &str) -> SemanticProfile {
    profile_from_literal(shipped(), literal).unwrap_or_else(|e| panic!("{literal}: {e}"))
}

pub fn simulate(src: &str, literal: &str) -> ExecResult {
    run_variant(&program(src), &profile(literal), Limits::default())
}

pub fn tokens(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// `count` values drawn from `strategy` with a fixed seed.
pub fn sample<S: Strategy>(strategy: &S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::new_with_rng(Config::default(), proptest::test_runner::TestRng::deterministic_rng(
        proptest::test_runner::RngAlgorithm::ChaCha,
    ));
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy yields values").current())
        .collect()
}
