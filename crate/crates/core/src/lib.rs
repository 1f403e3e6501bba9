//! Executable models of novice misconceptions about selection and iteration.
//!
//! A small imperative language ([`lang`]) runs on a reference interpreter
//! ([`exec`]). Each catalogued misconception ([`registry`]) is an alternative
//! semantics ([`variant`]) plugged into the interpreter's hook slots, so a
//! student's answer can be explained by the variants that reproduce it
//! ([`diagnosis`]) and wrong answers can be generated for authoring
//! ([`authoring`]).

pub mod authoring;
pub mod code;
pub mod diagnosis;
pub mod exec;
pub mod lang;
pub mod registry;
pub mod variant;

pub use code::{CodeParseError, Domain, MisconceptionCode};
