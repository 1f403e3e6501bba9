//! The minilang front end: lexer, recursive-descent parser, AST, pretty
//! printer and feature extraction.

mod ast;
mod features;
mod lexer;
mod parser;
mod pretty;

use thiserror::Error;

pub use ast::*;
pub use features::{constant_trip_count, features, FeatureSet, FEATURE_NAMES};
pub(crate) use features::frozen_candidates;
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse, parse_expr};
pub use pretty::{expr_to_string, pretty_print, simple_to_string};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{loc}: {message}")]
pub struct SyntaxError {
    pub loc: SourceLoc,
    pub message: String,
}

impl SyntaxError {
    pub fn new(loc: SourceLoc, message: impl Into<String>) -> Self {
        SyntaxError {
            loc,
            message: message.into(),
        }
    }
}
