//! Lexing and parsing of dice notation into a [`RollExpression`].
//!
//! All syntax errors originate here; nothing in this module rolls dice.

mod ast;
mod parser;
mod token;

pub use ast::*;
pub use parser::{parse, parse_with, ParseOptions, DEFAULT_SIDES};
pub use token::{tokenize, Token, TokenKind, MAX_SYMBOL_LEN};

use crate::error::Result;

pub fn parse_str(source: &str) -> Result<RollExpression> {
    parse(&tokenize(source)?)
}

pub fn parse_str_with(source: &str, options: ParseOptions) -> Result<RollExpression> {
    parse_with(&tokenize(source)?, options)
}

/// Rewrites the shorthand dice (`d%`, `c`, `df`) into their explicit forms.
/// Other faces are returned unchanged.
pub fn expand_special(faces: &Faces) -> Faces {
    match faces {
        Faces::Percent => Faces::Standard(100),
        Faces::Coin => Faces::Symbolic(vec!["HEADS".into(), "TAILS".into()]),
        Faces::Fate => Faces::Symbolic(["-", "-", "0", "0", "+", "+"].map(String::from).to_vec()),
        other => other.clone(),
    }
}
