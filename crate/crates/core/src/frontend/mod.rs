//! Source text to syntax tree.

pub mod ast;
pub mod lexer;
pub mod parser;

use thiserror::Error;

pub use ast::ProgramAst;
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("lex error at {0}")]
    Lex(#[from] LexError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

impl FrontendError {
    pub fn location(&self) -> (usize, usize) {
        match self {
            FrontendError::Lex(e) => (e.line, e.col),
            FrontendError::Parse(e) => (e.line, e.col),
        }
    }
}

/// Tokenize and parse in one step.
pub fn parse_source(source: &str) -> Result<ProgramAst, FrontendError> {
    let tokens = tokenize(source)?;
    Ok(parse(&tokens)?)
}
