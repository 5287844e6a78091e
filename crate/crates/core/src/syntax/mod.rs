//! Concrete syntax: lexer, recursive-descent parser and canonical printer.
//!
//! Operator precedence, loosest first: `||`, `&&`, comparisons,
//! `+ - | ^`, `* / % &`, unary minus, `**` (right-associative).

mod lexer;
mod parser;
mod pretty;

use std::fmt;

use crate::ast::Span;

pub use parser::{parse, parse_expr};
pub use pretty::{pretty, pretty_expr, pretty_procedure, pretty_stmts};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected ", self.span)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

impl std::error::Error for ParseError {}
