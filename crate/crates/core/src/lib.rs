//! Toolkit for a small reversible imperative language: parsing, static
//! checking, program inversion, bidirectional interpretation, and
//! instrumentation of auxiliary memory, garbage and input traversals.

pub mod ast;
pub mod check;
pub mod corpus;
pub mod fuzz;
pub mod harness;
pub mod interp;
pub mod invert;
pub mod metrics;
pub mod oracle;
pub mod syntax;

pub use ast::{Expr, Procedure, Program, Stmt};
pub use check::{check, CheckError, CheckedProgram};
pub use interp::{run, Direction, Interpreter, Outcome, RunError, RuntimeError, RuntimeErrorKind, Store, Value};
pub use invert::{invert_procedure, invert_stmts};
pub use syntax::{parse, pretty, ParseError};
pub use metrics::{MetricsRecord, RoleManifest};
