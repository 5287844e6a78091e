//! Statement-level program inversion.
//!
//! `uncall p` runs the inverse of `p`'s body; there is no separate
//! backward evaluation mode in the interpreter.

use crate::ast::{Procedure, Program, Stmt, StmtKind};

/// Reverses the statement order and inverts each statement.
pub fn invert_stmts(body: &[Stmt]) -> Vec<Stmt> {
    body.iter().rev().map(invert_stmt).collect()
}

pub fn invert_stmt(s: &Stmt) -> Stmt {
    let kind = match &s.kind {
        StmtKind::Update { target, op, rhs } => StmtKind::Update {
            target: target.clone(),
            op: op.inverse(),
            rhs: rhs.clone(),
        },
        StmtKind::Swap(a, b) => StmtKind::Swap(a.clone(), b.clone()),
        StmtKind::If {
            test,
            then_branch,
            else_branch,
            assertion,
        } => StmtKind::If {
            test: assertion.clone(),
            then_branch: invert_stmts(then_branch),
            else_branch: invert_stmts(else_branch),
            assertion: test.clone(),
        },
        StmtKind::Loop { entry, body, until } => StmtKind::Loop {
            entry: until.clone(),
            body: invert_stmts(body),
            until: entry.clone(),
        },
        StmtKind::Local {
            name,
            init,
            body,
            fin,
        } => StmtKind::Local {
            name: name.clone(),
            init: fin.clone(),
            body: invert_stmts(body),
            fin: init.clone(),
        },
        StmtKind::Call { kind, proc, args } => StmtKind::Call {
            kind: kind.flip(),
            proc: proc.clone(),
            args: args.clone(),
        },
        StmtKind::Skip => StmtKind::Skip,
    };
    Stmt::with_span(kind, s.span)
}

/// Same signature, inverted body.
pub fn invert_procedure(p: &Procedure) -> Procedure {
    Procedure {
        name: p.name.clone(),
        params: p.params.clone(),
        body: invert_stmts(&p.body),
        span: p.span,
    }
}

pub fn invert_program(p: &Program) -> Program {
    Program::new(p.procedures.iter().map(invert_procedure).collect())
}
