use std::fmt::Write;

use crate::ast::{BinOp, Expr, ExprKind, LValue, ParamKind, Procedure, Program, Stmt, StmtKind};

const UNARY: u8 = 6;
const ATOM: u8 = 8;

/// Canonical source text for a program. Procedures are separated by a blank
/// line; an empty program prints as the empty string.
pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    for (i, proc) in p.procedures.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&pretty_procedure(proc));
    }
    out
}

pub fn pretty_procedure(p: &Procedure) -> String {
    let mut out = String::new();
    let params: Vec<String> = p
        .params
        .iter()
        .map(|param| match param.kind {
            ParamKind::Scalar => format!("int {}", param.name),
            ParamKind::Array => format!("int {}[]", param.name),
        })
        .collect();
    let _ = writeln!(out, "procedure {}({})", p.name, params.join(", "));
    block(&mut out, &p.body, 1);
    out
}

pub fn pretty_stmts(body: &[Stmt]) -> String {
    let mut out = String::new();
    block(&mut out, body, 0);
    out
}

fn block(out: &mut String, body: &[Stmt], depth: usize) {
    for s in body {
        stmt(out, s, depth);
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::Update { target, op, rhs } => {
            let _ = writeln!(out, "{} {} {}", lvalue(target), op.symbol(), pretty_expr(rhs));
        }
        StmtKind::Swap(a, b) => {
            let _ = writeln!(out, "{} <=> {}", lvalue(a), lvalue(b));
        }
        StmtKind::If {
            test,
            then_branch,
            else_branch,
            assertion,
        } => {
            let _ = writeln!(out, "if {} then", pretty_expr(test));
            block(out, then_branch, depth + 1);
            if !else_branch.is_empty() {
                indent(out, depth);
                out.push_str("else\n");
                block(out, else_branch, depth + 1);
            }
            indent(out, depth);
            let _ = writeln!(out, "fi {}", pretty_expr(assertion));
        }
        StmtKind::Loop { entry, body, until } => {
            let _ = writeln!(out, "from {} loop", pretty_expr(entry));
            block(out, body, depth + 1);
            indent(out, depth);
            let _ = writeln!(out, "until {}", pretty_expr(until));
        }
        StmtKind::Local {
            name,
            init,
            body,
            fin,
        } => {
            let _ = writeln!(out, "local int {name} = {}", pretty_expr(init));
            block(out, body, depth + 1);
            indent(out, depth);
            let _ = writeln!(out, "delocal int {name} = {}", pretty_expr(fin));
        }
        StmtKind::Call { kind, proc, args } => {
            let _ = writeln!(out, "{} {proc}({})", kind.keyword(), args.join(", "));
        }
        StmtKind::Skip => out.push_str("skip\n"),
    }
}

fn lvalue(lv: &LValue) -> String {
    match lv {
        LValue::Var(n) => n.clone(),
        LValue::Index(n, i) => format!("{n}[{}]", pretty_expr(i)),
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Lit(v) if *v < 0 => UNARY,
        ExprKind::Lit(_) | ExprKind::Var(_) | ExprKind::Index(..) | ExprKind::Size(_) => ATOM,
        ExprKind::Neg(_) => UNARY,
        ExprKind::Bin(op, ..) => op.precedence(),
    }
}

fn expr(out: &mut String, e: &Expr, min: u8) {
    if level(e) < min {
        out.push('(');
        expr(out, e, 0);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Lit(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Index(n, i) => {
            out.push_str(n);
            out.push('[');
            expr(out, i, 0);
            out.push(']');
        }
        ExprKind::Size(n) => {
            let _ = write!(out, "size({n})");
        }
        ExprKind::Neg(x) => {
            out.push('-');
            // `-(3)` keeps a negated literal distinct from the literal `-3`.
            if matches!(x.kind, ExprKind::Lit(v) if v >= 0) {
                expr(out, x, ATOM + 1);
            } else {
                expr(out, x, UNARY);
            }
        }
        ExprKind::Bin(BinOp::Pow, l, r) => {
            expr(out, l, ATOM);
            out.push_str(" ** ");
            expr(out, r, UNARY);
        }
        ExprKind::Bin(op, l, r) => {
            let p = op.precedence();
            expr(out, l, p);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, r, p + 1);
        }
    }
}
