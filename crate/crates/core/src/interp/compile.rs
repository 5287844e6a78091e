//! Lowers a checked program to slot-addressed code.
//!
//! Each procedure is lowered twice: its body and the inverted body used by
//! `uncall` and backward runs. Variables become indices into a per-call
//! frame, so execution never hashes names.

use std::collections::HashMap;

use crate::ast::{BinOp, CallKind, Expr, ExprKind, LValue, Param, ParamKind, Span, Stmt, StmtKind, UpdateOp};
use crate::check::CheckedProgram;
use crate::invert::invert_stmts;

pub(crate) type Slot = usize;

#[derive(Debug)]
pub(crate) enum CExpr {
    Lit(i64),
    Scalar(Slot),
    Elem(Slot, Box<CExpr>, Span),
    Size(Slot),
    Neg(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>, Span),
}

#[derive(Debug)]
pub(crate) enum CLval {
    Scalar(Slot),
    Elem(Slot, CExpr),
}

#[derive(Debug)]
pub(crate) enum COp {
    Update {
        target: CLval,
        op: UpdateOp,
        rhs: CExpr,
    },
    Swap(CLval, CLval),
    If {
        test: CExpr,
        then_branch: Vec<CStmt>,
        else_branch: Vec<CStmt>,
        assertion: CExpr,
    },
    Loop {
        entry: CExpr,
        body: Vec<CStmt>,
        until: CExpr,
    },
    Local {
        slot: Slot,
        init: CExpr,
        body: Vec<CStmt>,
        fin: CExpr,
    },
    Call {
        proc: usize,
        inverted: bool,
        args: Vec<Slot>,
    },
    Skip,
}

#[derive(Debug)]
pub(crate) struct CStmt {
    pub op: COp,
    pub span: Span,
}

#[derive(Debug)]
pub(crate) struct Body {
    pub code: Vec<CStmt>,
    /// Variable name for each frame slot; parameters come first.
    pub names: Vec<String>,
}

#[derive(Debug)]
pub(crate) struct CompiledProc {
    pub name: String,
    pub params: Vec<Param>,
    pub forward: Body,
    pub inverse: Body,
}

impl CompiledProc {
    pub fn body(&self, inverted: bool) -> &Body {
        if inverted {
            &self.inverse
        } else {
            &self.forward
        }
    }
}

#[derive(Debug)]
pub(crate) struct CompiledProgram {
    pub procs: Vec<CompiledProc>,
    pub index: HashMap<String, usize>,
}

impl CompiledProgram {
    pub fn new(program: &CheckedProgram) -> Self {
        let index: HashMap<String, usize> = program
            .procedures
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), i))
            .collect();
        let procs = program
            .procedures
            .iter()
            .map(|p| CompiledProc {
                name: p.name.clone(),
                params: p.params.clone(),
                forward: lower_body(&index, &p.params, &p.body),
                inverse: lower_body(&index, &p.params, &invert_stmts(&p.body)),
            })
            .collect();
        CompiledProgram { procs, index }
    }
}

/// Wraps a lone expression so it can be evaluated by the machine. Slots
/// follow the order of `names`.
pub(crate) fn expr_program(names: &[String], e: &Expr) -> (CompiledProgram, CExpr) {
    let map = HashMap::new();
    let mut lower = Lower {
        procs: &map,
        slots: names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect(),
        names: names.to_vec(),
    };
    let code = lower.expr(e);
    let body = || Body {
        code: Vec::new(),
        names: names.to_vec(),
    };
    let proc = CompiledProc {
        name: "<expr>".to_string(),
        params: Vec::new(),
        forward: body(),
        inverse: body(),
    };
    (
        CompiledProgram {
            procs: vec![proc],
            index: HashMap::new(),
        },
        code,
    )
}

/// First name used with the wrong kind, with the kind the use requires.
pub(crate) fn kind_error(e: &Expr, names: &[String], kinds: &[ParamKind]) -> Option<(String, ParamKind)> {
    let kind_of = |n: &str| names.iter().position(|m| m == n).map(|i| kinds[i]);
    let bad = |n: &str, want: ParamKind| (kind_of(n) != Some(want)).then(|| (n.to_string(), want));
    match &e.kind {
        ExprKind::Lit(_) => None,
        ExprKind::Var(n) => bad(n, ParamKind::Scalar),
        ExprKind::Size(n) => bad(n, ParamKind::Array),
        ExprKind::Index(n, i) => bad(n, ParamKind::Array).or_else(|| kind_error(i, names, kinds)),
        ExprKind::Neg(x) => kind_error(x, names, kinds),
        ExprKind::Bin(_, l, r) => kind_error(l, names, kinds).or_else(|| kind_error(r, names, kinds)),
    }
}

fn lower_body(procs: &HashMap<String, usize>, params: &[Param], body: &[Stmt]) -> Body {
    let mut lower = Lower {
        procs,
        slots: params
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), i))
            .collect(),
        names: params.iter().map(|p| p.name.clone()).collect(),
    };
    let code = lower.block(body);
    Body {
        code,
        names: lower.names,
    }
}

struct Lower<'a> {
    procs: &'a HashMap<String, usize>,
    slots: HashMap<String, Slot>,
    names: Vec<String>,
}

impl Lower<'_> {
    // Names resolve because the program is checked; locals never shadow, so
    // one slot per distinct name suffices.
    fn slot(&mut self, name: &str) -> Slot {
        if let Some(&s) = self.slots.get(name) {
            return s;
        }
        let s = self.names.len();
        self.names.push(name.to_string());
        self.slots.insert(name.to_string(), s);
        s
    }

    fn block(&mut self, body: &[Stmt]) -> Vec<CStmt> {
        body.iter().map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: &Stmt) -> CStmt {
        let op = match &s.kind {
            StmtKind::Update { target, op, rhs } => COp::Update {
                target: self.lvalue(target),
                op: *op,
                rhs: self.expr(rhs),
            },
            StmtKind::Swap(a, b) => COp::Swap(self.lvalue(a), self.lvalue(b)),
            StmtKind::If {
                test,
                then_branch,
                else_branch,
                assertion,
            } => COp::If {
                test: self.expr(test),
                then_branch: self.block(then_branch),
                else_branch: self.block(else_branch),
                assertion: self.expr(assertion),
            },
            StmtKind::Loop { entry, body, until } => COp::Loop {
                entry: self.expr(entry),
                body: self.block(body),
                until: self.expr(until),
            },
            StmtKind::Local {
                name,
                init,
                body,
                fin,
            } => COp::Local {
                init: self.expr(init),
                slot: self.slot(name),
                body: self.block(body),
                fin: self.expr(fin),
            },
            StmtKind::Call { kind, proc, args } => COp::Call {
                proc: self.procs[proc],
                inverted: *kind == CallKind::Uncall,
                args: args.iter().map(|a| self.slot(a)).collect(),
            },
            StmtKind::Skip => COp::Skip,
        };
        CStmt { op, span: s.span }
    }

    fn lvalue(&mut self, lv: &LValue) -> CLval {
        match lv {
            LValue::Var(n) => CLval::Scalar(self.slot(n)),
            LValue::Index(n, i) => CLval::Elem(self.slot(n), self.expr(i)),
        }
    }

    fn expr(&mut self, e: &Expr) -> CExpr {
        match &e.kind {
            ExprKind::Lit(v) => CExpr::Lit(*v),
            ExprKind::Var(n) => CExpr::Scalar(self.slot(n)),
            ExprKind::Index(n, i) => CExpr::Elem(self.slot(n), Box::new(self.expr(i)), e.span),
            ExprKind::Size(n) => CExpr::Size(self.slot(n)),
            ExprKind::Neg(x) => CExpr::Neg(Box::new(self.expr(x))),
            ExprKind::Bin(op, l, r) => {
                CExpr::Bin(*op, Box::new(self.expr(l)), Box::new(self.expr(r)), e.span)
            }
        }
    }
}
