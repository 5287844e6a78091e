//! Random well-formed programs for structural property tests.
//!
//! Generated programs always pass [`crate::check`]: names come from the
//! current scope with the right kind, updates and swaps keep their targets
//! out of the expressions that index or feed them, locals get fresh names,
//! and call sites bind distinct variables of matching kinds. They are not
//! meant to run; loops and assertions are arbitrary.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::{BinOp, CallKind, Expr, LValue, Param, ParamKind, Procedure, Program, Stmt, StmtKind, UpdateOp};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub max_procs: usize,
    pub max_params: usize,
    pub max_block: usize,
    pub max_depth: usize,
    pub max_expr_depth: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            max_procs: 3,
            max_params: 4,
            max_block: 4,
            max_depth: 3,
            max_expr_depth: 3,
        }
    }
}

pub fn random_program(rng: &mut impl Rng, cfg: &FuzzConfig) -> Program {
    let count = rng.gen_range(1..=cfg.max_procs.max(1));
    let signatures: Vec<(String, Vec<Param>)> = (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=cfg.max_params.max(1));
            let params = (0..n)
                .map(|j| {
                    // the first parameter is always a scalar so updates have a target
                    let kind = if j > 0 && rng.gen_bool(0.4) { ParamKind::Array } else { ParamKind::Scalar };
                    let prefix = if kind == ParamKind::Array { "a" } else { "x" };
                    Param {
                        name: format!("{prefix}{j}"),
                        kind,
                        span: Default::default(),
                    }
                })
                .collect();
            (format!("p{i}"), params)
        })
        .collect();
    let procedures = signatures
        .iter()
        .map(|(name, params)| {
            let mut g = Gen {
                rng: &mut *rng,
                cfg,
                procs: &signatures,
                scope: params.iter().map(|p| (p.name.clone(), p.kind)).collect(),
                fresh: 0,
            };
            let body = g.block(0);
            Procedure {
                name: name.clone(),
                params: params.clone(),
                body,
                span: Default::default(),
            }
        })
        .collect();
    Program::new(procedures)
}

struct Gen<'a, R> {
    rng: &'a mut R,
    cfg: &'a FuzzConfig,
    procs: &'a [(String, Vec<Param>)],
    scope: Vec<(String, ParamKind)>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn names(&self, kind: ParamKind, avoid: &[&str]) -> Vec<String> {
        self.scope
            .iter()
            .filter(|(n, k)| *k == kind && !avoid.contains(&n.as_str()))
            .map(|(n, _)| n.clone())
            .collect()
    }

    fn pick(&mut self, kind: ParamKind, avoid: &[&str]) -> Option<String> {
        self.names(kind, avoid).choose(self.rng).cloned()
    }

    fn lit(&mut self) -> Expr {
        Expr::lit(self.rng.gen_range(-20..=20))
    }

    fn expr(&mut self, depth: usize, avoid: &[&str]) -> Expr {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        let choice = self.rng.gen_range(0..if leaf { 4 } else { 7 });
        match choice {
            0 => self.lit(),
            1 => self.pick(ParamKind::Scalar, avoid).map_or_else(|| self.lit(), Expr::var),
            2 => self.pick(ParamKind::Array, avoid).map_or_else(|| self.lit(), Expr::size),
            3 if depth > 0 => match self.pick(ParamKind::Array, avoid) {
                Some(a) => {
                    let i = self.expr(depth - 1, avoid);
                    Expr::index(a, i)
                }
                None => self.lit(),
            },
            3 => self.lit(),
            4 => Expr::neg(self.expr(depth - 1, avoid)),
            _ => {
                let op = *BinOp::ALL.choose(self.rng).unwrap();
                let l = self.expr(depth - 1, avoid);
                let r = self.expr(depth - 1, avoid);
                Expr::bin(op, l, r)
            }
        }
    }

    fn top_expr(&mut self, avoid: &[&str]) -> Expr {
        let d = self.cfg.max_expr_depth;
        self.expr(d, avoid)
    }

    fn lvalue(&mut self, avoid: &[&str]) -> Option<LValue> {
        if self.rng.gen_bool(0.4) {
            if let Some(a) = self.pick(ParamKind::Array, avoid) {
                let mut inner = avoid.to_vec();
                inner.push(&a);
                let i = self.expr(1, &inner);
                return Some(LValue::Index(a, i));
            }
        }
        self.pick(ParamKind::Scalar, avoid).map(LValue::Var)
    }

    fn block(&mut self, depth: usize) -> Vec<Stmt> {
        let n = self.rng.gen_range(1..=self.cfg.max_block.max(1));
        (0..n).map(|_| self.stmt(depth)).collect()
    }

    fn stmt(&mut self, depth: usize) -> Stmt {
        let nested = depth < self.cfg.max_depth;
        let kind = match self.rng.gen_range(0..if nested { 8 } else { 4 }) {
            0 | 1 => self.update(),
            2 => self.swap(),
            3 => self.call(),
            4 => StmtKind::If {
                test: self.top_expr(&[]),
                then_branch: self.block(depth + 1),
                else_branch: if self.rng.gen_bool(0.5) { self.block(depth + 1) } else { Vec::new() },
                assertion: self.top_expr(&[]),
            },
            5 => StmtKind::Loop {
                entry: self.top_expr(&[]),
                body: if self.rng.gen_bool(0.8) { self.block(depth + 1) } else { Vec::new() },
                until: self.top_expr(&[]),
            },
            6 => {
                let name = format!("t{}", self.fresh);
                self.fresh += 1;
                let init = self.top_expr(&[]);
                self.scope.push((name.clone(), ParamKind::Scalar));
                let body = self.block(depth + 1);
                let fin = self.top_expr(&[&name]);
                self.scope.pop();
                StmtKind::Local { name, init, body, fin }
            }
            _ => StmtKind::Skip,
        };
        Stmt::new(kind)
    }

    fn update(&mut self) -> StmtKind {
        let Some(target) = self.lvalue(&[]) else {
            return StmtKind::Skip;
        };
        let rhs = self.top_expr(&[target.name()]);
        let op = *[UpdateOp::Add, UpdateOp::Sub, UpdateOp::Xor].choose(self.rng).unwrap();
        StmtKind::Update { target, op, rhs }
    }

    fn swap(&mut self) -> StmtKind {
        let Some(a) = self.lvalue(&[]) else {
            return StmtKind::Skip;
        };
        let Some(b) = self.lvalue(&[]) else {
            return StmtKind::Skip;
        };
        // neither index may mention either swapped name; regenerate the
        // indices against that restriction
        let (an, bn) = (a.name().to_string(), b.name().to_string());
        let avoid = [an.as_str(), bn.as_str()];
        let fix = |lv: LValue, g: &mut Self| match lv {
            LValue::Index(n, _) => LValue::Index(n, g.expr(1, &avoid)),
            v => v,
        };
        let a = fix(a, self);
        let b = fix(b, self);
        StmtKind::Swap(a, b)
    }

    fn call(&mut self) -> StmtKind {
        let (name, params) = self.procs.choose(self.rng).unwrap();
        let mut used: Vec<String> = Vec::new();
        for p in params {
            let avoid: Vec<&str> = used.iter().map(String::as_str).collect();
            match self.pick(p.kind, &avoid) {
                Some(arg) => used.push(arg),
                None => return StmtKind::Skip,
            }
        }
        let kind = if self.rng.gen_bool(0.5) { CallKind::Call } else { CallKind::Uncall };
        StmtKind::Call {
            kind,
            proc: name.clone(),
            args: used,
        }
    }
}
