//! Static reversibility checks.
//!
//! A program is accepted when every update leaves its own target out of the
//! right-hand side, every name resolves with the right kind, call sites match
//! the callee's signature, and no call binds one cell to two parameters.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

use crate::ast::{CallKind, Expr, ExprKind, LValue, ParamKind, Procedure, Program, Span, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("{span}: `{name}` is updated but also occurs on the right-hand side or in its own index")]
    UpdateAlias { name: String, span: Span },
    #[error("{span}: unknown name `{name}`")]
    UnknownName { name: String, span: Span },
    #[error("{span}: unknown procedure `{name}`")]
    UnknownProcedure { name: String, span: Span },
    #[error("{span}: `{proc}` takes {expected} argument(s), {found} given")]
    ArityMismatch {
        proc: String,
        expected: usize,
        found: usize,
        span: Span,
    },
    #[error("{span}: `{name}` is used as {used} but declared as {declared}")]
    KindMismatch {
        name: String,
        used: KindName,
        declared: KindName,
        span: Span,
    },
    #[error("{span}: `{name}` is passed more than once in the same call")]
    ArgumentAliasing { name: String, span: Span },
    #[error("{span}: `{name}` is already declared")]
    DuplicateName { name: String, span: Span },
    #[error("{span}: local `{name}` occurs in its own allocation or deallocation expression")]
    LocalSelfReference { name: String, span: Span },
}

impl CheckError {
    pub fn span(&self) -> Span {
        match self {
            CheckError::UpdateAlias { span, .. }
            | CheckError::UnknownName { span, .. }
            | CheckError::UnknownProcedure { span, .. }
            | CheckError::ArityMismatch { span, .. }
            | CheckError::KindMismatch { span, .. }
            | CheckError::ArgumentAliasing { span, .. }
            | CheckError::DuplicateName { span, .. }
            | CheckError::LocalSelfReference { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KindName(pub ParamKind);

impl fmt::Display for KindName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            ParamKind::Scalar => f.write_str("a scalar"),
            ParamKind::Array => f.write_str("an array"),
        }
    }
}

/// A program that passed [`check`]. Only checked programs can be run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedProgram(Program);

impl CheckedProgram {
    pub fn program(&self) -> &Program {
        &self.0
    }

    pub fn into_inner(self) -> Program {
        self.0
    }
}

impl Deref for CheckedProgram {
    type Target = Program;

    fn deref(&self) -> &Program {
        &self.0
    }
}

/// Checks `program`, returning every violation found.
pub fn check(program: Program) -> Result<CheckedProgram, Vec<CheckError>> {
    let mut errors = Vec::new();
    let mut seen: HashMap<&str, ()> = HashMap::new();
    for p in &program.procedures {
        if seen.insert(&p.name, ()).is_some() {
            errors.push(CheckError::DuplicateName {
                name: p.name.clone(),
                span: p.span,
            });
        }
    }
    for p in &program.procedures {
        Checker {
            program: &program,
            scope: Vec::new(),
            errors: &mut errors,
        }
        .procedure(p);
    }
    if errors.is_empty() {
        Ok(CheckedProgram(program))
    } else {
        Err(errors)
    }
}

struct Checker<'a> {
    program: &'a Program,
    scope: Vec<(String, ParamKind)>,
    errors: &'a mut Vec<CheckError>,
}

impl Checker<'_> {
    fn lookup(&self, name: &str) -> Option<ParamKind> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, k)| *k)
    }

    fn procedure(&mut self, p: &Procedure) {
        for param in &p.params {
            if self.lookup(&param.name).is_some() {
                self.errors.push(CheckError::DuplicateName {
                    name: param.name.clone(),
                    span: param.span,
                });
            } else {
                self.scope.push((param.name.clone(), param.kind));
            }
        }
        self.block(&p.body);
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn expect_kind(&mut self, name: &str, want: ParamKind, span: Span) {
        match self.lookup(name) {
            None => self.errors.push(CheckError::UnknownName {
                name: name.to_string(),
                span,
            }),
            Some(k) if k != want => self.errors.push(CheckError::KindMismatch {
                name: name.to_string(),
                used: KindName(want),
                declared: KindName(k),
                span,
            }),
            Some(_) => {}
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Lit(_) => {}
            ExprKind::Var(n) => self.expect_kind(n, ParamKind::Scalar, e.span),
            ExprKind::Size(n) => self.expect_kind(n, ParamKind::Array, e.span),
            ExprKind::Index(n, i) => {
                self.expect_kind(n, ParamKind::Array, e.span);
                self.expr(i);
            }
            ExprKind::Neg(x) => self.expr(x),
            ExprKind::Bin(_, l, r) => {
                self.expr(l);
                self.expr(r);
            }
        }
    }

    fn lvalue(&mut self, lv: &LValue, span: Span) {
        match lv {
            LValue::Var(n) => self.expect_kind(n, ParamKind::Scalar, span),
            LValue::Index(n, i) => {
                self.expect_kind(n, ParamKind::Array, span);
                self.expr(i);
            }
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Update { target, rhs, .. } => {
                self.lvalue(target, s.span);
                self.expr(rhs);
                let name = target.name();
                if rhs.mentions(name) || target.index().is_some_and(|i| i.mentions(name)) {
                    self.errors.push(CheckError::UpdateAlias {
                        name: name.to_string(),
                        span: s.span,
                    });
                }
            }
            StmtKind::Swap(a, b) => {
                self.lvalue(a, s.span);
                self.lvalue(b, s.span);
                for lv in [a, b] {
                    let Some(index) = lv.index() else { continue };
                    for name in [a.name(), b.name()] {
                        if index.mentions(name) {
                            self.errors.push(CheckError::UpdateAlias {
                                name: name.to_string(),
                                span: s.span,
                            });
                        }
                    }
                }
            }
            StmtKind::If {
                test,
                then_branch,
                else_branch,
                assertion,
            } => {
                self.expr(test);
                self.block(then_branch);
                self.block(else_branch);
                self.expr(assertion);
            }
            StmtKind::Loop { entry, body, until } => {
                self.expr(entry);
                self.block(body);
                self.expr(until);
            }
            StmtKind::Local {
                name,
                init,
                body,
                fin,
            } => {
                self.expr(init);
                if init.mentions(name) || fin.mentions(name) {
                    self.errors.push(CheckError::LocalSelfReference {
                        name: name.clone(),
                        span: s.span,
                    });
                }
                let shadowing = self.lookup(name).is_some();
                if shadowing {
                    self.errors.push(CheckError::DuplicateName {
                        name: name.clone(),
                        span: s.span,
                    });
                }
                self.scope.push((name.clone(), ParamKind::Scalar));
                self.block(body);
                self.scope.pop();
                self.expr(fin);
            }
            StmtKind::Call { kind, proc, args } => self.call(*kind, proc, args, s.span),
            StmtKind::Skip => {}
        }
    }

    fn call(&mut self, _kind: CallKind, proc: &str, args: &[String], span: Span) {
        for (i, a) in args.iter().enumerate() {
            if args[..i].contains(a) && !args[i + 1..].contains(a) {
                self.errors.push(CheckError::ArgumentAliasing {
                    name: a.clone(),
                    span,
                });
            }
        }
        let Some(callee) = self.program.get(proc) else {
            self.errors.push(CheckError::UnknownProcedure {
                name: proc.to_string(),
                span,
            });
            for a in args {
                if self.lookup(a).is_none() {
                    self.errors.push(CheckError::UnknownName {
                        name: a.clone(),
                        span,
                    });
                }
            }
            return;
        };
        if callee.params.len() != args.len() {
            self.errors.push(CheckError::ArityMismatch {
                proc: proc.to_string(),
                expected: callee.params.len(),
                found: args.len(),
                span,
            });
        }
        for (i, a) in args.iter().enumerate() {
            match callee.params.get(i) {
                Some(param) => self.expect_kind(a, param.kind, span),
                None if self.lookup(a).is_none() => self.errors.push(CheckError::UnknownName {
                    name: a.clone(),
                    span,
                }),
                None => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn errors(src: &str) -> Vec<CheckError> {
        check(parse(src).unwrap()).unwrap_err()
    }

    const SRCH1: &str = "procedure srch1(int r[], int n, int k, int i)
  from i = 0 loop
    i += 1
  until r[i] = k
";

    #[test]
    fn self_update_is_rejected() {
        let errs = errors("procedure p(int x) x ^= x");
        assert!(matches!(&errs[..], [CheckError::UpdateAlias { name, .. }] if name == "x"));
    }

    #[test]
    fn array_in_own_index_is_rejected() {
        let errs = errors("procedure p(int a[], int i) a[a[i]] += 1");
        assert!(matches!(&errs[..], [CheckError::UpdateAlias { name, .. }] if name == "a"));
        // conservative: distinct indices are still rejected
        let errs = errors("procedure p(int a[]) a[0] += a[1]");
        assert!(matches!(&errs[..], [CheckError::UpdateAlias { .. }]));
    }

    #[test]
    fn linear_search_checks() {
        check(parse(SRCH1).unwrap()).unwrap();
    }

    #[test]
    fn aliasing_call_is_rejected() {
        let src = format!("{SRCH1}\nprocedure main(int r[], int n, int k)\n  call srch1(r, n, k, k)\n");
        let errs = errors(&src);
        assert!(errs
            .iter()
            .any(|e| matches!(e, CheckError::ArgumentAliasing { name, .. } if name == "k")));
    }

    #[test]
    fn unknown_names_and_arity() {
        let errs = errors("procedure p(int x) x += y  call q(x)");
        assert!(errs
            .iter()
            .any(|e| matches!(e, CheckError::UnknownName { name, .. } if name == "y")));
        assert!(errs
            .iter()
            .any(|e| matches!(e, CheckError::UnknownProcedure { name, .. } if name == "q")));

        let errs = errors("procedure p(int x) skip procedure q(int a) call p(a, a)");
        assert!(errs.iter().any(|e| matches!(e, CheckError::ArityMismatch { expected: 1, found: 2, .. })));
    }

    #[test]
    fn kind_mismatch_at_call_and_use() {
        let errs = errors("procedure p(int a[]) skip procedure q(int x) call p(x)");
        assert!(matches!(&errs[..], [CheckError::KindMismatch { .. }]));
        let errs = errors("procedure q(int x, int y) x += size(y)");
        assert!(matches!(&errs[..], [CheckError::KindMismatch { .. }]));
    }

    #[test]
    fn locals_scope_and_self_reference() {
        let errs = errors("procedure p(int x) local int t = 0 delocal int t = t");
        assert!(errs.iter().any(|e| matches!(e, CheckError::LocalSelfReference { .. })));
        let errs = errors("procedure p(int x) local int x = 0 delocal int x = 0");
        assert!(matches!(&errs[..], [CheckError::DuplicateName { .. }]));
        let errs = errors("procedure p(int x) local int t = 0 skip delocal int t = 0 x += t");
        assert!(matches!(&errs[..], [CheckError::UnknownName { name, .. }] if name == "t"));
    }

    #[test]
    fn duplicate_params_and_procedures() {
        let errs = errors("procedure p(int x, int x) skip");
        assert!(matches!(&errs[..], [CheckError::DuplicateName { .. }]));
        let errs = errors("procedure p(int x) skip procedure p(int y) skip");
        assert!(matches!(&errs[..], [CheckError::DuplicateName { .. }]));
    }

    #[test]
    fn swap_index_may_not_mention_swapped_names() {
        let errs = errors("procedure p(int a[], int i) a[i] <=> i");
        assert!(matches!(&errs[..], [CheckError::UpdateAlias { name, .. }] if name == "i"));
        check(parse("procedure p(int a[], int i, int j) a[i] <=> a[j]").unwrap()).unwrap();
    }

    #[test]
    fn all_errors_are_reported() {
        let errs = errors("procedure p(int x) x += x  y -= 1");
        assert_eq!(errs.len(), 2);
    }

    #[test]
    fn check_is_idempotent() {
        let once = check(parse(SRCH1).unwrap()).unwrap();
        let twice = check(once.program().clone()).unwrap();
        assert_eq!(once, twice);
    }
}
