//! Abstract syntax of the reversible language.
//!
//! Every node carries a [`Span`]. Spans never take part in structural
//! comparison: two trees that differ only in source positions compare equal,
//! which is what the parse/pretty round trip relies on.

use std::collections::BTreeSet;
use std::fmt;

/// Location of a node in its source text.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub offset: usize,
    pub line: u32,
    pub column: u32,
    pub len: usize,
}

impl Span {
    pub fn new(offset: usize, line: u32, column: u32, len: usize) -> Self {
        Span {
            offset,
            line,
            column,
            len,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        if other.offset + other.len <= self.offset {
            return other.to(self);
        }
        Span {
            len: (other.offset + other.len).saturating_sub(self.offset).max(self.len),
            ..self
        }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    BitAnd,
    BitOr,
    BitXor,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 17] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Pow,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter. Unary minus sits at 6,
    /// between `**` and the multiplicative operators.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub | BinOp::BitOr | BinOp::BitXor => 4,
            BinOp::Mul | BinOp::Div | BinOp::Mod | BinOp::BitAnd => 5,
            BinOp::Pow => 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Lit(i64),
    Var(String),
    Index(String, Box<Expr>),
    Size(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn lit(v: i64) -> Self {
        Expr::new(ExprKind::Lit(v), Span::default())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var(name.into()), Span::default())
    }

    pub fn index(name: impl Into<String>, index: Expr) -> Self {
        Expr::new(ExprKind::Index(name.into(), Box::new(index)), Span::default())
    }

    pub fn size(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Size(name.into()), Span::default())
    }

    pub fn neg(e: Expr) -> Self {
        Expr::new(ExprKind::Neg(Box::new(e)), Span::default())
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), Span::default())
    }

    /// Names of every scalar variable and array mentioned in the expression.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub(crate) fn collect_names(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            ExprKind::Lit(_) => {}
            ExprKind::Var(n) | ExprKind::Size(n) => {
                out.insert(n.clone());
            }
            ExprKind::Index(n, i) => {
                out.insert(n.clone());
                i.collect_names(out);
            }
            ExprKind::Neg(e) => e.collect_names(out),
            ExprKind::Bin(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match &self.kind {
            ExprKind::Lit(_) => false,
            ExprKind::Var(n) | ExprKind::Size(n) => n == name,
            ExprKind::Index(n, i) => n == name || i.mentions(name),
            ExprKind::Neg(e) => e.mentions(name),
            ExprKind::Bin(_, l, r) => l.mentions(name) || r.mentions(name),
        }
    }
}

/// Free names of an expression (see [`Expr::free_names`]).
pub fn free_names(e: &Expr) -> BTreeSet<String> {
    e.free_names()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LValue {
    Var(String),
    Index(String, Expr),
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Var(n) | LValue::Index(n, _) => n,
        }
    }

    pub fn index(&self) -> Option<&Expr> {
        match self {
            LValue::Var(_) => None,
            LValue::Index(_, i) => Some(i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateOp {
    Add,
    Sub,
    Xor,
}

impl UpdateOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UpdateOp::Add => "+=",
            UpdateOp::Sub => "-=",
            UpdateOp::Xor => "^=",
        }
    }

    pub fn inverse(self) -> UpdateOp {
        match self {
            UpdateOp::Add => UpdateOp::Sub,
            UpdateOp::Sub => UpdateOp::Add,
            UpdateOp::Xor => UpdateOp::Xor,
        }
    }
}

/// Whether a procedure invocation runs the body or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CallKind {
    Call,
    Uncall,
}

impl CallKind {
    pub fn flip(self) -> CallKind {
        match self {
            CallKind::Call => CallKind::Uncall,
            CallKind::Uncall => CallKind::Call,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            CallKind::Call => "call",
            CallKind::Uncall => "uncall",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StmtKind {
    Update {
        target: LValue,
        op: UpdateOp,
        rhs: Expr,
    },
    Swap(LValue, LValue),
    If {
        test: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
        assertion: Expr,
    },
    /// `from entry loop body until exit`
    Loop {
        entry: Expr,
        body: Vec<Stmt>,
        until: Expr,
    },
    /// `local int name = init body delocal int name = fin`
    Local {
        name: String,
        init: Expr,
        body: Vec<Stmt>,
        fin: Expr,
    },
    Call {
        kind: CallKind,
        proc: String,
        args: Vec<String>,
    },
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt {
            kind,
            span: Span::default(),
        }
    }

    pub fn with_span(kind: StmtKind, span: Span) -> Self {
        Stmt { kind, span }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamKind {
    Scalar,
    Array,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Procedure {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl Procedure {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// A whole source file: procedures in declaration order.
///
/// Lookup is by name; declaration order is kept so printing is stable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub procedures: Vec<Procedure>,
}

impl Program {
    pub fn new(procedures: Vec<Procedure>) -> Self {
        Program { procedures }
    }

    pub fn get(&self, name: &str) -> Option<&Procedure> {
        self.procedures.iter().find(|p| p.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.procedures.iter().map(|p| p.name.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_names_of_dlist_update() {
        // prev[t]^t
        let e = Expr::bin(
            BinOp::BitXor,
            Expr::index("prev", Expr::var("t")),
            Expr::var("t"),
        );
        assert_eq!(free_names(&e), names(&["prev", "t"]));
    }

    #[test]
    fn free_names_of_literal_is_empty() {
        assert!(free_names(&Expr::lit(0)).is_empty());
    }

    #[test]
    fn free_names_of_midpoint() {
        // l + (u-l)/2
        let e = Expr::bin(
            BinOp::Add,
            Expr::var("l"),
            Expr::bin(
                BinOp::Div,
                Expr::bin(BinOp::Sub, Expr::var("u"), Expr::var("l")),
                Expr::lit(2),
            ),
        );
        assert_eq!(free_names(&e), names(&["l", "u"]));
    }

    #[test]
    fn spans_are_ignored_by_equality() {
        let a = Expr::new(ExprKind::Lit(3), Span::new(0, 1, 1, 1));
        let b = Expr::new(ExprKind::Lit(3), Span::new(40, 7, 2, 1));
        assert_eq!(a, b);
        assert_ne!(a, Expr::lit(4));
    }

    #[test]
    fn span_join() {
        let a = Span::new(4, 1, 5, 2);
        let b = Span::new(10, 1, 11, 3);
        assert_eq!(a.to(b).len, 9);
        assert_eq!(b.to(a).offset, 4);
    }
}
