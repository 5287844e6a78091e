use crate::ast::{
    BinOp, CallKind, Expr, ExprKind, LValue, Param, ParamKind, Procedure, Program, Span, Stmt,
    StmtKind, UpdateOp,
};

use super::lexer::{tokenize, Tok};
use super::ParseError;

/// Parses a whole source file.
pub fn parse(src: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut procedures = Vec::new();
    while p.peek() != &Tok::Eof {
        procedures.push(p.procedure()?);
    }
    Ok(Program::new(procedures))
}

/// Parses a single expression, e.g. for command-line predicates and tests.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

struct Parser {
    tokens: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if self.peek() == &tok {
            Ok(self.bump().1)
        } else {
            self.error(&[tok.text()])
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek() {
            Tok::Ident(_) => match self.bump() {
                (Tok::Ident(n), span) => Ok((n, span)),
                _ => unreachable!(),
            },
            _ => self.error(&["identifier"]),
        }
    }

    fn procedure(&mut self) -> Result<Procedure, ParseError> {
        let start = self.expect(Tok::Procedure)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                let pstart = self.expect(Tok::Int_)?;
                let (pname, _) = self.ident()?;
                let kind = if self.eat(&Tok::LBracket) {
                    self.expect(Tok::RBracket)?;
                    ParamKind::Array
                } else {
                    ParamKind::Scalar
                };
                params.push(Param {
                    name: pname,
                    kind,
                    span: pstart.to(self.prev_span()),
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        Ok(Procedure {
            name,
            params,
            body,
            span: start.to(self.prev_span()),
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Tok::Else | Tok::Fi | Tok::Until | Tok::Delocal | Tok::Procedure | Tok::Eof => {
                    return Ok(out)
                }
                _ => out.push(self.stmt()?),
            }
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::If => {
                self.bump();
                let test = self.expr()?;
                self.expect(Tok::Then)?;
                let then_branch = self.block()?;
                let else_branch = if self.eat(&Tok::Else) {
                    self.block()?
                } else {
                    Vec::new()
                };
                self.expect(Tok::Fi)?;
                let assertion = self.expr()?;
                StmtKind::If {
                    test,
                    then_branch,
                    else_branch,
                    assertion,
                }
            }
            Tok::From => {
                self.bump();
                let entry = self.expr()?;
                self.expect(Tok::Loop)?;
                let body = self.block()?;
                self.expect(Tok::Until)?;
                let until = self.expr()?;
                StmtKind::Loop { entry, body, until }
            }
            Tok::Local => {
                self.bump();
                self.eat(&Tok::Int_);
                let (name, _) = self.ident()?;
                self.expect(Tok::Eq)?;
                let init = self.expr()?;
                let body = self.block()?;
                self.expect(Tok::Delocal)?;
                self.eat(&Tok::Int_);
                let (closing, span) = self.ident()?;
                if closing != name {
                    return Err(ParseError {
                        span,
                        expected: vec![format!("`{name}`")],
                        found: format!("identifier `{closing}`"),
                    });
                }
                self.expect(Tok::Eq)?;
                let fin = self.expr()?;
                StmtKind::Local {
                    name,
                    init,
                    body,
                    fin,
                }
            }
            Tok::Call | Tok::Uncall => {
                let kind = if self.bump().0 == Tok::Call {
                    CallKind::Call
                } else {
                    CallKind::Uncall
                };
                let (proc, _) = self.ident()?;
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                if self.peek() != &Tok::RParen {
                    loop {
                        args.push(self.ident()?.0);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                StmtKind::Call { kind, proc, args }
            }
            Tok::Skip => {
                self.bump();
                StmtKind::Skip
            }
            Tok::Ident(_) => {
                let target = self.lvalue()?;
                let op = match self.peek() {
                    Tok::AddAssign => UpdateOp::Add,
                    Tok::SubAssign => UpdateOp::Sub,
                    Tok::XorAssign => UpdateOp::Xor,
                    Tok::Swap => {
                        self.bump();
                        let other = self.lvalue()?;
                        return Ok(Stmt::with_span(
                            StmtKind::Swap(target, other),
                            start.to(self.prev_span()),
                        ));
                    }
                    _ => return self.error(&["+=", "-=", "^=", "<=>"]),
                };
                self.bump();
                let rhs = self.expr()?;
                StmtKind::Update { target, op, rhs }
            }
            _ => {
                return self.error(&[
                    "identifier", "if", "from", "local", "call", "uncall", "skip",
                ])
            }
        };
        Ok(Stmt::with_span(kind, start.to(self.prev_span())))
    }

    fn lvalue(&mut self) -> Result<LValue, ParseError> {
        let (name, _) = self.ident()?;
        if self.eat(&Tok::LBracket) {
            let index = self.expr()?;
            self.expect(Tok::RBracket)?;
            Ok(LValue::Index(name, index))
        } else {
            Ok(LValue::Var(name))
        }
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Pipe => BinOp::BitOr,
            Tok::Caret => BinOp::BitXor,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Mod,
            Tok::Amp => BinOp::BitAnd,
            _ => return None,
        })
    }

    /// Left-associative levels 1..=5; level 6 is unary minus.
    fn binary(&mut self, level: u8) -> Result<Expr, ParseError> {
        if level > 5 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop().filter(|op| op.precedence() == level) {
            self.bump();
            let rhs = self.binary(level + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() != &Tok::Minus {
            return self.power();
        }
        let start = self.bump().1;
        // `-7` is a negative literal unless it is the base of `**`.
        if let Tok::Int(v) = *self.peek() {
            if self.peek_at(1) != &Tok::StarStar {
                let span = start.to(self.span());
                if v > i64::MAX as u64 + 1 {
                    return self.error(&["integer literal within 64 bits"]);
                }
                self.bump();
                return Ok(Expr::new(ExprKind::Lit((v as i64).wrapping_neg()), span));
            }
        }
        let operand = self.unary()?;
        let span = start.to(operand.span);
        Ok(Expr::new(ExprKind::Neg(Box::new(operand)), span))
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat(&Tok::StarStar) {
            let exp = self.unary()?;
            let span = base.span.to(exp.span);
            return Ok(Expr::new(
                ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)),
                span,
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                if v > i64::MAX as u64 {
                    return self.error(&["integer literal within 64 bits"]);
                }
                self.bump();
                Ok(Expr::new(ExprKind::Lit(v as i64), start))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LBracket) {
                    let index = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    let span = start.to(self.prev_span());
                    Ok(Expr::new(ExprKind::Index(name, Box::new(index)), span))
                } else {
                    Ok(Expr::new(ExprKind::Var(name), start))
                }
            }
            Tok::Size => {
                self.bump();
                self.expect(Tok::LParen)?;
                let (name, _) = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::new(ExprKind::Size(name), start.to(self.prev_span())))
            }
            Tok::LParen => {
                self.bump();
                let mut e = self.expr()?;
                self.expect(Tok::RParen)?;
                e.span = start.to(self.prev_span());
                Ok(e)
            }
            _ => self.error(&["integer", "identifier", "size", "(", "-"]),
        }
    }
}
