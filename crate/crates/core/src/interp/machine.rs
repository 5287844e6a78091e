use crate::ast::{BinOp, Span, UpdateOp};

use super::compile::{Body, CExpr, CLval, COp, CStmt, CompiledProc, CompiledProgram};
use super::observe::{Event, FrameView, Observer};
use super::{RuntimeError, RuntimeErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Cell {
    Scalar(i64),
    Array(Vec<i64>),
}

/// Frame entry for a local that is not currently allocated.
pub(crate) const DEAD: usize = usize::MAX;

pub(crate) struct Frame<'p> {
    pub ids: Vec<usize>,
    pub body: &'p Body,
    pub proc: &'p CompiledProc,
    pub inverted: bool,
}

impl<'p> Frame<'p> {
    pub fn new(proc: &'p CompiledProc, inverted: bool, mut ids: Vec<usize>) -> Self {
        let body = proc.body(inverted);
        ids.resize(body.names.len(), DEAD);
        Frame {
            ids,
            body,
            proc,
            inverted,
        }
    }

    fn name(&self, slot: usize) -> &'p str {
        &self.body.names[slot]
    }
}

/// Mutable state of one run. Cells `0..top` are the caller-owned top-level
/// bindings; locals are pushed above them and popped in LIFO order.
pub(crate) struct Machine<'p, 'o> {
    pub prog: &'p CompiledProgram,
    pub cells: Vec<Cell>,
    pub top: usize,
    /// Per top-level cell: element reads for arrays, value reads for scalars.
    pub reads: Vec<u64>,
    pub writes: Vec<u64>,
    pub live_locals: usize,
    pub peak_locals: usize,
    pub steps: u64,
    pub fuel: u64,
    pub observer: Option<&'o mut dyn Observer>,
}

fn truthy(v: i64) -> bool {
    v != 0
}

fn flag(b: bool) -> i64 {
    b as i64
}

pub(crate) fn wrapping_pow(mut base: i64, mut exp: u64) -> i64 {
    let mut acc: i64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc.wrapping_mul(base);
        }
        base = base.wrapping_mul(base);
        exp >>= 1;
    }
    acc
}

impl<'p> Machine<'p, '_> {
    fn notify(&mut self, fr: &Frame<'_>, event: Event<'_>) {
        if let Some(obs) = self.observer.as_deref_mut() {
            let view = FrameView {
                proc: &fr.proc.name,
                inverted: fr.inverted,
                names: &fr.body.names,
                frame: &fr.ids,
                cells: &self.cells,
            };
            obs.event(&event, &view);
        }
    }

    fn error(kind: RuntimeErrorKind, span: Span, message: String) -> RuntimeError {
        RuntimeError {
            kind,
            span,
            message,
        }
    }

    fn count_read(&mut self, id: usize) {
        if id < self.top {
            self.reads[id] += 1;
        }
    }

    fn element_index(&self, id: usize, index: i64, fr: &Frame<'_>, slot: usize, span: Span) -> Result<usize, RuntimeError> {
        let Cell::Array(a) = &self.cells[id] else {
            unreachable!("checked program indexes a scalar")
        };
        if index < 0 || index as u64 >= a.len() as u64 {
            return Err(Self::error(
                RuntimeErrorKind::IndexOutOfBounds,
                span,
                format!("index {index} out of bounds for `{}` of length {}", fr.name(slot), a.len()),
            ));
        }
        Ok(index as usize)
    }

    pub fn eval(&mut self, e: &CExpr, fr: &Frame<'_>) -> Result<i64, RuntimeError> {
        Ok(match e {
            CExpr::Lit(v) => *v,
            CExpr::Scalar(slot) => {
                let id = fr.ids[*slot];
                self.count_read(id);
                match &self.cells[id] {
                    Cell::Scalar(v) => *v,
                    Cell::Array(_) => unreachable!("checked program reads an array as a scalar"),
                }
            }
            CExpr::Elem(slot, index, span) => {
                let i = self.eval(index, fr)?;
                let id = fr.ids[*slot];
                let i = self.element_index(id, i, fr, *slot, *span)?;
                self.count_read(id);
                match &self.cells[id] {
                    Cell::Array(a) => a[i],
                    Cell::Scalar(_) => unreachable!(),
                }
            }
            CExpr::Size(slot) => match &self.cells[fr.ids[*slot]] {
                Cell::Array(a) => a.len() as i64,
                Cell::Scalar(_) => unreachable!("checked program takes size of a scalar"),
            },
            CExpr::Neg(x) => self.eval(x, fr)?.wrapping_neg(),
            CExpr::Bin(BinOp::And, l, r, _) => {
                flag(truthy(self.eval(l, fr)?) && truthy(self.eval(r, fr)?))
            }
            CExpr::Bin(BinOp::Or, l, r, _) => {
                flag(truthy(self.eval(l, fr)?) || truthy(self.eval(r, fr)?))
            }
            CExpr::Bin(op, l, r, span) => {
                let a = self.eval(l, fr)?;
                let b = self.eval(r, fr)?;
                match op {
                    BinOp::Add => a.wrapping_add(b),
                    BinOp::Sub => a.wrapping_sub(b),
                    BinOp::Mul => a.wrapping_mul(b),
                    BinOp::Div | BinOp::Mod if b == 0 => {
                        return Err(Self::error(
                            RuntimeErrorKind::DivisionByZero,
                            *span,
                            format!("{a} {} 0", op.symbol()),
                        ))
                    }
                    BinOp::Div => a.wrapping_div(b),
                    BinOp::Mod => a.wrapping_rem(b),
                    BinOp::Pow if b < 0 => {
                        return Err(Self::error(
                            RuntimeErrorKind::NegativeExponent,
                            *span,
                            format!("{a} ** {b}"),
                        ))
                    }
                    BinOp::Pow => wrapping_pow(a, b as u64),
                    BinOp::BitAnd => a & b,
                    BinOp::BitOr => a | b,
                    BinOp::BitXor => a ^ b,
                    BinOp::Eq => flag(a == b),
                    BinOp::Ne => flag(a != b),
                    BinOp::Lt => flag(a < b),
                    BinOp::Le => flag(a <= b),
                    BinOp::Gt => flag(a > b),
                    BinOp::Ge => flag(a >= b),
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        })
    }

    /// Resolves an lvalue to (cell, element index).
    fn locate(&mut self, lv: &CLval, fr: &Frame<'_>, span: Span) -> Result<(usize, Option<usize>, usize), RuntimeError> {
        match lv {
            CLval::Scalar(slot) => Ok((fr.ids[*slot], None, *slot)),
            CLval::Elem(slot, index) => {
                let i = self.eval(index, fr)?;
                let id = fr.ids[*slot];
                let i = self.element_index(id, i, fr, *slot, span)?;
                Ok((id, Some(i), *slot))
            }
        }
    }

    fn load(&self, id: usize, index: Option<usize>) -> i64 {
        match (&self.cells[id], index) {
            (Cell::Scalar(v), None) => *v,
            (Cell::Array(a), Some(i)) => a[i],
            _ => unreachable!(),
        }
    }

    fn put(&mut self, id: usize, index: Option<usize>, v: i64) {
        match (&mut self.cells[id], index) {
            (Cell::Scalar(x), None) => *x = v,
            (Cell::Array(a), Some(i)) => a[i] = v,
            _ => unreachable!(),
        }
        if id < self.top {
            self.writes[id] += 1;
        }
    }

    fn write(&mut self, fr: &Frame<'_>, span: Span, target: (usize, Option<usize>, usize), old: i64, new: i64) {
        let (id, index, slot) = target;
        self.put(id, index, new);
        if self.observer.is_some() {
            self.notify(
                fr,
                Event::Write {
                    span,
                    name: fr.name(slot),
                    index: index.map(|i| i as i64),
                    old,
                    new,
                },
            );
        }
    }

    pub fn exec_block(&mut self, code: &'p [CStmt], fr: &mut Frame<'p>) -> Result<(), RuntimeError> {
        for s in code {
            self.exec(s, fr)?;
        }
        Ok(())
    }

    fn exec(&mut self, s: &'p CStmt, fr: &mut Frame<'p>) -> Result<(), RuntimeError> {
        let span = s.span;
        self.steps += 1;
        if self.steps > self.fuel {
            return Err(Self::error(
                RuntimeErrorKind::FuelExhausted,
                span,
                format!("step limit of {} exceeded", self.fuel),
            ));
        }
        if self.observer.is_some() {
            self.notify(fr, Event::Stmt { span });
        }
        match &s.op {
            COp::Update { target, op, rhs } => {
                let at = self.locate(target, fr, span)?;
                let r = self.eval(rhs, fr)?;
                let old = self.load(at.0, at.1);
                let new = match op {
                    UpdateOp::Add => old.wrapping_add(r),
                    UpdateOp::Sub => old.wrapping_sub(r),
                    UpdateOp::Xor => old ^ r,
                };
                self.write(fr, span, at, old, new);
            }
            COp::Swap(a, b) => {
                let at_a = self.locate(a, fr, span)?;
                let at_b = self.locate(b, fr, span)?;
                let va = self.load(at_a.0, at_a.1);
                let vb = self.load(at_b.0, at_b.1);
                self.write(fr, span, at_a, va, vb);
                self.write(fr, span, at_b, vb, va);
            }
            COp::If {
                test,
                then_branch,
                else_branch,
                assertion,
            } => {
                let taken = truthy(self.eval(test, fr)?);
                if self.observer.is_some() {
                    self.notify(fr, Event::IfTest { span, value: taken });
                }
                let branch = if taken { then_branch } else { else_branch };
                self.exec_block(branch, fr)?;
                let value = truthy(self.eval(assertion, fr)?);
                if self.observer.is_some() {
                    self.notify(
                        fr,
                        Event::FiAssert {
                            span,
                            value,
                            then_taken: taken,
                        },
                    );
                }
                if value != taken {
                    return Err(Self::error(
                        RuntimeErrorKind::FiAssertionMismatch,
                        span,
                        format!(
                            "exit assertion is {value} after the {} branch",
                            if taken { "then" } else { "else" }
                        ),
                    ));
                }
            }
            COp::Loop { entry, body, until } => {
                if !truthy(self.eval(entry, fr)?) {
                    return Err(Self::error(
                        RuntimeErrorKind::LoopEntryAssertion,
                        span,
                        "entry assertion is false on arrival".to_string(),
                    ));
                }
                let mut iteration = 0u64;
                loop {
                    if self.observer.is_some() {
                        self.notify(fr, Event::LoopTop { span, iteration });
                    }
                    if truthy(self.eval(until, fr)?) {
                        break;
                    }
                    self.exec_block(body, fr)?;
                    iteration += 1;
                    if truthy(self.eval(entry, fr)?) {
                        return Err(Self::error(
                            RuntimeErrorKind::LoopEntryAssertion,
                            span,
                            format!("entry assertion holds again after iteration {iteration}"),
                        ));
                    }
                }
            }
            COp::Local {
                slot,
                init,
                body,
                fin,
            } => {
                let v = self.eval(init, fr)?;
                let id = self.cells.len();
                self.cells.push(Cell::Scalar(v));
                fr.ids[*slot] = id;
                self.live_locals += 1;
                self.peak_locals = self.peak_locals.max(self.live_locals);
                if self.observer.is_some() {
                    self.notify(
                        fr,
                        Event::Alloc {
                            span,
                            name: fr.name(*slot),
                            value: v,
                        },
                    );
                }
                self.exec_block(body, fr)?;
                let expected = self.eval(fin, fr)?;
                let actual = self.load(id, None);
                if actual != expected {
                    return Err(Self::error(
                        RuntimeErrorKind::DelocalMismatch,
                        span,
                        format!(
                            "local `{}` is {actual} at deallocation, expected {expected}",
                            fr.name(*slot)
                        ),
                    ));
                }
                if self.observer.is_some() {
                    self.notify(
                        fr,
                        Event::Free {
                            span,
                            name: fr.name(*slot),
                            value: actual,
                        },
                    );
                }
                debug_assert_eq!(self.cells.len(), id + 1);
                self.cells.pop();
                fr.ids[*slot] = super::machine::DEAD;
                self.live_locals -= 1;
            }
            COp::Call {
                proc,
                inverted,
                args,
            } => {
                let callee = &self.prog.procs[*proc];
                let ids: Vec<usize> = args.iter().map(|s| fr.ids[*s]).collect();
                for (i, id) in ids.iter().enumerate() {
                    if ids[..i].contains(id) {
                        return Err(Self::error(
                            RuntimeErrorKind::ArgumentAliasing,
                            span,
                            format!("`{}` reaches `{}` through two parameters", fr.name(args[i]), callee.name),
                        ));
                    }
                }
                let mut frame = Frame::new(callee, *inverted, ids);
                self.run_body(&mut frame)?;
            }
            COp::Skip => {}
        }
        Ok(())
    }

    pub fn run_body(&mut self, fr: &mut Frame<'p>) -> Result<(), RuntimeError> {
        let (name, inverted) = (fr.proc.name.as_str(), fr.inverted);
        if self.observer.is_some() {
            self.notify(fr, Event::Enter { proc: name, inverted });
        }
        let code = &fr.body.code;
        self.exec_block(code, fr)?;
        if self.observer.is_some() {
            self.notify(fr, Event::Exit { proc: name, inverted });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::wrapping_pow;

    #[test]
    fn pow_wraps_like_repeated_multiplication() {
        assert_eq!(wrapping_pow(2, 10), 1024);
        assert_eq!(wrapping_pow(3, 0), 1);
        assert_eq!(wrapping_pow(2, 63), i64::MIN);
        assert_eq!(wrapping_pow(2, 64), 0);
        assert_eq!(wrapping_pow(-1, u64::MAX), -1);
        let mut acc = 1i64;
        for _ in 0..77 {
            acc = acc.wrapping_mul(7);
        }
        assert_eq!(wrapping_pow(7, 77), acc);
    }
}
