use crate::ast::Span;

use super::machine::Cell;

/// Execution events delivered to an [`Observer`].
#[derive(Debug, Clone, Copy)]
pub enum Event<'a> {
    /// A procedure body starts; `inverted` is set for uncall and backward runs.
    Enter { proc: &'a str, inverted: bool },
    Exit { proc: &'a str, inverted: bool },
    /// About to execute the statement at `span`.
    Stmt { span: Span },
    /// A cell changed value.
    Write {
        span: Span,
        name: &'a str,
        index: Option<i64>,
        old: i64,
        new: i64,
    },
    IfTest { span: Span, value: bool },
    /// The exit assertion of a conditional, with the branch that ran.
    FiAssert {
        span: Span,
        value: bool,
        then_taken: bool,
    },
    /// Top of a loop iteration, before the `until` test.
    LoopTop { span: Span, iteration: u64 },
    Alloc { span: Span, name: &'a str, value: i64 },
    Free { span: Span, name: &'a str, value: i64 },
}

/// Read-only view of the variables visible in the current procedure.
pub struct FrameView<'a> {
    pub(crate) proc: &'a str,
    pub(crate) inverted: bool,
    pub(crate) names: &'a [String],
    pub(crate) frame: &'a [usize],
    pub(crate) cells: &'a [Cell],
}

impl<'a> FrameView<'a> {
    pub fn proc(&self) -> &'a str {
        self.proc
    }

    pub fn inverted(&self) -> bool {
        self.inverted
    }

    fn cell(&self, name: &str) -> Option<&'a Cell> {
        let slot = self.names.iter().position(|n| n == name)?;
        self.cells.get(*self.frame.get(slot)?)
    }

    /// Current value of a visible scalar (parameter or live local).
    pub fn scalar(&self, name: &str) -> Option<i64> {
        match self.cell(name)? {
            Cell::Scalar(v) => Some(*v),
            Cell::Array(_) => None,
        }
    }

    pub fn array(&self, name: &str) -> Option<&'a [i64]> {
        match self.cell(name)? {
            Cell::Array(a) => Some(a),
            Cell::Scalar(_) => None,
        }
    }
}

/// Hook into a run. Used by the debug trace and by invariant checks.
pub trait Observer {
    fn event(&mut self, event: &Event<'_>, frame: &FrameView<'_>);
}

impl<F: FnMut(&Event<'_>, &FrameView<'_>)> Observer for F {
    fn event(&mut self, event: &Event<'_>, frame: &FrameView<'_>) {
        self(event, frame)
    }
}

/// Renders statement spans and store changes as text lines.
#[derive(Debug, Default)]
pub struct TraceLog {
    pub lines: Vec<String>,
}

impl Observer for TraceLog {
    fn event(&mut self, event: &Event<'_>, frame: &FrameView<'_>) {
        let line = match *event {
            Event::Enter { proc, inverted } => {
                format!("{} {proc}", if inverted { "uncall" } else { "call" })
            }
            Event::Exit { proc, .. } => format!("return {proc}"),
            Event::Stmt { span } => format!("  {span} {}", frame.proc),
            Event::Write {
                name,
                index: Some(i),
                old,
                new,
                ..
            } => format!("    {name}[{i}]: {old} -> {new}"),
            Event::Write {
                name, old, new, ..
            } => format!("    {name}: {old} -> {new}"),
            Event::IfTest { value, .. } => format!("    test = {value}"),
            Event::FiAssert { value, .. } => format!("    assertion = {value}"),
            Event::LoopTop { iteration, .. } => format!("    iteration {iteration}"),
            Event::Alloc { name, value, .. } => format!("    local {name} = {value}"),
            Event::Free { name, value, .. } => format!("    delocal {name} = {value}"),
        };
        self.lines.push(line);
    }
}
