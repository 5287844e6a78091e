//! Bidirectional tree-walking interpreter.
//!
//! Integers are 64-bit two's complement with wrapping `+ - *`; `/` truncates
//! toward zero and `%` takes the sign of the dividend. Comparisons yield 1 or
//! 0 and `&&`/`||` short-circuit.
//!
//! Loops run as: the entry assertion must hold on arrival; then, repeatedly,
//! the `until` test is evaluated first, the body runs if it is false, and the
//! entry assertion must be false after every pass. Conditionals require their
//! exit assertion to equal the test. `delocal` requires the local's value to
//! equal the stated one.

mod compile;
mod machine;
mod observe;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Expr, Param, ParamKind, Span};
use crate::check::CheckedProgram;
use crate::metrics::{
    self, AccessTrace, GarbageAudit, MetricsError, MetricsRecord, ParamAccess, RoleManifest,
};

use compile::CompiledProgram;
use machine::{Cell, Frame, Machine};

pub use observe::{Event, FrameView, Observer, TraceLog};
pub use store::{Store, Value};

/// Step cap for a single run.
pub const DEFAULT_FUEL: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuntimeErrorKind {
    FiAssertionMismatch,
    LoopEntryAssertion,
    DelocalMismatch,
    IndexOutOfBounds,
    DivisionByZero,
    NegativeExponent,
    ArgumentAliasing,
    FuelExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind:?}: {message}")]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub span: Span,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("no procedure named `{0}`")]
    UnknownEntry(String),
    #[error("parameter `{0}` is not bound")]
    Unbound(String),
    #[error("parameter `{name}` must be bound to {}", if *.expected == ParamKind::Array { "an array" } else { "a scalar" })]
    KindMismatch { name: String, expected: ParamKind },
    #[error("`{0}` is not a parameter of the entry procedure")]
    UnexpectedBinding(String),
    #[error(transparent)]
    Manifest(#[from] MetricsError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

impl RunError {
    pub fn runtime_kind(&self) -> Option<RuntimeErrorKind> {
        match self {
            RunError::Runtime(e) => Some(e.kind),
            _ => None,
        }
    }
}

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub store: Store,
    pub trace: AccessTrace,
    pub metrics: MetricsRecord,
    pub audit: GarbageAudit,
}

pub struct RunOptions<'a> {
    pub direction: Direction,
    pub roles: Option<&'a RoleManifest>,
    pub fuel: u64,
    pub observer: Option<&'a mut dyn Observer>,
}

impl<'a> RunOptions<'a> {
    pub fn new(direction: Direction) -> Self {
        RunOptions {
            direction,
            roles: None,
            fuel: DEFAULT_FUEL,
            observer: None,
        }
    }

    pub fn roles(mut self, roles: &'a RoleManifest) -> Self {
        self.roles = Some(roles);
        self
    }

    pub fn fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn observer(mut self, observer: &'a mut dyn Observer) -> Self {
        self.observer = Some(observer);
        self
    }
}

/// A checked program prepared for execution. Immutable and shareable;
/// every run owns its own cells.
#[derive(Debug)]
pub struct Interpreter {
    compiled: CompiledProgram,
}

impl Interpreter {
    pub fn new(program: &CheckedProgram) -> Self {
        Interpreter {
            compiled: CompiledProgram::new(program),
        }
    }

    pub fn params(&self, entry: &str) -> Option<&[Param]> {
        let i = *self.compiled.index.get(entry)?;
        Some(&self.compiled.procs[i].params)
    }

    pub fn run(&self, entry: &str, store: Store, direction: Direction) -> Result<Outcome, RunError> {
        self.run_with(entry, store, RunOptions::new(direction))
    }

    pub fn run_with(&self, entry: &str, store: Store, opts: RunOptions<'_>) -> Result<Outcome, RunError> {
        let index = *self
            .compiled
            .index
            .get(entry)
            .ok_or_else(|| RunError::UnknownEntry(entry.to_string()))?;
        let proc = &self.compiled.procs[index];
        let empty = RoleManifest::default();
        let roles = opts.roles.unwrap_or(&empty);
        roles.validate(&proc.params)?;

        for (name, _) in store.iter() {
            if proc.params.iter().all(|p| p.name != name) {
                return Err(RunError::UnexpectedBinding(name.to_string()));
            }
        }
        let mut cells = Vec::with_capacity(proc.params.len() + 8);
        for p in &proc.params {
            let cell = match (store.get(&p.name), p.kind) {
                (None, _) => return Err(RunError::Unbound(p.name.clone())),
                (Some(Value::Scalar(v)), ParamKind::Scalar) => Cell::Scalar(*v),
                (Some(Value::Array(a)), ParamKind::Array) => Cell::Array(a.clone()),
                (Some(_), kind) => {
                    return Err(RunError::KindMismatch {
                        name: p.name.clone(),
                        expected: kind,
                    })
                }
            };
            cells.push(cell);
        }

        let top = cells.len();
        let mut machine = Machine {
            prog: &self.compiled,
            cells,
            top,
            reads: vec![0; top],
            writes: vec![0; top],
            live_locals: 0,
            peak_locals: 0,
            steps: 0,
            fuel: opts.fuel,
            observer: opts.observer,
        };
        let inverted = opts.direction == Direction::Backward;
        let mut frame = Frame::new(proc, inverted, (0..top).collect());
        machine.run_body(&mut frame)?;
        debug_assert_eq!(machine.cells.len(), top);

        let mut last = Store::new();
        let mut params = Vec::with_capacity(top);
        for (i, (p, cell)) in proc.params.iter().zip(machine.cells).enumerate() {
            last.set(
                &p.name,
                match cell {
                    Cell::Scalar(v) => Value::Scalar(v),
                    Cell::Array(a) => Value::Array(a),
                },
            );
            params.push(ParamAccess {
                name: p.name.clone(),
                kind: p.kind,
                reads: machine.reads[i],
                writes: machine.writes[i],
            });
        }
        let trace = AccessTrace {
            params,
            local_highwater: machine.peak_locals,
            steps: machine.steps,
        };
        let audit = metrics::audit_garbage(&store, &last, roles)?;
        let record = MetricsRecord {
            input_reads: metrics::count_input_reads(&trace, roles),
            input_writes: metrics::count_input_writes(&trace, roles),
            aux_highwater_cells: metrics::aux_highwater(&trace, roles),
            garbage_cells: audit.garbage_cells,
            steps: trace.steps,
        };
        Ok(Outcome {
            store: last,
            trace,
            metrics: record,
            audit,
        })
    }
}

/// Evaluates a closed-over expression against a store, without mutating it.
pub fn eval(e: &Expr, store: &Store) -> Result<i64, RunError> {
    let mut names = Vec::new();
    let mut cells = Vec::new();
    for name in e.free_names() {
        let value = store.get(&name).ok_or_else(|| RunError::Unbound(name.clone()))?;
        cells.push(match value {
            Value::Scalar(v) => Cell::Scalar(*v),
            Value::Array(a) => Cell::Array(a.clone()),
        });
        names.push(name);
    }
    let kinds: Vec<ParamKind> = cells
        .iter()
        .map(|c| match c {
            Cell::Scalar(_) => ParamKind::Scalar,
            Cell::Array(_) => ParamKind::Array,
        })
        .collect();
    if let Some((name, expected)) = compile::kind_error(e, &names, &kinds) {
        return Err(RunError::KindMismatch { name, expected });
    }
    let (compiled, code) = compile::expr_program(&names, e);
    let top = cells.len();
    let mut machine = Machine {
        prog: &compiled,
        cells,
        top,
        reads: vec![0; top],
        writes: vec![0; top],
        live_locals: 0,
        peak_locals: 0,
        steps: 0,
        fuel: DEFAULT_FUEL,
        observer: None,
    };
    let frame = Frame::new(&compiled.procs[0], false, (0..top).collect());
    Ok(machine.eval(&code, &frame)?)
}

/// Runs `entry` of a checked program in the given direction.
pub fn run(program: &CheckedProgram, entry: &str, store: Store, direction: Direction) -> Result<Outcome, RunError> {
    Interpreter::new(program).run(entry, store, direction)
}
