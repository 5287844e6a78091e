//! Resource criteria for a run.
//!
//! * `M` (`aux_highwater_cells`): peak number of live auxiliary scalar cells,
//!   i.e. locals plus entry parameters that are neither input nor output.
//! * `G` (`garbage_cells`): cells other than the input and the useful output
//!   that are nonzero at termination, plus input cells not restored to their
//!   initial value.
//! * input traversal work (`input_reads`): element reads of input arrays.
//!
//! Cells are counted one per scalar or array element; word size is not
//! modelled.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Param, ParamKind};
use crate::interp::{Direction, Store, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("role manifest mismatch: {0}")]
    ManifestMismatch(String),
    #[error("growth classification needs at least 3 distinct sizes spanning two doublings, got {0:?}")]
    InsufficientSamples(Vec<u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
    /// Declared garbage output; auxiliary for both criteria.
    Garbage,
    Auxiliary,
}

/// Declares which entry parameters are the original input and which are the
/// useful output. Everything else is auxiliary.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleManifest {
    #[serde(default)]
    pub input: BTreeSet<String>,
    #[serde(default)]
    pub output: BTreeSet<String>,
    #[serde(default)]
    pub garbage: BTreeSet<String>,
}

impl RoleManifest {
    pub fn new<'a>(
        input: impl IntoIterator<Item = &'a str>,
        output: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        RoleManifest {
            input: input.into_iter().map(String::from).collect(),
            output: output.into_iter().map(String::from).collect(),
            garbage: BTreeSet::new(),
        }
    }

    pub fn with_garbage<'a>(mut self, garbage: impl IntoIterator<Item = &'a str>) -> Self {
        self.garbage = garbage.into_iter().map(String::from).collect();
        self
    }

    pub fn role(&self, name: &str) -> Role {
        if self.input.contains(name) {
            Role::Input
        } else if self.output.contains(name) {
            Role::Output
        } else if self.garbage.contains(name) {
            Role::Garbage
        } else {
            Role::Auxiliary
        }
    }

    fn all(&self) -> impl Iterator<Item = &String> {
        self.input.iter().chain(&self.output).chain(&self.garbage)
    }

    /// Role sets must be disjoint and name parameters of the entry procedure.
    pub fn validate(&self, params: &[Param]) -> Result<(), MetricsError> {
        let mut seen = BTreeSet::new();
        for name in self.all() {
            if !seen.insert(name) {
                return Err(MetricsError::ManifestMismatch(format!(
                    "`{name}` has more than one role"
                )));
            }
            if !params.iter().any(|p| &p.name == name) {
                return Err(MetricsError::ManifestMismatch(format!(
                    "`{name}` is not a parameter of the entry procedure"
                )));
            }
        }
        Ok(())
    }
}

/// Access counts for one entry parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamAccess {
    pub name: String,
    pub kind: ParamKind,
    /// Element reads for arrays, value reads for scalars.
    pub reads: u64,
    pub writes: u64,
}

/// Raw counters gathered by an instrumented run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessTrace {
    pub params: Vec<ParamAccess>,
    pub local_highwater: usize,
    pub steps: u64,
}

impl AccessTrace {
    pub fn param(&self, name: &str) -> Option<&ParamAccess> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn reads_of(&self, name: &str) -> u64 {
        self.param(name).map_or(0, |p| p.reads)
    }
}

impl Serialize for ParamKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            ParamKind::Scalar => "scalar",
            ParamKind::Array => "array",
        })
    }
}

impl<'de> Deserialize<'de> for ParamKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "scalar" => Ok(ParamKind::Scalar),
            "array" => Ok(ParamKind::Array),
            other => Err(serde::de::Error::custom(format!("unknown kind `{other}`"))),
        }
    }
}

/// Total element reads of input arrays.
pub fn count_input_reads(trace: &AccessTrace, roles: &RoleManifest) -> u64 {
    trace
        .params
        .iter()
        .filter(|p| p.kind == ParamKind::Array && roles.role(&p.name) == Role::Input)
        .map(|p| p.reads)
        .sum()
}

/// Element writes to input arrays; nonzero means the input was mutated
/// during the run, even if it was restored afterwards.
pub fn count_input_writes(trace: &AccessTrace, roles: &RoleManifest) -> u64 {
    trace
        .params
        .iter()
        .filter(|p| roles.role(&p.name) == Role::Input)
        .map(|p| p.writes)
        .sum()
}

/// Peak live auxiliary scalar cells. Auxiliary parameters live for the
/// whole run, so the peak is the local peak plus their count.
pub fn aux_highwater(trace: &AccessTrace, roles: &RoleManifest) -> usize {
    let aux_params = trace
        .params
        .iter()
        .filter(|p| {
            p.kind == ParamKind::Scalar
                && matches!(roles.role(&p.name), Role::Auxiliary | Role::Garbage)
        })
        .count();
    trace.local_highwater + aux_params
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarbageAudit {
    pub garbage_cells: u64,
    /// Input parameters whose final value differs from the initial one.
    pub unrestored_inputs: Vec<String>,
}

impl GarbageAudit {
    pub fn inputs_restored(&self) -> bool {
        self.unrestored_inputs.is_empty()
    }
}

fn nonzero_cells(v: &Value) -> u64 {
    match v {
        Value::Scalar(x) => (*x != 0) as u64,
        Value::Array(a) => a.iter().filter(|x| **x != 0).count() as u64,
    }
}

fn differing_cells(a: &Value, b: &Value) -> u64 {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => (x != y) as u64,
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).filter(|(p, q)| p != q).count() as u64
        }
        (_, b) => match b {
            Value::Scalar(_) => 1,
            Value::Array(y) => y.len().max(1) as u64,
        },
    }
}

/// Counts garbage left by a successful run.
pub fn audit_garbage(initial: &Store, last: &Store, roles: &RoleManifest) -> Result<GarbageAudit, MetricsError> {
    for name in roles.all() {
        if !initial.contains(name) || !last.contains(name) {
            return Err(MetricsError::ManifestMismatch(format!("`{name}` is not bound")));
        }
    }
    let mut audit = GarbageAudit::default();
    for (name, value) in last.iter() {
        match roles.role(name) {
            Role::Output => {}
            Role::Input => {
                let before = initial.get(name).ok_or_else(|| {
                    MetricsError::ManifestMismatch(format!("`{name}` is not bound initially"))
                })?;
                let changed = differing_cells(before, value);
                if changed > 0 {
                    audit.garbage_cells += changed;
                    audit.unrestored_inputs.push(name.to_string());
                }
            }
            Role::Garbage | Role::Auxiliary => audit.garbage_cells += nonzero_cells(value),
        }
    }
    Ok(audit)
}

/// Summary of one run under a role manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub input_reads: u64,
    pub input_writes: u64,
    pub aux_highwater_cells: usize,
    pub garbage_cells: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthClass {
    Constant,
    Linear,
    Logarithmic,
    Unclassified,
}

/// Relative band allowed around the fitted ratio.
pub const GROWTH_TOLERANCE: f64 = 0.25;

/// True when some ratio `c > 0` has every value within ±25% of it.
fn fits_ratio(ratios: &[f64]) -> bool {
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    lo > 0.0 && hi / (1.0 + GROWTH_TOLERANCE) <= lo / (1.0 - GROWTH_TOLERANCE)
}

/// Classifies how a measurement grows with the input size `n`.
pub fn classify_growth(samples: &[(u64, f64)]) -> Result<GrowthClass, MetricsError> {
    let sizes: BTreeSet<u64> = samples.iter().map(|(n, _)| *n).collect();
    let (min, max) = (sizes.first().copied(), sizes.last().copied());
    let spans = matches!((min, max), (Some(lo), Some(hi)) if lo >= 2 && hi >= lo * 4);
    if sizes.len() < 3 || !spans {
        return Err(MetricsError::InsufficientSamples(sizes.into_iter().collect()));
    }
    if samples.iter().all(|(_, m)| *m == samples[0].1) {
        return Ok(GrowthClass::Constant);
    }
    let linear: Vec<f64> = samples.iter().map(|(n, m)| m / *n as f64).collect();
    if fits_ratio(&linear) {
        return Ok(GrowthClass::Linear);
    }
    let log: Vec<f64> = samples.iter().map(|(n, m)| m / (*n as f64).log2()).collect();
    if fits_ratio(&log) {
        return Ok(GrowthClass::Logarithmic);
    }
    Ok(GrowthClass::Unclassified)
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One row of the JSON metrics report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub program: String,
    pub n: u64,
    pub case_id: String,
    pub direction: Direction,
    pub input_reads: u64,
    pub aux_highwater_cells: usize,
    pub garbage_cells: u64,
    pub steps: u64,
    pub outcome: String,
}
