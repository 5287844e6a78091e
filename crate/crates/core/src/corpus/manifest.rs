use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::file::Representation;
use crate::metrics::{GrowthClass, MetricsRecord, RoleManifest};

/// Resource constraint of a linear-search case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Resources {
    /// One traversal, no garbage.
    OnePassClean,
    /// One traversal, garbage allowed.
    OnePassGarbage,
    /// One or two traversals, no garbage.
    TwoPassClean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Array,
    Dlist,
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnswerKind {
    Number,
    Location,
    Flag,
}

/// Identifies which cell of the linear-search trade-off table a program
/// implements, or one of the binary-search programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CaseId {
    Linear(LinearCase),
    Binary,
    Log2Ceil,
}

/// A cell of the table that admits an algorithm. Build with
/// [`LinearCase::new`]; the cells without one cannot be constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearCase {
    resources: Resources,
    structure: Structure,
    answer: AnswerKind,
}

impl LinearCase {
    pub fn new(resources: Resources, structure: Structure, answer: AnswerKind) -> Option<Self> {
        // With one clean traversal a flag cannot be produced (the location
        // would have to be cleared), and a singly linked list cannot be
        // walked at all.
        let impossible = resources == Resources::OnePassClean
            && (answer == AnswerKind::Flag || structure == Structure::List);
        (!impossible).then_some(LinearCase {
            resources,
            structure,
            answer,
        })
    }

    pub fn resources(&self) -> Resources {
        self.resources
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn answer(&self) -> AnswerKind {
        self.answer
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::Linear(c) => {
                let r = match c.resources {
                    Resources::OnePassClean => "1",
                    Resources::OnePassGarbage => "2",
                    Resources::TwoPassClean => "3",
                };
                let s = match c.structure {
                    Structure::Array => "i",
                    Structure::Dlist => "ii",
                    Structure::List => "iii",
                };
                let a = match c.answer {
                    AnswerKind::Number => "a",
                    AnswerKind::Location => "b",
                    AnswerKind::Flag => "c",
                };
                write!(f, "{r}.{s}.{a}")
            }
            CaseId::Binary => f.write_str("binary"),
            CaseId::Log2Ceil => f.write_str("log2ceil"),
        }
    }
}

impl FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "binary" => return Ok(CaseId::Binary),
            "log2ceil" => return Ok(CaseId::Log2Ceil),
            _ => {}
        }
        let bad = || format!("malformed case id `{s}`");
        let parts: Vec<&str> = s.split('.').collect();
        let [r, st, a] = parts[..] else {
            return Err(bad());
        };
        let resources = match r {
            "1" => Resources::OnePassClean,
            "2" => Resources::OnePassGarbage,
            "3" => Resources::TwoPassClean,
            _ => return Err(bad()),
        };
        let structure = match st {
            "i" => Structure::Array,
            "ii" => Structure::Dlist,
            "iii" => Structure::List,
            _ => return Err(bad()),
        };
        let answer = match a {
            "a" => AnswerKind::Number,
            "b" => AnswerKind::Location,
            "c" => AnswerKind::Flag,
            _ => return Err(bad()),
        };
        LinearCase::new(resources, structure, answer)
            .map(CaseId::Linear)
            .ok_or_else(|| format!("case {s} has no reversible algorithm"))
    }
}

impl TryFrom<String> for CaseId {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<CaseId> for String {
    fn from(c: CaseId) -> String {
        c.to_string()
    }
}

/// What the output parameter should hold after a forward run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    /// Number of occurrences of the key.
    Number,
    /// First index holding the key, or `n` (the sentinel) on failure.
    Location,
    /// 1 if the key occurs, else 0.
    Flag,
    /// Index of the key in a sorted array, or -1.
    BinaryLocation,
    /// Ceiling of log2 of the file length.
    Log2ceil,
}

/// Where the value of an entry parameter comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binding {
    /// The key array of the layout (see [`super::FileSpec::array`]).
    Keys,
    Head,
    Next,
    Prev,
    /// Number of records.
    N,
    /// The key searched for.
    Key,
    /// Scalar 0.
    Zero,
    /// Array of `n + 1` zeros.
    Zeros,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    InputReads,
    AuxHighwaterCells,
    GarbageCells,
    Steps,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::InputReads,
        Metric::AuxHighwaterCells,
        Metric::GarbageCells,
        Metric::Steps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::InputReads => "input_reads",
            Metric::AuxHighwaterCells => "aux_highwater_cells",
            Metric::GarbageCells => "garbage_cells",
            Metric::Steps => "steps",
        }
    }

    pub fn of(self, m: &MetricsRecord) -> u64 {
        match self {
            Metric::InputReads => m.input_reads,
            Metric::AuxHighwaterCells => m.aux_highwater_cells as u64,
            Metric::GarbageCells => m.garbage_cells,
            Metric::Steps => m.steps,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-case harness description, stored next to the source as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "case")]
    pub case_id: CaseId,
    pub source: String,
    pub entry: String,
    pub representation: Representation,
    #[serde(default)]
    pub mutable: bool,
    pub answer: Answer,
    /// Every run must end with no garbage and the input restored.
    #[serde(default)]
    pub garbage_free: bool,
    /// `aux_highwater_cells` must not depend on the file length.
    #[serde(default)]
    pub constant_memory: bool,
    pub bind: BTreeMap<String, Binding>,
    pub roles: RoleManifest,
    /// Expected growth of each metric over failing searches.
    #[serde(default)]
    pub expect: BTreeMap<Metric, GrowthClass>,
}

impl Manifest {
    /// The parameter carrying the answer.
    pub fn output(&self) -> Option<&str> {
        let mut it = self.roles.output.iter();
        match (it.next(), it.next()) {
            (Some(o), None) => Some(o),
            _ => None,
        }
    }
}
