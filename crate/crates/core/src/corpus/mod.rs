//! Reversible search programs shipped with the crate, the input layouts
//! they expect, and per-case manifests describing how to bind and judge
//! them.
//!
//! Each case is a `.jns` source plus a TOML manifest of the same stem. The
//! built-in corpus is compiled into the library; [`Corpus::load`] reads the
//! same format from a directory, which is how mutated corpora are tested.

mod file;
mod manifest;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::ast::ParamKind;
use crate::check::{check, CheckError, CheckedProgram};
use crate::interp::{Direction, Interpreter, Outcome, RunError, RunOptions, Store, Value};
use crate::oracle::{binary_oracle, ceil_log2, linear_oracle, UnsortedInput};
use crate::syntax::{parse, ParseError};

pub use file::{FileSpec, Representation};
pub use manifest::{Answer, AnswerKind, Binding, CaseId, LinearCase, Manifest, Metric, Resources, Structure};

macro_rules! builtin {
    ($($name:literal),* $(,)?) => {
        &[$(($name,
             include_str!(concat!("../../corpus/", $name, ".toml")),
             include_str!(concat!("../../corpus/", $name, ".jns")))),*]
    };
}

/// `(name, manifest, source)` for every built-in case.
pub const BUILTIN: &[(&str, &str, &str)] = builtin!(
    "srch1",
    "srch2",
    "srch3",
    "srch_count",
    "srch_list_garbage",
    "srch_list_reverse",
    "log2ceil",
    "bsrch",
);

/// Source text of a built-in case.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _, _)| *n == name).map(|(_, _, s)| *s)
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{case}: bad manifest: {message}")]
    Manifest { case: String, message: String },
    #[error("{case}: {error}")]
    Parse { case: String, error: ParseError },
    #[error("{case}: {}", errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Check { case: String, errors: Vec<CheckError> },
    #[error("{case}: {message}")]
    Invalid { case: String, message: String },
}

/// A checked corpus program with its manifest.
pub struct Case {
    pub name: String,
    pub manifest: Manifest,
    pub source: String,
    program: CheckedProgram,
    interp: Interpreter,
}

impl fmt::Debug for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Case")
            .field("name", &self.name)
            .field("case_id", &self.manifest.case_id)
            .finish()
    }
}

impl Case {
    pub fn new(name: &str, manifest: Manifest, source: String) -> Result<Case, CorpusError> {
        let invalid = |message: String| CorpusError::Invalid {
            case: name.to_string(),
            message,
        };
        let ast = parse(&source).map_err(|error| CorpusError::Parse {
            case: name.to_string(),
            error,
        })?;
        let program = check(ast).map_err(|errors| CorpusError::Check {
            case: name.to_string(),
            errors,
        })?;
        let proc = program
            .get(&manifest.entry)
            .ok_or_else(|| invalid(format!("no procedure `{}`", manifest.entry)))?;
        manifest
            .roles
            .validate(&proc.params)
            .map_err(|e| invalid(e.to_string()))?;
        if manifest.output().is_none() {
            return Err(invalid("exactly one output parameter is required".into()));
        }
        let params: BTreeSet<&str> = proc.params.iter().map(|p| p.name.as_str()).collect();
        for p in &proc.params {
            let binding = manifest
                .bind
                .get(&p.name)
                .ok_or_else(|| invalid(format!("parameter `{}` has no binding", p.name)))?;
            let kind = match binding {
                Binding::N | Binding::Key | Binding::Zero => ParamKind::Scalar,
                _ => ParamKind::Array,
            };
            if kind != p.kind {
                return Err(invalid(format!("binding {binding:?} does not fit parameter `{}`", p.name)));
            }
        }
        if let Some(extra) = manifest.bind.keys().find(|k| !params.contains(k.as_str())) {
            return Err(invalid(format!("`{extra}` is bound but is not a parameter")));
        }
        let interp = Interpreter::new(&program);
        Ok(Case {
            name: name.to_string(),
            manifest,
            source,
            program,
            interp,
        })
    }

    pub fn program(&self) -> &CheckedProgram {
        &self.program
    }

    pub fn interpreter(&self) -> &Interpreter {
        &self.interp
    }

    pub fn entry(&self) -> &str {
        &self.manifest.entry
    }

    pub fn output(&self) -> &str {
        self.manifest.output().expect("validated on construction")
    }

    /// Initial store for a forward run over `file`.
    pub fn store(&self, file: &FileSpec) -> Store {
        let n = file.n();
        let mut store = Store::new();
        for (name, binding) in &self.manifest.bind {
            let value = match binding {
                Binding::N => Value::Scalar(n as i64),
                Binding::Key => Value::Scalar(file.key),
                Binding::Zero => Value::Scalar(0),
                Binding::Zeros => Value::Array(vec![0; n + 1]),
                Binding::Keys => Value::Array(layout(file, "keys")),
                Binding::Head => Value::Array(layout(file, "head")),
                Binding::Next => Value::Array(layout(file, "next")),
                Binding::Prev => Value::Array(layout(file, "prev")),
            };
            store.set(name, value);
        }
        store
    }

    /// Runs the entry procedure over `file` with the manifest's roles.
    pub fn run(&self, file: &FileSpec) -> Result<Outcome, RunError> {
        self.run_store(self.store(file), Direction::Forward)
    }

    pub fn run_store(&self, store: Store, direction: Direction) -> Result<Outcome, RunError> {
        self.interp.run_with(
            &self.manifest.entry,
            store,
            RunOptions::new(direction).roles(&self.manifest.roles),
        )
    }

    /// The answer an irreversible search gives for `file`.
    pub fn expected(&self, file: &FileSpec) -> Result<i64, UnsortedInput> {
        let lin = || linear_oracle(&file.keys, file.key);
        Ok(match self.manifest.answer {
            Answer::Number => lin().count as i64,
            Answer::Location => lin().first.unwrap_or(file.n()) as i64,
            Answer::Flag => lin().found as i64,
            Answer::BinaryLocation => binary_oracle(&file.keys, file.key)?.map_or(-1, |i| i as i64),
            Answer::Log2ceil => ceil_log2(file.n() as i64),
        })
    }

    /// The answer the program left in its output parameter.
    pub fn answer(&self, outcome: &Outcome) -> Option<i64> {
        outcome.store.scalar(self.output())
    }

    /// A random valid file of length `min_len..=max_n` with keys drawn from
    /// `0..=2n`. `hit` asks for a key that occurs (when the file is
    /// nonempty).
    pub fn random_file(&self, rng: &mut impl Rng, max_n: usize, hit: bool) -> FileSpec {
        let rep = self.manifest.representation;
        let n = rng.gen_range(rep.min_len()..=max_n.max(rep.min_len()));
        let universe = 2 * n as i64 + 1;
        let keys: Vec<i64> = if rep.needs_sorted() {
            let mut ks: Vec<i64> = sample(rng, universe as usize, n)
                .into_iter()
                .map(|i| i as i64)
                .collect();
            ks.sort_unstable();
            ks
        } else {
            (0..n).map(|_| rng.gen_range(0..universe)).collect()
        };
        let key = if hit && n > 0 {
            keys[rng.gen_range(0..n)]
        } else {
            let absent: Vec<i64> = (0..universe).filter(|v| !keys.contains(v)).collect();
            absent[rng.gen_range(0..absent.len())]
        };
        FileSpec::new(rep, keys, key)
    }

    /// Deterministic file of length `n` with keys `0, 2, 4, ...`. A hit puts
    /// the key in the last record; a miss searches for `2n - 1`.
    pub fn probe_file(&self, n: usize, hit: bool) -> FileSpec {
        let keys: Vec<i64> = (0..n as i64).map(|i| 2 * i).collect();
        let key = if hit && n > 0 { 2 * (n as i64 - 1) } else { 2 * n as i64 - 1 };
        FileSpec::new(self.manifest.representation, keys, key)
    }
}

fn layout(file: &FileSpec, name: &str) -> Vec<i64> {
    // The binding was checked against the layout only by kind; an absent
    // array shows up as an empty one and surfaces as a runtime error.
    file.array(name).unwrap_or_default()
}

/// A set of cases.
#[derive(Debug)]
pub struct Corpus {
    cases: Vec<Case>,
}

impl Corpus {
    pub fn builtin() -> Corpus {
        let cases = BUILTIN
            .iter()
            .map(|(name, manifest, source)| {
                let manifest = parse_manifest(name, manifest).expect("built-in manifest");
                Case::new(name, manifest, source.to_string()).expect("built-in case")
            })
            .collect();
        Corpus { cases }
    }

    /// Loads every `*.toml` manifest in `dir`, in file-name order. Sources
    /// are resolved relative to `dir`.
    pub fn load(dir: &Path) -> Result<Corpus, CorpusError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CorpusError::Io { path, source }
        };
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(io(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        let mut cases = Vec::new();
        for path in paths {
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            let manifest = parse_manifest(&name, &text)?;
            let src_path = dir.join(&manifest.source);
            let source = fs::read_to_string(&src_path).map_err(io(&src_path))?;
            cases.push(Case::new(&name, manifest, source)?);
        }
        if cases.is_empty() {
            return Err(CorpusError::Invalid {
                case: dir.display().to_string(),
                message: "no manifests found".into(),
            });
        }
        Ok(Corpus { cases })
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn get(&self, name: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.name == name)
    }
}

fn parse_manifest(name: &str, text: &str) -> Result<Manifest, CorpusError> {
    toml::from_str(text).map_err(|e| CorpusError::Manifest {
        case: name.to_string(),
        message: e.message().to_string(),
    })
}
