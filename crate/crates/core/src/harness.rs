//! Property checks and growth measurements over a corpus.
//!
//! `verify` runs seeded random trials per case and reports, for each case,
//! whether printing/parsing and double inversion are identities, whether
//! forward-then-backward restores the store, whether answers agree with the
//! oracles, whether runs leave no garbage, and whether auxiliary memory is
//! independent of the file length. `bench` runs every case over fixed probe
//! files at several sizes and classifies how each metric grows.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Case, CaseId, Corpus, FileSpec, Metric, Representation};
use crate::interp::{Direction, Outcome, RunError};
use crate::invert::invert_stmts;
use crate::metrics::{classify_growth, GrowthClass, MetricsError, MetricsReport, REPORT_SCHEMA_VERSION};
use crate::syntax::{parse, pretty};

/// Sizes at which auxiliary memory must agree.
pub const MEMORY_SIZES: [usize; 3] = [8, 64, 512];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("trials must be positive")]
    NoTrials,
    #[error("{case}: n={n}: {error}")]
    Run { case: String, n: usize, error: RunError },
    #[error("{case}: {metric}: {error}")]
    Classify {
        case: String,
        metric: Metric,
        error: MetricsError,
    },
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Largest random file length.
    pub max_n: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1000,
            seed: 0,
            max_n: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    PrintParse,
    Involution,
    RoundTrip,
    Oracle,
    Garbage,
    Memory,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::PrintParse,
        Check::Involution,
        Check::RoundTrip,
        Check::Oracle,
        Check::Garbage,
        Check::Memory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::PrintParse => "print-parse",
            Check::Involution => "involution",
            Check::RoundTrip => "round-trip",
            Check::Oracle => "oracle",
            Check::Garbage => "garbage",
            Check::Memory => "memory",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "lowercase")]
pub enum Status {
    Pass,
    /// First failure seen, and how many trials failed.
    Fail(String),
    /// The manifest does not ask for this check.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseVerdict {
    pub case: String,
    pub case_id: CaseId,
    pub checks: Vec<(Check, Status)>,
}

impl CaseVerdict {
    pub fn status(&self, check: Check) -> &Status {
        &self.checks.iter().find(|(c, _)| *c == check).expect("every check is recorded").1
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, s)| !matches!(s, Status::Fail(_)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub cases: Vec<CaseVerdict>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseVerdict::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, Check, &str)> {
        self.cases.iter().flat_map(|v| {
            v.checks.iter().filter_map(move |(c, s)| match s {
                Status::Fail(msg) => Some((v.case.as_str(), *c, msg.as_str())),
                _ => None,
            })
        })
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.cases.iter().map(|c| c.case.len()).max().unwrap_or(4).max(4);
        write!(f, "{:width$}  {:9}", "case", "id")?;
        for c in Check::ALL {
            write!(f, "  {:11}", c.name())?;
        }
        writeln!(f)?;
        for v in &self.cases {
            write!(f, "{:width$}  {:9}", v.case, v.case_id.to_string())?;
            for (_, s) in &v.checks {
                let cell = match s {
                    Status::Pass => "pass",
                    Status::Fail(_) => "FAIL",
                    Status::Skipped => "-",
                };
                write!(f, "  {cell:11}")?;
            }
            writeln!(f)?;
        }
        for (case, check, msg) in self.failures() {
            writeln!(f, "{case}: {check}: {msg}")?;
        }
        let verdict = if self.passed() { "all checks passed" } else { "FAILED" };
        write!(f, "{} cases, {} trials each, seed {}: {verdict}", self.cases.len(), self.trials, self.seed)
    }
}

/// Tallies failures of one check across trials, keeping the first message.
#[derive(Default)]
struct Tally {
    failed: usize,
    first: Option<String>,
}

impl Tally {
    fn fail(&mut self, msg: impl FnOnce() -> String) {
        self.failed += 1;
        if self.first.is_none() {
            self.first = Some(msg());
        }
    }

    fn status(self, trials: usize) -> Status {
        match self.first {
            None => Status::Pass,
            Some(m) => Status::Fail(format!("{m} ({} of {trials} trials)", self.failed)),
        }
    }
}

fn describe(file: &FileSpec) -> String {
    format!("n={} key={}", file.n(), file.key)
}

pub fn verify(corpus: &Corpus, opts: &VerifyOptions) -> Result<VerifyReport, HarnessError> {
    if opts.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let cases = corpus
        .cases()
        .iter()
        .enumerate()
        .map(|(i, case)| verify_case(case, opts, opts.seed.wrapping_add(i as u64)))
        .collect();
    Ok(VerifyReport {
        seed: opts.seed,
        trials: opts.trials,
        cases,
    })
}

fn verify_case(case: &Case, opts: &VerifyOptions, seed: u64) -> CaseVerdict {
    let program = case.program().program();
    let print_parse = match parse(&pretty(program)) {
        Ok(p) if &p == program => Status::Pass,
        Ok(_) => Status::Fail("reparsed program differs".into()),
        Err(e) => Status::Fail(format!("printed program does not parse: {e}")),
    };
    let involution = match program
        .procedures
        .iter()
        .find(|p| invert_stmts(&invert_stmts(&p.body)) != p.body)
    {
        None => Status::Pass,
        Some(p) => Status::Fail(format!("double inversion changes `{}`", p.name)),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut round_trip, mut oracle, mut garbage) = (Tally::default(), Tally::default(), Tally::default());
    for t in 0..opts.trials {
        let file = case.random_file(&mut rng, opts.max_n, t % 2 == 0);
        let start = case.store(&file);
        let out = match case.run_store(start.clone(), Direction::Forward) {
            Ok(out) => out,
            Err(e) => {
                let msg = || format!("{}: forward run failed: {e}", describe(&file));
                round_trip.fail(msg);
                oracle.fail(msg);
                garbage.fail(msg);
                continue;
            }
        };
        match case.expected(&file) {
            Ok(want) if case.answer(&out) == Some(want) => {}
            Ok(want) => oracle.fail(|| {
                format!("{}: expected {} = {want}, got {:?}", describe(&file), case.output(), case.answer(&out))
            }),
            Err(e) => oracle.fail(|| format!("{}: {e}", describe(&file))),
        }
        if case.manifest.garbage_free && (out.metrics.garbage_cells != 0 || !out.audit.inputs_restored()) {
            garbage.fail(|| {
                format!(
                    "{}: garbage_cells = {}, unrestored inputs {:?}",
                    describe(&file),
                    out.metrics.garbage_cells,
                    out.audit.unrestored_inputs
                )
            });
        }
        match case.run_store(out.store, Direction::Backward) {
            Ok(back) if back.store == start => {}
            Ok(back) => round_trip.fail(|| format!("{}: backward run ended in\n{}", describe(&file), back.store)),
            Err(e) => round_trip.fail(|| format!("{}: backward run failed: {e}", describe(&file))),
        }
    }
    let garbage = if case.manifest.garbage_free {
        garbage.status(opts.trials)
    } else {
        Status::Skipped
    };
    let memory = if case.manifest.constant_memory {
        memory_status(case)
    } else {
        Status::Skipped
    };
    CaseVerdict {
        case: case.name.clone(),
        case_id: case.manifest.case_id,
        checks: vec![
            (Check::PrintParse, print_parse),
            (Check::Involution, involution),
            (Check::RoundTrip, round_trip.status(opts.trials)),
            (Check::Oracle, oracle.status(opts.trials)),
            (Check::Garbage, garbage),
            (Check::Memory, memory),
        ],
    }
}

fn memory_status(case: &Case) -> Status {
    let mut seen = Vec::new();
    for n in MEMORY_SIZES {
        for hit in [false, true] {
            match case.run(&case.probe_file(n, hit)) {
                Ok(out) => seen.push((n, out.metrics.aux_highwater_cells)),
                Err(e) => return Status::Fail(format!("n={n}: {e}")),
            }
        }
    }
    if seen.iter().all(|(_, m)| *m == seen[0].1) {
        Status::Pass
    } else {
        Status::Fail(format!("aux_highwater_cells varies with n: {seen:?}"))
    }
}

/// Growth of one metric of one case over failing searches.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub program: String,
    pub case_id: String,
    pub metric: Metric,
    pub observed: GrowthClass,
    pub expected: Option<GrowthClass>,
}

impl Classification {
    pub fn matches(&self) -> bool {
        self.expected.map_or(true, |e| e == self.observed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub sizes: Vec<usize>,
    pub runs: Vec<MetricsReport>,
    pub classifications: Vec<Classification>,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.classifications.iter().all(Classification::matches)
    }

    pub fn classification(&self, program: &str, metric: Metric) -> Option<&Classification> {
        self.classifications
            .iter()
            .find(|c| c.program == program && c.metric == metric)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:18}  {:9}  {:20}  {:12}  expected", "case", "id", "metric", "observed")?;
        for c in &self.classifications {
            let expected = match c.expected {
                None => "-".to_string(),
                Some(e) if e == c.observed => format!("{e:?}").to_lowercase(),
                Some(e) => format!("{} MISMATCH", format!("{e:?}").to_lowercase()),
            };
            writeln!(
                f,
                "{:18}  {:9}  {:20}  {:12}  {expected}",
                c.program,
                c.case_id,
                c.metric.name(),
                format!("{:?}", c.observed).to_lowercase(),
            )?;
        }
        write!(f, "sizes {:?}: {}", self.sizes, if self.passed() { "all expectations met" } else { "FAILED" })
    }
}

/// Label of a run outcome in reports. Files for the size-only layout have
/// no key to miss, so they are reported as `complete`.
fn outcome_label(case: &Case, hit: bool) -> &'static str {
    match (case.manifest.representation, hit) {
        (Representation::Size, _) => "complete",
        (_, true) => "success",
        (_, false) => "failure",
    }
}

pub fn bench(corpus: &Corpus, sizes: &[usize]) -> Result<BenchReport, HarnessError> {
    let mut runs = Vec::new();
    let mut classifications = Vec::new();
    for case in corpus.cases() {
        let hits: &[bool] = if case.manifest.representation == Representation::Size {
            &[false]
        } else {
            &[false, true]
        };
        let mut failures: Vec<(u64, Outcome)> = Vec::new();
        for &n in sizes {
            for &hit in hits {
                let out = case.run(&case.probe_file(n, hit)).map_err(|error| HarnessError::Run {
                    case: case.name.clone(),
                    n,
                    error,
                })?;
                runs.push(MetricsReport {
                    schema_version: REPORT_SCHEMA_VERSION,
                    program: case.name.clone(),
                    n: n as u64,
                    case_id: case.manifest.case_id.to_string(),
                    direction: Direction::Forward,
                    input_reads: out.metrics.input_reads,
                    aux_highwater_cells: out.metrics.aux_highwater_cells,
                    garbage_cells: out.metrics.garbage_cells,
                    steps: out.metrics.steps,
                    outcome: outcome_label(case, hit).to_string(),
                });
                if !hit {
                    failures.push((n as u64, out));
                }
            }
        }
        for metric in Metric::ALL {
            let samples: Vec<(u64, f64)> = failures
                .iter()
                .map(|(n, out)| (*n, metric.of(&out.metrics) as f64))
                .collect();
            let observed = classify_growth(&samples).map_err(|error| HarnessError::Classify {
                case: case.name.clone(),
                metric,
                error,
            })?;
            classifications.push(Classification {
                program: case.name.clone(),
                case_id: case.manifest.case_id.to_string(),
                metric,
                observed,
                expected: case.manifest.expect.get(&metric).copied(),
            });
        }
    }
    Ok(BenchReport {
        schema_version: REPORT_SCHEMA_VERSION,
        sizes: sizes.to_vec(),
        runs,
        classifications,
    })
}
