//! Acceptance suite. Runs every criterion in order and prints one line per
//! criterion; exits nonzero if any fails.
//!
//! Expected values come from the oracles in `revsearch::oracle`, from small
//! host-level models written here (the range-halving count of the binary
//! search), or from constants frozen after instrumenting the corpus.

use std::cell::RefCell;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revsearch::corpus::{Case, Corpus, FileSpec, Metric, Representation};
use revsearch::fuzz::{random_program, FuzzConfig};
use revsearch::harness::{bench, verify, Check, Status, VerifyOptions};
use revsearch::interp::RunOptions;
use revsearch::metrics::GrowthClass;
use revsearch::oracle::{binary_oracle, ceil_log2, linear_oracle};
use revsearch::{check, invert_procedure, invert_stmts, parse, pretty, Direction, Outcome, RoleManifest, Store};

const SEED: u64 = 20_240_601;
const TRIALS: usize = 1000;
const MAX_N: usize = 512;

/// Literal enumeration bounds that fit a test run; larger files are covered
/// through their behaviour classes (see `criterion_2`).
const LITERAL_LINEAR_N: usize = 5;
const LITERAL_BINARY_N: usize = 7;
const LINEAR_N: usize = 8;
const LINEAR_UNIVERSE: i64 = 8;
const BINARY_N: usize = 64;

/// Auxiliary cells per program, frozen from instrumentation.
const FROZEN_M: [(&str, usize); 4] = [("srch1", 0), ("srch2", 1), ("srch3", 2), ("bsrch", 4)];

const GARBAGE_FREE: [&str; 6] = ["srch1", "srch2", "srch3", "srch_count", "srch_list_reverse", "bsrch"];

struct Ctx {
    corpus: Corpus,
    /// `(runs audited, violations)` for the zero-garbage criterion, fed by
    /// the runs of criteria 1 and 2.
    audit: RefCell<(u64, Vec<String>)>,
}

impl Ctx {
    fn case(&self, name: &str) -> &Case {
        self.corpus.get(name).unwrap_or_else(|| panic!("no case {name}"))
    }

    fn note_garbage(&self, case: &Case, file: &FileSpec, out: &Outcome) {
        if !GARBAGE_FREE.contains(&case.name.as_str()) {
            return;
        }
        let mut audit = self.audit.borrow_mut();
        audit.0 += 1;
        if out.metrics.garbage_cells != 0 || !out.audit.inputs_restored() {
            audit.1.push(format!(
                "{} keys={:?} k={}: G={} unrestored={:?}",
                case.name, file.keys, file.key, out.metrics.garbage_cells, out.audit.unrestored_inputs
            ));
        }
    }
}

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// The answer each search should produce, straight from the oracles.
fn want(case: &str, keys: &[i64], k: i64) -> i64 {
    let lin = linear_oracle(keys, k);
    match case {
        "srch1" | "srch2" | "srch_list_garbage" => lin.first.unwrap_or(keys.len()) as i64,
        "srch3" | "srch_list_reverse" => lin.found as i64,
        "srch_count" => lin.count as i64,
        "bsrch" => binary_oracle(keys, k).expect("sorted input").map_or(-1, |i| i as i64),
        "log2ceil" => ceil_log2(keys.len() as i64),
        other => panic!("no oracle for {other}"),
    }
}

fn run_checked(ctx: &Ctx, case: &Case, file: &FileSpec) -> Result<Outcome, String> {
    let out = case
        .run(file)
        .map_err(|e| format!("{} keys={:?} k={}: {e}", case.name, file.keys, file.key))?;
    let got = case.answer(&out);
    let expected = want(&case.name, &file.keys, file.key);
    ensure!(
        got == Some(expected),
        "{} keys={:?} k={}: answer {got:?}, oracle {expected}",
        case.name,
        file.keys,
        file.key
    );
    ctx.note_garbage(case, file, &out);
    Ok(out)
}

fn criterion_1(ctx: &Ctx) -> Verdict {
    let start = Instant::now();
    let names = [
        "srch1",
        "srch2",
        "srch3",
        "srch_count",
        "srch_list_garbage",
        "srch_list_reverse",
        "log2ceil",
        "bsrch",
    ];
    let (mut hits, mut misses) = (0, 0);
    for (i, name) in names.iter().enumerate() {
        let case = ctx.case(name);
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + i as u64);
        for t in 0..TRIALS {
            let file = case.random_file(&mut rng, MAX_N, t % 2 == 0);
            if file.keys.contains(&file.key) {
                hits += 1;
            } else {
                misses += 1;
            }
            let initial = case.store(&file);
            let out = run_checked(ctx, case, &file)?;
            let back = case
                .run_store(out.store, Direction::Backward)
                .map_err(|e| format!("{name}: backward: {e}"))?;
            ensure!(back.store == initial, "{name} keys={:?} k={}: store not restored", file.keys, file.key);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} programs x {TRIALS} trials restored ({hits} hits, {misses} misses), {:.2}s",
        names.len(),
        elapsed.as_secs_f64()
    ))
}

/// Every array of length `n` over `0..universe`, in lexicographic order.
fn all_arrays(n: usize, universe: i64) -> impl Iterator<Item = Vec<i64>> {
    let total = (universe as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = (code % universe as u64) as i64;
                code /= universe as u64;
                d
            })
            .collect()
    })
}

/// Every strictly increasing array of length `n` drawn from `0..=max`.
fn sorted_subsets(n: usize, max: i64) -> Vec<Vec<i64>> {
    fn go(start: i64, max: i64, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=max - left as i64 + 1 {
            cur.push(v);
            go(v + 1, max, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, max, n, &mut Vec::new(), &mut out);
    out
}

fn same_work(a: &Outcome, b: &Outcome) -> bool {
    a.metrics.input_reads == b.metrics.input_reads
        && a.metrics.steps == b.metrics.steps
        && a.metrics.aux_highwater_cells == b.metrics.aux_highwater_cells
}

/// The linear searches touch keys only through `=` against `k`, so a run
/// depends on the input only through which positions hold `k`. Those
/// equality patterns are enumerated completely for every `n <= 8`, and
/// literal arrays are enumerated completely for `n <= 5` and sampled above
/// that, each sample checked against the run of its pattern.
///
/// The binary search touches keys only through `>` and `!=` against `k`, so
/// on strictly increasing input a run depends only on where `k` falls: on
/// element `j` or in the gap before it. `in[i] = 2i+1` with `k` ranging over
/// `0..=2n` visits every such position for every `n <= 64`; literal sorted
/// arrays are enumerated completely for `n <= 7` and sampled above that.
fn criterion_2(ctx: &Ctx) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let mut literal = 0u64;
    let mut classes = 0u64;
    let mut sampled = 0u64;
    for name in ["srch1", "srch2", "srch3", "srch_count"] {
        let case = ctx.case(name);
        let rep = case.manifest.representation;
        for n in 0..=LITERAL_LINEAR_N {
            for keys in all_arrays(n, LINEAR_UNIVERSE) {
                for k in 0..LINEAR_UNIVERSE {
                    run_checked(ctx, case, &FileSpec::new(rep, keys.clone(), k))?;
                    literal += 1;
                }
            }
        }
        for n in 0..=LINEAR_N {
            for pattern in all_arrays(n, 2) {
                for k in 0..2 {
                    run_checked(ctx, case, &FileSpec::new(rep, pattern.clone(), k))?;
                    classes += 1;
                }
            }
        }
        for n in LITERAL_LINEAR_N + 1..=LINEAR_N {
            for _ in 0..2000 {
                let keys: Vec<i64> = (0..n).map(|_| rng.gen_range(0..LINEAR_UNIVERSE)).collect();
                let k = rng.gen_range(0..LINEAR_UNIVERSE);
                let out = run_checked(ctx, case, &FileSpec::new(rep, keys.clone(), k))?;
                let pattern: Vec<i64> = keys.iter().map(|&x| (x != k) as i64).collect();
                let rep_out = run_checked(ctx, case, &FileSpec::new(rep, pattern, 0))?;
                ensure!(same_work(&out, &rep_out), "{name} keys={keys:?} k={k}: differs from its pattern");
                sampled += 1;
            }
        }
    }

    let case = ctx.case("bsrch");
    let rep = Representation::SortedArray;
    for n in 1..=LITERAL_BINARY_N {
        for keys in sorted_subsets(n, 2 * n as i64) {
            for k in 0..=2 * n as i64 {
                run_checked(ctx, case, &FileSpec::new(rep, keys.clone(), k))?;
                literal += 1;
            }
        }
    }
    for n in 1..=BINARY_N {
        let canonical: Vec<i64> = (0..n as i64).map(|i| 2 * i + 1).collect();
        let reps: Vec<Outcome> = (0..=2 * n as i64)
            .map(|k| run_checked(ctx, case, &FileSpec::new(rep, canonical.clone(), k)))
            .collect::<Result<_, _>>()?;
        classes += reps.len() as u64;
        for _ in 0..10 {
            let mut keys: Vec<i64> = sample(&mut rng, 2 * n + 1, n).into_iter().map(|i| i as i64).collect();
            keys.sort_unstable();
            for k in 0..=2 * n as i64 {
                let out = run_checked(ctx, case, &FileSpec::new(rep, keys.clone(), k))?;
                let below = keys.iter().filter(|&&x| x < k).count() as i64;
                let class = if keys.contains(&k) { 2 * below + 1 } else { 2 * below };
                ensure!(
                    same_work(&out, &reps[class as usize]),
                    "bsrch keys={keys:?} k={k}: differs from its class"
                );
                sampled += 1;
            }
        }
    }
    Ok(format!(
        "100% agreement: {literal} literal inputs (linear n<={LITERAL_LINEAR_N}, binary n<={LITERAL_BINARY_N}), \
         {classes} class representatives (linear n<={LINEAR_N}, binary n<={BINARY_N}), {sampled} sampled inputs matching their class"
    ))
}

fn criterion_3(ctx: &Ctx) -> Verdict {
    let audit = ctx.audit.borrow();
    ensure!(audit.0 > 0, "no runs audited");
    ensure!(audit.1.is_empty(), "{} violations, first: {}", audit.1.len(), audit.1[0]);
    Ok(format!("G=0 and input restored on all {} audited runs of {}", audit.0, GARBAGE_FREE.join(", ")))
}

fn criterion_4(ctx: &Ctx) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut seen = Vec::new();
    for (name, frozen) in FROZEN_M {
        let case = ctx.case(name);
        for n in [8, 64, 512] {
            let mut files = vec![case.probe_file(n, true), case.probe_file(n, false)];
            for _ in 0..20 {
                let rep = case.manifest.representation;
                let mut keys: Vec<i64> = if rep.needs_sorted() {
                    sample(&mut rng, 2 * n + 1, n).into_iter().map(|i| i as i64).collect()
                } else {
                    (0..n).map(|_| rng.gen_range(0..=2 * n as i64)).collect()
                };
                keys.sort_unstable_by_key(|&x| if rep.needs_sorted() { x } else { 0 });
                let k = rng.gen_range(0..=2 * n as i64);
                files.push(FileSpec::new(rep, keys, k));
            }
            // M(n) is the peak over inputs of length n; a hit at the head
            // may finish before any local is allocated
            let mut peak = 0;
            for f in &files {
                let m = case.run(f).map_err(|e| format!("{name}: {e}"))?.metrics.aux_highwater_cells;
                ensure!(m <= frozen, "{name} n={n}: M = {m} above frozen value {frozen}");
                peak = peak.max(m);
            }
            ensure!(peak == frozen, "{name} n={n}: peak M = {peak}, frozen value {frozen}");
        }
        seen.push(format!("{name}={frozen}"));
    }
    Ok(format!("peak M identical at n=8,64,512: {}", seen.join(", ")))
}

/// Reads of the key array made by one halving pass, computed by replaying
/// the range halving on the host: the range starts as `[0, 2^len)` and each
/// of the `len` steps reads the median only when it lies inside the array.
fn halving_reads(keys: &[i64], k: i64) -> u64 {
    let n = keys.len() as i64;
    let len = ceil_log2(n);
    let (mut l, mut u) = (0i64, 1i64 << len);
    let mut reads = 0;
    for _ in 0..len {
        let m = l + (u - l) / 2;
        let high = if m >= n {
            true
        } else {
            reads += 1;
            keys[m as usize] > k
        };
        if high {
            u = m;
        } else {
            l = m;
        }
    }
    reads
}

fn criterion_5(ctx: &Ctx) -> Verdict {
    let case = ctx.case("bsrch");
    let roles = RoleManifest::new(["in", "k", "len"], ["u"]);
    let one_pass = |keys: &[i64], k: i64| -> Result<u64, String> {
        let store = Store::new()
            .with_array("in", keys.to_vec())
            .with_scalar("u", 0)
            .with_scalar("k", k)
            .with_scalar("len", ceil_log2(keys.len() as i64));
        let out = case
            .interpreter()
            .run_with("bsrch1", store, RunOptions::new(Direction::Forward).roles(&roles))
            .map_err(|e| format!("bsrch1: {e}"))?;
        Ok(out.metrics.input_reads)
    };
    let mut inputs: Vec<(Vec<i64>, i64)> = Vec::new();
    for n in 1..=LITERAL_BINARY_N {
        for keys in sorted_subsets(n, 2 * n as i64) {
            for k in 0..=2 * n as i64 {
                inputs.push((keys.clone(), k));
            }
        }
    }
    for n in 1..=MAX_N {
        let canonical: Vec<i64> = (0..n as i64).map(|i| 2 * i + 1).collect();
        for k in 0..=2 * n as i64 {
            inputs.push((canonical.clone(), k));
        }
    }
    let (mut failures, mut successes) = (0, 0);
    for (keys, k) in &inputs {
        let r = one_pass(keys, *k)?;
        let model = halving_reads(keys, *k);
        ensure!(r == model, "keys={keys:?} k={k}: one pass reads {r}, halving model {model}");
        let n = keys.len() as i64;
        let ceil = ceil_log2(n) as u64;
        ensure!(r <= ceil, "n={n}: R={r} above ceil log2 n");
        ensure!(n.count_ones() != 1 || r == ceil, "n={n}: R={r}, expected log2 n");
        let reads = case
            .run(&FileSpec::new(Representation::SortedArray, keys.clone(), *k))
            .map_err(|e| e.to_string())?
            .metrics
            .input_reads;
        if binary_oracle(keys, *k).unwrap().is_some() {
            ensure!(reads == r + 1, "hit keys={keys:?} k={k}: reads {reads}, R={r}");
            successes += 1;
        } else {
            ensure!(reads == 2 * r + 1, "miss keys={keys:?} k={k}: reads {reads}, R={r}");
            failures += 1;
        }
    }
    Ok(format!(
        "reads = 2R+1 on {failures} failures, R+1 on {successes} successes; R equals the halving model, is at most ceil(log2 n) and equals log2 n for powers of two"
    ))
}

fn criterion_6(ctx: &Ctx) -> Verdict {
    let (s2, s3) = (ctx.case("srch2"), ctx.case("srch3"));
    let reads = |case: &Case, keys: &[i64], k: i64| -> Result<i64, String> {
        let f = FileSpec::new(Representation::Dlist, keys.to_vec(), k);
        Ok(case.run(&f).map_err(|e| e.to_string())?.metrics.input_reads as i64)
    };
    let mut checked = 0;
    for n in 0..=64i64 {
        let keys: Vec<i64> = (0..n).map(|i| 2 * i).collect();
        for j in 0..n {
            let (a, b) = (reads(s2, &keys, 2 * j)?, reads(s3, &keys, 2 * j)?);
            ensure!((b - 2 * a).abs() <= 2, "n={n} hit at {j}: srch3 {b}, srch2 {a}");
            ensure!(a == 4 * j + 2 && b == 8 * j + 4, "n={n} hit at {j}: srch2 {a}, srch3 {b}");
            checked += 1;
        }
        let (a, b) = (reads(s2, &keys, 2 * n + 1)?, reads(s3, &keys, 2 * n + 1)?);
        ensure!((b - a).abs() <= 2, "n={n} miss: srch3 {b}, srch2 {a}");
        ensure!(a == 4 * n + 1 && b == 4 * n + 1, "n={n} miss: srch2 {a}, srch3 {b}");
        checked += 1;
    }
    Ok(format!(
        "{checked} inputs: hit at j reads srch2 4j+2, srch3 8j+4 (two scans); miss reads 4n+1 for both (one scan)"
    ))
}

fn criterion_7(ctx: &Ctx) -> Verdict {
    use GrowthClass::*;
    use Metric::*;
    let report = bench(&ctx.corpus, &[8, 64, 512]).map_err(|e| e.to_string())?;
    let cells = [
        ("srch1", AuxHighwaterCells, Constant),
        ("srch2", AuxHighwaterCells, Constant),
        ("srch_count", AuxHighwaterCells, Constant),
        ("srch_count", InputReads, Linear),
        ("srch_list_garbage", GarbageCells, Linear),
        ("srch3", AuxHighwaterCells, Constant),
        ("srch_list_reverse", AuxHighwaterCells, Constant),
        ("bsrch", Steps, Logarithmic),
    ];
    for (program, metric, want) in cells {
        let c = report
            .classification(program, metric)
            .ok_or_else(|| format!("{program}: {metric} not classified"))?;
        ensure!(c.observed == want, "{program} {metric}: {:?}, expected {want:?}", c.observed);
    }
    Ok(format!("{} table cells reproduced at n=8,64,512", cells.len()))
}

fn mutants_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("mutants")
}

fn criterion_8(_: &Ctx) -> Verdict {
    let expectations = [
        ("srch3_no_uncall", Check::Garbage, "garbage_cells"),
        ("bsrch_fi_inverted", Check::RoundTrip, "FiAssertionMismatch"),
        ("srch2_delocal", Check::RoundTrip, "DelocalMismatch"),
    ];
    let opts = VerifyOptions {
        trials: 200,
        seed: SEED,
        max_n: MAX_N,
    };
    for (dir, check, class) in expectations {
        let corpus = Corpus::load(&mutants_dir().join(dir)).map_err(|e| e.to_string())?;
        let report = verify(&corpus, &opts).map_err(|e| e.to_string())?;
        ensure!(!report.passed(), "{dir}: verification passed");
        let verdict = &report.cases[0];
        match verdict.status(check) {
            Status::Fail(msg) if msg.contains(class) => {}
            other => return Err(format!("{dir}: {check} is {other:?}, expected a {class} failure")),
        }
    }
    Ok("3/3 mutants rejected: garbage, FiAssertionMismatch, DelocalMismatch".into())
}

fn criterion_9(ctx: &Ctx) -> Verdict {
    let mut procs = 0;
    for case in ctx.corpus.cases() {
        let parsed = parse(&case.source).map_err(|e| e.to_string())?;
        let printed = pretty(&parsed);
        ensure!(parse(&printed).as_ref() == Ok(&parsed), "{}: print/parse changes the program", case.name);
        ensure!(pretty(&parse(&printed).unwrap()) == printed, "{}: printing is not stable", case.name);
        for p in &parsed.procedures {
            ensure!(invert_stmts(&invert_stmts(&p.body)) == p.body, "{}: double inversion", p.name);
            ensure!(&invert_procedure(&invert_procedure(p)) == p, "{}: double inversion", p.name);
            procs += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    for i in 0..100 {
        let p = random_program(&mut rng, &FuzzConfig::default());
        let checked = check(p.clone()).map_err(|e| format!("fuzz #{i} does not check: {e:?}"))?;
        let program = checked.program();
        ensure!(parse(&pretty(program)).as_ref() == Ok(program), "fuzz #{i}: print/parse\n{}", pretty(program));
        for proc in &program.procedures {
            ensure!(invert_stmts(&invert_stmts(&proc.body)) == proc.body, "fuzz #{i}: double inversion");
        }
    }
    Ok(format!(
        "{} corpus sources, {procs} procedures, 100 generated programs",
        ctx.corpus.cases().len()
    ))
}

fn main() -> ExitCode {
    let ctx = Ctx {
        corpus: Corpus::builtin(),
        audit: RefCell::new((0, Vec::new())),
    };
    let criteria: [(&str, fn(&Ctx) -> Verdict); 9] = [
        ("reversibility round-trip", criterion_1),
        ("oracle equivalence", criterion_2),
        ("zero garbage", criterion_3),
        ("M constancy", criterion_4),
        ("binary traversal asymmetry", criterion_5),
        ("linear flag traversal asymmetry", criterion_6),
        ("growth classification", criterion_7),
        ("assertion witnesses", criterion_8),
        ("parser/inverter structure", criterion_9),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f(&ctx);
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} ({title}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({title}): FAIL [{secs:.1}s] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
