//! `revsearch`: run, invert, check, verify and benchmark reversible programs.
//!
//! Exit codes: 0 on success, 1 when a program faults at run time or a
//! verification/benchmark expectation fails, 2 on parse, check, binding or
//! usage errors.

mod bind;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use revsearch::corpus::Corpus;
use revsearch::harness::{self, HarnessError, VerifyOptions};
use revsearch::interp::{RunOptions, TraceLog};
use revsearch::syntax::pretty_procedure;
use revsearch::{check, invert_procedure, parse, CheckedProgram, Direction, Interpreter, RoleManifest, RunError, Store};
use serde_json::json;

#[derive(Parser)]
#[command(name = "revsearch", version, about = "Reversible search programs: run, invert, check, verify, bench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a procedure forward or backward and print the final store
    Run(RunArgs),
    /// Print the inverse of a procedure
    Invert {
        file: PathBuf,
        #[arg(long = "proc")]
        proc_name: String,
    },
    /// Parse and statically check a program
    Check { file: PathBuf },
    /// Run the property suite over a corpus and print a pass/fail table
    Verify {
        /// Directory of `.toml` manifests and `.jns` sources; the built-in
        /// corpus when omitted
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 512)]
        max_n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Measure every case at several sizes and classify metric growth
    Bench {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "8,64,512")]
        sizes: Vec<usize>,
        /// Write the JSON report here (`-` for standard output)
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    #[arg(long)]
    entry: String,
    #[arg(long, default_value = "forward")]
    dir: Direction,
    /// `name=value` or `name=[v,...]`
    #[arg(long = "bind", value_parser = bind::parse_binding)]
    binds: Vec<(String, revsearch::Value)>,
    /// TOML file naming input/output/garbage parameters; either a corpus
    /// case manifest or a bare `input`/`output`/`garbage` table
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Print an execution trace to standard error
    #[arg(long)]
    trace: bool,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn fault(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Invert { file, proc_name } => cmd_invert(&file, &proc_name),
        Command::Check { file } => cmd_check(&file),
        Command::Verify {
            corpus,
            trials,
            seed,
            max_n,
            json,
        } => cmd_verify(corpus.as_deref(), VerifyOptions { trials, seed, max_n }, json),
        Command::Bench { corpus, sizes, json } => cmd_bench(corpus.as_deref(), &sizes, json.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn load(file: &Path) -> Result<CheckedProgram, Failure> {
    let src = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))
        .map_err(usage)?;
    let ast = parse(&src).map_err(|e| usage(anyhow!("{}:{e}", file.display())))?;
    check(ast).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| format!("{}:{e}", file.display())).collect();
        usage(anyhow!("{}", lines.join("\n")))
    })
}

fn load_roles(path: &Path) -> Result<RoleManifest, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    let value: toml::Table = toml::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)?;
    let table = match value.get("roles") {
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => return Err(usage(anyhow!("{}: `roles` must be a table", path.display()))),
        None => value,
    };
    table
        .try_into()
        .with_context(|| format!("reading roles from {}", path.display()))
        .map_err(usage)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let program = load(&args.file)?;
    let roles = args.metrics.as_deref().map(load_roles).transpose()?;
    let store: Store = args.binds.into_iter().collect();
    let interp = Interpreter::new(&program);
    let mut log = TraceLog::default();
    let mut opts = RunOptions::new(args.dir);
    if let Some(r) = &roles {
        opts = opts.roles(r);
    }
    if args.trace {
        opts = opts.observer(&mut log);
    }
    let result = interp.run_with(&args.entry, store, opts);
    for line in &log.lines {
        eprintln!("{line}");
    }
    let out = result.map_err(|e| match e {
        RunError::Runtime(_) => fault(e),
        other => usage(other),
    })?;
    // M, G and input reads depend on the roles; without a manifest only the
    // step count means anything
    if args.json {
        let mut report = json!({
            "entry": args.entry,
            "direction": args.dir,
            "store": out.store,
            "steps": out.metrics.steps,
        });
        if roles.is_some() {
            report["metrics"] = json!(out.metrics);
            report["unrestored_inputs"] = json!(out.audit.unrestored_inputs);
        }
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        println!("{}", out.store);
        let m = out.metrics;
        if roles.is_some() {
            println!(
                "-- input_reads = {}, aux_highwater_cells = {}, garbage_cells = {}, steps = {}",
                m.input_reads, m.aux_highwater_cells, m.garbage_cells, m.steps
            );
        } else {
            println!("-- steps = {}", m.steps);
        }
    }
    Ok(())
}

fn cmd_invert(file: &Path, name: &str) -> Result<(), Failure> {
    let program = load(file)?;
    let proc = program
        .get(name)
        .ok_or_else(|| usage(anyhow!("no procedure `{name}` in {}", file.display())))?;
    print!("{}", pretty_procedure(&invert_procedure(proc)));
    Ok(())
}

fn cmd_check(file: &Path) -> Result<(), Failure> {
    let program = load(file)?;
    let names: Vec<&str> = program.names().collect();
    println!("ok: {}", names.join(", "));
    Ok(())
}

fn corpus(dir: Option<&Path>) -> Result<Corpus, Failure> {
    match dir {
        None => Ok(Corpus::builtin()),
        Some(d) => Corpus::load(d).map_err(usage),
    }
}

fn cmd_verify(dir: Option<&Path>, opts: VerifyOptions, json: bool) -> Result<(), Failure> {
    let corpus = corpus(dir)?;
    let report = harness::verify(&corpus, &opts).map_err(|e| match e {
        HarnessError::NoTrials => usage(e),
        other => fault(other),
    })?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        println!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<String> = report.failures().map(|(c, check, _)| format!("{c}/{check}")).collect();
        Err(fault(anyhow!("verification failed: {}", failed.join(", "))))
    }
}

fn cmd_bench(dir: Option<&Path>, sizes: &[usize], json: Option<&Path>) -> Result<(), Failure> {
    let corpus = corpus(dir)?;
    let report = harness::bench(&corpus, sizes).map_err(|e| match e {
        HarnessError::Run { .. } => fault(e),
        other => usage(other),
    })?;
    match json {
        Some(p) if p == Path::new("-") => {
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        }
        Some(p) => {
            let text = serde_json::to_string_pretty(&report).expect("serializable");
            fs::write(p, text + "\n")
                .with_context(|| format!("writing {}", p.display()))
                .map_err(usage)?;
            println!("{report}");
        }
        None => println!("{report}"),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(fault(anyhow!("growth classifications differ from the manifests")))
    }
}
