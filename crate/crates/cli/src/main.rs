//! Command-line driver.
//!
//! Exit codes: 0 success, 1 verification or operational failure, 2 usage
//! error, 3 internal assertion (an identity the theory guarantees failed).
//!
//! With `--format structured` every invocation emits a single
//! self-describing JSON record; identical inputs and seed produce
//! byte-identical output.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wittlab_core::error::Error;
use wittlab_core::gf::Gf;
use wittlab_core::invar::{self, PsiVector};
use wittlab_core::oring::TruncRing;
use wittlab_core::parse;
use wittlab_core::reglab::{self, ScanMode, ScanReport, WhichModule};
use wittlab_core::suites::{run_all, run_suite, SuiteConfig, SUITE_NAMES};
use wittlab_core::witt::Derivation;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(
    name = "wittlab",
    version,
    about = "Exact computations with derivations of truncated polynomial rings"
)]
struct Cli {
    /// Characteristic p (odd prime)
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Number of variables n
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Field extension degree m
    #[arg(long, global = true)]
    ext: Option<usize>,
    /// Seed for randomized commands (required in structured mode)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the per-configuration sample counts
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Conjugate the input derivation by the automorphisms in this file
    /// (one assignment list per line, applied top to bottom)
    #[arg(long, global = true)]
    apply: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// psi vector, delta, wedge minors and nilpotency of a derivation
    Invariants { expr: String },
    /// Four-way regularity certificate of a derivation
    Regular { expr: String },
    /// Canonicalizing conjugation of a regular derivation
    Canonical { expr: String },
    /// Weight tables of a torus: `t<k>` or semicolon-separated generators
    Weights {
        #[arg(long)]
        torus: String,
    },
    /// Bucket the derivation algebra by the invariant vector
    Fibre {
        /// Comma-separated field digits of the target invariant vector
        #[arg(long)]
        eta: String,
        /// `exhaustive` or `sample`
        #[arg(long, default_value = "exhaustive")]
        mode: String,
    },
    /// Run the verification suites (all, or one by name)
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ShapeViolation | Error::Defect(_) => ExitCode::from(3),
                Error::Syntax { .. }
                | Error::NonPrime(_)
                | Error::SmallCharacteristic(_)
                | Error::BadExtensionDegree(_)
                | Error::ExcludedParameters { .. }
                | Error::FieldTooLarge
                | Error::IndexOutOfRange
                | Error::ContextMismatch => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Error> {
    if cli.trials == Some(0) {
        return Err(Error::Syntax { offset: 0, expected: "--trials of at least 1" });
    }
    match &cli.command {
        Command::Verify { suite } => verify(cli, suite.as_deref()),
        Command::Invariants { expr } => invariants(cli, expr),
        Command::Regular { expr } => regular(cli, expr),
        Command::Canonical { expr } => canonical(cli, expr),
        Command::Weights { torus } => weights(cli, torus),
        Command::Fibre { eta, mode } => fibre(cli, eta, mode),
    }
}

fn make_ring(cli: &Cli) -> Result<TruncRing, Error> {
    let p = cli.p.unwrap_or(5);
    let n = cli.n.unwrap_or(1);
    let m = cli.ext.unwrap_or(1);
    TruncRing::new(Gf::new(p, m)?, n)
}

fn context_json(ring: &TruncRing, cli: &Cli) -> Value {
    json!({
        "schema": "wittlab/1",
        "p": ring.p(),
        "n": ring.n(),
        "m": ring.gf().m(),
        "seed": cli.seed,
    })
}

fn emit(cli: &Cli, record: Value, text: String) {
    use std::io::Write;
    let out = std::io::stdout();
    let mut lock = out.lock();
    let res = match cli.format {
        Format::Structured => writeln!(lock, "{record}"),
        Format::Text => writeln!(lock, "{text}"),
    };
    if res.is_err() {
        // the reader closed the pipe; nothing useful left to report
        std::process::exit(0);
    }
}

/// Seeds are mandatory in structured mode for randomized commands: no
/// wall-clock entropy can enter a reproducible record.
fn require_seed(cli: &Cli) -> Result<u64, Error> {
    match (cli.format, cli.seed) {
        (Format::Structured, None) => Err(Error::Syntax {
            offset: 0,
            expected: "--seed in structured mode",
        }),
        (_, seed) => Ok(seed.unwrap_or(0)),
    }
}

fn psi_json(gf: &Gf, ps: &PsiVector) -> Value {
    Value::Array(
        ps.values()
            .iter()
            .map(|v| Value::String(gf.format_digits(v)))
            .collect(),
    )
}

/// Composite of the automorphisms listed in a file, one assignment list
/// per line (blank lines and `#` comments skipped), applied top to bottom.
fn load_automorphism(
    ring: &TruncRing,
    path: &str,
) -> Result<wittlab_core::autgrp::Automorphism, Error> {
    let text = std::fs::read_to_string(path).map_err(|_| Error::Syntax {
        offset: 0,
        expected: "readable automorphism file",
    })?;
    let mut acc = wittlab_core::autgrp::Automorphism::identity(ring);
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = parse::automorphism_expr(ring, line)?;
        acc = parsed.value.compose(&acc)?;
    }
    Ok(acc)
}

fn input_derivation(cli: &Cli, ring: &TruncRing, expr: &str) -> Result<(Derivation, bool), Error> {
    let parsed = parse::derivation_expr(ring, expr)?;
    let d = match &cli.apply {
        Some(path) => load_automorphism(ring, path)?.act_der(&parsed.value),
        None => parsed.value,
    };
    Ok((d, parsed.truncated))
}

fn invariants(cli: &Cli, expr: &str) -> Result<ExitCode, Error> {
    let ring = make_ring(cli)?;
    let gf = ring.gf();
    let (d, truncated) = input_derivation(cli, &ring, expr)?;
    let ps = invar::psi(&ring, &d)?;
    let dv = invar::delta_minors(&ring, &d)?;
    let nilpotent = d.is_nilpotent(&ring);
    let minors: Vec<String> = dv.minors.iter().map(|v| gf.format_digits(v)).collect();
    let mut record = context_json(&ring, cli);
    record["command"] = json!("invariants");
    record["input"] = json!(d.serialize(&ring));
    record["truncation_warning"] = json!(truncated);
    record["result"] = json!({
        "psi": psi_json(gf, &ps),
        "delta": gf.format_digits(&dv.delta),
        "delta_minors": minors,
        "nilpotent": nilpotent,
    });
    let mut text = String::new();
    text.push_str(&format!("derivation: {}\n", d.format(&ring)));
    if truncated {
        text.push_str("warning: truncation dropped nonzero terms during parsing\n");
    }
    text.push_str(&format!("psi = {}\n", ps.format(gf)));
    text.push_str(&format!("delta = {}\n", gf.format_digits(&dv.delta)));
    text.push_str(&format!(
        "delta_minors = [{}]\n",
        dv.minors
            .iter()
            .map(|v| gf.format_digits(v))
            .collect::<Vec<_>>()
            .join(",")
    ));
    text.push_str(&format!("nilpotent = {nilpotent}"));
    emit(cli, record, text);
    Ok(ExitCode::SUCCESS)
}

fn regular(cli: &Cli, expr: &str) -> Result<ExitCode, Error> {
    let ring = make_ring(cli)?;
    let gf = ring.gf();
    let (d, _truncated) = input_derivation(cli, &ring, expr)?;
    let cert = reglab::certify(&ring, &d)?;
    let mut record = context_json(&ring, cli);
    record["command"] = json!("regular");
    record["input"] = json!(d.serialize(&ring));
    record["result"] = json!({
        "r": cert.r,
        "kernel_dim": cert.kernel_dim,
        "jordan_profile": cert.jordan_profile,
        "dpsi_rank": cert.dpsi_rank,
        "minpoly_degree": cert.minpoly_degree,
        "psi": psi_json(gf, &cert.psi),
        "verdicts": {
            "kernel": cert.v_kernel,
            "jordan": cert.v_jordan,
            "gradient": cert.v_gradient,
            "minpoly": cert.v_minpoly,
        },
        "agree": cert.agree(),
        "consensus": cert.consensus(),
    });
    let text = format!(
        "derivation: {}\nr = {}\nkernel_dim = {}\njordan_profile = {:?}\ndpsi_rank = {}\nminpoly_degree = {}\nverdicts: kernel={} jordan={} gradient={} minpoly={}\nconsensus = {}",
        d.format(&ring),
        cert.r,
        cert.kernel_dim,
        cert.jordan_profile,
        cert.dpsi_rank,
        cert.minpoly_degree,
        cert.v_kernel,
        cert.v_jordan,
        cert.v_gradient,
        cert.v_minpoly,
        cert.consensus(),
    );
    emit(cli, record, text);
    if !cert.agree() {
        return Err(Error::Defect("regularity criteria disagree".into()));
    }
    Ok(ExitCode::SUCCESS)
}

fn canonical(cli: &Cli, expr: &str) -> Result<ExitCode, Error> {
    let ring = make_ring(cli)?;
    let (d, _truncated) = input_derivation(cli, &ring, expr)?;
    let cf = reglab::canonical_form_extending(&ring, &d)?;
    let gf2 = cf.ring.gf();
    let lambda: Vec<String> = cf.lambda.iter().map(|v| gf2.format_digits(v)).collect();
    let mut record = context_json(&ring, cli);
    record["command"] = json!("canonical");
    record["input"] = json!(d.serialize(&ring));
    record["result"] = json!({
        "extension": cf.extension,
        "r": cf.r,
        "eps": cf.eps,
        "lambda": lambda,
        "sigma": cf.sigma.format(),
        "canonical": cf.canonical.serialize(&cf.ring),
    });
    let text = format!(
        "extension = {}\nr = {}\neps = {:?}\nlambda = [{}]\nsigma: {}\ncanonical: {}",
        cf.extension,
        cf.r,
        cf.eps,
        lambda.join(","),
        cf.sigma.format(),
        cf.canonical.format(&cf.ring),
    );
    emit(cli, record, text);
    Ok(ExitCode::SUCCESS)
}

fn weights(cli: &Cli, torus_arg: &str) -> Result<ExitCode, Error> {
    let ring = make_ring(cli)?;
    let torus = if let Some(k) = torus_arg
        .strip_prefix('t')
        .and_then(|s| s.parse::<usize>().ok())
    {
        reglab::standard_torus(&ring, k)?
    } else {
        let gens: Vec<Derivation> = torus_arg
            .split(';')
            .map(|part| parse::derivation_expr(&ring, part.trim()).map(|p| p.value))
            .collect::<Result<_, _>>()?;
        reglab::torus_from_generators(&ring, &gens)?
    };
    let tring = torus.ring();
    let table_o = reglab::weight_table(&torus, WhichModule::Ring);
    let table_l = reglab::weight_table(&torus, WhichModule::Der);
    let entries_json = |t: &reglab::WeightTable| -> Value {
        Value::Array(
            t.entries
                .iter()
                .map(|(w, dim)| json!({ "weight": w, "dim": dim }))
                .collect(),
        )
    };
    let basis: Vec<String> = torus
        .toral_basis()
        .iter()
        .map(|b| b.serialize(tring))
        .collect();
    let mut record = context_json(&ring, cli);
    record["command"] = json!("weights");
    record["result"] = json!({
        "dim": torus.dim(),
        "extension": torus.extension(),
        "toral_basis": basis,
        "ring_weights": entries_json(&table_o),
        "der_weights": entries_json(&table_l),
    });
    let mut text = format!(
        "torus: dim = {}, extension = {}\ntoral basis:\n",
        torus.dim(),
        torus.extension()
    );
    for b in torus.toral_basis() {
        text.push_str(&format!("  {}\n", b.format(tring)));
    }
    text.push_str(&format!("ring weights ({}):\n", table_o.entries.len()));
    for (w, dim) in &table_o.entries {
        text.push_str(&format!("  {w:?} -> dim {dim}\n"));
    }
    text.push_str(&format!(
        "derivation-algebra weights ({}):\n",
        table_l.entries.len()
    ));
    for (w, dim) in &table_l.entries {
        text.push_str(&format!("  {w:?} -> dim {dim}\n"));
    }
    text.pop();
    emit(cli, record, text);
    Ok(ExitCode::SUCCESS)
}

fn scan_json(rep: &ScanReport) -> Value {
    json!({
        "exhaustive": rep.exhaustive,
        "total": rep.total,
        "fibre_count": rep.fibre_count,
        "fibre_regular": rep.fibre_regular,
        "fibre_delta_nonzero": rep.fibre_delta_nonzero,
        "nilpotent_total": rep.nilpotent_total,
        "smooth": rep.smooth,
        "smooth_matches_theorem": rep.smooth_matches_theorem,
        "violations": rep.violations,
        "histogram": Value::Array(
            rep.histogram
                .iter()
                .map(|(k, v)| json!({ "psi": k, "count": v }))
                .collect()
        ),
    })
}

fn fibre(cli: &Cli, eta_arg: &str, mode_arg: &str) -> Result<ExitCode, Error> {
    let ring = make_ring(cli)?;
    let gf = ring.gf();
    let parts: Vec<&str> = eta_arg.split(',').collect();
    if parts.len() != ring.n() {
        return Err(Error::Syntax {
            offset: 0,
            expected: "one field element per psi coordinate",
        });
    }
    let values = parts
        .iter()
        .map(|part| gf.parse_digits(part.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let eta = PsiVector::new(values);
    let mode = match mode_arg {
        "exhaustive" => ScanMode::Exhaustive,
        "sample" => {
            let seed = require_seed(cli)?;
            ScanMode::Sample {
                seed,
                count: cli.trials.unwrap_or(10_000),
            }
        }
        _ => {
            return Err(Error::Syntax {
                offset: 0,
                expected: "mode `exhaustive` or `sample`",
            })
        }
    };
    let rep = reglab::fibre_scan(&ring, &eta, mode)?;
    let mut record = context_json(&ring, cli);
    record["command"] = json!("fibre");
    record["eta"] = json!(eta.format(gf));
    record["result"] = scan_json(&rep);
    let mut text = format!(
        "mode = {}\ntotal = {}\nfibre: count = {}, regular = {}, delta_nonzero = {}\nnilpotent_total = {}\nsmooth = {}\nviolations = {}",
        if rep.exhaustive { "exhaustive" } else { "sample" },
        rep.total,
        rep.fibre_count,
        rep.fibre_regular,
        rep.fibre_delta_nonzero,
        rep.nilpotent_total,
        rep.smooth,
        rep.violations,
    );
    if let Some(m) = rep.smooth_matches_theorem {
        text.push_str(&format!("\nsmooth_matches_theorem = {m}"));
    }
    if !rep.histogram.is_empty() {
        text.push_str("\nhistogram:");
        for (k, v) in &rep.histogram {
            text.push_str(&format!("\n  psi=[{k}] -> {v}"));
        }
    }
    emit(cli, record, text);
    if rep.violations > 0 {
        return Err(Error::Defect(
            "scan found violations of proved implications".into(),
        ));
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(cli: &Cli, suite: Option<&str>) -> Result<ExitCode, Error> {
    let seed = require_seed(cli)?;
    let filter = match (cli.p, cli.n) {
        (Some(p), Some(n)) => Some((p, n, cli.ext)),
        (None, None) => None,
        _ => {
            return Err(Error::Syntax {
                offset: 0,
                expected: "both --p and --n when filtering verify",
            })
        }
    };
    let cfg = SuiteConfig {
        seed,
        filter,
        trials: cli.trials,
    };
    let reports = match suite {
        Some(name) => {
            let rep = run_suite(name, &cfg).ok_or_else(|| {
                eprintln!("available suites: {}", SUITE_NAMES.join(", "));
                Error::Syntax {
                    offset: 0,
                    expected: "a known suite name",
                }
            })?;
            vec![rep]
        }
        None => run_all(&cfg),
    };
    let mut any_fail = false;
    let mut any_defect = false;
    let mut items = Vec::new();
    let mut text = String::new();
    for rep in &reports {
        any_fail |= !rep.passed;
        any_defect |= rep.defect;
        let status = if rep.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status} {}\n", rep.name));
        for line in &rep.lines {
            text.push_str(&format!("    {line}\n"));
        }
        items.push(json!({
            "suite": rep.name,
            "passed": rep.passed,
            "defect": rep.defect,
            "lines": rep.lines,
        }));
    }
    text.push_str(if any_fail {
        "verification FAILED"
    } else {
        "all suites passed"
    });
    let record = json!({
        "schema": "wittlab/1",
        "command": "verify",
        "seed": seed,
        "filter": filter.map(|(p, n, m)| json!({"p": p, "n": n, "m": m})),
        "suites": Value::Array(items),
        "passed": !any_fail,
    });
    emit(cli, record, text);
    if any_defect {
        Ok(ExitCode::from(3))
    } else if any_fail {
        Ok(ExitCode::from(1))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
