//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Runs without the libtest harness so every line is printed.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use proptest::test_runner::{Config, TestRunner};
use sporadic_core::congruence::{sweep, Delta};
use sporadic_core::decomposition::{build_partition, decompose, Census};
use sporadic_core::laurent::ct_lambda_power;
use sporadic_core::proofsteps::{
    all_grids, grid_l3, lemma_l3, CFunctionArgs, ThirdFactorSign,
};
use sporadic_core::seqdsl::{parse, DslErrorKind, DELTA_SOURCE};
use sporadic_core::sequences::b_term;
use sporadic_core::{a_delta_binomial, a_delta_multinomial, Integer, Prime, Rational, Tuple12};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn prime(p: u64) -> Prime {
    Prime::new(p).expect("prime")
}

fn representation_agreement() -> Outcome {
    for n in 0..=30u64 {
        let b = a_delta_binomial(n);
        let ct = ct_lambda_power(n);
        if b != ct {
            return Err(format!("n = {n}: binomial {b} vs constant term {ct}"));
        }
        if n <= 10 {
            let m = a_delta_multinomial(n);
            if b != m {
                return Err(format!("n = {n}: binomial {b} vs multinomial {m}"));
            }
        }
    }
    Ok("n <= 30 (constant term), n <= 10 (multinomial)".into())
}

fn congruence_sweep() -> Outcome {
    let diff = a_delta_binomial(5) - a_delta_binomial(1);
    if diff != Integer::from(-3000) {
        return Err(format!("A(5) - A(1) = {diff}, expected -3000"));
    }
    let reports = sweep(&Delta::default(), 13, 3, 2, 3).map_err(|e| e.to_string())?;
    if reports.len() != 24 {
        return Err(format!("{} reports, expected 24", reports.len()));
    }
    if let Some(bad) = reports.iter().find(|r| !r.pass) {
        return Err(bad.to_record().to_json_line());
    }
    let largest = reports.iter().map(|r| r.n_hi).max().unwrap_or(0);
    Ok(format!("24 of 24 pass, largest index {largest}"))
}

fn lemma_grids() -> Outcome {
    let grids = all_grids().map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for g in &grids {
        if !g.passed() {
            return Err(format!(
                "{}: {}",
                g.check,
                g.failures[0].to_json_line()
            ));
        }
        parts.push(format!("{} {}", g.check, g.cases));
    }
    Ok(parts.join(", "))
}

fn partition_exactness() -> Outcome {
    let mut parts = Vec::new();
    for p in [5, 7] {
        let census = Census::new(prime(p), 1, 1).map_err(|e| e.to_string())?;
        let classes = build_partition(prime(p), 1, 1).map_err(|e| e.to_string())?;
        let records = census.partition(&classes).map_err(|e| e.to_string())?;
        if let Some(bad) = records.iter().find(|r| !r.passed()) {
            return Err(bad.to_json_line());
        }
        parts.push(format!("p = {p}: {} classes", classes.len()));
    }
    Ok(parts.join(", "))
}

fn pipeline_identities() -> Outcome {
    let wanted = [
        "claim_partial_sum",
        "one2six_equal_sums",
        "reduce_identity",
        "suff",
        "split_identity",
    ];
    let mut total = 0;
    for (p, m, r) in [(5, 1, 1), (7, 1, 1), (5, 2, 1)] {
        let records = decompose(prime(p), m, r).map_err(|e| e.to_string())?;
        if let Some(bad) = records.iter().find(|r| !r.passed()) {
            return Err(bad.to_json_line());
        }
        for name in wanted {
            if !records.iter().any(|r| r.check == name) {
                return Err(format!("({p},{m},{r}): no {name} record"));
            }
        }
        total += records.len();
    }
    Ok(format!("{total} records pass at (5,1,1), (7,1,1), (5,2,1)"))
}

fn divisible_tuples() -> Outcome {
    let t = Tuple12::new([5, 5, 0, 5, 0, 5, 0, 0, 10, 5, 5, 0]).map_err(|e| e.to_string())?;
    let b = b_term(10, &t).map_err(|e| e.to_string())?;
    let anchor = Integer::from(252).pow(3u32);
    if b != anchor || &b % 125 != Integer::from(8) {
        return Err(format!("B = {b}"));
    }
    let mut parts = Vec::new();
    for m in [1, 2] {
        let census = Census::new(prime(5), m, 1).map_err(|e| e.to_string())?;
        let rec = census.prop_first_all().remove(0);
        if !rec.passed() {
            return Err(rec.to_json_line());
        }
        parts.push(format!("U({}): {} tuples", 5 * m, rec.params["divisible_tuples"]));
    }
    Ok(parts.join(", "))
}

fn sign_toggle() -> Outcome {
    let args = CFunctionArgs::new([0; 12], 5, Rational::from_integer(Integer::from(2)));
    let minus = lemma_l3(prime(5), 1, &args, ThirdFactorSign::Minus).map_err(|e| e.to_string())?;
    if minus.passed() {
        return Err("minus reading passed at (p=5, s=1, l=0, n=5, x=2)".into());
    }
    let plus = lemma_l3(prime(5), 1, &args, ThirdFactorSign::Plus).map_err(|e| e.to_string())?;
    if !plus.passed() {
        return Err(plus.to_json_line());
    }
    let grid = grid_l3(ThirdFactorSign::Plus).map_err(|e| e.to_string())?;
    if !grid.passed() {
        return Err(grid.failures[0].to_json_line());
    }
    Ok(format!("minus fails at the instance, plus passes {} cases", grid.cases))
}

fn dsl_fidelity() -> Outcome {
    let def = parse(DELTA_SOURCE).map_err(|e| e.to_string())?;
    for n in 0..=30u64 {
        let v = def.evaluate(n).map_err(|e| e.to_string())?;
        if v != a_delta_binomial(n) {
            return Err(format!("n = {n}: {v}"));
        }
    }
    let malformed = [
        ("seq bad(n) = sum(k = 0 ..", DslErrorKind::Syntax),
        ("seq bad(n) = sum(k = 0 .. n) k @ 2", DslErrorKind::Lexical),
        ("seq bad(n) = sum(k = 0 .. n) q", DslErrorKind::UnknownIdentifier),
    ];
    for (src, kind) in malformed {
        match parse(src) {
            Err(e) if e.kind == kind && e.position.is_some() => {}
            other => return Err(format!("{src:?}: {other:?}")),
        }
    }
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&common::definition(), |d| {
            let text = d.roundtrip();
            let back = parse(&text).map_err(|e| {
                proptest::test_runner::TestCaseError::fail(format!("{text}: {e}"))
            })?;
            proptest::prop_assert_eq!(back, d);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("n <= 30 agree, 3 diagnostics positioned, 1000 round trips".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("representation triple-agreement", representation_agreement),
        ("supercongruence sweep p <= 13, m <= 3, r <= 2", congruence_sweep),
        ("lemma grids", lemma_grids),
        ("partition exactness", partition_exactness),
        ("decomposition pipeline identities", pipeline_identities),
        ("divisible tuples reduce", divisible_tuples),
        ("third-factor sign toggle", sign_toggle),
        ("sequence text format fidelity", dsl_fidelity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
