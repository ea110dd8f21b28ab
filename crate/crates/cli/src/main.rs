//! `sporadic-forge`: compute A_δ, cross-check its representations, and run
//! the supercongruence, lemma and decomposition verifiers.
//!
//! Exit status: 0 when every emitted verdict is pass, 1 when some check
//! fails, 2 on usage or validation errors.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use sporadic_core::congruence::{check_supercongruence, sweep, CongruenceParams, Delta, Sequence};
use sporadic_core::decomposition::decompose;
use sporadic_core::laurent::ct_lambda_power;
use sporadic_core::proofsteps::{
    easier_identity, grid_easier, grid_har, grid_jg, grid_l1, grid_l2, grid_l3, grid_reduce3,
    lemma_har, lemma_jg, lemma_l1, lemma_l2, lemma_l3, reduce3_chain, CFunctionArgs,
    ThirdFactorSign,
};
use sporadic_core::seqdsl::SequenceDef;
use sporadic_core::{
    a_delta, a_delta_binomial, a_delta_multinomial, CheckRecord, Prime, Rational, Representation,
};

use output::{Emitter, OutputMode};

const JOBS_ENV: &str = "SPORADIC_FORGE_JOBS";

#[derive(Parser, Debug)]
#[command(name = "sporadic-forge", version, about = "Exact verifiers for the A_delta supercongruence")]
struct Cli {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = OutputMode::Table, global = true)]
    output: OutputMode,

    /// Worker threads (default: available parallelism). SPORADIC_FORGE_JOBS overrides.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate A_delta(n).
    Compute(ComputeArgs),
    /// Check that the three representations agree for n <= n-max.
    Crosscheck(CrosscheckArgs),
    /// Check A(mp^r) = A(mp^(r-1)) mod p^(lambda r) at one (p, m, r).
    Verify(VerifyArgs),
    /// Run the congruence check over a parameter box.
    Sweep(SweepArgs),
    /// Run one lemma verifier, or a whole grid.
    #[command(subcommand)]
    Lemma(LemmaCommand),
    /// Exhaustive decomposition checks at small (p, m, r).
    Decompose(DecomposeArgs),
    /// Evaluate a sequence definition file.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
    n: Option<u64>,
    /// Evaluate every n from 0 to this bound.
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long, default_value = "binomial")]
    representation: Representation,
}

#[derive(Args, Debug)]
struct CrosscheckArgs {
    #[arg(long, default_value_t = 10)]
    n_max: u64,
    /// Largest n for the multinomial sum, which grows like n^5.
    #[arg(long, default_value_t = 12)]
    budget: u64,
}

/// `delta` or a path to a `.seq` file.
#[derive(Args, Debug)]
struct SeqArg {
    #[arg(long = "seq", default_value = "delta")]
    seq: String,
    /// Exponent multiplier; required for sequences loaded from files.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    lambda: Option<u32>,
    /// Representation used for delta.
    #[arg(long, default_value = "binomial")]
    representation: Representation,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    seq: SeqArg,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    r: u32,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    seq: SeqArg,
    #[arg(long, default_value_t = 13)]
    p_max: u64,
    #[arg(long, default_value_t = 3)]
    m_max: u64,
    #[arg(long, default_value_t = 2)]
    r_max: u32,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    m: i64,
    #[arg(long)]
    r: u32,
    /// Largest mp^r to enumerate.
    #[arg(long, default_value_t = 10)]
    budget: i64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, conflicts_with = "n_max", required_unless_present = "n_max")]
    n: Option<u64>,
    #[arg(long)]
    n_max: Option<u64>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Sign {
    Plus,
    Minus,
}

impl From<Sign> for ThirdFactorSign {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Plus => ThirdFactorSign::Plus,
            Sign::Minus => ThirdFactorSign::Minus,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GridName {
    All,
    Jg,
    Easier,
    Har,
    L1,
    L2,
    L3,
    Reduce3,
}

#[derive(Subcommand, Debug)]
enum LemmaCommand {
    /// binomial(mp^r, kp^r) / binomial(mp^(r-s), kp^(r-s)) = 1 mod p^(3s).
    Jg {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
    },
    /// The exact quotient identity behind jg, for p not dividing k.
    Easier {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        s: u32,
    },
    /// Alternating inverse-square sum over units below p^s vanishes mod p^s.
    Har {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
    },
    L1 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        s: u32,
    },
    L2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        ell: i64,
        #[arg(long)]
        s: u32,
    },
    /// C(l, n, x) = C(l/p^s, n/p^s, x/p^s) mod p^(2s).
    #[command(alias = "choose")]
    L3 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
        /// Twelve comma-separated components.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        ell: Vec<i64>,
        #[arg(long)]
        n: i64,
        /// Rational, e.g. 3 or 7/5.
        #[arg(long)]
        x: Rational,
        #[arg(long, value_enum, default_value_t = Sign::Plus)]
        sign: Sign,
    },
    /// The descent of the reduced inner sum from level s to level t.
    Reduce3 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, value_delimiter = ',')]
        ell: Vec<i64>,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        r: u32,
    },
    /// A standard parameter grid.
    Grid {
        #[arg(value_enum, default_value_t = GridName::All)]
        name: GridName,
        /// Sign reading for the l3 grid.
        #[arg(long, value_enum, default_value_t = Sign::Plus)]
        sign: Sign,
        /// Also emit each failing case before the summary.
        #[arg(long)]
        detail: bool,
    },
}

/// Failures before any check runs: bad flags or values.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Run = Result<(), Usage>;

fn prime(p: u64) -> Result<Prime, Usage> {
    let prime = Prime::new(p)?;
    if p < 5 {
        return Err(Usage(format!("p must be a prime >= 5, got {p}")));
    }
    Ok(prime)
}

fn twelve(v: &[i64]) -> Result<[i64; 12], Usage> {
    <[i64; 12]>::try_from(v).map_err(|_| Usage(format!("ell needs 12 components, got {}", v.len())))
}

fn configure_jobs(flag: Option<usize>) -> Result<(), Usage> {
    let jobs = match std::env::var(JOBS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Usage(format!("{JOBS_ENV} must be a positive integer, got '{v}'")))?,
        ),
        Err(_) => flag,
    };
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Usage("jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn load_sequence(arg: &SeqArg) -> Result<(Box<dyn Sequence>, u32), Usage> {
    if arg.seq == "delta" {
        let seq = Delta::new(arg.representation);
        let lambda = arg.lambda.or(seq.default_lambda()).expect("delta has a default");
        return Ok((Box::new(seq), lambda));
    }
    let def = SequenceDef::from_file(&PathBuf::from(&arg.seq))?;
    let lambda = arg.lambda.ok_or_else(|| {
        Usage(format!("--lambda is required for {} (2 or 3)", arg.seq))
    })?;
    Ok((Box::new(def), lambda))
}

fn value_record(check: &str, n: u64, value: impl ToString) -> CheckRecord {
    CheckRecord::new(check)
        .param("n", n)
        .observed(value.to_string())
        .verdict(true)
}

fn indices(n: Option<u64>, n_max: Option<u64>) -> Vec<u64> {
    match (n, n_max) {
        (Some(n), _) => vec![n],
        (None, Some(hi)) => (0..=hi).collect(),
        (None, None) => Vec::new(),
    }
}

fn run_compute(args: ComputeArgs, out: &mut Emitter) -> Run {
    let ns = indices(args.n, args.n_max);
    let values: Vec<_> = ns.par_iter().map(|&n| (n, a_delta(n, args.representation))).collect();
    for (n, v) in values {
        out.emit(value_record("a_delta", n, v).param("representation", args.representation.name()));
    }
    Ok(())
}

fn run_crosscheck(args: CrosscheckArgs, out: &mut Emitter) -> Run {
    let rows: Vec<CheckRecord> = (0..=args.n_max)
        .into_par_iter()
        .map(|n| {
            let b = a_delta_binomial(n);
            let ct = ct_lambda_power(n);
            let mut observed = json!({ "binomial": b.to_string(), "constant-term": ct.to_string() });
            let mut agree = b == ct;
            if n <= args.budget {
                let m = a_delta_multinomial(n);
                agree &= m == b;
                observed["multinomial"] = json!(m.to_string());
            }
            CheckRecord::new("crosscheck")
                .param("n", n)
                .observed(observed)
                .required("all equal")
                .verdict(agree)
        })
        .collect();
    out.extend(rows);
    Ok(())
}

fn run_verify(args: VerifyArgs, out: &mut Emitter) -> Run {
    prime(args.p)?;
    let (seq, lambda) = load_sequence(&args.seq)?;
    let params = CongruenceParams::new(args.p, args.m, args.r, lambda)?;
    let report = check_supercongruence(seq.as_ref(), params)?;
    out.emit(report.to_record());
    Ok(())
}

fn run_sweep(args: SweepArgs, out: &mut Emitter) -> Run {
    if args.m_max < 1 || args.r_max < 1 {
        return Err(Usage("--m-max and --r-max must be at least 1".into()));
    }
    let (seq, lambda) = load_sequence(&args.seq)?;
    let reports = sweep(seq.as_ref(), args.p_max, args.m_max, args.r_max, lambda)?;
    out.extend(reports.iter().map(|r| r.to_record()));
    Ok(())
}

fn run_lemma(cmd: LemmaCommand, out: &mut Emitter) -> Run {
    let rec = match cmd {
        LemmaCommand::Jg { p, m, k, r, s } => lemma_jg(prime(p)?, m, k, r, s)?,
        LemmaCommand::Easier { p, m, k, r, s } => easier_identity(prime(p)?, m, k, r, s)?,
        LemmaCommand::Har { p, s } => lemma_har(prime(p)?, s)?,
        LemmaCommand::L1 { p, m, k, s } => lemma_l1(prime(p)?, m, k, s)?,
        LemmaCommand::L2 { p, m, k, ell, s } => lemma_l2(prime(p)?, m, k, ell, s)?,
        LemmaCommand::L3 { p, s, ell, n, x, sign } => {
            let args = CFunctionArgs::new(twelve(&ell)?, n, x);
            lemma_l3(prime(p)?, s, &args, sign.into())?
        }
        LemmaCommand::Reduce3 { p, s, t, ell, m, r } => {
            reduce3_chain(prime(p)?, s, t, &twelve(&ell)?, m, r)?
        }
        LemmaCommand::Grid { name, sign, detail } => {
            let sign = ThirdFactorSign::from(sign);
            let grids = match name {
                GridName::All => vec![
                    grid_jg()?,
                    grid_easier()?,
                    grid_har()?,
                    grid_l1()?,
                    grid_l2()?,
                    grid_l3(sign)?,
                    grid_reduce3()?,
                ],
                GridName::Jg => vec![grid_jg()?],
                GridName::Easier => vec![grid_easier()?],
                GridName::Har => vec![grid_har()?],
                GridName::L1 => vec![grid_l1()?],
                GridName::L2 => vec![grid_l2()?],
                GridName::L3 => vec![grid_l3(sign)?],
                GridName::Reduce3 => vec![grid_reduce3()?],
            };
            for g in grids {
                if detail {
                    out.extend(g.failures.iter().cloned());
                }
                out.emit(g.summary());
            }
            return Ok(());
        }
    };
    out.emit(rec);
    Ok(())
}

fn run_decompose(args: DecomposeArgs, out: &mut Emitter) -> Run {
    let p = prime(args.p)?;
    if args.m < 1 || args.r < 1 {
        return Err(Usage("--m and --r must be at least 1".into()));
    }
    let n = p
        .pow(args.r)
        .ok()
        .and_then(|q| q.checked_mul(args.m))
        .ok_or_else(|| Usage("mp^r overflows".into()))?;
    if n > args.budget {
        return Err(Usage(format!(
            "mp^r = {n} exceeds the enumeration budget {}; raise --budget",
            args.budget
        )));
    }
    out.extend(decompose(p, args.m, args.r)?);
    Ok(())
}

fn run_eval(args: EvalArgs, out: &mut Emitter) -> Run {
    let def = SequenceDef::from_file(&args.file)?;
    let ns = indices(args.n, args.n_max);
    let values: Vec<_> = ns.par_iter().map(|&n| (n, def.evaluate(n))).collect();
    for (n, v) in values {
        let rec = match v {
            Ok(v) => value_record("eval", n, v),
            Err(e) => CheckRecord::new("eval")
                .param("n", n)
                .observed(e.to_string())
                .required("an integer value")
                .verdict(false),
        };
        out.emit(rec.param("seq", def.name.clone()));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32, Usage> {
    configure_jobs(cli.jobs)?;
    let mut out = Emitter::new(cli.output);
    match cli.command {
        Command::Compute(a) => run_compute(a, &mut out)?,
        Command::Crosscheck(a) => run_crosscheck(a, &mut out)?,
        Command::Verify(a) => run_verify(a, &mut out)?,
        Command::Sweep(a) => run_sweep(a, &mut out)?,
        Command::Lemma(c) => run_lemma(c, &mut out)?,
        Command::Decompose(a) => run_decompose(a, &mut out)?,
        Command::Eval(a) => run_eval(a, &mut out)?,
    }
    Ok(out.finish())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
