//! Executable checks for the binomial lemmas behind the supercongruence proof.
//!
//! Every check returns a [`CheckRecord`]; precondition violations are errors,
//! a false congruence is a failing record.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exactarith::{
    binomial, binomial_ext, ceil_i64, floor_i64, mod_inverse, nu_p, residue, Integer, Prime,
    Rational, Valuation,
};
use crate::report::CheckRecord;

/// Reading of the third factor of the four-binomial product `C`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum ThirdFactorSign {
    /// `binomial(n − 1, ℓ6 + ⌊x⌋)`, the reading used by the reduction steps.
    #[default]
    Plus,
    /// `binomial(n − 1, ℓ6 − ⌊x⌋)`.
    Minus,
}

impl ThirdFactorSign {
    pub fn name(self) -> &'static str {
        match self {
            ThirdFactorSign::Plus => "plus",
            ThirdFactorSign::Minus => "minus",
        }
    }
}

impl std::str::FromStr for ThirdFactorSign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plus" | "+" => Ok(ThirdFactorSign::Plus),
            "minus" | "-" => Ok(ThirdFactorSign::Minus),
            other => Err(format!("unknown sign '{other}' (expected plus or minus)")),
        }
    }
}

/// Arguments of the four-binomial product `C(ℓ, n, x)`. Only `ℓ1, ℓ3, ℓ4, ℓ6`
/// (indices 0, 2, 3, 5) enter the product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFunctionArgs {
    pub ell: [i64; 12],
    pub n: i64,
    pub x: Rational,
}

impl CFunctionArgs {
    pub fn new(ell: [i64; 12], n: i64, x: Rational) -> Self {
        Self { ell, n, x }
    }

    /// `(ℓ/d, n/d, x/d)` with exact integer division of `ℓ` and `n`.
    pub fn divided_by(&self, d: i64) -> Result<Self> {
        if self.n % d != 0 || self.ell.iter().any(|c| c % d != 0) {
            return Err(Error::Precondition(format!("{d} must divide ell and n")));
        }
        Ok(Self {
            ell: self.ell.map(|c| c / d),
            n: self.n / d,
            x: &self.x / Rational::from_integer(BigInt::from(d)),
        })
    }
}

fn int(v: i64) -> Integer {
    Integer::from(v)
}

fn rat(num: i64, den: i64) -> Rational {
    Rational::new(int(num), int(den))
}

fn check_min_prime(p: Prime) -> Result<()> {
    if p.get() < 5 {
        return Err(Error::PrimeTooSmall { p: p.get(), min: 5 });
    }
    Ok(())
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(what.to_owned()))
    }
}

/// `A/B ≡ 1 (mod p^e)` read as `ν_p(A − B) ≥ e + ν_p(B)`.
pub fn check_ratio_congruence(a: &Integer, b: &Integer, p: Prime, e: i64) -> CheckRecord {
    let observed = nu_p(p, &(a - b));
    let required = nu_p(p, b) + Valuation::Finite(e);
    CheckRecord::new("ratio_congruence")
        .param("a", a.to_string())
        .param("b", b.to_string())
        .param("p", p.get())
        .param("e", e)
        .observed(observed.to_json())
        .required(match required {
            Valuation::Finite(v) => Value::from(format!(">= {v}")),
            Valuation::Infinite => Value::from(">= inf"),
        })
        .verdict(observed >= required)
}

/// `binomial(mp^r, kp^s) / binomial(mp^{r−1}, kp^{s−1}) ≡ 1 (mod p^{r+s+min(r,s)})`.
pub fn lemma_jg(p: Prime, m: i64, k: i64, r: u32, s: u32) -> Result<CheckRecord> {
    check_min_prime(p)?;
    require(r >= 1 && s >= 1, "r >= 1 and s >= 1")?;
    require(m >= 0, "m >= 0")?;
    let top_hi = m * p.pow(r)?;
    let top_lo = m * p.pow(r - 1)?;
    let bottom_hi = k * p.pow(s)?;
    let bottom_lo = k * p.pow(s - 1)?;
    let a = binomial(top_hi, bottom_hi)?;
    let b = binomial(top_lo, bottom_lo)?;
    let e = i64::from(r + s + r.min(s));
    let mut rec = check_ratio_congruence(&a, &b, p, e);
    rec.check = "lemma_jg".into();
    rec.params.clear();
    Ok(rec
        .param("p", p.get())
        .param("m", m)
        .param("k", k)
        .param("r", r)
        .param("s", s))
}

/// `binomial(mp^r, kp^s) = p^{r−s} (m/k) binomial(mp^r − 1, kp^s − 1)` exactly,
/// and the left side has `ν_p ≥ r − s`, for `p ∤ k`, `s ≤ r`.
pub fn easier_identity(p: Prime, m: i64, k: i64, r: u32, s: u32) -> Result<CheckRecord> {
    check_min_prime(p)?;
    require(m >= 1 && k >= 1, "m >= 1 and k >= 1")?;
    require(s >= 1 && s <= r, "1 <= s <= r")?;
    require(k % p.get() as i64 != 0, "p must not divide k")?;
    let n = m * p.pow(r)?;
    let kk = k * p.pow(s)?;
    let lhs = Rational::from_integer(binomial(n, kk)?);
    let rhs = Rational::from_integer(int(p.pow(r - s)?))
        * rat(m, k)
        * Rational::from_integer(binomial(n - 1, kk - 1)?);
    let identity = lhs == rhs;
    let valuation = nu_p(p, lhs.numer());
    let divisible = valuation.at_least(i64::from(r - s));
    Ok(CheckRecord::new("easier_identity")
        .param("p", p.get())
        .param("m", m)
        .param("k", k)
        .param("r", r)
        .param("s", s)
        .observed(serde_json::json!({
            "identity": identity,
            "valuation": valuation.to_json(),
        }))
        .required(serde_json::json!({
            "identity": true,
            "valuation": format!(">= {}", r - s),
        }))
        .verdict(identity && divisible))
}

/// `Σ'_{x=1}^{p^s−1} (−1)^x x^{−2} mod p^s`, skipping multiples of `p`.
pub fn alternating_inverse_square_sum(p: Prime, s: u32) -> Result<i128> {
    let q = i128::from(p.pow(s)?);
    weighted_inverse_square_sum(p, s, |_| Ok(1))
        .map(|v| v.rem_euclid(q))
}

/// `Σ'_{x=1}^{p^s−1} (−1)^x x^{−2} w(x) mod p^s` with integer weights.
fn weighted_inverse_square_sum<F>(p: Prime, s: u32, weight: F) -> Result<i128>
where
    F: Fn(i64) -> Result<i128>,
{
    let q = i128::from(p.pow(s)?);
    let pp = p.get() as i64;
    let mut acc: i128 = 0;
    for x in 1..p.pow(s)? {
        if x % pp == 0 {
            continue;
        }
        let inv = mod_inverse(i128::from(x), q).expect("x is a unit mod p^s");
        let mut term = inv * inv % q * weight(x)?.rem_euclid(q) % q;
        if x % 2 == 1 {
            term = q - term;
        }
        acc = (acc + term) % q;
    }
    Ok(acc.rem_euclid(q.max(1)))
}

/// `Σ'_{x=1}^{p^s−1} (−1)^x / x² ≡ 0 (mod p^s)`, evaluated with modular
/// inverses.
pub fn lemma_har(p: Prime, s: u32) -> Result<CheckRecord> {
    check_min_prime(p)?;
    let residue = alternating_inverse_square_sum(p, s)?;
    Ok(CheckRecord::new("lemma_har")
        .param("p", p.get())
        .param("s", s)
        .param("modulus", p.pow(s)?)
        .observed(residue.to_string())
        .required("0")
        .verdict(residue == 0))
}

/// `(−1)^k binomial(mp^s − 1, k) ≡ (−1)^{⌊k/p⌋} binomial(mp^{s−1} − 1, ⌊k/p⌋) (mod p^s)`.
pub fn lemma_l1(p: Prime, m: i64, k: i64, s: u32) -> Result<CheckRecord> {
    require(m >= 1 && k >= 0 && s >= 1, "m >= 1, k >= 0, s >= 1")?;
    let pp = p.get() as i64;
    let kq = k / pp;
    let lhs = signed(k, binomial_ext(m * p.pow(s)? - 1, k));
    let rhs = signed(kq, binomial_ext(m * p.pow(s - 1)? - 1, kq));
    Ok(CheckRecord::new("lemma_l1")
        .param("p", p.get())
        .param("m", m)
        .param("k", k)
        .param("s", s)
        .valuation_at_least(nu_p(p, &(lhs - rhs)), i64::from(s)))
}

fn signed(exponent: i64, value: Integer) -> Integer {
    if exponent.rem_euclid(2) == 1 {
        -value
    } else {
        value
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// `binomial(mp^s − ℓ, kp^s) ≡ binomial(mp^{s−1} − ⌈ℓ/p⌉, kp^{s−1}) (mod p^s)`.
///
/// A negative upper index uses the standard extension
/// `binomial(−a, j) = (−1)^j binomial(a + j − 1, j)`.
pub fn lemma_l2(p: Prime, m: i64, k: i64, ell: i64, s: u32) -> Result<CheckRecord> {
    require(m >= 1 && k >= 0 && ell >= 0 && s >= 1, "m >= 1, k >= 0, ell >= 0, s >= 1")?;
    let pp = p.get() as i64;
    let lhs = binomial_ext(m * p.pow(s)? - ell, k * p.pow(s)?);
    let rhs = binomial_ext(m * p.pow(s - 1)? - ceil_div(ell, pp), k * p.pow(s - 1)?);
    Ok(CheckRecord::new("lemma_l2")
        .param("p", p.get())
        .param("m", m)
        .param("k", k)
        .param("ell", ell)
        .param("s", s)
        .valuation_at_least(nu_p(p, &(lhs - rhs)), i64::from(s)))
}

/// `C(ℓ, n, x) = binomial(n−1, ℓ1+⌊x⌋) binomial(n−ℓ1−⌈x⌉, ℓ3)
/// binomial(n−1, ℓ6+⌊x⌋) binomial(n−ℓ6−⌈x⌉, ℓ4)`.
pub fn c_function(args: &CFunctionArgs) -> Result<Integer> {
    c_function_with(args, ThirdFactorSign::Plus)
}

pub fn c_function_with(args: &CFunctionArgs, sign: ThirdFactorSign) -> Result<Integer> {
    let fl = floor_i64(&args.x)?;
    let ce = ceil_i64(&args.x)?;
    let n = args.n;
    let [l1, _, l3, l4, _, l6, ..] = args.ell;
    let third_lower = match sign {
        ThirdFactorSign::Plus => l6 + fl,
        ThirdFactorSign::Minus => l6 - fl,
    };
    let factors = [
        (n - 1, l1 + fl),
        (n - l1 - ce, l3),
        (n - 1, third_lower),
        (n - l6 - ce, l4),
    ];
    let mut acc = Integer::one();
    for (top, bottom) in factors {
        let b = binomial_ext(top, bottom);
        if b.is_zero() {
            return Ok(b);
        }
        acc *= b;
    }
    Ok(acc)
}

fn is_power_of(mut d: Integer, p: Prime) -> bool {
    let pb = p.to_integer();
    while d > Integer::one() {
        if !(&d % &pb).is_zero() {
            return false;
        }
        d /= &pb;
    }
    true
}

/// `C(ℓ, n, x) ≡ C(ℓ/p, n/p, x/p) (mod p^s)` when `p^s` divides `ℓ` and `n` and
/// `0 ≤ x ≤ p^s` has a power-of-`p` denominator.
pub fn lemma_l3(p: Prime, s: u32, args: &CFunctionArgs, sign: ThirdFactorSign) -> Result<CheckRecord> {
    require(s >= 1, "s >= 1")?;
    let q = p.pow(s)?;
    require(
        args.n % q == 0 && args.ell.iter().all(|c| c % q == 0),
        "p^s must divide every component of ell and n",
    )?;
    require(
        !args.x.is_negative() && args.x <= Rational::from_integer(int(q)),
        "0 <= x <= p^s",
    )?;
    require(
        is_power_of(args.x.denom().clone(), p),
        "x must have a power-of-p denominator",
    )?;
    let lhs = c_function_with(args, sign)?;
    let reduced = args.divided_by(p.get() as i64)?;
    let rhs = c_function_with(&reduced, sign)?;
    Ok(CheckRecord::new("lemma_l3")
        .param("p", p.get())
        .param("s", s)
        .param("n", args.n)
        .param("x", args.x.to_string())
        .param("ell", format_ell(&args.ell))
        .param("sign", sign.name())
        .valuation_at_least(nu_p(p, &(lhs - rhs)), i64::from(s)))
}

pub(crate) fn format_ell(ell: &[i64; 12]) -> String {
    ell.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

/// `Σ'_{x=1}^{p^s−1} (−1)^x x^{−2} C(ℓ/p^t, mp^{r−t}, x/p^t) mod p^s`.
pub fn reduced_sum(p: Prime, s: u32, t: u32, ell: &[i64; 12], m: i64, r: u32) -> Result<i128> {
    require(t >= 1 && t <= r, "1 <= t <= r")?;
    let d = p.pow(t)?;
    require(ell.iter().all(|c| c % d == 0), "p^t must divide ell")?;
    let q = i128::from(p.pow(s)?);
    let scaled = ell.map(|c| c / d);
    let n = m * p.pow(r - t)?;
    weighted_inverse_square_sum(p, s, |x| {
        let c = c_function(&CFunctionArgs::new(scaled, n, rat(x, d)))?;
        Ok(residue(&c, q))
    })
}

/// The descent `Σ' … C(ℓ/p, mp^{r−1}, x/p) ≡ Σ' … C(ℓ/p^t, mp^{r−t}, x/p^t)
/// (mod p^s)`; at `t = s` the common value must also vanish.
pub fn reduce3_chain(p: Prime, s: u32, t: u32, ell: &[i64; 12], m: i64, r: u32) -> Result<CheckRecord> {
    check_min_prime(p)?;
    require(t >= 1 && t <= s && s <= r, "1 <= t <= s <= r")?;
    require(m >= 1, "m >= 1")?;
    let q = p.pow(s)?;
    require(ell.iter().all(|c| *c >= 0 && c % q == 0), "ell must lie in p^s Z>=0^12")?;
    let first = reduced_sum(p, s, 1, ell, m, r)?;
    let at_t = reduced_sum(p, s, t, ell, m, r)?;
    let vanishes = t < s || at_t == 0;
    Ok(CheckRecord::new("reduce3_chain")
        .param("p", p.get())
        .param("s", s)
        .param("t", t)
        .param("m", m)
        .param("r", r)
        .param("ell", format_ell(ell))
        .observed(serde_json::json!({ "t1": first.to_string(), "t": at_t.to_string() }))
        .required(if t == s { "t1 == t == 0" } else { "t1 == t" })
        .verdict(first == at_t && vanishes))
}

/// Outcome of running one verifier over a parameter grid.
#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub check: String,
    pub cases: usize,
    pub failures: Vec<CheckRecord>,
}

impl GridOutcome {
    fn collect(check: &str, records: Vec<Result<CheckRecord>>) -> Result<Self> {
        let cases = records.len();
        let mut failures = Vec::new();
        for rec in records {
            let rec = rec?;
            if !rec.passed() {
                failures.push(rec);
            }
        }
        Ok(Self {
            check: check.to_owned(),
            cases,
            failures,
        })
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One summary record for the whole grid.
    pub fn summary(&self) -> CheckRecord {
        CheckRecord::new(format!("{}_grid", self.check))
            .param("cases", self.cases)
            .observed(format!("{} of {} pass", self.cases - self.failures.len(), self.cases))
            .required(format!("{} of {} pass", self.cases, self.cases))
            .verdict(self.passed())
    }
}

fn primes(ps: &[u64]) -> Vec<Prime> {
    ps.iter().map(|&p| Prime::new(p).expect("grid primes are prime")).collect()
}

/// Lemma `jg` over `p ∈ {5,7,11}`, `m, k ∈ {1,2,3}`, `r, s ∈ {1,2}`.
pub fn grid_jg() -> Result<GridOutcome> {
    let mut out = Vec::new();
    for p in primes(&[5, 7, 11]) {
        for m in 1..=3 {
            for k in 1..=3 {
                for r in 1..=2 {
                    for s in 1..=2 {
                        out.push(lemma_jg(p, m, k, r, s));
                    }
                }
            }
        }
    }
    GridOutcome::collect("lemma_jg", out)
}

/// The exact identity over `p ∈ {5,7}`, `m ∈ {1,2,3}`, `k ∈ {1,2,3,4,6}`,
/// `1 ≤ s ≤ r ≤ 2`.
pub fn grid_easier() -> Result<GridOutcome> {
    let mut out = Vec::new();
    for p in primes(&[5, 7]) {
        for m in 1..=3 {
            for k in [1, 2, 3, 4, 6] {
                for r in 1..=2 {
                    for s in 1..=r {
                        out.push(easier_identity(p, m, k, r, s));
                    }
                }
            }
        }
    }
    GridOutcome::collect("easier_identity", out)
}

/// Lemma `har` over `p ∈ {5,7,11}`, `s ∈ {0,1,2}`.
pub fn grid_har() -> Result<GridOutcome> {
    let mut out = Vec::new();
    for p in primes(&[5, 7, 11]) {
        for s in 0..=2 {
            out.push(lemma_har(p, s));
        }
    }
    GridOutcome::collect("lemma_har", out)
}

/// Lemma `l1` over `p ∈ {5,7}`, `m ∈ {1,2}`, `k ∈ [0, 2p]`, `s ∈ {1,2}`.
pub fn grid_l1() -> Result<GridOutcome> {
    let mut out = Vec::new();
    for p in primes(&[5, 7]) {
        for m in 1..=2 {
            for k in 0..=(2 * p.get() as i64) {
                for s in 1..=2 {
                    out.push(lemma_l1(p, m, k, s));
                }
            }
        }
    }
    GridOutcome::collect("lemma_l1", out)
}

/// Lemma `l2` over `p ∈ {5,7}`, `m ∈ {1,2,3}`, `k ∈ {0,1,2}`, `ℓ ∈ [0, 2p]`,
/// `s ∈ {1,2}`.
pub fn grid_l2() -> Result<GridOutcome> {
    let mut out = Vec::new();
    for p in primes(&[5, 7]) {
        for m in 1..=3 {
            for k in 0..=2 {
                for ell in 0..=(2 * p.get() as i64) {
                    for s in 1..=2 {
                        out.push(lemma_l2(p, m, k, ell, s));
                    }
                }
            }
        }
    }
    GridOutcome::collect("lemma_l2", out)
}

/// All `ℓ` with `ℓ1, ℓ3, ℓ4, ℓ6 ∈ {0, q, 2q}` and the other components zero.
pub fn ell_grid(q: i64) -> Vec<[i64; 12]> {
    let vals = [0, q, 2 * q];
    let mut out = Vec::with_capacity(81);
    for &l1 in &vals {
        for &l3 in &vals {
            for &l4 in &vals {
                for &l6 in &vals {
                    let mut ell = [0i64; 12];
                    ell[0] = l1;
                    ell[2] = l3;
                    ell[3] = l4;
                    ell[5] = l6;
                    out.push(ell);
                }
            }
        }
    }
    out
}

/// Lemma `l3` over `p ∈ {5,7}`, `s ∈ {1,2}`, `ℓ` from [`ell_grid`],
/// `n ∈ {p^s, 2p^s, 3p^s}` and `x ∈ {j/p : 0 ≤ j ≤ p^{s+1}}`.
pub fn grid_l3(sign: ThirdFactorSign) -> Result<GridOutcome> {
    let mut cells = Vec::new();
    for p in primes(&[5, 7]) {
        for s in 1..=2u32 {
            let q = p.pow(s)?;
            for ell in ell_grid(q) {
                for mult in 1..=3 {
                    cells.push((p, s, ell, mult * q));
                }
            }
        }
    }
    let records: Vec<Result<CheckRecord>> = cells
        .into_par_iter()
        .flat_map_iter(|(p, s, ell, n)| {
            let pp = p.get() as i64;
            let top = pp * p.pow(s).expect("small");
            (0..=top).map(move |j| {
                let args = CFunctionArgs::new(ell, n, rat(j, pp));
                lemma_l3(p, s, &args, sign)
            })
        })
        .collect();
    GridOutcome::collect("lemma_l3", records)
}

/// The descent chain over `p ∈ {5,7}`, `1 ≤ t ≤ s ≤ r ≤ 2`, `m ∈ {1,2,3}`,
/// `ℓ` from [`ell_grid`].
pub fn grid_reduce3() -> Result<GridOutcome> {
    let mut cells = Vec::new();
    for p in primes(&[5, 7]) {
        for s in 1..=2u32 {
            for r in s..=2 {
                for m in 1..=3 {
                    for ell in ell_grid(p.pow(s)?) {
                        for t in 1..=s {
                            cells.push((p, s, t, ell, m, r));
                        }
                    }
                }
            }
        }
    }
    let records = cells
        .into_par_iter()
        .map(|(p, s, t, ell, m, r)| reduce3_chain(p, s, t, &ell, m, r))
        .collect();
    GridOutcome::collect("reduce3_chain", records)
}

/// Every standard grid, in a fixed order.
pub fn all_grids() -> Result<Vec<GridOutcome>> {
    Ok(vec![
        grid_jg()?,
        grid_easier()?,
        grid_har()?,
        grid_l1()?,
        grid_l2()?,
        grid_l3(ThirdFactorSign::Plus)?,
        grid_reduce3()?,
    ])
}
