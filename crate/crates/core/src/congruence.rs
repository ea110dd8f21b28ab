//! Two-term supercongruence checks `A(mp^r) ≡ A(mp^{r−1}) (mod p^{λr})` for
//! A_δ and for sequences loaded from the text format.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactarith::{nu_p, primes_between, Integer, Prime, Valuation};
use crate::report::CheckRecord;
use crate::seqdsl::SequenceDef;
use crate::sequences::{a_delta, Representation};

/// Anything that can be evaluated at `n ≥ 0`.
pub trait Sequence: Send + Sync {
    fn label(&self) -> String;

    fn value(&self, n: u64) -> Result<Integer>;

    /// The exponent multiplier known to apply, if any. Foreign sequences
    /// return `None` and must be given one explicitly.
    fn default_lambda(&self) -> Option<u32> {
        None
    }
}

/// A_δ through one of its three representations.
#[derive(Copy, Clone, Debug, Default)]
pub struct Delta {
    pub representation: Representation,
}

impl Delta {
    pub fn new(representation: Representation) -> Self {
        Self { representation }
    }
}

impl Sequence for Delta {
    fn label(&self) -> String {
        format!("delta[{}]", self.representation)
    }

    fn value(&self, n: u64) -> Result<Integer> {
        Ok(a_delta(n, self.representation))
    }

    fn default_lambda(&self) -> Option<u32> {
        Some(3)
    }
}

impl Sequence for SequenceDef {
    fn label(&self) -> String {
        self.name.clone()
    }

    fn value(&self, n: u64) -> Result<Integer> {
        Ok(self.evaluate(n)?)
    }
}

/// A sequence given by a closure.
pub struct FnSequence<F> {
    label: String,
    f: F,
}

impl<F: Fn(u64) -> Integer + Send + Sync> FnSequence<F> {
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self { label: label.into(), f }
    }
}

impl<F: Fn(u64) -> Integer + Send + Sync> Sequence for FnSequence<F> {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn value(&self, n: u64) -> Result<Integer> {
        Ok((self.f)(n))
    }
}

impl<S: Sequence + ?Sized> Sequence for Arc<S> {
    fn label(&self) -> String {
        (**self).label()
    }

    fn value(&self, n: u64) -> Result<Integer> {
        (**self).value(n)
    }

    fn default_lambda(&self) -> Option<u32> {
        (**self).default_lambda()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceParams {
    pub p: u64,
    pub m: u64,
    pub r: u32,
    pub lambda: u32,
}

impl CongruenceParams {
    pub fn new(p: u64, m: u64, r: u32, lambda: u32) -> Result<Self> {
        let prime = Prime::new(p)?;
        if prime.get() < 5 {
            return Err(Error::PrimeTooSmall { p, min: 5 });
        }
        if m < 1 || r < 1 {
            return Err(Error::Precondition("m and r must be at least 1".into()));
        }
        if !(2..=3).contains(&lambda) {
            return Err(Error::Precondition(format!("lambda must be 2 or 3, got {lambda}")));
        }
        Ok(Self { p, m, r, lambda })
    }

    pub fn prime(&self) -> Prime {
        Prime::new(self.p).expect("checked in new")
    }

    fn index(&self, e: u32) -> Result<u64> {
        self.p
            .checked_pow(e)
            .and_then(|q| q.checked_mul(self.m))
            .ok_or_else(|| Error::Overflow(format!("{} * {}^{e}", self.m, self.p)))
    }

    /// `mp^r`.
    pub fn n_hi(&self) -> Result<u64> {
        self.index(self.r)
    }

    /// `mp^{r−1}`.
    pub fn n_lo(&self) -> Result<u64> {
        self.index(self.r - 1)
    }

    /// `λr`.
    pub fn required(&self) -> i64 {
        i64::from(self.lambda) * i64::from(self.r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CongruenceReport {
    pub sequence: String,
    pub params: CongruenceParams,
    pub n_hi: u64,
    pub n_lo: u64,
    #[serde(serialize_with = "as_decimal")]
    pub value_hi: Integer,
    #[serde(serialize_with = "as_decimal")]
    pub value_lo: Integer,
    pub observed_valuation: Valuation,
    pub required: i64,
    pub pass: bool,
}

fn as_decimal<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl CongruenceReport {
    fn build(label: String, params: CongruenceParams, hi: Integer, lo: Integer) -> Result<Self> {
        let observed = nu_p(params.prime(), &(&hi - &lo));
        let required = params.required();
        Ok(Self {
            sequence: label,
            params,
            n_hi: params.n_hi()?,
            n_lo: params.n_lo()?,
            value_hi: hi,
            value_lo: lo,
            observed_valuation: observed,
            required,
            pass: observed.at_least(required),
        })
    }

    /// Recomputes the verdict from the stored values alone.
    pub fn recompute_verdict(&self) -> bool {
        nu_p(self.params.prime(), &(&self.value_hi - &self.value_lo)).at_least(self.required)
    }

    pub fn to_record(&self) -> CheckRecord {
        CheckRecord::new("supercongruence")
            .param("seq", self.sequence.clone())
            .param("p", self.params.p)
            .param("m", self.params.m)
            .param("r", self.params.r)
            .param("lambda", self.params.lambda)
            .valuation_at_least(self.observed_valuation, self.required)
    }
}

/// Evaluates `A(mp^r)` and `A(mp^{r−1})` and compares `ν_p` of their
/// difference with `λr`.
pub fn check_supercongruence<S: Sequence + ?Sized>(
    seq: &S,
    params: CongruenceParams,
) -> Result<CongruenceReport> {
    let hi = seq.value(params.n_hi()?)?;
    let lo = seq.value(params.n_lo()?)?;
    CongruenceReport::build(seq.label(), params, hi, lo)
}

/// The exact valuation `ν_p(A(mp^r) − A(mp^{r−1}))`.
pub fn sharpness_scan<S: Sequence + ?Sized>(seq: &S, params: CongruenceParams) -> Result<Valuation> {
    Ok(check_supercongruence(seq, params)?.observed_valuation)
}

/// Every admissible `(p, m, r)` with `5 ≤ p ≤ p_max`, `m ≤ m_max`,
/// `r ≤ r_max`, ordered by `(p, m, r)`. Each index is evaluated once.
pub fn sweep<S: Sequence + ?Sized>(
    seq: &S,
    p_max: u64,
    m_max: u64,
    r_max: u32,
    lambda: u32,
) -> Result<Vec<CongruenceReport>> {
    let mut grid = Vec::new();
    for p in primes_between(5, p_max) {
        for m in 1..=m_max {
            for r in 1..=r_max {
                grid.push(CongruenceParams::new(p.get(), m, r, lambda)?);
            }
        }
    }
    let mut indices = BTreeSet::new();
    for params in &grid {
        indices.insert(params.n_hi()?);
        indices.insert(params.n_lo()?);
    }
    // largest first so the slowest evaluations start early
    let cache: BTreeMap<u64, Integer> = indices
        .into_iter()
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| seq.value(n).map(|v| (n, v)))
        .collect::<Result<_>>()?;
    let label = seq.label();
    grid.into_iter()
        .map(|params| {
            let hi = cache[&params.n_hi()?].clone();
            let lo = cache[&params.n_lo()?].clone();
            CongruenceReport::build(label.clone(), params, hi, lo)
        })
        .collect()
}

/// Whether `A(mp^{r−1})` in each `(p, m, r)` report equals `A(mp^{r−1})` as
/// the upper value of the `(p, m, r−1)` report, wherever both are present.
pub fn monotone_consistent(reports: &[CongruenceReport]) -> bool {
    let by_key: BTreeMap<(u64, u64, u32), &CongruenceReport> = reports
        .iter()
        .map(|rep| ((rep.params.p, rep.params.m, rep.params.r), rep))
        .collect();
    reports.iter().all(|rep| {
        let prev = (rep.params.p, rep.params.m, rep.params.r - 1);
        by_key
            .get(&prev)
            .is_none_or(|before| before.n_hi == rep.n_lo && before.value_hi == rep.value_lo)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn delta() -> Delta {
        Delta::default()
    }

    #[test]
    fn anchor_case() {
        let params = CongruenceParams::new(5, 1, 1, 3).unwrap();
        let rep = check_supercongruence(&delta(), params).unwrap();
        assert_eq!(rep.value_hi, Integer::from(-2997));
        assert_eq!(rep.value_lo, Integer::from(3));
        assert_eq!(rep.observed_valuation, Valuation::Finite(3));
        assert!(rep.pass);
        assert_eq!(sharpness_scan(&delta(), params).unwrap(), Valuation::Finite(3));
    }

    #[test]
    fn second_level() {
        let params = CongruenceParams::new(5, 1, 2, 3).unwrap();
        let rep = check_supercongruence(&delta(), params).unwrap();
        assert_eq!((rep.n_hi, rep.n_lo), (25, 5));
        assert!(rep.observed_valuation.at_least(6));
    }

    #[test]
    fn constant_sequence_is_infinite() {
        let one = FnSequence::new("one", |_| Integer::one());
        let params = CongruenceParams::new(11, 2, 2, 2).unwrap();
        assert_eq!(sharpness_scan(&one, params).unwrap(), Valuation::Infinite);
        assert!(check_supercongruence(&one, params).unwrap().pass);
    }

    #[test]
    fn seven_at_least_three() {
        let params = CongruenceParams::new(7, 1, 1, 3).unwrap();
        assert!(sharpness_scan(&delta(), params).unwrap().at_least(3));
    }

    #[test]
    fn params_validation() {
        assert!(CongruenceParams::new(3, 1, 1, 3).is_err());
        assert!(CongruenceParams::new(9, 1, 1, 3).is_err());
        assert!(CongruenceParams::new(5, 0, 1, 3).is_err());
        assert!(CongruenceParams::new(5, 1, 0, 3).is_err());
        assert!(CongruenceParams::new(5, 1, 1, 4).is_err());
    }

    #[test]
    fn small_sweeps() {
        assert!(sweep(&delta(), 4, 3, 2, 3).unwrap().is_empty());
        let single = sweep(&delta(), 5, 1, 1, 3).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].pass);
    }

    #[test]
    fn sweep_reports_are_self_consistent() {
        let reports = sweep(&delta(), 7, 2, 2, 3).unwrap();
        assert_eq!(reports.len(), 8);
        assert!(monotone_consistent(&reports));
        for rep in &reports {
            assert_eq!(rep.recompute_verdict(), rep.pass);
            assert!(rep.pass);
        }
    }

    #[test]
    fn failures_are_reported_not_skipped() {
        // n ↦ n fails whenever ν_p(mp^r − mp^{r−1}) = r − 1 + ν_p(m) < λr
        let id = FnSequence::new("id", Integer::from);
        let reports = sweep(&id, 7, 1, 1, 2).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|rep| !rep.pass));
    }

    #[test]
    fn dsl_sequences_plug_in() {
        let def = crate::seqdsl::parse(crate::seqdsl::DELTA_SOURCE).unwrap();
        let params = CongruenceParams::new(5, 1, 1, 3).unwrap();
        assert!(check_supercongruence(&def, params).unwrap().pass);
        assert_eq!(def.default_lambda(), None);
    }
}
