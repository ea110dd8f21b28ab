//! Exact integer and rational arithmetic: factorials, binomial and multinomial
//! coefficients, and p-adic valuations.
//!
//! Congruences `X ≡ Y (mod p^e)` are always decided as `ν_p(X − Y) ≥ e` over
//! exact integers; nothing here reduces modulo anything before that point.

use std::fmt;
use std::ops::Add;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision signed integer.
pub type Integer = BigInt;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Default number of factorials kept in the shared memo table.
pub const DEFAULT_FACTORIAL_CAP: usize = 4096;

/// A prime number, checked at construction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Self(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// Like [`Prime::new`], additionally requiring `p >= min`.
    pub fn at_least(p: u64, min: u64) -> Result<Self> {
        let prime = Self::new(p)?;
        if p < min {
            return Err(Error::PrimeTooSmall { p, min });
        }
        Ok(prime)
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^e` as an `i64`, failing on overflow.
    pub fn pow(self, e: u32) -> Result<i64> {
        i64::try_from(self.0)
            .ok()
            .and_then(|p| p.checked_pow(e))
            .ok_or_else(|| Error::Overflow(format!("{}^{}", self.0, e)))
    }

    pub fn to_integer(self) -> Integer {
        Integer::from(self.0)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<Prime> {
    (lo..=hi).filter_map(|p| Prime::new(p).ok()).collect()
}

/// A p-adic valuation: a (possibly negative, for rationals) exponent or
/// infinity for zero.
///
/// `Finite(_) < Infinite`, so `observed >= Valuation::Finite(e)` reads as the
/// congruence test directly.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// Whether this valuation is at least `e`.
    pub fn at_least(self, e: i64) -> bool {
        self >= Valuation::Finite(e)
    }

    pub fn to_json(self) -> serde_json::Value {
        match self {
            Valuation::Finite(v) => serde_json::Value::from(v),
            Valuation::Infinite => serde_json::Value::from("inf"),
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => v.fmt(f),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_i64(*v),
            Valuation::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Memoized factorials up to a fixed cap. Requests above the cap are computed
/// on the fly and not stored.
pub struct Factorials {
    cap: usize,
    table: RwLock<Vec<Integer>>,
}

impl Factorials {
    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap,
            table: RwLock::new(vec![Integer::one()]),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn get(&self, n: u64) -> Integer {
        let idx = n as usize;
        if idx > self.cap {
            let mut acc = self.get(self.cap as u64);
            for i in (self.cap as u64 + 1)..=n {
                acc *= i;
            }
            return acc;
        }
        {
            let table = self.table.read().expect("factorial table poisoned");
            if let Some(v) = table.get(idx) {
                return v.clone();
            }
        }
        let mut table = self.table.write().expect("factorial table poisoned");
        while table.len() <= idx {
            let next = table.last().expect("table starts non-empty") * table.len();
            table.push(next);
        }
        table[idx].clone()
    }
}

fn shared_factorials() -> &'static Factorials {
    static TABLE: OnceLock<Factorials> = OnceLock::new();
    TABLE.get_or_init(|| Factorials::with_cap(DEFAULT_FACTORIAL_CAP))
}

/// `n!` from the shared memo table.
pub fn factorial(n: u64) -> Integer {
    shared_factorials().get(n)
}

/// `binomial(n, k)` for `n >= 0`; zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> Result<Integer> {
    if n < 0 {
        return Err(Error::NegativeUpperIndex(n));
    }
    Ok(binomial_nonneg(n as u64, k))
}

fn binomial_nonneg(n: u64, k: i64) -> Integer {
    if k < 0 || k as u64 > n {
        return Integer::zero();
    }
    let k = (k as u64).min(n - k as u64);
    if k == 0 {
        return Integer::one();
    }
    let table = shared_factorials();
    if n as usize <= table.cap() && k > 16 {
        return table.get(n) / (table.get(k) * table.get(n - k));
    }
    let mut acc = Integer::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Binomial coefficient extended to negative upper index by
/// `binomial(-a, k) = (-1)^k binomial(a + k - 1, k)`; zero for `k < 0`.
pub fn binomial_ext(n: i64, k: i64) -> Integer {
    if k < 0 {
        return Integer::zero();
    }
    if n >= 0 {
        return binomial_nonneg(n as u64, k);
    }
    let magnitude = binomial_nonneg((-n + k - 1) as u64, k);
    if k % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// `n! / (a_1! ... a_l!)` for a composition `(a_1, ..., a_l)` of `n`.
pub fn multinomial(n: i64, parts: &[i64]) -> Result<Integer> {
    if let Some(&neg) = parts.iter().find(|&&a| a < 0) {
        return Err(Error::NegativePart(neg));
    }
    let sum: i64 = parts.iter().sum();
    if sum != n {
        return Err(Error::PartsMismatch { n, sum });
    }
    // Telescoping product of binomials keeps intermediates small.
    let mut remaining = n;
    let mut acc = Integer::one();
    for &a in parts {
        acc *= binomial_nonneg(remaining as u64, a);
        remaining -= a;
    }
    Ok(acc)
}

/// Largest `e` with `p^e | x`; infinite for `x = 0`.
pub fn nu_p(p: Prime, x: &Integer) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p_big = p.to_integer();
    let mut v = 0i64;
    let mut rest = x.abs();
    loop {
        let (q, r) = rest.div_rem(&p_big);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1;
    }
    Valuation::Finite(v)
}

/// `ν_p(numerator) − ν_p(denominator)`; infinite for zero.
pub fn nu_p_rational(p: Prime, q: &Rational) -> Valuation {
    match (nu_p(p, q.numer()), nu_p(p, q.denom())) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
        _ => Valuation::Infinite,
    }
}

/// `x ≡ y (mod p^e)` decided as `ν_p(x − y) ≥ e`.
pub fn congruent_mod_power(x: &Integer, y: &Integer, p: Prime, e: i64) -> bool {
    nu_p(p, &(x - y)).at_least(e)
}

/// Floor of a rational as an `i64`.
pub fn floor_i64(x: &Rational) -> Result<i64> {
    x.floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("floor({x})")))
}

/// Ceiling of a rational as an `i64`.
pub fn ceil_i64(x: &Rational) -> Result<i64> {
    x.ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("ceil({x})")))
}

/// Multiplicative inverse of `x` modulo `modulus`, if `gcd(x, modulus) = 1`.
pub fn mod_inverse(x: i128, modulus: i128) -> Option<i128> {
    if modulus == 1 {
        return Some(0);
    }
    let egcd = x.rem_euclid(modulus).extended_gcd(&modulus);
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(modulus))
}

/// Least nonnegative residue of an exact integer.
pub fn residue(x: &Integer, modulus: i128) -> i128 {
    let m = Integer::from(modulus);
    x.mod_floor(&m)
        .to_i128()
        .expect("residue is below the modulus")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(v: i64) -> Integer {
        Integer::from(v)
    }

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    /// Pascal's triangle built by addition only.
    fn pascal_rows(max: usize) -> Vec<Vec<Integer>> {
        let mut rows: Vec<Vec<Integer>> = vec![vec![Integer::one()]];
        for n in 1..=max {
            let prev = &rows[n - 1];
            let mut row = vec![Integer::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2).unwrap(), int(10));
        assert_eq!(binomial(0, 0).unwrap(), int(1));
        let pascal = pascal_rows(25);
        assert_eq!(pascal[25][5], int(53130));
        assert_eq!(binomial(25, 5).unwrap(), pascal[25][5]);
    }

    #[test]
    fn binomial_out_of_range_is_zero() {
        assert_eq!(binomial(4, 5).unwrap(), int(0));
        assert_eq!(binomial(4, -1).unwrap(), int(0));
        assert_eq!(binomial(-1, 0), Err(Error::NegativeUpperIndex(-1)));
    }

    #[test]
    fn pascal_identity_exhaustive() {
        for n in 1..=60i64 {
            for k in 0..=n {
                let lhs = binomial(n, k).unwrap();
                let rhs = binomial(n - 1, k - 1).unwrap() + binomial(n - 1, k).unwrap();
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn binomial_matches_pascal_beyond_small_k() {
        let pascal = pascal_rows(120);
        for n in [40usize, 77, 120] {
            for k in 0..=n {
                assert_eq!(binomial(n as i64, k as i64).unwrap(), pascal[n][k]);
            }
        }
    }

    #[test]
    fn binomial_ext_negative_upper() {
        // binomial(-5, 5) = -binomial(9, 5)
        assert_eq!(binomial_ext(-5, 5), int(-126));
        assert_eq!(binomial_ext(-1, 3), int(-1));
        assert_eq!(binomial_ext(-1, 4), int(1));
        assert_eq!(binomial_ext(-3, -1), int(0));
        assert_eq!(binomial_ext(7, 3), int(35));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &[1, 1, 1]).unwrap(), int(6));
        for n in 0..10 {
            assert_eq!(multinomial(n, &[n]).unwrap(), int(1));
        }
        // 6! / (2!)^3 computed from factorials directly
        let oracle = factorial(6) / (factorial(2) * factorial(2) * factorial(2));
        assert_eq!(oracle, int(90));
        assert_eq!(multinomial(6, &[2, 2, 2]).unwrap(), oracle);
    }

    #[test]
    fn multinomial_errors() {
        assert_eq!(
            multinomial(5, &[1, 2]),
            Err(Error::PartsMismatch { n: 5, sum: 3 })
        );
        assert_eq!(multinomial(1, &[2, -1]), Err(Error::NegativePart(-1)));
    }

    #[test]
    fn multinomial_is_product_of_binomials() {
        for n in 0..=30i64 {
            for a in 0..=n {
                for b in 0..=(n - a) {
                    for c in 0..=(n - a - b) {
                        let d = n - a - b - c;
                        let parts = [a, b, c, d];
                        let direct = factorial(n as u64)
                            / parts.iter().map(|&x| factorial(x as u64)).product::<Integer>();
                        let telescoped = binomial(n, a).unwrap()
                            * binomial(n - a, b).unwrap()
                            * binomial(n - a - b, c).unwrap();
                        assert_eq!(multinomial(n, &parts).unwrap(), direct);
                        assert_eq!(direct, telescoped);
                    }
                }
            }
        }
    }

    #[test]
    fn factorial_cap_is_transparent() {
        let small = Factorials::with_cap(10);
        let big = Factorials::with_cap(100);
        for n in 0..40 {
            assert_eq!(small.get(n), big.get(n));
        }
        assert_eq!(small.get(12), int(479001600));
    }

    #[test]
    fn nu_p_examples() {
        assert_eq!(nu_p(p(5), &int(250)), Valuation::Finite(3));
        assert_eq!(nu_p(p(7), &int(1)), Valuation::Finite(0));
        assert_eq!(nu_p(p(5), &int(0)), Valuation::Infinite);
        assert_eq!(nu_p(p(5), &int(-3000)), Valuation::Finite(3));
    }

    #[test]
    fn nu_p_rational_examples() {
        let q = |a: i64, b: i64| Rational::new(int(a), int(b));
        assert_eq!(nu_p_rational(p(5), &q(1, 25)), Valuation::Finite(-2));
        assert_eq!(nu_p_rational(p(5), &q(10, 3)), Valuation::Finite(1));
        assert_eq!(nu_p_rational(p(7), &q(0, 1)), Valuation::Infinite);
    }

    #[test]
    fn valuation_order_and_sum() {
        assert!(Valuation::Infinite > Valuation::Finite(1_000_000));
        assert!(Valuation::Finite(3).at_least(3));
        assert!(!Valuation::Finite(2).at_least(3));
        assert_eq!(Valuation::Finite(2) + Valuation::Finite(3), Valuation::Finite(5));
        assert_eq!(Valuation::Finite(2) + Valuation::Infinite, Valuation::Infinite);
        assert_eq!(Valuation::Infinite.to_string(), "inf");
    }

    #[test]
    fn primes() {
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
        assert_eq!(Prime::at_least(3, 5), Err(Error::PrimeTooSmall { p: 3, min: 5 }));
        let ps: Vec<u64> = primes_between(5, 13).into_iter().map(Prime::get).collect();
        assert_eq!(ps, vec![5, 7, 11, 13]);
        assert_eq!(p(5).pow(3).unwrap(), 125);
    }

    #[test]
    fn mod_inverse_small() {
        assert_eq!(mod_inverse(4, 5), Some(4));
        assert_eq!(mod_inverse(9, 5), Some(4));
        assert_eq!(mod_inverse(5, 25), None);
        for x in 1..49i128 {
            if x % 7 != 0 {
                assert_eq!((x * mod_inverse(x, 49).unwrap()) % 49, 1);
            }
        }
    }

    #[test]
    fn integer_roundtrips_through_decimal() {
        let x = factorial(200) * int(-7);
        let text = x.to_string();
        assert_eq!(text.parse::<Integer>().unwrap(), x);
    }

    #[test]
    fn rational_lowest_terms() {
        let q = Rational::new(int(10), int(-4));
        assert_eq!(q.numer(), &int(-5));
        assert_eq!(q.denom(), &int(2));
        assert_eq!(floor_i64(&q).unwrap(), -3);
        assert_eq!(ceil_i64(&q).unwrap(), -2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn nu_p_is_additive(
            pi in 0usize..3,
            x in -1_000_000i64..1_000_000,
            y in -1_000_000i64..1_000_000,
        ) {
            let prime = p([5, 7, 11][pi]);
            let lhs = nu_p(prime, &(int(x) * int(y)));
            let rhs = nu_p(prime, &int(x)) + nu_p(prime, &int(y));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn congruence_is_valuation_of_difference(x in -10_000i64..10_000, y in -10_000i64..10_000, e in 0i64..6) {
            let prime = p(5);
            let modulus = 5i64.pow(e as u32);
            prop_assert_eq!(congruent_mod_power(&int(x), &int(y), prime, e), (x - y) % modulus == 0);
        }
    }
}
