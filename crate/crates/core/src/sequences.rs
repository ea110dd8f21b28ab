//! A_δ(n) by the alternating binomial sum and by the signed multinomial sum over
//! the constraint set U(n).

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactarith::{binomial, factorial, multinomial, Integer};
use crate::laurent;

/// Block labels in the order the components are stored.
pub const BLOCK_NAMES: [char; 4] = ['a', 'b', 'c', 'd'];

/// `(a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3)` with every component
/// nonnegative.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Tuple12([i64; 12]);

impl Tuple12 {
    pub fn new(components: [i64; 12]) -> Result<Self> {
        if components.iter().any(|&c| c < 0) {
            return Err(Error::Precondition(format!(
                "tuple components must be nonnegative: {components:?}"
            )));
        }
        Ok(Self(components))
    }

    pub const fn zero() -> Self {
        Self([0; 12])
    }

    #[inline]
    pub fn components(&self) -> &[i64; 12] {
        &self.0
    }

    /// The `i`-th block (0 = a, 1 = b, 2 = c, 3 = d).
    #[inline]
    pub fn block(&self, i: usize) -> [i64; 3] {
        [self.0[3 * i], self.0[3 * i + 1], self.0[3 * i + 2]]
    }

    /// The order `n` a member of `U(n)` must have: the first row sum.
    pub fn order(&self) -> i64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    pub fn scale(&self, factor: i64) -> Self {
        Self(self.0.map(|c| c * factor))
    }

    /// Componentwise exact division, if every component is divisible.
    pub fn div_exact(&self, divisor: i64) -> Option<Self> {
        if self.0.iter().all(|c| c % divisor == 0) {
            Some(Self(self.0.map(|c| c / divisor)))
        } else {
            None
        }
    }

    /// Whether the eight defining equations of `U(n)` hold.
    pub fn in_u(&self, n: i64) -> bool {
        let [a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3] = self.0;
        a1 + a2 + a3 == n
            && b1 + b2 + b3 == n
            && c1 + c2 + c3 == n
            && d1 + d2 + d3 == n
            && b1 + c1 + d1 == n
            && a1 + b2 + d2 == n
            && a2 + b3 + c2 == n
            && a3 + c3 + d3 == n
    }

    /// Whether the first seven equations hold (the eighth is implied).
    pub fn satisfies_first_seven(&self, n: i64) -> bool {
        let [a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, _] = self.0;
        a1 + a2 + a3 == n
            && b1 + b2 + b3 == n
            && c1 + c2 + c3 == n
            && self.block(3).iter().sum::<i64>() == n
            && b1 + c1 + d1 == n
            && a1 + b2 + d2 == n
            && a2 + b3 + c2 == n
    }
}

impl fmt::Display for Tuple12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "{}", if i % 3 == 0 { "; " } else { "," })?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Tuple12> for [i64; 12] {
    fn from(t: Tuple12) -> Self {
        t.0
    }
}

/// A_δ(n) = Σ_{k ≤ n/3} (−1)^k 3^{n−3k} C(n,3k) C(n+k,n) (3k)!/k!³.
pub fn a_delta_binomial(n: u64) -> Integer {
    let n_i = n as i64;
    let three = Integer::from(3u32);
    let mut total = Integer::zero();
    for k in 0..=(n / 3) {
        let k_i = k as i64;
        let fk = factorial(k);
        let mut term = three.pow((n - 3 * k) as u32)
            * binomial(n_i, 3 * k_i).expect("n >= 0")
            * binomial(n_i + k_i, n_i).expect("n + k >= 0")
            * (factorial(3 * k) / (&fk * &fk * &fk));
        if k % 2 == 1 {
            term = -term;
        }
        total += term;
    }
    total
}

/// Lazy enumeration of `U(n)` over the free variables `(a1, a2, b1, b2, c1)`.
///
/// The remaining seven components are solved from the constraints; the
/// eighth equation is re-checked rather than assumed.
pub struct UEnumerator {
    n: i64,
    a1_end: i64,
    a1: i64,
    a2: i64,
    b1: i64,
    b2: i64,
    c1: i64,
    done: bool,
}

impl UEnumerator {
    fn new(n: i64, a1_range: std::ops::RangeInclusive<i64>) -> Self {
        let (start, end) = a1_range.into_inner();
        Self {
            n,
            a1_end: end.min(n),
            a1: start,
            a2: 0,
            b1: 0,
            b2: 0,
            c1: 0,
            done: n < 0 || start > end.min(n),
        }
    }

    fn advance(&mut self) {
        let n = self.n;
        // innermost first; each bound prunes on the partial sums already fixed
        self.c1 += 1;
        if self.c1 <= n - self.b1 {
            return;
        }
        self.c1 = 0;
        self.b2 += 1;
        if self.b2 <= n - self.b1 {
            return;
        }
        self.b2 = 0;
        self.b1 += 1;
        if self.b1 <= n {
            return;
        }
        self.b1 = 0;
        self.a2 += 1;
        if self.a2 <= n - self.a1 {
            return;
        }
        self.a2 = 0;
        self.a1 += 1;
        if self.a1 > self.a1_end {
            self.done = true;
        }
    }

    fn current(&self) -> Option<Tuple12> {
        let n = self.n;
        let (a1, a2, b1, b2, c1) = (self.a1, self.a2, self.b1, self.b2, self.c1);
        let a3 = n - a1 - a2;
        let b3 = n - b1 - b2;
        let c2 = n - a2 - b3;
        let c3 = n - c1 - c2;
        let d1 = n - b1 - c1;
        let d2 = n - a1 - b2;
        let d3 = n - d1 - d2;
        let t = [a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3];
        if t.iter().any(|&c| c < 0) {
            return None;
        }
        debug_assert_eq!(a3 + c3 + d3, n, "eighth equation must follow from the others");
        if a3 + c3 + d3 != n {
            return None;
        }
        Some(Tuple12(t))
    }
}

impl Iterator for UEnumerator {
    type Item = Tuple12;

    fn next(&mut self) -> Option<Tuple12> {
        while !self.done {
            let candidate = self.current();
            self.advance();
            if candidate.is_some() {
                return candidate;
            }
        }
        None
    }
}

/// Every element of `U(n)` exactly once.
pub fn enumerate_u(n: i64) -> UEnumerator {
    UEnumerator::new(n, 0..=n)
}

/// The members of `U(n)` with a fixed `a1`; slices are disjoint and cover
/// `U(n)` as `a1` runs over `0..=n`.
pub fn enumerate_u_slice(n: i64, a1: i64) -> UEnumerator {
    UEnumerator::new(n, a1..=a1)
}

/// All of `U(n)`, collected in parallel by `a1` slice and sorted.
pub fn collect_u(n: i64) -> Vec<Tuple12> {
    if n < 0 {
        return Vec::new();
    }
    let mut all: Vec<Tuple12> = (0..=n)
        .into_par_iter()
        .flat_map_iter(|a1| enumerate_u_slice(n, a1))
        .collect();
    all.sort_unstable();
    all
}

/// `B(t) = (−1)^{a2+b1+d3} · Π_blocks multinomial(n; block)` for `t ∈ U(n)`.
pub fn b_term(n: i64, t: &Tuple12) -> Result<Integer> {
    if !t.in_u(n) {
        return Err(Error::NotInU(t.to_string(), n));
    }
    Ok(b_term_unchecked(n, t))
}

pub(crate) fn b_term_unchecked(n: i64, t: &Tuple12) -> Integer {
    let c = t.components();
    let mut product = Integer::one();
    for i in 0..4 {
        product *= multinomial(n, &t.block(i)).expect("member blocks sum to n");
    }
    if (c[1] + c[3] + c[11]) % 2 == 1 {
        -product
    } else {
        product
    }
}

/// A_δ(n) as Σ_{t ∈ U(n)} B(t), summed in parallel over `a1` slices.
pub fn a_delta_multinomial(n: u64) -> Integer {
    let n = n as i64;
    (0..=n)
        .into_par_iter()
        .map(|a1| {
            enumerate_u_slice(n, a1)
                .map(|t| b_term_unchecked(n, &t))
                .fold(Integer::zero(), |acc, b| acc + b)
        })
        .reduce(Integer::zero, |a, b| a + b)
}

/// Which of the three representations of A_δ to evaluate.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    #[default]
    Binomial,
    ConstantTerm,
    Multinomial,
}

impl Representation {
    pub const ALL: [Representation; 3] = [
        Representation::Binomial,
        Representation::ConstantTerm,
        Representation::Multinomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::Binomial => "binomial",
            Representation::ConstantTerm => "constant-term",
            Representation::Multinomial => "multinomial",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "binomial" => Ok(Representation::Binomial),
            "constant-term" | "ct" => Ok(Representation::ConstantTerm),
            "multinomial" => Ok(Representation::Multinomial),
            other => Err(format!(
                "unknown representation '{other}' (expected binomial, constant-term or multinomial)"
            )),
        }
    }
}

pub fn a_delta(n: u64, representation: Representation) -> Integer {
    match representation {
        Representation::Binomial => a_delta_binomial(n),
        Representation::ConstantTerm => laurent::ct_lambda_power(n),
        Representation::Multinomial => a_delta_multinomial(n),
    }
}
