//! Set machinery behind the reduction to non-divisible tuples: the pair sets
//! `U_xy`, the classes `T_{s,ℓ}`, the block-swapping maps, and exhaustive
//! checks of every sum identity at small `(p, m, r)`.
//!
//! A block is *non-divisible* when at least one of its three components is
//! not divisible by `p`. `U_xy(n)` holds the tuples whose non-divisible blocks
//! are exactly `x` and `y`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactarith::{binomial, multinomial, nu_p, Integer, Prime, Rational, Valuation};
use crate::proofsteps::format_ell;
use crate::report::CheckRecord;
use crate::sequences::{a_delta_binomial, b_term, b_term_unchecked, collect_u, Tuple12, BLOCK_NAMES};

/// `{1 ≤ x ≤ p^s − 1 : p ∤ x}`.
pub fn s_set(p: Prime, s: u32) -> Result<Vec<i64>> {
    let q = p.pow(s)?;
    let pp = p.get() as i64;
    Ok((1..q).filter(|x| x % pp != 0).collect())
}

pub fn block_divisible(block: [i64; 3], p: Prime) -> bool {
    let pp = p.get() as i64;
    block.iter().all(|c| c % pp == 0)
}

/// Non-divisibility of the blocks `a, b, c, d`.
pub fn nondivisible_blocks(t: &Tuple12, p: Prime) -> [bool; 4] {
    [0, 1, 2, 3].map(|i| !block_divisible(t.block(i), p))
}

/// Whether every component of `t` is divisible by `p`.
pub fn tuple_divisible(t: &Tuple12, p: Prime) -> bool {
    let pp = p.get() as i64;
    t.components().iter().all(|c| c % pp == 0)
}

/// `min` of the component valuations of a block.
pub fn block_valuation(block: [i64; 3], p: Prime) -> Valuation {
    block
        .iter()
        .map(|&c| nu_p(p, &Integer::from(c)))
        .min()
        .expect("three components")
}

/// One of the six unordered block pairs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockPair(usize, usize);

impl BlockPair {
    pub const AB: BlockPair = BlockPair(0, 1);
    pub const AC: BlockPair = BlockPair(0, 2);
    pub const AD: BlockPair = BlockPair(0, 3);
    pub const BC: BlockPair = BlockPair(1, 2);
    pub const BD: BlockPair = BlockPair(1, 3);
    pub const CD: BlockPair = BlockPair(2, 3);

    pub const ALL: [BlockPair; 6] = [
        BlockPair::AB,
        BlockPair::AC,
        BlockPair::AD,
        BlockPair::BC,
        BlockPair::BD,
        BlockPair::CD,
    ];

    pub fn contains(self, block: usize) -> bool {
        self.0 == block || self.1 == block
    }

    /// Whether the non-divisible blocks of `t` are exactly this pair.
    pub fn matches(self, t: &Tuple12, p: Prime) -> bool {
        nondivisible_blocks(t, p)
            .iter()
            .enumerate()
            .all(|(i, &nd)| nd == self.contains(i))
    }
}

impl fmt::Display for BlockPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U_{}{}", BLOCK_NAMES[self.0], BLOCK_NAMES[self.1])
    }
}

/// The members of `U(n)` in the pair set `pair`.
pub fn enumerate_u_pair(n: i64, p: Prime, pair: BlockPair) -> impl Iterator<Item = Tuple12> {
    crate::sequences::enumerate_u(n).filter(move |t| pair.matches(t, p))
}

/// `U_ab(n)`: blocks `a` and `b` non-divisible, `c` and `d` divisible.
pub fn enumerate_u_ab(n: i64, p: Prime) -> impl Iterator<Item = Tuple12> {
    enumerate_u_pair(n, p, BlockPair::AB)
}

fn check_params(p: Prime, m: i64, r: u32) -> Result<i64> {
    if p.get() < 5 {
        return Err(Error::PrimeTooSmall { p: p.get(), min: 5 });
    }
    if m < 1 || r < 1 {
        return Err(Error::Precondition("m >= 1 and r >= 1".into()));
    }
    Ok(m * p.pow(r)?)
}

/// `s = min(ν_p(c), ν_p(d), r)` for `t ∈ U_ab(mp^r)`; always `1 ≤ s ≤ r`.
pub fn classify_s(t: &Tuple12, p: Prime, r: u32) -> Result<u32> {
    let n = t.order();
    let q = p.pow(r)?;
    if r < 1 || n <= 0 || n % q != 0 {
        return Err(Error::Precondition(format!("order {n} is not a positive multiple of p^r")));
    }
    if !t.in_u(n) || !BlockPair::AB.matches(t, p) {
        return Err(Error::Precondition(format!("{t} is not in U_ab({n})")));
    }
    let v = block_valuation(t.block(2), p).min(block_valuation(t.block(3), p));
    let s = match v {
        Valuation::Finite(v) => v.min(i64::from(r)) as u32,
        Valuation::Infinite => r,
    };
    debug_assert!(s >= 1 && s <= r);
    Ok(s)
}

/// The kernel direction `(x, −x, 0, 0, −x, x, 0, …, 0)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct XPattern(pub i64);

impl XPattern {
    pub fn vector(self) -> [i64; 12] {
        let x = self.0;
        [x, -x, 0, 0, -x, x, 0, 0, 0, 0, 0, 0]
    }

    /// `ℓ + x`, if every component stays nonnegative.
    pub fn apply(self, ell: &[i64; 12]) -> Option<Tuple12> {
        let v = self.vector();
        let mut out = [0i64; 12];
        for i in 0..12 {
            out[i] = ell[i] + v[i];
        }
        Tuple12::new(out).ok()
    }
}

/// One class `T_{s,ℓ} = {ℓ + x : x ∈ S_{p^s}}` (restricted to valid tuples).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TClass {
    pub s: u32,
    pub ell: [i64; 12],
    /// `(x, ℓ + x)` pairs, ascending in `x`.
    pub members: Vec<(i64, Tuple12)>,
}

impl TClass {
    /// `ℓ / p^s`.
    pub fn k(&self, p: Prime) -> Result<[i64; 12]> {
        let q = p.pow(self.s)?;
        Ok(self.ell.map(|c| c / q))
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Tuple12> {
        self.members.iter().map(|(_, t)| t)
    }
}

/// Splits `t ∈ U_ab(mp^r)` as `ℓ + x` with `ℓ ∈ p^s Z≥0^12`, `x ∈ S_{p^s}`,
/// following the reduction of the defining equations modulo `p^s`.
pub fn reduce_to_class(t: &Tuple12, p: Prime, r: u32) -> Result<(u32, [i64; 12], i64)> {
    let s = classify_s(t, p, r)?;
    let q = p.pow(s)?;
    let c = t.components();
    // equations five and eight force p^s | b1 and p^s | a3
    if c[3] % q != 0 || c[2] % q != 0 {
        return Err(Error::Precondition(format!("{t}: b1 or a3 not divisible by p^s")));
    }
    let x = c[0].rem_euclid(q);
    let residues = [c[1], c[4], c[5]].map(|v| v.rem_euclid(q));
    if residues != [(q - x) % q, (q - x) % q, x] {
        return Err(Error::Precondition(format!("{t}: residues do not follow the pattern")));
    }
    let pattern = XPattern(x).vector();
    let mut ell = [0i64; 12];
    for i in 0..12 {
        ell[i] = c[i] - pattern[i];
    }
    if ell.iter().any(|&v| v < 0 || v % q != 0) {
        return Err(Error::Precondition(format!("{t}: remainder not in p^s Z>=0^12")));
    }
    Ok((s, ell, x))
}

/// The classes `T_{s,ℓ}` for `1 ≤ s ≤ r`, `ℓ ∈ L_s(mp^r)`.
///
/// Built from the definitions alone: each candidate `ℓ` is `p^s k` for
/// `k ∈ U(mp^{r−s})` (the pattern lies in the constraint kernel), and `ℓ` is
/// kept when some `ℓ + x` with `x ∈ S_{p^s}` lands in `U_ab^{(s)}(mp^r)`.
pub fn build_partition(p: Prime, m: i64, r: u32) -> Result<Vec<TClass>> {
    let n = check_params(p, m, r)?;
    let mut classes = Vec::new();
    for s in 1..=r {
        let q = p.pow(s)?;
        let xs = s_set(p, s)?;
        let ks = collect_u(m * p.pow(r - s)?);
        let found: Vec<TClass> = ks
            .par_iter()
            .filter_map(|k| {
                let ell = k.scale(q).components().to_owned();
                let members: Vec<(i64, Tuple12)> = xs
                    .iter()
                    .filter_map(|&x| XPattern(x).apply(&ell).map(|t| (x, t)))
                    .filter(|(_, t)| {
                        t.in_u(n)
                            && BlockPair::AB.matches(t, p)
                            && classify_s(t, p, r).ok() == Some(s)
                    })
                    .collect();
                (!members.is_empty()).then_some(TClass { s, ell, members })
            })
            .collect();
        classes.extend(found);
    }
    classes.sort_by_key(|c| (c.s, c.ell));
    Ok(classes)
}

fn member_check(t: &Tuple12) -> Result<i64> {
    let n = t.order();
    if !t.in_u(n) {
        return Err(Error::NotInU(t.to_string(), n));
    }
    Ok(n)
}

/// `(a,b,c,d) ↦ (d2,d3,d1, a2,a1,a3, c2,c3,c1, b3,b2,b1)`.
pub fn map_b1(t: &Tuple12) -> Result<Tuple12> {
    member_check(t)?;
    let [a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3] = *t.components();
    Tuple12::new([d2, d3, d1, a2, a1, a3, c2, c3, c1, b3, b2, b1])
}

/// `(a,b,c,d) ↦ (b2,b1,b3, d3,d2,d1, c3,c1,c2, a3,a1,a2)`.
pub fn map_b2(t: &Tuple12) -> Result<Tuple12> {
    member_check(t)?;
    let [a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3] = *t.components();
    Tuple12::new([b2, b1, b3, d3, d2, d1, c3, c1, c2, a3, a1, a2])
}

/// `(a,b,c,d) ↦ (a3,a2,a1, c1,c3,c2, b1,b3,b2, d1,d3,d2)`.
pub fn map_b3(t: &Tuple12) -> Result<Tuple12> {
    member_check(t)?;
    let [a1, a2, a3, b1, b2, b3, c1, c2, c3, d1, d2, d3] = *t.components();
    Tuple12::new([a3, a2, a1, c1, c3, c2, b1, b3, b2, d1, d3, d2])
}

pub type TupleMap = fn(&Tuple12) -> Result<Tuple12>;

/// A named map and the pair-set bijections it should realize.
pub type MapEntry = (&'static str, TupleMap, &'static [(BlockPair, BlockPair)]);

/// `map_b1`, `map_b2`, `map_b3` with their expected bijections.
pub fn maps_with_bijections() -> [MapEntry; 3] {
    [
        ("map_b1", map_b1, &[(BlockPair::AB, BlockPair::AD), (BlockPair::AC, BlockPair::CD)]),
        ("map_b2", map_b2, &[(BlockPair::AD, BlockPair::BD), (BlockPair::CD, BlockPair::BC)]),
        ("map_b3", map_b3, &[(BlockPair::AB, BlockPair::AC)]),
    ]
}

/// Everything the decomposition checks need about `U(mp^r)`, computed once.
pub struct Census {
    pub p: Prime,
    pub m: i64,
    pub r: u32,
    pub n: i64,
    /// `(t, B(t))` for every `t ∈ U(n)`, sorted by `t`.
    pub entries: Vec<(Tuple12, Integer)>,
}

impl Census {
    pub fn new(p: Prime, m: i64, r: u32) -> Result<Self> {
        let n = check_params(p, m, r)?;
        let entries = collect_u(n)
            .into_par_iter()
            .map(|t| {
                let b = b_term_unchecked(n, &t);
                (t, b)
            })
            .collect();
        Ok(Self { p, m, r, n, entries })
    }

    fn base_record(&self, check: &str) -> CheckRecord {
        CheckRecord::new(check)
            .param("p", self.p.get())
            .param("m", self.m)
            .param("r", self.r)
    }

    fn required_power(&self) -> i64 {
        3 * i64::from(self.r)
    }

    fn sum_where<F: Fn(&Tuple12) -> bool + Sync>(&self, pred: F) -> Integer {
        self.entries
            .par_iter()
            .filter(|(t, _)| pred(t))
            .map(|(_, b)| b.clone())
            .reduce(Integer::zero, |a, b| a + b)
    }

    fn nondivisible_count(&self, t: &Tuple12) -> usize {
        nondivisible_blocks(t, self.p).iter().filter(|&&b| b).count()
    }

    pub fn divisible_sum(&self) -> Integer {
        self.sum_where(|t| tuple_divisible(t, self.p))
    }

    pub fn nondivisible_sum(&self) -> Integer {
        self.sum_where(|t| !tuple_divisible(t, self.p))
    }

    /// Sum of `B` over tuples with exactly `count` non-divisible blocks.
    pub fn sum_with_nondivisible(&self, count: usize) -> Integer {
        self.sum_where(|t| self.nondivisible_count(t) == count)
    }

    pub fn pair_sum(&self, pair: BlockPair) -> Integer {
        self.sum_where(|t| pair.matches(t, self.p))
    }

    pub fn pair_set(&self, pair: BlockPair) -> BTreeSet<Tuple12> {
        self.entries
            .iter()
            .filter(|(t, _)| pair.matches(t, self.p))
            .map(|(t, _)| *t)
            .collect()
    }

    /// Tuples not divisible by `p` always have at least two non-divisible
    /// blocks; those with three or four have every `B` divisible by `p^{3r}`
    /// and so do their partial sums.
    pub fn claim_sums(&self) -> Vec<CheckRecord> {
        let p = self.p;
        let e = self.required_power();
        let r = i64::from(self.r);
        let violators = self
            .entries
            .iter()
            .filter(|(t, _)| !tuple_divisible(t, p) && self.nondivisible_count(t) < 2)
            .count();
        let mut out = vec![self
            .base_record("claim_at_least_two_nondivisible")
            .observed(violators)
            .required(0)
            .verdict(violators == 0)];

        for count in [4usize, 3] {
            let sum = self.sum_with_nondivisible(count);
            out.push(
                self.base_record("claim_partial_sum")
                    .param("nondivisible_blocks", count)
                    .valuation_at_least(nu_p(p, &sum), e),
            );
            let min_term = self
                .entries
                .iter()
                .filter(|(t, _)| self.nondivisible_count(t) == count)
                .map(|(_, b)| nu_p(p, b))
                .min()
                .unwrap_or(Valuation::Infinite);
            out.push(
                self.base_record("claim_each_term")
                    .param("nondivisible_blocks", count)
                    .valuation_at_least(min_term, e),
            );
        }

        // each non-divisible block contributes a factor p^r to its multinomial
        let min_block = self
            .entries
            .iter()
            .flat_map(|(t, _)| {
                (0..4)
                    .filter(|&i| !block_divisible(t.block(i), p))
                    .map(|i| nu_p(p, &multinomial(self.n, &t.block(i)).expect("member block")))
                    .collect::<Vec<_>>()
            })
            .min()
            .unwrap_or(Valuation::Infinite);
        out.push(
            self.base_record("claim_nondivisible_block_multinomial")
                .valuation_at_least(min_block, r),
        );
        out
    }

    /// The six pair sums agree, and the exactly-two total is six times `U_ab`.
    pub fn one2six(&self) -> Vec<CheckRecord> {
        let sums: Vec<(BlockPair, Integer)> =
            BlockPair::ALL.iter().map(|&pair| (pair, self.pair_sum(pair))).collect();
        let first = sums[0].1.clone();
        let all_equal = sums.iter().all(|(_, s)| *s == first);
        let observed: serde_json::Map<String, serde_json::Value> = sums
            .iter()
            .map(|(pair, s)| (pair.to_string(), json!(s.to_string())))
            .collect();
        let total_two = self.sum_with_nondivisible(2);
        vec![
            self.base_record("one2six_equal_sums")
                .observed(serde_json::Value::Object(observed))
                .required("all six equal")
                .verdict(all_equal),
            self.base_record("one2six_total")
                .equality(&total_two, Integer::from(6) * &first),
        ]
    }

    /// `map_bi` preserves `U(n)` and `B`, and realizes the expected pair-set
    /// bijections in one direction or the other.
    pub fn maps(&self) -> Result<Vec<CheckRecord>> {
        let lookup: BTreeMap<Tuple12, &Integer> =
            self.entries.iter().map(|(t, b)| (*t, b)).collect();
        let mut out = Vec::new();
        for (name, f, pairs) in maps_with_bijections() {
            let mut preserved = true;
            for (t, b) in &self.entries {
                let image = f(t)?;
                preserved &= lookup.get(&image).is_some_and(|bi| *bi == b);
            }
            out.push(
                self.base_record("map_preserves_b")
                    .param("map", name)
                    .observed(preserved)
                    .required(true)
                    .verdict(preserved),
            );
            for &(x, y) in pairs {
                let sx = self.pair_set(x);
                let sy = self.pair_set(y);
                let image = |s: &BTreeSet<Tuple12>| -> Result<BTreeSet<Tuple12>> {
                    s.iter().map(f).collect()
                };
                let direction = if image(&sx)? == sy {
                    Some(format!("{x} -> {y}"))
                } else if image(&sy)? == sx {
                    Some(format!("{y} -> {x}"))
                } else {
                    None
                };
                out.push(
                    self.base_record("map_bijection")
                        .param("map", name)
                        .param("between", format!("{x} <-> {y}"))
                        .observed(direction.clone().unwrap_or_else(|| "none".into()))
                        .required("bijection in some direction")
                        .verdict(direction.is_some()),
                );
            }
        }
        Ok(out)
    }

    /// `Σ_{p ∤ t} B(t) ≡ 0 (mod p^{3r})`, plus its consistency with an
    /// independent evaluation of A_δ(mp^r).
    pub fn suff(&self) -> Vec<CheckRecord> {
        let nondiv = self.nondivisible_sum();
        let full = a_delta_binomial(self.n as u64);
        vec![
            self.base_record("suff")
                .valuation_at_least(nu_p(self.p, &nondiv), self.required_power()),
            self.base_record("suff_consistency")
                .equality(&full - self.divisible_sum(), &nondiv),
        ]
    }

    /// `B(t) ≡ B(t/p) (mod p^{3r})` for every divisible `t`.
    pub fn prop_first_all(&self) -> Vec<CheckRecord> {
        let pp = self.p.get() as i64;
        let mut worst = Valuation::Infinite;
        let mut count = 0usize;
        for (t, b) in &self.entries {
            if let Some(small) = t.div_exact(pp) {
                count += 1;
                let diff = b - b_term_unchecked(self.n / pp, &small);
                worst = worst.min(nu_p(self.p, &diff));
            }
        }
        vec![self
            .base_record("prop_first_all")
            .param("divisible_tuples", count)
            .valuation_at_least(worst, self.required_power())]
    }

    /// `A(mp^r) − A(mp^{r−1})` equals the divisible deviation plus the
    /// non-divisible sum, and the divisible part rescales onto `U(mp^{r−1})`.
    pub fn split(&self) -> Vec<CheckRecord> {
        let p = self.p;
        let pp = p.get() as i64;
        let hi = a_delta_binomial(self.n as u64);
        let lo = a_delta_binomial((self.n / pp) as u64);
        let div = self.divisible_sum();
        let nondiv = self.nondivisible_sum();
        let deviation = &div - &lo;
        let rescaled: Integer = self
            .entries
            .iter()
            .filter_map(|(t, _)| t.div_exact(pp))
            .map(|t| b_term_unchecked(self.n / pp, &t))
            .fold(Integer::zero(), |a, b| a + b);
        vec![
            self.base_record("split_identity")
                .equality(&hi - &lo, &deviation + &nondiv),
            self.base_record("det_rescaled_sum").equality(&rescaled, &lo),
            self.base_record("det_deviation")
                .valuation_at_least(nu_p(p, &deviation), self.required_power()),
            self.base_record("two_term_difference")
                .valuation_at_least(nu_p(p, &(&hi - &lo)), self.required_power()),
        ]
    }

    /// The classes cover `U_ab(mp^r)` exactly once, every class is full, and
    /// the reduction of each member lands in its own class.
    pub fn partition(&self, classes: &[TClass]) -> Result<Vec<CheckRecord>> {
        let p = self.p;
        let direct = self.pair_set(BlockPair::AB);
        let mut seen: BTreeMap<Tuple12, usize> = BTreeMap::new();
        for c in classes {
            for t in c.tuples() {
                *seen.entry(*t).or_default() += 1;
            }
        }
        let overlaps = seen.values().filter(|&&k| k > 1).count();
        let union: BTreeSet<Tuple12> = seen.keys().copied().collect();
        let missing = direct.difference(&union).count();
        let extra = union.difference(&direct).count();

        let mut out = vec![self
            .base_record("partition")
            .param("classes", classes.len())
            .observed(json!({
                "covered": union.len(),
                "overlaps": overlaps,
                "missing": missing,
                "extra": extra,
            }))
            .required(json!({
                "covered": direct.len(),
                "overlaps": 0,
                "missing": 0,
                "extra": 0,
            }))
            .verdict(overlaps == 0 && missing == 0 && extra == 0)];

        for c in classes {
            let full = c.members.len() == s_set(p, c.s)?.len();
            let ell_valuation = c.ell.iter().map(|&v| nu_p(p, &Integer::from(v))).min();
            // equality can fail when p | m, e.g. at (5, 5, 1)
            let exact = self.m % p.get() as i64 != 0;
            let s_val = Valuation::Finite(i64::from(c.s));
            let nu_ok = ell_valuation.is_some_and(|v| if exact { v == s_val } else { v >= s_val });
            let mut reduces_home = true;
            for (x, t) in &c.members {
                reduces_home &= reduce_to_class(t, p, self.r)? == (c.s, c.ell, *x);
            }
            out.push(
                self.base_record("t_class")
                    .param("s", c.s)
                    .param("ell", format_ell(&c.ell))
                    .observed(json!({
                        "members": c.members.len(),
                        "nu_ell": ell_valuation.map(|v| v.to_json()),
                        "reduces_home": reduces_home,
                    }))
                    .required(json!({
                        "members": s_set(p, c.s)?.len(),
                        "nu_ell": if exact { json!(c.s) } else { json!(format!(">= {}", c.s)) },
                        "reduces_home": true,
                    }))
                    .verdict(full && nu_ok && reduces_home),
            );
        }
        Ok(out)
    }

    /// The exact inner-sum identity for every class, and `Σ_ab = Σ_classes`.
    pub fn reduce_all(&self, classes: &[TClass]) -> Result<Vec<CheckRecord>> {
        let mut out = Vec::with_capacity(classes.len() + 1);
        let mut total = Integer::zero();
        for c in classes {
            out.push(check_reduce_identity(self.p, self.m, self.r, c)?);
            total += class_sum(self.n, c);
        }
        out.push(
            self.base_record("rewrite_sum")
                .equality(self.pair_sum(BlockPair::AB), total),
        );
        Ok(out)
    }

    /// The pieces recombine into the non-divisible total.
    pub fn pipeline(&self, classes: &[TClass]) -> CheckRecord {
        let classes_total: Integer = classes.iter().map(|c| class_sum(self.n, c)).sum();
        let assembled = self.sum_with_nondivisible(4)
            + self.sum_with_nondivisible(3)
            + Integer::from(6) * classes_total;
        self.base_record("pipeline").equality(assembled, self.nondivisible_sum())
    }
}

fn class_sum(n: i64, c: &TClass) -> Integer {
    c.tuples().map(|t| b_term_unchecked(n, t)).sum()
}

/// Claim sums at `(p, m, r)`; see [`Census::claim_sums`].
pub fn check_claim_sums(p: Prime, m: i64, r: u32) -> Result<Vec<CheckRecord>> {
    Ok(Census::new(p, m, r)?.claim_sums())
}

/// Six pair sums at `(p, m, r)`; see [`Census::one2six`].
pub fn check_one2six(p: Prime, m: i64, r: u32) -> Result<Vec<CheckRecord>> {
    Ok(Census::new(p, m, r)?.one2six())
}

/// Non-divisible total at `(p, m, r)`; see [`Census::suff`].
pub fn check_suff(p: Prime, m: i64, r: u32) -> Result<Vec<CheckRecord>> {
    Ok(Census::new(p, m, r)?.suff())
}

/// `Σ_{T_{s,ℓ}} B = (−1)^{p^s(k2+k4+k12)} m² p^{2r} multinomial(c) multinomial(d)
/// Σ'_x (−1)^x/(a1 b3) · binomial(n−1, a1−1) binomial(n−a1, a3)
/// binomial(n−1, b3−1) binomial(n−b3, b1)`, both sides exact.
pub fn check_reduce_identity(p: Prime, m: i64, r: u32, class: &TClass) -> Result<CheckRecord> {
    let n = check_params(p, m, r)?;
    let q = p.pow(class.s)?;
    let k = class.k(p)?;
    let lhs: Integer = class
        .tuples()
        .map(|t| b_term(n, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();

    let ell = &class.ell;
    let mut inner = Rational::zero();
    for x in s_set(p, class.s)? {
        let Some(t) = XPattern(x).apply(ell) else {
            continue;
        };
        if !t.in_u(n) {
            continue;
        }
        let c = t.components();
        let (a1, a3, b1, b3) = (c[0], c[2], c[3], c[5]);
        let sign = if x % 2 == 0 { 1 } else { -1 };
        let product = binomial(n - 1, a1 - 1)?
            * binomial(n - a1, a3)?
            * binomial(n - 1, b3 - 1)?
            * binomial(n - b3, b1)?;
        inner += Rational::new(Integer::from(sign) * product, Integer::from(a1 * b3));
    }
    let outer_sign = if (q * (k[1] + k[3] + k[11])) % 2 == 0 { 1 } else { -1 };
    let prefactor = Integer::from(outer_sign)
        * Integer::from(m * m)
        * p.to_integer().pow(2 * r)
        * multinomial(n, &[ell[6], ell[7], ell[8]])?
        * multinomial(n, &[ell[9], ell[10], ell[11]])?;
    let rhs = Rational::from_integer(prefactor) * inner;
    let integral = rhs.is_integer();
    let equal = Rational::from_integer(lhs.clone()) == rhs;
    Ok(CheckRecord::new("reduce_identity")
        .param("p", p.get())
        .param("m", m)
        .param("r", r)
        .param("s", class.s)
        .param("ell", format_ell(ell))
        .observed(json!({ "lhs": lhs.to_string(), "rhs": rhs.to_string() }))
        .required("lhs == rhs")
        .verdict(equal && integral))
}

/// `B(t) ≡ B(t/p) (mod p^{3r})` for `t ∈ U(mp^r)` with `p | t`.
pub fn check_prop_first(p: Prime, m: i64, r: u32, t: &Tuple12) -> Result<CheckRecord> {
    let n = check_params(p, m, r)?;
    let pp = p.get() as i64;
    let small = t
        .div_exact(pp)
        .ok_or_else(|| Error::Precondition(format!("{t} is not divisible by {pp}")))?;
    let big_b = b_term(n, t)?;
    let small_b = b_term(n / pp, &small)?;
    Ok(CheckRecord::new("prop_first")
        .param("p", p.get())
        .param("m", m)
        .param("r", r)
        .param("tuple", t.to_string())
        .valuation_at_least(nu_p(p, &(big_b - small_b)), 3 * i64::from(r)))
}

/// Every decomposition check at `(p, m, r)`, sharing one enumeration.
pub fn decompose(p: Prime, m: i64, r: u32) -> Result<Vec<CheckRecord>> {
    let census = Census::new(p, m, r)?;
    let classes = build_partition(p, m, r)?;
    let mut out = Vec::new();
    out.extend(census.claim_sums());
    out.extend(census.one2six());
    out.extend(census.maps()?);
    out.extend(census.partition(&classes)?);
    out.extend(census.reduce_all(&classes)?);
    out.push(census.pipeline(&classes));
    out.extend(census.suff());
    out.extend(census.prop_first_all());
    out.extend(census.split());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn t(c: [i64; 12]) -> Tuple12 {
        Tuple12::new(c).unwrap()
    }

    #[test]
    fn s_set_examples() {
        assert_eq!(s_set(p(5), 1).unwrap(), vec![1, 2, 3, 4]);
        let s52 = s_set(p(5), 2).unwrap();
        assert_eq!(s52.len(), 20);
        assert!(s52.iter().all(|x| x % 5 != 0));
        assert_eq!(s_set(p(7), 1).unwrap(), (1..=6).collect::<Vec<_>>());
    }

    #[test]
    fn u_ab_examples() {
        let diag = t([5, 0, 0, 5, 0, 0, 0, 5, 0, 0, 0, 5]);
        assert!(!enumerate_u_ab(5, p(5)).any(|x| x == diag));
        assert!(enumerate_u_ab(5, p(5)).any(|x| x.components()[0] == 1));
        assert_eq!(enumerate_u_ab(0, p(5)).count(), 0);
    }

    #[test]
    fn classify_examples() {
        let member = enumerate_u_ab(5, p(5))
            .find(|x| x.block(2) == [5, 0, 0] && x.block(3) == [0, 0, 5])
            .expect("a member with c = (5,0,0), d = (0,0,5)");
        assert_eq!(classify_s(&member, p(5), 1).unwrap(), 1);

        // order 50 = 2 * 5^2, c and d blocks divisible by 25
        let deep = t([1, 24, 25, 0, 24, 26, 25, 0, 25, 25, 25, 0]);
        assert!(deep.in_u(50));
        assert_eq!(classify_s(&deep, p(5), 2).unwrap(), 2);

        let shallow = t([1, 4, 45, 0, 4, 46, 45, 0, 5, 5, 45, 0]);
        assert!(shallow.in_u(50));
        assert_eq!(classify_s(&shallow, p(5), 2).unwrap(), 1);

        assert!(classify_s(&t([5, 0, 0, 5, 0, 0, 0, 5, 0, 0, 0, 5]), p(5), 1).is_err());
    }

    #[test]
    fn x_pattern_lies_in_kernel() {
        let n = 6;
        for base in crate::sequences::enumerate_u(n) {
            for x in -3..=3 {
                if let Some(moved) = XPattern(x).apply(base.components()) {
                    assert!(moved.in_u(n));
                }
            }
        }
    }

    #[test]
    fn map_b3_is_involution() {
        for x in crate::sequences::enumerate_u(4) {
            assert_eq!(map_b3(&map_b3(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn maps_preserve_b_on_small_u() {
        for n in 0..=4 {
            for x in crate::sequences::enumerate_u(n) {
                let b = b_term(n, &x).unwrap();
                for f in [map_b1, map_b2, map_b3] {
                    let image = f(&x).unwrap();
                    assert!(image.in_u(n));
                    assert_eq!(b_term(n, &image).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn maps_reject_non_members() {
        let bad = t([1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1]);
        assert!(map_b1(&bad).is_err());
    }

    #[test]
    fn map_b1_carries_u_ad_onto_u_ab() {
        let prime = p(5);
        let ab: BTreeSet<_> = enumerate_u_pair(5, prime, BlockPair::AB).collect();
        let ad: BTreeSet<_> = enumerate_u_pair(5, prime, BlockPair::AD).collect();
        let image: BTreeSet<_> = ad.iter().map(|x| map_b1(x).unwrap()).collect();
        assert_eq!(image, ab);
    }

    #[test]
    fn partition_at_smallest_case() {
        let prime = p(5);
        let classes = build_partition(prime, 1, 1).unwrap();
        let census = Census::new(prime, 1, 1).unwrap();
        let records = census.partition(&classes).unwrap();
        assert!(records.iter().all(|r| r.passed()), "{records:#?}");
        for c in &classes {
            assert_eq!(c.members.len(), 4);
        }
    }

    #[test]
    fn reduce_identity_on_empty_class() {
        // no x keeps a2 = -x nonnegative, so the class is empty on both sides
        let class = TClass {
            s: 1,
            ell: [5, 0, 0, 0, 0, 5, 0, 5, 0, 0, 0, 5],
            members: Vec::new(),
        };
        let rec = check_reduce_identity(p(5), 1, 1, &class).unwrap();
        assert!(rec.passed(), "{rec:?}");
    }

    #[test]
    fn prop_first_examples() {
        let base = t([1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1]);
        assert!(check_prop_first(p(5), 1, 1, &base.scale(5)).unwrap().passed());

        let base = t([1, 1, 0, 1, 0, 1, 0, 0, 2, 1, 1, 0]);
        let rec = check_prop_first(p(5), 2, 1, &base.scale(5)).unwrap();
        assert!(rec.passed());
        assert_eq!(
            b_term(10, &base.scale(5)).unwrap(),
            Integer::from(252i64 * 252 * 252)
        );
        assert!(check_prop_first(p(5), 1, 1, &base).is_err());
    }

    #[test]
    fn decompose_smallest_case() {
        let records = decompose(p(5), 1, 1).unwrap();
        let failing: Vec<_> = records.iter().filter(|r| !r.passed()).collect();
        assert!(failing.is_empty(), "{failing:#?}");
    }

    #[test]
    fn one2six_sums_at_smallest_case() {
        let census = Census::new(p(5), 1, 1).unwrap();
        let sums: Vec<_> = BlockPair::ALL.iter().map(|&x| census.pair_sum(x)).collect();
        assert!(sums.iter().all(|s| *s == sums[0]));
    }

    #[test]
    fn pair_sets_empty_at_zero() {
        for pair in BlockPair::ALL {
            assert_eq!(enumerate_u_pair(0, p(5), pair).count(), 0);
        }
    }

    #[test]
    fn rejects_small_primes() {
        assert!(Census::new(p(3), 1, 1).is_err());
        assert!(build_partition(p(2), 1, 1).is_err());
    }
}
