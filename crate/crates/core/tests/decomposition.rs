use std::collections::BTreeMap;

use sporadic_core::decomposition::{
    build_partition, nondivisible_blocks, BlockPair, Census,
};
use sporadic_core::exactarith::nu_p;
use sporadic_core::{Integer, Prime, Valuation};

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

/// How many tuples of `U(mp^r)` have 0, 1, 2, 3, 4 non-divisible blocks.
fn block_census(p: u64, m: i64, r: u32) -> BTreeMap<usize, usize> {
    let census = Census::new(prime(p), m, r).unwrap();
    let mut out = BTreeMap::new();
    for (t, _) in &census.entries {
        let k = nondivisible_blocks(t, prime(p)).iter().filter(|&&b| b).count();
        *out.entry(k).or_default() += 1;
    }
    out
}

#[test]
fn block_patterns_match_frozen_counts() {
    let expect = |pairs: &[(usize, usize)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
    assert_eq!(block_census(5, 1, 1), expect(&[(0, 9), (2, 48), (3, 120), (4, 642)]));
    assert_eq!(block_census(7, 1, 1), expect(&[(0, 9), (2, 72), (3, 252), (4, 2727)]));
    assert_eq!(
        block_census(5, 2, 1),
        expect(&[(0, 42), (2, 384), (3, 2448), (4, 10788)])
    );
}

#[test]
fn pair_sums_match_frozen_values() {
    for (p, m, value) in [(5, 1, 0i64), (7, 1, 0), (5, 2, 11_923_002_500)] {
        let census = Census::new(prime(p), m, 1).unwrap();
        for pair in BlockPair::ALL {
            assert_eq!(census.pair_sum(pair), Integer::from(value), "{pair} at p={p}, m={m}");
        }
        assert_eq!(census.sum_with_nondivisible(2), Integer::from(6 * value));
    }
}

#[test]
fn class_counts() {
    for (p, m, classes) in [(5, 1, 2), (7, 1, 2), (5, 2, 16)] {
        let built = build_partition(prime(p), m, 1).unwrap();
        assert_eq!(built.len(), classes);
        assert!(built.iter().all(|c| c.members.len() == (p - 1) as usize));
    }
}

#[test]
fn second_level_partition_is_exact() {
    // (5,1,2): n = 25 exercises both s = 1 and s = 2
    let p = prime(5);
    let census = Census::new(p, 1, 2).unwrap();
    let classes = build_partition(p, 1, 2).unwrap();
    assert!(classes.iter().any(|c| c.s == 2));
    let records = census.partition(&classes).unwrap();
    assert!(records.iter().all(|r| r.passed()));
    let reduce = census.reduce_all(&classes).unwrap();
    assert!(reduce.iter().all(|r| r.passed()));
}

#[test]
fn ell_valuation_can_exceed_s_when_p_divides_m() {
    let p = prime(5);
    let classes = build_partition(p, 5, 1).unwrap();
    let ell = [0, 25, 0, 0, 25, 0, 25, 0, 0, 0, 0, 25];
    let class = classes.iter().find(|c| c.ell == ell).expect("class present");
    assert_eq!(class.s, 1);
    let nu = class.ell.iter().map(|&v| nu_p(p, &Integer::from(v))).min().unwrap();
    assert_eq!(nu, Valuation::Finite(2));
}

#[test]
fn three_and_four_block_terms_divisible() {
    for (p, m) in [(5, 1), (7, 1), (5, 2)] {
        let census = Census::new(prime(p), m, 1).unwrap();
        assert!(census.claim_sums().iter().all(|r| r.passed()));
        assert!(nu_p(prime(p), &census.nondivisible_sum()).at_least(3));
    }
}

#[test]
fn maps_realize_all_pair_bijections() {
    for (p, m) in [(5, 1), (7, 1), (5, 2)] {
        let census = Census::new(prime(p), m, 1).unwrap();
        let records = census.maps().unwrap();
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| r.passed()), "{records:#?}");
    }
}
