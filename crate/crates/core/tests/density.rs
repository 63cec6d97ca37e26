use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use microsq::density::{
    a_term, density_table, singular_series_additive, singular_series_multiplicative, truncation_gap_stats,
    truncation_identity_check,
};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `#{x mod m : x1^2 + x2^2 + x3^2 = n mod m} / m^2`.
fn congruence_density(m: u64, n: u64) -> f64 {
    let mut by_square = vec![0u64; m as usize];
    for x in 0..m {
        by_square[(x * x % m) as usize] += 1;
    }
    let mut count = 0u64;
    for (s1, &c1) in by_square.iter().enumerate() {
        for (s2, &c2) in by_square.iter().enumerate() {
            let s3 = (n % m + 2 * m - s1 as u64 - s2 as u64) % m;
            count += c1 * c2 * by_square[s3 as usize];
        }
    }
    count as f64 / (m * m) as f64
}

#[test]
fn divisor_sums_count_congruence_solutions() {
    for m in 1..=60u64 {
        for n in 0..=70u64 {
            let sum: f64 = (1..=m).filter(|d| m % d == 0).map(|d| a_term(d, n).unwrap()).sum();
            let want = congruence_density(m, n);
            assert!((sum - want).abs() < 1e-9, "m = {m}, n = {n}: {sum} vs {want}");
        }
    }
}

#[test]
fn random_pairs_match_the_residue_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tables: HashMap<u64, Vec<f64>> = HashMap::new();
    for _ in 0..10_000 {
        let q = rng.gen_range(1..=5000u64);
        let n = rng.gen_range(1..=1_000_000u64);
        let table = tables.entry(q).or_insert_with(|| density_table(q).unwrap());
        let want = table[(n % q) as usize];
        let got = a_term(q, n).unwrap();
        assert!((got - want).abs() < 1e-9, "A({q}; {n}): {got} vs {want}");
    }
}

#[test]
fn terms_obey_the_gauss_sum_bound() {
    // |S(q, a)| <= sqrt(2q), so |A(q; n)| <= phi(q) (2q)^{3/2} / q^3 < 2 sqrt(2/q).
    for q in 1..=2000u64 {
        let bound = 2.0 * (2.0 / q as f64).sqrt() + 1e-12;
        for n in [1u64, 2, 3, 5, 6, 7, 12, 999_998] {
            let a = a_term(q, n).unwrap();
            assert!(a.abs() <= bound, "A({q}; {n}) = {a}");
        }
    }
}

#[test]
fn truncation_identity_holds_across_w() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let n = rng.gen_range(1..=1_000_000u64);
        for w in [2.0, 5.0, 10.0, 12.0] {
            let r = truncation_identity_check(n, w).unwrap();
            assert!(r < 1e-8, "n = {n}, W = {w}: {r}");
        }
    }
}

#[test]
fn series_agree_for_large_w() {
    // The two truncations differ only through the tail, which shrinks as W grows.
    let n = 123_457;
    let m = singular_series_multiplicative(n, 400.0).unwrap().value;
    let a = singular_series_additive(n, 400.0).unwrap();
    assert!((m - a).abs() < 0.05 * m, "{m} vs {a}");
}

#[test]
fn truncation_gap_baseline() {
    let s = truncation_gap_stats(1_000_000, 10.0, Some(97)).unwrap();
    assert_eq!(s.evaluated, 5155);
    assert_eq!(s.sample_count, 500_000);
    let frozen = 0.237_245_082_463_779;
    assert!(((s.ratio - frozen) / frozen).abs() < 0.01, "ratio {}", s.ratio);
}

proptest! {
    #[test]
    fn multiplicative_in_the_modulus(q1 in 1u64..200, q2 in 1u64..200, n in 1u64..1_000_000) {
        prop_assume!(gcd(q1, q2) == 1);
        let lhs = a_term(q1 * q2, n).unwrap();
        let rhs = a_term(q1, n).unwrap() * a_term(q2, n).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn periodic_in_n(q in 1u64..3000, n in 1u64..1_000_000) {
        let a = a_term(q, n).unwrap();
        let b = a_term(q, n + q).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
