//! Sums of two squares.
//!
//! Decompositions are generated from the Gaussian-integer factorization of
//! `m`: each prime `p = 1 (mod 4)` is split as `a^2 + b^2` by the
//! Hermite-Serret descent (Euclid's algorithm on `p` and a square root of
//! `-1`), and the conjugate choices for every prime are multiplied out.
//! Counts come straight from the exponents without building the list.

use super::factor::{factorize_unchecked, FACTOR_LIMIT};
use super::residue::sqrt_minus_one;
use crate::error::{Error, Result};

/// Splits a prime `p = 1 (mod 4)` as `a^2 + b^2` with `0 < a < b`.
pub fn prime_two_squares(p: u64) -> (u64, u64) {
    debug_assert!(p % 4 == 1);
    let x = sqrt_minus_one(p);
    let (mut r0, mut r1) = (p, x);
    while r1 * r1 > p {
        (r0, r1) = (r1, r0 % r1);
    }
    let a = r1;
    let b = (p - a * a).isqrt();
    debug_assert_eq!(a * a + b * b, p);
    (a.min(b), a.max(b))
}

type Gaussian = (i128, i128);

#[inline]
fn gmul(x: Gaussian, y: Gaussian) -> Gaussian {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

fn gpow(z: Gaussian, e: u32) -> Gaussian {
    (0..e).fold((1, 0), |acc, _| gmul(acc, z))
}

/// All `(a, b)` with `a <= b` and `a^2 + b^2 = m`, sorted by `a`.
///
/// Pairs with `a = 0` are kept only when `allow_zero` is set.
pub fn two_square_decompositions(m: u64, allow_zero: bool) -> Result<Vec<(u64, u64)>> {
    if m >= FACTOR_LIMIT {
        return Err(Error::OutOfRange(format!("{m} is not below 2^63")));
    }
    Ok(decompositions_unchecked(m, allow_zero))
}

pub(crate) fn decompositions_unchecked(m: u64, allow_zero: bool) -> Vec<(u64, u64)> {
    if m == 0 {
        return if allow_zero { vec![(0, 0)] } else { Vec::new() };
    }
    let f = factorize_unchecked(m);
    let mut base: Gaussian = (1, 0);
    let mut split = Vec::new();
    for &(p, e) in &f {
        match p % 4 {
            2 => base = gmul(base, gpow((1, 1), e)),
            3 if e % 2 == 1 => return Vec::new(),
            3 => base = gmul(base, (p.pow(e / 2) as i128, 0)),
            _ => {
                let (a, b) = prime_two_squares(p);
                split.push(((a as i128, b as i128), e));
            }
        }
    }

    let mut reps = vec![base];
    for (pi, e) in split {
        let conj = (pi.0, -pi.1);
        let mut next = Vec::with_capacity(reps.len() * (e as usize + 1));
        for z in &reps {
            for k in 0..=e {
                next.push(gmul(*z, gmul(gpow(pi, k), gpow(conj, e - k))));
            }
        }
        reps = next;
    }

    let mut out: Vec<(u64, u64)> = reps
        .into_iter()
        .map(|(x, y)| {
            let (x, y) = (x.unsigned_abs() as u64, y.unsigned_abs() as u64);
            (x.min(y), x.max(y))
        })
        .filter(|&(a, _)| allow_zero || a > 0)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Shape of the two-square count for a single `m`, read off its factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TwoSquareShape {
    /// `prod (e + 1)` over primes `1 (mod 4)`, or zero if `m` is not a sum of two squares.
    divisor_weight: u64,
    is_square: bool,
    is_twice_square: bool,
}

fn shape(m: u64) -> TwoSquareShape {
    debug_assert!(m > 0);
    let mut weight = 1u64;
    for &(p, e) in &factorize_unchecked(m) {
        match p % 4 {
            1 => weight *= e as u64 + 1,
            3 if e % 2 == 1 => {
                weight = 0;
                break;
            }
            _ => {}
        }
    }
    let is_square = weight > 0 && m.isqrt().pow(2) == m;
    let is_twice_square = weight > 0 && m % 2 == 0 && (m / 2).isqrt().pow(2) == m / 2;
    TwoSquareShape {
        divisor_weight: weight,
        is_square,
        is_twice_square,
    }
}

/// Number of ordered pairs `(x1, x2)` with `x1^2 + x2^2 = m`, coordinates
/// positive (or non-negative when `allow_zero` is set).
///
/// An unordered pair `(a, b)` with `0 < a < b` contributes 2, `(a, a)`
/// contributes 1, and `(0, b)` contributes 2 only under `allow_zero`.
pub fn ordered_two_square_count(m: u64, allow_zero: bool) -> u64 {
    if m == 0 {
        return allow_zero as u64;
    }
    let s = shape(m);
    if s.divisor_weight == 0 {
        return 0;
    }
    let positive = s.divisor_weight - s.is_square as u64;
    if allow_zero && s.is_square {
        positive + 2
    } else {
        positive
    }
}

/// Number of unordered pairs `a <= b` with `a^2 + b^2 = m`; the length of
/// [`two_square_decompositions`] without building it.
pub fn unordered_two_square_count(m: u64, allow_zero: bool) -> u64 {
    if m == 0 {
        return allow_zero as u64;
    }
    let s = shape(m);
    if s.divisor_weight == 0 {
        return 0;
    }
    let positive_ordered = s.divisor_weight - s.is_square as u64;
    let unordered = (positive_ordered + s.is_twice_square as u64) / 2;
    unordered + (allow_zero && s.is_square) as u64
}

/// Whether `m = a^2 + b^2` with `a, b >= 1`.
pub fn is_sum_of_two_positive_squares(m: u64) -> bool {
    m >= 2 && ordered_two_square_count(m, false) > 0
}

/// Number of `(x, y)` in `Z^2` with `x^2 + y^2 = m` (signs and order counted).
pub fn signed_two_square_count(m: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    4 * shape(m).divisor_weight
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(m: u64, allow_zero: bool) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let lo = if allow_zero { 0 } else { 1 };
        let mut a = lo;
        while 2 * a * a <= m {
            let b2 = m - a * a;
            let b = b2.isqrt();
            if b * b == b2 {
                out.push((a, b));
            }
            a += 1;
        }
        out
    }

    #[test]
    fn examples() {
        assert_eq!(two_square_decompositions(0, true).unwrap(), vec![(0, 0)]);
        assert!(two_square_decompositions(0, false).unwrap().is_empty());
        assert_eq!(two_square_decompositions(25, true).unwrap(), vec![(0, 5), (3, 4)]);
        assert!(two_square_decompositions(21, true).unwrap().is_empty());
        assert!(two_square_decompositions(1 << 63, true).is_err());
    }

    #[test]
    fn prime_splits() {
        assert_eq!(prime_two_squares(5), (1, 2));
        assert_eq!(prime_two_squares(13), (2, 3));
        let (a, b) = prime_two_squares(1_000_000_009);
        assert!(a <= b);
        assert_eq!(a * a + b * b, 1_000_000_009);
    }

    #[test]
    fn matches_brute_force_up_to_1e5() {
        for m in 0..=100_000u64 {
            for allow_zero in [false, true] {
                let expected = brute(m, allow_zero);
                let got = two_square_decompositions(m, allow_zero).unwrap();
                assert_eq!(got, expected, "m = {m}, allow_zero = {allow_zero}");
                assert_eq!(unordered_two_square_count(m, allow_zero), expected.len() as u64);
                let ordered: u64 = expected
                    .iter()
                    .map(|&(a, b)| if a == b || (a == 0 && !allow_zero) { 1 } else { 2 })
                    .sum();
                assert_eq!(ordered_two_square_count(m, allow_zero), ordered, "m = {m}");
            }
        }
    }

    #[test]
    fn large_inputs() {
        let m = 5u64.pow(6) * 13u64.pow(3) * 2 * 9 * 1_000_000_009;
        let reps = two_square_decompositions(m, false).unwrap();
        assert!(!reps.is_empty());
        for (a, b) in reps {
            assert_eq!(a as u128 * a as u128 + b as u128 * b as u128, m as u128);
        }
    }

    #[test]
    fn signed_count() {
        assert_eq!(signed_two_square_count(1), 4);
        assert_eq!(signed_two_square_count(25), 12);
        assert_eq!(signed_two_square_count(3), 0);
    }
}
