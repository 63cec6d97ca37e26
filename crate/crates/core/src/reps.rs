//! Representations `n = x1^2 + x2^2 + x3^2` with a bounded microsquare `x3`.
//!
//! Counts run over the microsquare and read the number of two-square
//! representations of `n - x3^2` off its factorization. Coordinates are
//! positive unless `allow_zero` is set, in which case every coordinate
//! (including the microsquare) may be zero.

use serde::{Deserialize, Serialize};

use crate::arith::{
    decompositions_unchecked, is_sum_of_two_positive_squares, ordered_two_square_count,
    signed_two_square_count, unordered_two_square_count,
};
use crate::error::{Error, Result};
use crate::expsum::ThetaParams;

/// Largest `n` accepted by the counting routines.
pub const REPS_LIMIT: u64 = 1 << 62;

/// `n = x1^2 + x2^2 + x3^2` with `x3` the microsquare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepTriple {
    pub x1: u64,
    pub x2: u64,
    pub x3: u64,
}

/// `n = x1^2 + x2^2 + x3^2 + x4^2` with `x3, x4` the small squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepQuad {
    pub x1: u64,
    pub x2: u64,
    pub x3: u64,
    pub x4: u64,
}

fn check_n(n: u64) -> Result<()> {
    if n >= REPS_LIMIT {
        return Err(Error::OutOfRange(format!("n = {n} is not below 2^62")));
    }
    Ok(())
}

fn microsquares(n: u64, y: u64, allow_zero: bool) -> impl Iterator<Item = u64> {
    let top = y.min(n.isqrt());
    (if allow_zero { 0 } else { 1 })..=top
}

/// `R(n; Y)`: representations with `x3 <= Y`.
///
/// With `ordered` set the pairs `(x1, x2)` are ordered, which is the count
/// picked out by `f^2 g`; otherwise only `x1 <= x2` is counted.
pub fn count_reps(n: u64, y: u64, ordered: bool, allow_zero: bool) -> Result<u64> {
    check_n(n)?;
    Ok(microsquares(n, y, allow_zero)
        .map(|x3| {
            let m = n - x3 * x3;
            if ordered {
                ordered_two_square_count(m, allow_zero)
            } else {
                unordered_two_square_count(m, allow_zero)
            }
        })
        .sum())
}

/// Every representation with `x3 <= Y` and `x1 <= x2`, by increasing `x3`
/// and then increasing `x1`.
pub fn enumerate_reps(n: u64, y: u64, allow_zero: bool) -> Result<Vec<RepTriple>> {
    check_n(n)?;
    let mut out = Vec::new();
    for x3 in microsquares(n, y, allow_zero) {
        for (x1, x2) in decompositions_unchecked(n - x3 * x3, allow_zero) {
            out.push(RepTriple { x1, x2, x3 });
        }
    }
    Ok(out)
}

/// Least `y >= 1` with `n - y^2` a sum of two positive squares.
pub fn min_microsquare(n: u64) -> Option<u64> {
    if !(3..REPS_LIMIT).contains(&n) {
        return None;
    }
    (1..=(n - 2).isqrt()).find(|&y| is_sum_of_two_positive_squares(n - y * y))
}

/// `R_0(n; Y)`: ordered positive `(x1, x2)` with `1 <= x3, x4 <= Y`.
pub fn count_reps_four(n: u64, y: u64) -> Result<u64> {
    check_n(n)?;
    let top = y.min(n.isqrt());
    let mut total = 0;
    for x3 in 1..=top {
        let rest = n - x3 * x3;
        for x4 in 1..=top.min(rest.isqrt()) {
            total += ordered_two_square_count(rest - x4 * x4, false);
        }
    }
    Ok(total)
}

/// `r_3(n)`: integer points on the sphere of radius `sqrt(n)`, all signs
/// and orders counted.
pub fn signed_rep_count(n: u64) -> Result<u64> {
    check_n(n)?;
    let top = n.isqrt();
    Ok((0..=top)
        .map(|x3| {
            let r2 = signed_two_square_count(n - x3 * x3);
            if x3 == 0 {
                r2
            } else {
                2 * r2
            }
        })
        .sum())
}

/// Number of `(x1, x2, x3)` with `P/2 < x1, x2 <= P`, `1 <= x3 <= Y` and
/// `x1^2 + x2^2 + x3^2 = n`, by direct search.
pub fn boxed_rep_count(n: u64, params: &ThetaParams) -> u64 {
    let (lo, hi) = (params.outer_start(), params.p);
    let mut count = 0;
    for x3 in 1..=params.y {
        let Some(rest) = n.checked_sub(x3 * x3) else {
            break;
        };
        for x1 in lo..=hi {
            let Some(m) = rest.checked_sub(x1 * x1) else {
                break;
            };
            let x2 = m.isqrt();
            if x2 * x2 == m && (lo..=hi).contains(&x2) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(n: u64, y: u64, ordered: bool, allow_zero: bool) -> u64 {
        let s = n.isqrt();
        let start = if allow_zero { 0 } else { 1 };
        let mut c = 0;
        for x3 in start..=y.min(s) {
            for x1 in start..=s {
                for x2 in start..=s {
                    if x1 * x1 + x2 * x2 + x3 * x3 == n && (ordered || x1 <= x2) {
                        c += 1;
                    }
                }
            }
        }
        c
    }

    #[test]
    fn examples() {
        assert_eq!(count_reps(3, 1, true, false).unwrap(), 1);
        assert_eq!(count_reps(7, 2, true, false).unwrap(), 0);
        for n in [1, 3, 50, 1000] {
            assert_eq!(count_reps(n, 0, true, false).unwrap(), 0);
        }
        assert_eq!(
            enumerate_reps(6, 2, false).unwrap(),
            vec![RepTriple { x1: 1, x2: 2, x3: 1 }, RepTriple { x1: 1, x2: 1, x3: 2 }]
        );
        assert!(enumerate_reps(7, 2, false).unwrap().is_empty());
        assert!(enumerate_reps(5, 2, false).unwrap().is_empty());
        assert!(enumerate_reps(5, 2, true)
            .unwrap()
            .contains(&RepTriple { x1: 0, x2: 1, x3: 2 }));
        assert_eq!(min_microsquare(3), Some(1));
        assert_eq!(min_microsquare(7), None);
        assert_eq!(min_microsquare(11), Some(1));
        assert_eq!(min_microsquare(2), None);
        assert_eq!(count_reps_four(4, 1).unwrap(), 1);
        assert_eq!(count_reps_four(7, 1).unwrap(), 2);
        assert_eq!(count_reps_four(100, 0).unwrap(), 0);
        assert_eq!(signed_rep_count(1).unwrap(), 6);
        assert_eq!(signed_rep_count(3).unwrap(), 8);
        assert_eq!(signed_rep_count(7).unwrap(), 0);
    }

    #[test]
    fn matches_brute_force_small() {
        for n in 0..=600u64 {
            for y in [0, 1, 3, 10, n.isqrt()] {
                for ordered in [false, true] {
                    for allow_zero in [false, true] {
                        assert_eq!(
                            count_reps(n, y, ordered, allow_zero).unwrap(),
                            brute(n, y, ordered, allow_zero),
                            "n={n} y={y} ordered={ordered} zero={allow_zero}"
                        );
                    }
                }
                assert_eq!(
                    enumerate_reps(n, y, false).unwrap().len() as u64,
                    count_reps(n, y, false, false).unwrap()
                );
            }
        }
    }

    #[test]
    fn boxed_count_matches_filter() {
        let params = ThetaParams::from_scale(400, 5).unwrap();
        for n in 200..=425 {
            let expected = enumerate_reps(n, 5, false)
                .unwrap()
                .into_iter()
                .filter(|r| (11..=20).contains(&r.x1) && (11..=20).contains(&r.x2))
                .map(|r| if r.x1 == r.x2 { 1 } else { 2 })
                .sum::<u64>();
            assert_eq!(boxed_rep_count(n, &params), expected, "n = {n}");
        }
    }

    #[test]
    fn four_square_brute() {
        for n in 0..=300u64 {
            for y in [0, 1, 2, 5] {
                let s = n.isqrt();
                let mut c = 0;
                for x1 in 1..=s {
                    for x2 in 1..=s {
                        for x3 in 1..=y.min(s) {
                            for x4 in 1..=y.min(s) {
                                c += (x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4 == n) as u64;
                            }
                        }
                    }
                }
                assert_eq!(count_reps_four(n, y).unwrap(), c, "n={n} y={y}");
            }
        }
    }
}
