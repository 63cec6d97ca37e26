//! Integer points on the sphere `x^2 + y^2 + z^2 = n` and their minimum spacing.
//!
//! Points are generated from the representatives `0 <= a <= b <= c` of the
//! orbits of the 48-element group of signed coordinate permutations.
//! Distances are handled through the integer `D = min |x - y|^2`; the spacing
//! of the normalized points `x / sqrt(n)` is `sqrt(D / n)`, or `D / n` under
//! the squared convention.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::decompositions_unchecked;
use crate::error::{Error, Result};

/// Largest `n` accepted by [`lattice_points`].
pub const SPHERE_LIMIT: u64 = 10_000_000_000;

/// Largest point count for the all-pairs spacing.
pub const ALL_PAIRS_LIMIT: usize = 5_000;

pub type Point = [i64; 3];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpherePointSet {
    pub n: u64,
    /// Sorted lexicographically.
    pub points: Vec<Point>,
    pub count: usize,
    /// Orbit representatives `[a, b, c]` with `0 <= a <= b <= c`.
    pub orbits: Vec<[u64; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Metric {
    Euclidean,
    SquaredEuclidean,
}

fn chamber_points(n: u64) -> Vec<[u64; 3]> {
    let mut out = Vec::new();
    let mut a = 0u64;
    while 3 * a * a <= n {
        for (b, c) in decompositions_unchecked(n - a * a, true) {
            if b >= a {
                out.push([a, b, c]);
            }
        }
        a += 1;
    }
    out
}

fn orbit(rep: [u64; 3]) -> Vec<Point> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for signs in 0..8 {
            let mut p = [0i64; 3];
            for k in 0..3 {
                let v = rep[perm[k]] as i64;
                p[k] = if signs >> k & 1 == 1 { -v } else { v };
            }
            out.push(p);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Every integer point on the sphere of radius `sqrt(n)`.
pub fn lattice_points(n: u64) -> Result<SpherePointSet> {
    if n > SPHERE_LIMIT {
        return Err(Error::OutOfRange(format!("n = {n} exceeds {SPHERE_LIMIT}")));
    }
    let orbits = chamber_points(n);
    let mut points: Vec<Point> = orbits.iter().flat_map(|&r| orbit(r)).collect();
    points.sort_unstable();
    Ok(SpherePointSet {
        n,
        count: points.len(),
        points,
        orbits,
    })
}

fn squared_distance(x: &Point, y: &Point) -> u64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).unsigned_abs().pow(2))
        .sum()
}

/// `min |x - y|^2` over distinct points by checking every pair.
pub fn min_squared_distance_all_pairs(set: &SpherePointSet) -> Result<Option<u64>> {
    if set.count > ALL_PAIRS_LIMIT {
        return Err(Error::OutOfRange(format!(
            "{} points exceed the all-pairs limit {ALL_PAIRS_LIMIT}",
            set.count
        )));
    }
    let pts = &set.points;
    Ok((0..pts.len())
        .flat_map(|i| (i + 1..pts.len()).map(move |j| (i, j)))
        .map(|(i, j)| squared_distance(&pts[i], &pts[j]))
        .min())
}

/// `min |x - y|^2` from the orbit representatives.
///
/// For points of two different orbits the largest inner product pairs the
/// sorted absolute coordinates, so the minimum is `2n - 2 <u, v>` over pairs
/// of representatives. Inside one orbit the nearest image of `(a, b, c)` is a
/// single swap of unequal coordinates, costing `2 (x_i - x_j)^2`, or a single
/// sign change of a nonzero coordinate, costing `4 x_i^2`.
pub fn min_squared_distance(set: &SpherePointSet) -> Option<u64> {
    if set.count < 2 {
        return None;
    }
    let n = set.n;
    let reps = &set.orbits;
    let mut best = u64::MAX;
    for r in reps {
        for i in 0..3 {
            if r[i] != 0 {
                best = best.min(4 * r[i] * r[i]);
            }
            for j in i + 1..3 {
                if r[i] != r[j] {
                    best = best.min(2 * (r[i].abs_diff(r[j])).pow(2));
                }
            }
        }
    }
    let cross = (0..reps.len())
        .into_par_iter()
        .map(|i| {
            let u = reps[i];
            reps[i + 1..]
                .iter()
                .map(|v| 2 * n - 2 * (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]))
                .min()
                .unwrap_or(u64::MAX)
        })
        .min()
        .unwrap_or(u64::MAX);
    Some(best.min(cross))
}

fn scaled(d: u64, n: u64, metric: Metric) -> f64 {
    let ratio = d as f64 / n as f64;
    match metric {
        Metric::Euclidean => ratio.sqrt(),
        Metric::SquaredEuclidean => ratio,
    }
}

/// Minimum spacing of the normalized points, absent with fewer than two points.
pub fn min_spacing(set: &SpherePointSet, metric: Metric) -> Option<f64> {
    min_squared_distance(set).map(|d| scaled(d, set.n, metric))
}

/// Exponent `1 + epsilon` in the normalization `m n / (log n)^{1 + epsilon}`.
pub const SPACING_LOG_EXPONENT: f64 = 1.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpacingRecord {
    pub n: u64,
    pub count: usize,
    pub min_squared: Option<u64>,
    pub m: Option<f64>,
    /// `m n / (log n)^{1.01}`, absent for `n = 1`.
    pub normalized: Option<f64>,
}

pub fn spacing_record(n: u64, metric: Metric) -> Result<SpacingRecord> {
    let set = lattice_points(n)?;
    let d = min_squared_distance(&set);
    let m = d.map(|d| scaled(d, n, metric));
    let normalized = m.filter(|_| n >= 2).map(|m| m * n as f64 / (n as f64).ln().powf(SPACING_LOG_EXPONENT));
    Ok(SpacingRecord {
        n,
        count: set.count,
        min_squared: d,
        m,
        normalized,
    })
}

/// One record per `n` in the range, in increasing order.
pub fn spacing_scan(range: std::ops::RangeInclusive<u64>, metric: Metric) -> Result<Vec<SpacingRecord>> {
    if *range.end() > SPHERE_LIMIT {
        return Err(Error::OutOfRange(format!("range end exceeds {SPHERE_LIMIT}")));
    }
    range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| spacing_record(n, metric))
        .collect()
}

/// For each `C`, the fraction of records with a spacing that exceed
/// `C n^{-1} (log n)^{1.01}`, among records with `n >= 2` and a spacing.
pub fn spacing_violation_fractions(records: &[SpacingRecord], cs: &[f64]) -> Vec<(f64, f64)> {
    let normalized: Vec<f64> = records.iter().filter_map(|r| r.normalized).collect();
    cs.iter()
        .map(|&c| {
            let bad = normalized.iter().filter(|&&v| v > c).count();
            let frac = if normalized.is_empty() {
                0.0
            } else {
                bad as f64 / normalized.len() as f64
            };
            (c, frac)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::signed_rep_count;

    #[test]
    fn examples() {
        let one = lattice_points(1).unwrap();
        assert_eq!(one.count, 6);
        let two = lattice_points(2).unwrap();
        assert_eq!(two.count, 12);
        assert_eq!(lattice_points(7).unwrap().count, 0);

        let m = min_spacing(&one, Metric::Euclidean).unwrap();
        assert!((m - 2f64.sqrt()).abs() < 1e-15);
        let m = min_spacing(&two, Metric::Euclidean).unwrap();
        assert!((m - 1.0).abs() < 1e-15);
        assert_eq!(min_spacing(&two, Metric::SquaredEuclidean), Some(1.0));
        assert_eq!(min_spacing(&lattice_points(7).unwrap(), Metric::Euclidean), None);
        assert!(lattice_points(SPHERE_LIMIT + 1).is_err());
    }

    #[test]
    fn points_match_brute_force() {
        for n in 0..=500u64 {
            let set = lattice_points(n).unwrap();
            let s = n.isqrt() as i64;
            let mut brute = Vec::new();
            for x in -s..=s {
                for y in -s..=s {
                    for z in -s..=s {
                        if (x * x + y * y + z * z) as u64 == n {
                            brute.push([x, y, z]);
                        }
                    }
                }
            }
            assert_eq!(set.points, brute, "n = {n}");
            assert_eq!(set.count as u64, signed_rep_count(n).unwrap());
        }
    }

    #[test]
    fn chamber_spacing_matches_all_pairs() {
        for n in 1..=3_000u64 {
            let set = lattice_points(n).unwrap();
            if set.count > ALL_PAIRS_LIMIT {
                continue;
            }
            assert_eq!(
                min_squared_distance(&set),
                min_squared_distance_all_pairs(&set).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn scan_rows() {
        let rows = spacing_scan(1..=10, Metric::Euclidean).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0].normalized, None);
        let seven = &rows[6];
        assert_eq!((seven.count, seven.m), (0, None));
        for r in rows.iter().filter(|r| r.m.is_some()) {
            assert!(r.m.unwrap() * (r.n as f64).sqrt() >= 2f64.sqrt() - 1e-12);
        }
        let fr = spacing_violation_fractions(&rows, &[0.0, 1e9]);
        assert_eq!(fr[0].1, 1.0);
        assert_eq!(fr[1].1, 0.0);
    }
}
