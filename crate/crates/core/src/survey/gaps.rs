//! Gaps between consecutive sums of two squares `a^2 + b^2` (`a, b >= 0`)
//! in `[1, X]`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub const MAX_GAP_LIMIT: u64 = 1_000_000_000;

const SEGMENT: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapScan {
    pub limit: u64,
    /// Number of sums of two squares in `[1, X]`.
    pub count: u64,
    pub max_gap: u64,
    /// Smaller end of the first gap of maximal size.
    pub max_gap_start: u64,
    /// Gap size to number of occurrences; the counts add up to `count - 1`.
    #[serde(serialize_with = "as_pairs")]
    pub histogram: BTreeMap<u64, u64>,
    /// `max_gap / ((1/4) log X)`.
    pub ratio: f64,
}

fn as_pairs<S: serde::Serializer>(map: &BTreeMap<u64, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(map.iter())
}

struct Segment {
    first: Option<u64>,
    last: Option<u64>,
    count: u64,
    gaps: BTreeMap<u64, u64>,
    max_gap: (u64, u64),
}

fn scan_segment(lo: u64, hi: u64) -> Segment {
    let len = (hi - lo + 1) as usize;
    let mut hit = vec![false; len];
    let mut a = 0u64;
    while a * a <= hi {
        let a2 = a * a;
        let mut b = if a2 >= lo { a } else { (lo - a2 - 1).isqrt() + 1 };
        b = b.max(a);
        while a2 + b * b <= hi {
            let m = a2 + b * b;
            if m >= lo {
                hit[(m - lo) as usize] = true;
            }
            b += 1;
        }
        a += 1;
    }
    let mut seg = Segment {
        first: None,
        last: None,
        count: 0,
        gaps: BTreeMap::new(),
        max_gap: (0, 0),
    };
    for (i, &h) in hit.iter().enumerate() {
        if !h {
            continue;
        }
        let m = lo + i as u64;
        if let Some(prev) = seg.last {
            let g = m - prev;
            *seg.gaps.entry(g).or_default() += 1;
            if g > seg.max_gap.0 {
                seg.max_gap = (g, prev);
            }
        } else {
            seg.first = Some(m);
        }
        seg.last = Some(m);
        seg.count += 1;
    }
    seg
}

/// Exact gap statistics of the sums of two squares up to `limit`.
pub fn two_square_gap_scan(limit: u64) -> Result<GapScan> {
    if limit > MAX_GAP_LIMIT {
        return Err(Error::OutOfRange(format!("limit {limit} exceeds {MAX_GAP_LIMIT}")));
    }
    if limit < 2 {
        return Err(invalid!("limit must be at least 2"));
    }
    let segments: Vec<Segment> = (1..=limit)
        .step_by(SEGMENT as usize)
        .map(|s| (s, (s + SEGMENT - 1).min(limit)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(s, e)| scan_segment(s, e))
        .collect();
    let mut histogram = BTreeMap::new();
    let mut count = 0;
    let mut max_gap = (0u64, 0u64);
    let mut last: Option<u64> = None;
    for seg in segments {
        if let (Some(prev), Some(first)) = (last, seg.first) {
            let g = first - prev;
            *histogram.entry(g).or_default() += 1;
            if g > max_gap.0 {
                max_gap = (g, prev);
            }
        }
        for (g, c) in seg.gaps {
            *histogram.entry(g).or_default() += c;
        }
        if seg.max_gap.0 > max_gap.0 {
            max_gap = seg.max_gap;
        }
        count += seg.count;
        last = seg.last.or(last);
    }
    Ok(GapScan {
        limit,
        count,
        max_gap: max_gap.0,
        max_gap_start: max_gap.1,
        histogram,
        ratio: max_gap.0 as f64 / (0.25 * (limit as f64).ln()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(limit: u64) -> Vec<u64> {
        (1..=limit)
            .filter(|&m| (0..=m.isqrt()).any(|a| {
                let r = m - a * a;
                r.isqrt().pow(2) == r
            }))
            .collect()
    }

    #[test]
    fn small_limits_match_brute_force() {
        for limit in [2u64, 10, 50, 1000, 12_345] {
            let scan = two_square_gap_scan(limit).unwrap();
            let list = brute(limit);
            assert_eq!(scan.count, list.len() as u64);
            let gaps: Vec<u64> = list.windows(2).map(|w| w[1] - w[0]).collect();
            let max = gaps.iter().copied().max().unwrap_or(0);
            assert_eq!(scan.max_gap, max);
            if let Some(i) = gaps.iter().position(|&g| g == max) {
                assert_eq!(scan.max_gap_start, list[i]);
            }
            assert_eq!(scan.histogram.values().sum::<u64>(), scan.count - 1);
            assert!(scan.histogram.keys().all(|&g| g >= 1));
        }
        // 21, 22, 23 and 24 are not sums of two squares.
        let scan = two_square_gap_scan(50).unwrap();
        assert_eq!((scan.max_gap, scan.max_gap_start), (5, 20));
    }

    #[test]
    fn segment_seams_are_joined() {
        let limit = 3 * SEGMENT + 17;
        let scan = two_square_gap_scan(limit).unwrap();
        assert_eq!(scan.histogram.values().sum::<u64>(), scan.count - 1);
        let whole = scan_segment(1, limit);
        assert_eq!(whole.count, scan.count);
        assert_eq!(whole.gaps, scan.histogram);
        assert_eq!(whole.max_gap, (scan.max_gap, scan.max_gap_start));
    }
}
