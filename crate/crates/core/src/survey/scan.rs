//! Exceptional-set census and per-integer survey rows.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::classify;
use crate::density::{singular_series_additive, singular_series_multiplicative};
use crate::error::{invalid, Error, Result};
use crate::reps::{count_reps, count_reps_four, min_microsquare};

use super::config::{ScanConfig, Variant};
use super::record::SurveyRecord;

pub const MAX_SCAN_X_THREE: u64 = 1_000_000_000;
pub const MAX_SCAN_X_FOUR: u64 = 10_000_000;

/// Membership bitmap for `m = a^2 + b^2` with `a, b >= 1`, `m <= limit`.
#[derive(Clone, Debug)]
pub struct TwoSquareBitmap {
    words: Vec<u64>,
    limit: u64,
}

impl TwoSquareBitmap {
    pub fn new(limit: u64) -> Self {
        let mut words = vec![0u64; (limit / 64 + 1) as usize];
        let mut a = 1u64;
        while a * a < limit {
            let a2 = a * a;
            let mut b = a;
            while a2 + b * b <= limit {
                let m = a2 + b * b;
                words[(m / 64) as usize] |= 1 << (m % 64);
                b += 1;
            }
            a += 1;
        }
        Self { words, limit }
    }

    pub fn contains(&self, m: u64) -> bool {
        m <= self.limit && self.words[(m / 64) as usize] >> (m % 64) & 1 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanSummary {
    pub x: u64,
    pub y: u64,
    pub variant: Variant,
    pub eligible_count: u64,
    pub exceptional_count: u64,
    /// Right side of the exceptional-set bound with constant 1.
    pub bound_value: f64,
    /// `exceptional_count / bound_value`, absent when the bound is not positive.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionRow {
    pub n: u64,
    /// No representation with positive coordinates exists at all, whatever
    /// the bound on the small squares.
    pub no_positive_representation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalScan {
    pub summary: ScanSummary,
    pub exceptions: Vec<ExceptionRow>,
}

/// `X Y^{-1} log X (log log X)^2` for three squares and
/// `X Y^{-2} log X (log log X)^3` for four.
pub fn exceptional_bound(x: u64, y: u64, variant: Variant) -> f64 {
    let xf = x as f64;
    let lx = xf.ln();
    let llx = lx.ln();
    let yf = y as f64;
    match variant {
        Variant::Three => xf / yf * lx * llx * llx,
        Variant::Four => xf / (yf * yf) * lx * llx.powi(3),
    }
}

fn three_represented(bitmap: &TwoSquareBitmap, n: u64, y: u64) -> bool {
    let top = y.min(n.isqrt());
    (1..=top).any(|x3| bitmap.contains(n - x3 * x3))
}

fn four_represented(bitmap: &TwoSquareBitmap, n: u64, y: u64) -> bool {
    let top = y.min(n.isqrt());
    (1..=top).any(|x3| {
        let rest = n - x3 * x3;
        (1..=top.min(rest.isqrt())).any(|x4| bitmap.contains(rest - x4 * x4))
    })
}

fn eligible_for(n: u64, variant: Variant) -> bool {
    let c = classify(n);
    match variant {
        Variant::Three => c.is_three_square_eligible(),
        Variant::Four => c.is_four_square_eligible(),
    }
}

const BLOCK: u64 = 1 << 16;

/// `E(X; Y)` or `E_0(X; Y)`: eligible `n` in `(X/2, X]` with no
/// representation whose small squares are at most `Y`.
pub fn exceptional_scan(x: u64, y: u64, variant: Variant) -> Result<ExceptionalScan> {
    let cap = match variant {
        Variant::Three => MAX_SCAN_X_THREE,
        Variant::Four => MAX_SCAN_X_FOUR,
    };
    if x > cap {
        return Err(Error::OutOfRange(format!("X = {x} exceeds {cap} for the {variant} variant")));
    }
    if x < 2 {
        return Err(invalid!("X must be at least 2"));
    }
    if y == 0 {
        return Err(invalid!("Y must be positive"));
    }
    let bitmap = TwoSquareBitmap::new(x);
    let lo = x / 2 + 1;
    let blocks: Vec<(u64, u64)> = (lo..=x)
        .step_by(BLOCK as usize)
        .map(|s| (s, (s + BLOCK - 1).min(x)))
        .collect();
    let per_block: Vec<(u64, Vec<ExceptionRow>)> = blocks
        .into_par_iter()
        .map(|(s, e)| {
            let mut eligible = 0;
            let mut rows = Vec::new();
            for n in s..=e {
                if !eligible_for(n, variant) {
                    continue;
                }
                eligible += 1;
                let hit = match variant {
                    Variant::Three => three_represented(&bitmap, n, y),
                    Variant::Four => four_represented(&bitmap, n, y),
                };
                if !hit {
                    let full = n.isqrt();
                    let none_at_all = match variant {
                        Variant::Three => y >= full || !three_represented(&bitmap, n, full),
                        Variant::Four => y >= full || !four_represented(&bitmap, n, full),
                    };
                    rows.push(ExceptionRow {
                        n,
                        no_positive_representation: none_at_all,
                    });
                }
            }
            (eligible, rows)
        })
        .collect();
    let eligible_count = per_block.iter().map(|b| b.0).sum();
    let exceptions: Vec<ExceptionRow> = per_block.into_iter().flat_map(|b| b.1).collect();
    let bound_value = exceptional_bound(x, y, variant);
    let exceptional_count = exceptions.len() as u64;
    Ok(ExceptionalScan {
        summary: ScanSummary {
            x,
            y,
            variant,
            eligible_count,
            exceptional_count,
            bound_value,
            ratio: (bound_value > 0.0).then(|| exceptional_count as f64 / bound_value),
        },
        exceptions,
    })
}

/// One [`SurveyRecord`] for `n`, with the singular series when `w` is given.
pub fn survey_record(n: u64, y: u64, variant: Variant, w: Option<f64>) -> Result<SurveyRecord> {
    let rep_count = match variant {
        Variant::Three => count_reps(n, y, true, false)?,
        Variant::Four => count_reps_four(n, y)?,
    };
    let (sseries_add, sseries_mult) = match w {
        Some(w) => (
            Some(singular_series_additive(n, w)?),
            Some(singular_series_multiplicative(n, w)?.value),
        ),
        None => (None, None),
    };
    Ok(SurveyRecord {
        n,
        eligibility: classify(n),
        rep_count,
        min_micro: min_microsquare(n),
        sseries_add,
        sseries_mult,
    })
}

/// Rows for `x_min..=x_max`: every `stride`-th integer plus every eligible
/// integer with `rep_count = 0`, or only the latter with `exceptions_only`.
pub fn survey_records(cfg: &ScanConfig) -> Result<Vec<SurveyRecord>> {
    let blocks: Vec<(u64, u64)> = (cfg.x_min..=cfg.x_max)
        .step_by(BLOCK as usize)
        .map(|s| (s, (s + BLOCK - 1).min(cfg.x_max)))
        .collect();
    let per_block = blocks
        .into_par_iter()
        .map(|(s, e)| {
            let mut rows = Vec::new();
            for n in s..=e {
                let sampled = !cfg.exceptions_only && (n - cfg.x_min) % cfg.stride == 0;
                let rep_count = match cfg.variant {
                    Variant::Three => count_reps(n, cfg.y_max, true, false)?,
                    Variant::Four => count_reps_four(n, cfg.y_max)?,
                };
                let exceptional = rep_count == 0 && eligible_for(n, cfg.variant);
                if sampled || exceptional {
                    rows.push(survey_record(n, cfg.y_max, cfg.variant, cfg.w)?);
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<Vec<SurveyRecord>>>>()?;
    Ok(per_block.into_iter().flatten().collect())
}
