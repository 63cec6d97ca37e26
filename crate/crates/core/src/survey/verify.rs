//! Self-checks against independent oracles, reported as JSON.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{classify, primes_up_to};
use crate::circle::{build_major_arcs, fourth_moment_g, orthogonality_integral};
use crate::density::{
    a_term, a_term_direct, a_term_odd_prime_power, odd_prime_partial_sum, singular_series_multiplicative,
    truncation_identity_check, two_adic_partial_sum, DirectDensity, Rational,
};
use crate::error::{invalid, Error, Result};
use crate::expsum::ThetaParams;
use crate::reps::boxed_rep_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Orthogonality,
    Truncation,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "orthogonality" => Ok(Suite::Orthogonality),
            "truncation" => Ok(Suite::Truncation),
            "all" => Ok(Suite::All),
            _ => Err(invalid!("unknown suite {s:?}")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemmas => "lemmas",
            Suite::Orthogonality => "orthogonality",
            Suite::Truncation => "truncation",
            Suite::All => "all",
        })
    }
}

/// Why a check failed: an exact comparison came out unequal, or a floating
/// comparison missed its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    OracleMismatch,
    ToleranceExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub max_deviation: Option<f64>,
    pub failure_kind: Option<FailureKind>,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    /// The kind of the first failing check, if any.
    pub fn failure_kind(&self) -> Option<FailureKind> {
        self.checks.iter().find_map(|c| c.failure_kind)
    }
}

struct Check {
    name: &'static str,
    kind: FailureKind,
    cases: u64,
    failures: u64,
    max_deviation: Option<f64>,
    first_failure: Option<String>,
}

impl Check {
    fn new(name: &'static str, kind: FailureKind) -> Self {
        Self {
            name,
            kind,
            cases: 0,
            failures: 0,
            max_deviation: None,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn deviation(&mut self, dev: f64, tol: f64, detail: impl FnOnce() -> String) {
        self.max_deviation = Some(self.max_deviation.unwrap_or(0.0).max(dev));
        self.record(dev < tol, detail);
    }

    /// Treats an invariant violation as a failed case and anything else as
    /// a runtime error.
    fn outcome<T>(&mut self, r: Result<T>, detail: impl FnOnce() -> String) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::InvariantViolation(msg)) => {
                self.record(false, || format!("{}: {msg}", detail()));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    fn finish(self) -> CheckReport {
        let passed = self.failures == 0;
        CheckReport {
            name: self.name.to_string(),
            passed,
            cases: self.cases,
            failures: self.failures,
            max_deviation: self.max_deviation,
            failure_kind: (!passed).then_some(self.kind),
            first_failure: self.first_failure,
        }
    }
}

fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn lemma_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();

    let mut c = Check::new("odd_prime_power_closed_form", FailureKind::ToleranceExceeded);
    for p in primes_up_to(500).into_iter().filter(|&p| p > 2) {
        let mut h = 1u32;
        while p.pow(h) <= 500 {
            let direct = DirectDensity::new(p.pow(h))?;
            for n in 0..=200 {
                let closed = ratio_f64(&a_term_odd_prime_power(p, h, n)?);
                let d = direct.eval(n)?;
                c.deviation((closed - d).abs(), 1e-9, || format!("A({p}^{h}; {n}): {closed} vs {d}"));
            }
            h += 1;
        }
    }
    out.push(c.finish());

    let mut c = Check::new("composite_multiplicativity", FailureKind::ToleranceExceeded);
    for q in 1..=120u64 {
        let direct = DirectDensity::new(q)?;
        for n in 0..=120 {
            let (m, d) = (a_term(q, n)?, direct.eval(n)?);
            c.deviation((m - d).abs(), 1e-9, || format!("A({q}; {n}): {m} vs {d}"));
        }
    }
    out.push(c.finish());

    let mut c = Check::new("odd_prime_local_floor", FailureKind::OracleMismatch);
    for p in primes_up_to(97).into_iter().filter(|&p| p > 2) {
        let floor = Rational::new(p as i128 - 1, p as i128);
        for n in 1..=10_000u64 {
            let mut total = Rational::from_integer(1);
            for h in 1..=8u32 {
                total += a_term_odd_prime_power(p, h, n)?;
                c.record(total >= floor, || format!("p = {p}, H = {h}, n = {n}: {total}"));
            }
            c.outcome(odd_prime_partial_sum(p, 8, n), || format!("p = {p}, n = {n}"))?;
        }
    }
    out.push(c.finish());

    let mut c = Check::new("dyadic_local_floor", FailureKind::ToleranceExceeded);
    for n in (1..=10_000u64).filter(|&n| classify(n).is_three_square_eligible()) {
        for h in 3..=12 {
            if let Some(v) = c.outcome(two_adic_partial_sum(h, n), || format!("H = {h}, n = {n}"))? {
                c.record(v >= 1.0 / 64.0, || format!("H = {h}, n = {n}: {v}"));
            }
        }
    }
    out.push(c.finish());

    let mut c = Check::new("multiplicative_series_floor", FailureKind::ToleranceExceeded);
    for _ in 0..200 {
        let n = loop {
            let n = rng.gen_range(1..=1_000_000u64);
            if classify(n).is_three_square_eligible() {
                break n;
            }
        };
        for w in [10.0, 50.0, 100.0] {
            if c.outcome(singular_series_multiplicative(n, w), || format!("n = {n}, W = {w}"))?.is_some() {
                c.record(true, String::new);
            }
        }
    }
    out.push(c.finish());

    let mut c = Check::new("direct_definition_examples", FailureKind::ToleranceExceeded);
    for (q, n, expected) in [(1u64, 17u64, 1.0), (3, 2, 1.0 / 3.0), (9, 3, -1.0 / 9.0), (5, 2, -0.2)] {
        let v = a_term_direct(q, n)?;
        c.deviation((v - expected).abs(), 1e-12, || format!("A({q}; {n}) = {v}"));
    }
    out.push(c.finish());
    Ok(out)
}

/// `sum_s N(s)^2` with `N(s) = #{(y1, y2) in [1, Y]^2 : y1^2 + y2^2 = s}`.
pub fn square_pair_energy(y: u64) -> u64 {
    let mut counts = vec![0u64; (2 * y * y + 1) as usize];
    for a in 1..=y {
        for b in 1..=y {
            counts[(a * a + b * b) as usize] += 1;
        }
    }
    counts.iter().map(|c| c * c).sum()
}

fn orthogonality_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let params = ThetaParams::from_scale(10_000, 20)?;
    let mut c = Check::new("orthogonality_grid", FailureKind::ToleranceExceeded);
    for _ in 0..10 {
        let n = rng.gen_range(5_001..=10_000u64);
        let z = orthogonality_integral(&params, n, None)?;
        let count = boxed_rep_count(n, &params);
        let dev = (z - num_complex::Complex64::new(count as f64, 0.0)).norm();
        c.deviation(dev, 1e-6, || format!("n = {n}: grid {z} vs count {count}"));
    }
    out.push(c.finish());

    let mut c = Check::new("fourth_moment_g", FailureKind::ToleranceExceeded);
    for y in [10u64, 50, 100] {
        let m = fourth_moment_g(y)?;
        let e = square_pair_energy(y);
        c.deviation((m - e as f64).abs(), 1e-6, || format!("Y = {y}: {m} vs {e}"));
    }
    out.push(c.finish());

    let mut c = Check::new("arc_measures", FailureKind::ToleranceExceeded);
    for (x, w) in [(1e4, 5.0), (1e6, 10.0), (1e6, 50.0)] {
        let s = build_major_arcs(x, w)?;
        let dev = (s.major_measure() + s.minor_measure - 1.0).abs();
        c.deviation(dev, 1e-12, || format!("X = {x}, W = {w}"));
        let dev = (s.major_measure() - s.phi_measure()).abs();
        c.deviation(dev, 1e-12, || format!("X = {x}, W = {w}: phi sum"));
    }
    out.push(c.finish());
    Ok(out)
}

fn truncation_checks(rng: &mut ChaCha8Rng) -> Result<Vec<CheckReport>> {
    let mut c = Check::new("truncation_identity", FailureKind::ToleranceExceeded);
    for _ in 0..100 {
        let n = rng.gen_range(1..=1_000_000u64);
        if let Some(r) = c.outcome(truncation_identity_check(n, 10.0), || format!("n = {n}"))? {
            c.deviation(r, 1e-8, || format!("n = {n}: residual {r:e}"));
        }
    }
    Ok(vec![c.finish()])
}

/// Runs one suite (or all of them) with samples drawn from `seed`.
pub fn verify(suite: Suite, seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        checks.extend(lemma_checks(&mut rng)?);
    }
    if matches!(suite, Suite::Orthogonality | Suite::All) {
        checks.extend(orthogonality_checks(&mut rng)?);
    }
    if matches!(suite, Suite::Truncation | Suite::All) {
        checks.extend(truncation_checks(&mut rng)?);
    }
    Ok(VerifyReport {
        suite,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
