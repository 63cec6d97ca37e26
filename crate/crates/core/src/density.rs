//! Local densities `A(q; n)` and the truncated singular series.
//!
//! `A(q; n) = sum_{(a,q)=1} q^{-3} S(q, a)^3 e(-n a / q)` is multiplicative in
//! `q`. Odd prime powers have exact closed forms depending only on the exact
//! power of `p` dividing `n`; powers of two are evaluated from the defining
//! sum, once per modulus, for every residue class of `n`.
//!
//! Two truncations of the singular series are provided: the additive
//! `sum_{q <= W} A(q; n)` and the multiplicative
//! `prod_{p <= W} sum_{h <= H(p)} A(p^h; n)` with `H(p)` the largest `H` such
//! that `p^H <= W`. Their difference is the sum of `A(q; n)` over the
//! moduli `q > W` all of whose prime-power components are at most `W`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::arith::{classify, factorize_unchecked, is_prime, legendre_unchecked, primes_up_to};
use crate::error::{invalid, violation, Error, Result};
use crate::expsum::{gauss_sum_direct, gauss_sum_table, phase_ratio};
use crate::quad::pairwise_sum;

/// Exact rational used for odd prime-power densities.
pub type Rational = Ratio<i128>;

/// Largest modulus accepted by [`a_term_direct`].
pub const DIRECT_MODULUS_LIMIT: u64 = 100_000;

/// Largest power of two handled by the dyadic tables.
pub const MAX_TWO_ADIC_EXPONENT: u32 = 20;

/// Largest truncation parameter accepted by the singular series.
pub const MAX_SERIES_W: f64 = 10_000.0;

/// Tolerance on the imaginary part of a directly evaluated density.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// `q^{-3} S(q, a)^3` for the reduced residues `a` of one modulus, computed
/// from literal Gauss sums, so `A(q; n)` can be evaluated for many `n`.
#[derive(Clone, Debug)]
pub struct DirectDensity {
    q: u64,
    terms: Vec<(u64, Complex64)>,
}

impl DirectDensity {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > DIRECT_MODULUS_LIMIT {
            return Err(Error::OutOfRange(format!(
                "direct density needs 1 <= q <= {DIRECT_MODULUS_LIMIT}, got {q}"
            )));
        }
        let scale = (q as f64).powi(-3);
        let terms = (1..=q)
            .filter(|a| a.gcd(&q) == 1)
            .map(|a| {
                let s = gauss_sum_direct(q, a as i64);
                (a, s * s * s * scale)
            })
            .collect();
        Ok(Self { q, terms })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn eval(&self, n: u64) -> Result<f64> {
        let q = self.q;
        let n = n % q;
        let sum: Complex64 = self
            .terms
            .iter()
            .map(|&(a, c)| {
                let na = (n as u128 * a as u128 % q as u128) as u64;
                c * phase_ratio((q - na) % q, q)
            })
            .sum();
        if sum.im.abs() > IMAGINARY_TOLERANCE {
            return Err(violation!(
                "A({q}; {n}) has imaginary part {:e} from direct summation",
                sum.im
            ));
        }
        Ok(sum.re)
    }
}

/// `A(q; n)` by literal summation over `a` with literal Gauss sums.
pub fn a_term_direct(q: u64, n: u64) -> Result<f64> {
    DirectDensity::new(q)?.eval(n)
}

/// `A(q; r)` for every residue `r` in `0..q`, from the defining sum.
///
/// Both transforms (residues to Gauss sums, and Gauss sums to densities) are
/// length-`q` DFTs, so the whole table costs `O(q log q)`.
pub fn density_table(q: u64) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(invalid!("density modulus must be positive"));
    }
    let scale = (q as f64).powi(-3);
    let gauss = gauss_sum_table(q);
    let mut buf: Vec<Complex64> = gauss
        .iter()
        .enumerate()
        .map(|(a, &s)| {
            if (a as u64).gcd(&q) == 1 {
                s * s * s * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    if buf.len() > 1 {
        FftPlanner::<f64>::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
    }
    let mut out = Vec::with_capacity(buf.len());
    for (r, z) in buf.into_iter().enumerate() {
        if z.im.abs() > IMAGINARY_TOLERANCE {
            return Err(violation!("A({q}; {r}) has imaginary part {:e}", z.im));
        }
        out.push(z.re);
    }
    Ok(out)
}

fn two_adic_table(k: u32) -> Result<Arc<Vec<f64>>> {
    static TABLES: [OnceLock<Arc<Vec<f64>>>; MAX_TWO_ADIC_EXPONENT as usize + 1] =
        [const { OnceLock::new() }; MAX_TWO_ADIC_EXPONENT as usize + 1];
    if k > MAX_TWO_ADIC_EXPONENT {
        return Err(Error::OutOfRange(format!(
            "2-part 2^{k} exceeds 2^{MAX_TWO_ADIC_EXPONENT}"
        )));
    }
    let slot = &TABLES[k as usize];
    if let Some(t) = slot.get() {
        return Ok(t.clone());
    }
    let table = Arc::new(density_table(1 << k)?);
    Ok(slot.get_or_init(|| table).clone())
}

/// `A(2^k; n)` read from the cached dyadic table.
pub fn a_term_two_power(k: u32, n: u64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let table = two_adic_table(k)?;
    Ok(table[(n & ((1u64 << k) - 1)) as usize])
}

fn valuation(p: u64, n: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut m = n;
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Numerator and denominator of `A(p^h; n)` for an odd prime `p`.
///
/// With `p^nu || n`:
/// * `h = 2l`: `(p-1)/p^{l+1}` if `nu >= 2l`, `-1/p^{l+1}` if `nu = 2l-1`, else 0;
/// * `h = 2l+1`: `chi_p(-n/p^{2l}) / p^{l+1}` if `nu = 2l`, else 0.
fn odd_prime_power_parts(p: u64, h: u32, n: u64) -> Result<(i64, u64)> {
    if h == 0 {
        return Ok((1, 1));
    }
    let nu = valuation(p, n);
    let l = h / 2;
    let den = p
        .checked_pow(l + 1)
        .filter(|&d| d < (1 << 62))
        .ok_or_else(|| Error::OutOfRange(format!("denominator {p}^{} overflows", l + 1)))?;
    let num = if h % 2 == 0 {
        if nu >= 2 * l {
            p as i64 - 1
        } else if nu == 2 * l - 1 {
            -1
        } else {
            0
        }
    } else if nu == 2 * l {
        let m = n / p.pow(2 * l);
        legendre_unchecked(-((m % p) as i64), p) as i64
    } else {
        0
    };
    Ok((num, den))
}

/// `A(p^h; n)` for an odd prime `p`, exactly.
pub fn a_term_odd_prime_power(p: u64, h: u32, n: u64) -> Result<Rational> {
    if p == 2 || !is_prime(p) {
        return Err(invalid!("a_term_odd_prime_power needs an odd prime, got {p}"));
    }
    let (num, den) = odd_prime_power_parts(p, h, n)?;
    Ok(Rational::new(num as i128, den as i128))
}

/// `A(q; n)` as a product over the prime-power components of `q`.
pub fn a_term(q: u64, n: u64) -> Result<f64> {
    if q == 0 {
        return Err(invalid!("density modulus must be positive"));
    }
    let mut acc = 1.0;
    for &(p, e) in &factorize_unchecked(q) {
        let local = if p == 2 {
            a_term_two_power(e, n)?
        } else {
            let (num, den) = odd_prime_power_parts(p, e, n)?;
            num as f64 / den as f64
        };
        if local == 0.0 {
            return Ok(0.0);
        }
        acc *= local;
    }
    Ok(acc)
}

/// `sum_{h <= H} A(2^h; n)`, checked against the lower bound `2^{-6}` when
/// `H >= 3` and `n` is three-square eligible.
pub fn two_adic_partial_sum(h_max: u32, n: u64) -> Result<f64> {
    if h_max > MAX_TWO_ADIC_EXPONENT {
        return Err(Error::OutOfRange(format!(
            "2^{h_max} exceeds 2^{MAX_TWO_ADIC_EXPONENT}"
        )));
    }
    let mut total = 1.0;
    for k in 1..=h_max {
        total += a_term_two_power(k, n)?;
    }
    if h_max >= 3 && classify(n).is_three_square_eligible() && total < TWO_ADIC_FLOOR - 1e-12 {
        return Err(violation!(
            "sum_(h<={h_max}) A(2^h; {n}) = {total} is below 2^-6"
        ));
    }
    Ok(total)
}

/// Lower bound for the dyadic factor of an eligible integer.
pub const TWO_ADIC_FLOOR: f64 = 1.0 / 64.0;

/// `sum_{h <= H} A(p^h; n)` exactly, checked against `1 - 1/p`.
pub fn odd_prime_partial_sum(p: u64, h_max: u32, n: u64) -> Result<Rational> {
    if p == 2 || !is_prime(p) {
        return Err(invalid!("odd_prime_partial_sum needs an odd prime, got {p}"));
    }
    let mut total = Rational::from_integer(1);
    for h in 1..=h_max {
        let (num, den) = odd_prime_power_parts(p, h, n)?;
        if num != 0 {
            total += Rational::new(num as i128, den as i128);
        }
    }
    let floor = Rational::new(p as i128 - 1, p as i128);
    if total < floor {
        return Err(violation!(
            "sum_(h<={h_max}) A({p}^h; {n}) = {total} is below 1 - 1/{p}"
        ));
    }
    Ok(total)
}

/// `H(p)`: the largest `H` with `p^H <= W`, by repeated multiplication.
pub fn local_exponent(p: u64, w: f64) -> u32 {
    let bound = w.floor();
    if bound < p as f64 {
        return 0;
    }
    let bound = bound as u64;
    let mut h = 0;
    let mut pk = 1u64;
    while let Some(next) = pk.checked_mul(p) {
        if next > bound {
            break;
        }
        pk = next;
        h += 1;
    }
    h
}

/// The logarithmic preset `W = (log X)^{1/5}`.
pub fn w_preset(x: f64) -> f64 {
    x.ln().powf(0.2)
}

/// `2^{-6} prod_{2 < p <= W} (1 - 1/p)`, the guaranteed floor of the
/// multiplicative series for eligible `n`.
pub fn multiplicative_floor(w: f64) -> f64 {
    let bound = w.floor().max(0.0) as u64;
    TWO_ADIC_FLOOR
        * primes_up_to(bound.min(1_000_000))
            .into_iter()
            .filter(|&p| p > 2)
            .map(|p| 1.0 - 1.0 / p as f64)
            .product::<f64>()
}

fn check_w(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(invalid!("truncation parameter W = {w} must be finite and non-negative"));
    }
    if w > MAX_SERIES_W {
        return Err(Error::OutOfRange(format!("W = {w} exceeds {MAX_SERIES_W}")));
    }
    Ok(())
}

/// Additive truncation `S(n; W) = sum_{1 <= q <= W} A(q; n)`.
pub fn singular_series_additive(n: u64, w: f64) -> Result<f64> {
    check_w(w)?;
    let terms = (1..=w.floor() as u64)
        .map(|q| a_term(q, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorMethod {
    ClosedForm,
    Direct,
}

/// One local factor `sum_{h <= H(p)} A(p^h; n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalFactorRow {
    pub p: u64,
    pub h: u32,
    pub partial_sum: f64,
    pub method: FactorMethod,
}

/// Local factors of the multiplicative truncation and their product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalFactorTable {
    pub n: u64,
    pub w: f64,
    pub rows: Vec<LocalFactorRow>,
    pub value: f64,
}

fn local_factor_table(n: u64, w: f64) -> Result<LocalFactorTable> {
    check_w(w)?;
    let bound = w.floor() as u64;
    let mut rows = Vec::new();
    for p in primes_up_to(bound) {
        let h = local_exponent(p, w);
        let (partial_sum, method) = if p == 2 {
            (two_adic_partial_sum(h, n)?, FactorMethod::Direct)
        } else {
            let exact = odd_prime_partial_sum(p, h, n)?;
            (
                *exact.numer() as f64 / *exact.denom() as f64,
                FactorMethod::ClosedForm,
            )
        };
        rows.push(LocalFactorRow {
            p,
            h,
            partial_sum,
            method,
        });
    }
    let value = rows.iter().map(|r| r.partial_sum).product();
    Ok(LocalFactorTable { n, w, rows, value })
}

/// Multiplicative truncation `S*(n; W) = prod_{p <= W} sum_{h <= H(p)} A(p^h; n)`.
///
/// For eligible `n` and `W >= 8` the value is checked against
/// [`multiplicative_floor`].
pub fn singular_series_multiplicative(n: u64, w: f64) -> Result<LocalFactorTable> {
    let table = local_factor_table(n, w)?;
    if w >= 8.0 && classify(n).is_three_square_eligible() {
        let floor = multiplicative_floor(w);
        if table.value < floor * (1.0 - 1e-12) {
            return Err(violation!(
                "S*({n}; {w}) = {} is below the floor {floor}",
                table.value
            ));
        }
    }
    Ok(table)
}

/// `Q = prod_{p <= W} p^{H(p)}`, or `None` if it overflows 63 bits.
pub fn truncation_modulus(w: f64) -> Option<u64> {
    let bound = w.floor().max(0.0) as u64;
    let mut q = 1u64;
    for p in primes_up_to(bound.min(1_000_000)) {
        q = q.checked_mul(p.checked_pow(local_exponent(p, w))?)?;
        if q >= 1 << 63 {
            return None;
        }
    }
    Some(q)
}

/// Whether every prime power exactly dividing `q` is at most `W`.
pub fn prime_powers_within(q: u64, w: f64) -> bool {
    let bound = w.floor();
    factorize_unchecked(q)
        .prime_powers()
        .all(|(_, _, pe)| pe as f64 <= bound)
}

/// Largest `Q` for which the tail moduli are enumerated.
pub const TAIL_MODULUS_LIMIT: u64 = 10_000_000;

/// Moduli `q` in `(W, Q]` whose prime-power components are all at most `W`.
pub fn truncation_tail_moduli(w: f64) -> Result<Vec<u64>> {
    check_w(w)?;
    let q = truncation_modulus(w)
        .filter(|&q| q <= TAIL_MODULUS_LIMIT)
        .ok_or_else(|| Error::OutOfRange(format!("Q(W = {w}) exceeds {TAIL_MODULUS_LIMIT}")))?;
    let bound = w.floor() as u64;
    Ok(factorize_unchecked(q)
        .divisors()
        .into_iter()
        .filter(|&d| d > bound && prime_powers_within(d, w))
        .collect())
}

/// Tolerance for [`truncation_identity_check`].
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

/// `|S*(n; W) - S(n; W) - sum_{q in tail} A(q; n)|`.
///
/// Three independent evaluation routes must agree; a residual at or above
/// [`TRUNCATION_TOLERANCE`] is reported as an invariant violation.
pub fn truncation_identity_check(n: u64, w: f64) -> Result<f64> {
    let tail = truncation_tail_moduli(w)?;
    let multiplicative = local_factor_table(n, w)?.value;
    let additive = singular_series_additive(n, w)?;
    let tail_terms = tail
        .iter()
        .map(|&q| a_term(q, n))
        .collect::<Result<Vec<_>>>()?;
    let residual = (multiplicative - additive - pairwise_sum(&tail_terms)).abs();
    if residual >= TRUNCATION_TOLERANCE {
        return Err(violation!(
            "truncation identity residual {residual:e} at n = {n}, W = {w}"
        ));
    }
    Ok(residual)
}

/// Mean square of `S*(n; W) - S(n; W)` over `X/2 < n <= X`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationGapSample {
    pub x: u64,
    pub w: f64,
    pub mean_square: f64,
    pub max_abs: f64,
    /// Number of integers in `(X/2, X]`.
    pub sample_count: u64,
    /// Number of integers actually evaluated (every `stride`-th one).
    pub evaluated: u64,
    /// `mean_square * (X/2) / (X / W)`.
    pub ratio: f64,
}

pub const MAX_GAP_X: u64 = 100_000_000;
pub const MAX_GAP_W: f64 = 20.0;

/// Mean-square gap between the two truncations, sampling every `stride`-th
/// integer of `(X/2, X]` starting from the first.
pub fn truncation_gap_stats(x: u64, w: f64, stride: Option<u64>) -> Result<TruncationGapSample> {
    check_w(w)?;
    if !(2..=MAX_GAP_X).contains(&x) {
        return Err(Error::OutOfRange(format!("X = {x} must lie in [2, {MAX_GAP_X}]")));
    }
    if w > MAX_GAP_W {
        return Err(Error::OutOfRange(format!("W = {w} exceeds {MAX_GAP_W}")));
    }
    let stride = stride.unwrap_or(1);
    if stride == 0 {
        return Err(invalid!("stride must be positive"));
    }
    let lo = x / 2 + 1;
    let ns: Vec<u64> = (lo..=x).step_by(stride as usize).collect();
    let gaps = ns
        .par_iter()
        .map(|&n| Ok(local_factor_table(n, w)?.value - singular_series_additive(n, w)?))
        .collect::<Result<Vec<f64>>>()?;
    let squares: Vec<f64> = gaps.iter().map(|g| g * g).collect();
    let mean_square = if squares.is_empty() {
        0.0
    } else {
        pairwise_sum(&squares) / squares.len() as f64
    };
    let max_abs = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(TruncationGapSample {
        x,
        w,
        mean_square,
        max_abs,
        sample_count: x - x / 2,
        evaluated: ns.len() as u64,
        ratio: mean_square * w / 2.0,
    })
}

/// Eligible `n` in `(X/2, X]` (every `stride`-th) with `S(n; W) < delta / log W`.
pub fn additive_lower_bound_exceptions(x: u64, w: f64, delta: f64, stride: u64) -> Result<u64> {
    check_w(w)?;
    if w <= 1.0 {
        return Err(invalid!("W must exceed 1 for the log W threshold"));
    }
    let threshold = delta / w.ln();
    let ns: Vec<u64> = (x / 2 + 1..=x)
        .step_by(stride.max(1) as usize)
        .filter(|&n| classify(n).is_three_square_eligible())
        .collect();
    let flags = ns
        .par_iter()
        .map(|&n| Ok(singular_series_additive(n, w)? < threshold))
        .collect::<Result<Vec<bool>>>()?;
    Ok(flags.into_iter().filter(|&f| f).count() as u64)
}
