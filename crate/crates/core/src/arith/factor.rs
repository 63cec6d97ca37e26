//! Exact factorization of 63-bit integers.
//!
//! Small inputs are read off a smallest-prime-factor table; larger ones are
//! trial-divided by the primes below one million, and whatever cofactor
//! survives is certified with a deterministic Miller-Rabin test or split with
//! Brent's variant of Pollard's rho.

use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;

use crate::error::{invalid, Error, Result};

/// Exclusive upper bound on inputs accepted by [`factorize`].
pub const FACTOR_LIMIT: u64 = 1 << 63;

/// Trial division bound for inputs above the table.
const TRIAL_BOUND: u64 = 1_000_000;

/// Inputs below this are factored from the smallest-prime-factor table.
const SPF_LIMIT: usize = 1 << 22;

fn spf_table() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut spf = vec![0u32; SPF_LIMIT];
        for i in 2..SPF_LIMIT {
            if spf[i] == 0 {
                spf[i] = i as u32;
                if (i as u64) * (i as u64) < SPF_LIMIT as u64 {
                    let mut j = i * i;
                    while j < SPF_LIMIT {
                        if spf[j] == 0 {
                            spf[j] = i as u32;
                        }
                        j += i;
                    }
                }
            }
        }
        spf
    })
}

/// Primes up to one million, in increasing order.
pub fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let spf = spf_table();
        (2..=TRIAL_BOUND as usize)
            .filter(|&i| spf[i] as usize == i)
            .map(|i| i as u64)
            .collect()
    })
}

/// Primes `p <= bound`, for `bound` up to one million.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    assert!(bound <= TRIAL_BOUND, "primes_up_to bound {bound} exceeds {TRIAL_BOUND}");
    small_primes().iter().copied().take_while(|&p| p <= bound).collect()
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if (n as usize) < SPF_LIMIT {
        return spf_table()[n as usize] as u64 == n;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // These twelve bases are a proven witness set for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle-finding rho. `n` must be odd and composite.
fn rho_split(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut g = 1u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let batch = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..batch.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_split(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Exact factorization `n = prod p^e`, primes strictly increasing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PrimeFactorization {
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking that
    /// the primes are strictly increasing, actually prime, and that the
    /// product fits below [`FACTOR_LIMIT`].
    pub fn from_pairs(pairs: Vec<(u64, u32)>) -> Result<Self> {
        let mut prev = 1u64;
        let mut value = 1u128;
        for &(p, e) in &pairs {
            if p <= prev || !is_prime(p) || e == 0 {
                return Err(invalid!("({p}, {e}) is not a valid prime-power entry after {prev}"));
            }
            prev = p;
            for _ in 0..e {
                value *= p as u128;
                if value >= FACTOR_LIMIT as u128 {
                    return Err(Error::OutOfRange("factorization product exceeds 2^63".into()));
                }
            }
        }
        Ok(Self { factors: pairs })
    }

    pub fn as_slice(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (u64, u32)> {
        self.factors.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// Reconstructs the factored integer.
    pub fn value(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    /// Exponent `h` with `p^h || n`; zero when `p` does not divide `n`.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Prime powers `p^e` making up `n`.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.factors.iter().map(|&(p, e)| (p, e, p.pow(e)))
    }

    /// All positive divisors, sorted.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl<'a> IntoIterator for &'a PrimeFactorization {
    type Item = &'a (u64, u32);
    type IntoIter = std::slice::Iter<'a, (u64, u32)>;

    fn into_iter(self) -> Self::IntoIter {
        self.factors.iter()
    }
}

impl fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

fn push_prime(factors: &mut Vec<(u64, u32)>, p: u64) {
    match factors.last_mut() {
        Some((q, e)) if *q == p => *e += 1,
        _ => factors.push((p, 1)),
    }
}

/// Factors `1 <= n < 2^63`.
pub fn factorize(n: u64) -> Result<PrimeFactorization> {
    if n == 0 {
        return Err(invalid!("cannot factor 0"));
    }
    if n >= FACTOR_LIMIT {
        return Err(Error::OutOfRange(format!("{n} is not below 2^63")));
    }
    Ok(factorize_unchecked(n))
}

/// Same as [`factorize`] for callers that already know `1 <= n < 2^63`.
pub(crate) fn factorize_unchecked(n: u64) -> PrimeFactorization {
    debug_assert!(n >= 1 && n < FACTOR_LIMIT);
    let mut factors = Vec::with_capacity(8);
    if (n as usize) < SPF_LIMIT {
        let spf = spf_table();
        let mut m = n as usize;
        while m > 1 {
            let p = spf[m] as usize;
            m /= p;
            push_prime(&mut factors, p as u64);
        }
        return PrimeFactorization { factors };
    }

    let mut m = n;
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        while m % p == 0 {
            m /= p;
            push_prime(&mut factors, p);
        }
    }
    if m > 1 {
        let mut rest = Vec::new();
        if m < TRIAL_BOUND * TRIAL_BOUND {
            // No factor below 10^6 and m < 10^12: m is prime.
            rest.push(m);
        } else {
            split_into(m, &mut rest);
        }
        rest.sort_unstable();
        for p in rest {
            push_prime(&mut factors, p);
        }
    }
    PrimeFactorization { factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn small_cases() {
        assert!(factorize(1).unwrap().is_empty());
        assert_eq!(factorize(12).unwrap().as_slice(), &[(2, 2), (3, 1)]);
        assert!(factorize(0).is_err());
        assert!(factorize(1 << 63).is_err());
    }

    #[test]
    fn billion_and_seven_is_prime() {
        let n = 1_000_000_007u64;
        assert!(trial_is_prime(n));
        assert_eq!(factorize(n).unwrap().as_slice(), &[(n, 1)]);
    }

    #[test]
    fn reconstructs_every_n_up_to_a_million() {
        for n in 1..=1_000_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.as_slice().windows(2).all(|w| w[0].0 < w[1].0));
        }
    }

    #[test]
    fn large_semiprimes_and_prime_powers() {
        let cases: [(u64, &[(u64, u32)]); 4] = [
            (1_000_000_007 * 998_244_353, &[(998_244_353, 1), (1_000_000_007, 1)]),
            (2_147_483_647 * 4_294_967_291, &[(2_147_483_647, 1), (4_294_967_291, 1)]),
            (3u64.pow(39), &[(3, 39)]),
            ((1 << 62) - 57, &[]),
        ];
        for (n, expected) in cases {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            if !expected.is_empty() {
                assert_eq!(f.as_slice(), expected);
            }
            for &(p, _) in &f {
                assert!(is_prime(p));
            }
        }
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in (SPF_LIMIT as u64)..(SPF_LIMIT as u64 + 20_000) {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn divisors_are_complete() {
        let f = factorize(2520).unwrap();
        let divs = f.divisors();
        let brute: Vec<u64> = (1..=2520).filter(|d| 2520 % d == 0).collect();
        assert_eq!(divs, brute);
    }
}
