//! Quadratic residues and the classical multiplicative functions.

use super::factor::{factorize, factorize_unchecked, is_prime, pow_mod, PrimeFactorization};
use crate::error::{invalid, Result};

/// Legendre symbol `(b/p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(b: i64, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(invalid!("legendre symbol needs an odd prime modulus, got {p}"));
    }
    Ok(legendre_unchecked(b, p))
}

pub(crate) fn legendre_unchecked(b: i64, p: u64) -> i8 {
    let r = b.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Mobius function computed from a factorization.
pub fn moebius_of(f: &PrimeFactorization) -> i8 {
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient computed from a factorization.
pub fn euler_phi_of(f: &PrimeFactorization) -> u64 {
    f.iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn moebius(n: u64) -> Result<i8> {
    Ok(moebius_of(&factorize(n)?))
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(euler_phi_of(&factorize(n)?))
}

pub(crate) fn euler_phi_unchecked(n: u64) -> u64 {
    euler_phi_of(&factorize_unchecked(n))
}

/// A square root of `-1` modulo a prime `p = 1 (mod 4)`.
pub(crate) fn sqrt_minus_one(p: u64) -> u64 {
    debug_assert!(p % 4 == 1);
    // c^((p-1)/4) squares to c^((p-1)/2) = -1 for any non-residue c.
    let mut c = 2u64;
    loop {
        if pow_mod(c, (p - 1) / 2, p) == p - 1 {
            return pow_mod(c, (p - 1) / 4, p);
        }
        c += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor::primes_up_to;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(0, 5).unwrap(), 0);
        assert_eq!(legendre(4, 7).unwrap(), 1);
        // squares mod 7 are {1, 2, 4}
        assert_eq!(legendre(3, 7).unwrap(), -1);
        assert_eq!(legendre(-1, 7).unwrap(), -1);
        assert!(legendre(1, 2).is_err());
        assert!(legendre(1, 9).is_err());
    }

    #[test]
    fn legendre_matches_square_enumeration() {
        for p in primes_up_to(997).into_iter().filter(|&p| p > 2) {
            let mut is_square = vec![false; p as usize];
            for x in 1..p {
                is_square[(x * x % p) as usize] = true;
            }
            let mut total = 0i64;
            for b in 0..p {
                let expected = if b == 0 {
                    0
                } else if is_square[b as usize] {
                    1
                } else {
                    -1
                };
                let got = legendre(b as i64, p).unwrap();
                assert_eq!(got, expected, "({b}/{p})");
                total += got as i64;
            }
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn multiplicative_function_examples() {
        assert_eq!((moebius(1).unwrap(), euler_phi(1).unwrap()), (1, 1));
        assert_eq!((moebius(12).unwrap(), euler_phi(12).unwrap()), (0, 4));
        assert_eq!((moebius(30).unwrap(), euler_phi(30).unwrap()), (-1, 8));
    }

    #[test]
    fn multiplicative_functions_match_sieve() {
        const N: usize = 1_000_000;
        let mut mu = vec![1i8; N + 1];
        let mut phi: Vec<u64> = (0..=N as u64).collect();
        let mut composite = vec![false; N + 1];
        for p in 2..=N {
            if composite[p] {
                continue;
            }
            for m in (p..=N).step_by(p) {
                if m > p {
                    composite[m] = true;
                }
                mu[m] = -mu[m];
                phi[m] = phi[m] / p as u64 * (p as u64 - 1);
            }
            let pp = p as u64 * p as u64;
            if pp <= N as u64 {
                for m in (pp as usize..=N).step_by(pp as usize) {
                    mu[m] = 0;
                }
            }
        }
        for n in 1..=N {
            assert_eq!(moebius(n as u64).unwrap(), mu[n], "mu({n})");
            assert_eq!(euler_phi(n as u64).unwrap(), phi[n], "phi({n})");
        }
    }

    #[test]
    fn sqrt_minus_one_squares_correctly() {
        for p in primes_up_to(10_000).into_iter().filter(|p| p % 4 == 1) {
            let r = sqrt_minus_one(p);
            assert_eq!(r * r % p, p - 1);
        }
    }
}
