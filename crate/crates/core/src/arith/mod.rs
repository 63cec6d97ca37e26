//! Elementary number theory: factorization, residue symbols, sums of two
//! squares and congruence classification.

mod classify;
mod factor;
mod residue;
mod two_squares;

pub use classify::{classify, is_gauss_excluded, EligibilityClass, EligibilitySet};
pub use factor::{factorize, is_prime, primes_up_to, PrimeFactorization, FACTOR_LIMIT};
pub use residue::{euler_phi, euler_phi_of, legendre, moebius, moebius_of};
pub use two_squares::{
    is_sum_of_two_positive_squares, ordered_two_square_count, prime_two_squares,
    signed_two_square_count, two_square_decompositions, unordered_two_square_count,
};

pub(crate) use factor::factorize_unchecked;
pub(crate) use residue::{euler_phi_unchecked, legendre_unchecked};
pub(crate) use two_squares::decompositions_unchecked;
