//! Exact integer machinery shared by every other module.

pub mod factor;
pub mod poly;
pub mod primes;

pub use factor::{factor, Factorization};
pub use poly::IntPoly;
pub use primes::{is_prime_u64, odd_primes, primes_up_to};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact integer square root if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Exact rational square root (non-negative) if `q` is a square in Q.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_zero() {
        return Some(BigRational::zero());
    }
    let n = exact_sqrt(q.numer())?;
    let d = exact_sqrt(q.denom())?;
    Some(BigRational::new(n, d))
}

/// Non-negative residue of `n` modulo `m`.
pub fn residue(n: &BigInt, m: u64) -> u64 {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    n.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}
