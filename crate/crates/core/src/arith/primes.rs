//! Primality testing and small-prime enumeration.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Miller-Rabin with these bases is exact for every n < 3_317_044_064_679_887_385_961_981.
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Extra bases used above the deterministic range (probable-prime territory).
const EXTRA_BASES: [u32; 7] = [43, 47, 53, 59, 61, 67, 71];

fn deterministic_limit() -> BigUint {
    BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap()
}

fn strong_probable_prime(n: &BigUint, d: &BigUint, s: u32, base: u32) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let a = BigUint::from(base) % n;
    if a.is_zero() {
        return true;
    }
    let mut x = a.modpow(d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Returns `(is_prime, proven)`: `proven` is false only when `n` lies above the
/// deterministic witness range and the answer is a probable-prime verdict.
pub fn miller_rabin(n: &BigUint) -> (bool, bool) {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return (false, true);
        }
        for p in DETERMINISTIC_BASES {
            let p = p as u64;
            if small == p {
                return (true, true);
            }
            if small % p == 0 {
                return (false, true);
            }
        }
    } else if n.is_even() {
        return (false, true);
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0) as u32;
    let d = &n_minus_one >> s;
    for base in DETERMINISTIC_BASES {
        if !strong_probable_prime(n, &d, s, base) {
            return (false, true);
        }
    }
    if *n < deterministic_limit() {
        return (true, true);
    }
    for base in EXTRA_BASES {
        if !strong_probable_prime(n, &d, s, base) {
            return (false, true);
        }
    }
    (true, false)
}

pub fn is_probable_prime(n: &BigUint) -> bool {
    miller_rabin(n).0
}

/// Deterministic for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    miller_rabin(&BigUint::from(n)).0
}

/// Iterator over the odd primes 3, 5, 7, 11, ...
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| is_prime_u64(n))
}

/// Sieve of Eratosthenes up to and including `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}
