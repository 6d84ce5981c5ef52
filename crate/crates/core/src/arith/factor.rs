//! Integer factorization: trial division followed by Pollard-Brent rho.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::primes::{is_probable_prime, primes_up_to};

pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Rho iterations allowed per cofactor before giving up.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 22;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_LIMIT))
}

/// Prime factorization `n = prod p^e`, sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn divisors(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::one()];
        for (p, e) in &self.factors {
            let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
            for d in &out {
                let mut acc = d.clone();
                next.push(acc.clone());
                for _ in 0..*e {
                    acc *= p;
                    next.push(acc.clone());
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Positive `d` with `d^2 | n`.
    pub fn square_divisor_roots(&self) -> Vec<BigUint> {
        Factorization {
            factors: self
                .factors
                .iter()
                .filter(|(_, e)| *e >= 2)
                .map(|(p, e)| (p.clone(), e / 2))
                .collect(),
        }
        .divisors()
    }
}

/// Factor `n > 0`. Returns `None` if a composite cofactor resists rho within `rho_budget`.
pub fn factor(n: &BigUint, rho_budget: u64) -> Option<Factorization> {
    assert!(!n.is_zero(), "factor(0)");
    let mut rest = n.clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();
    for &p in trial_primes() {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            found.push((pb, e));
        }
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if m.to_u64()
                .is_some_and(|v| v <= TRIAL_DIVISION_LIMIT * TRIAL_DIVISION_LIMIT)
                || is_probable_prime(&m)
            {
                // below the trial bound squared, any survivor is prime
                found.push((m, 1));
                continue;
            }
            let d = pollard_brent(&m, rho_budget)?;
            let other = &m / &d;
            stack.push(d);
            stack.push(other);
        }
    }
    found.sort();
    let mut merged: Vec<(BigUint, u32)> = Vec::new();
    for (p, e) in found {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Some(Factorization { factors: merged })
}

fn pollard_brent(n: &BigUint, budget: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    let mut spent = 0u64;
    for c in 1u32.. {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        const BATCH: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..BATCH.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += BATCH;
            }
            r *= 2;
            spent += r;
            if spent > budget {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}
