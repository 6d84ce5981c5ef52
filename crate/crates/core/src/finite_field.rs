//! Reduction modulo primes and exact point counting over prime fields.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{is_prime_u64, residue};
use crate::curve::Curve;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionType {
    Good,
    Bad,
}

/// `y^2 = x^3 + b x + c` over `F_modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ReducedCurve {
    pub modulus: u64,
    pub b_mod: u64,
    pub c_mod: u64,
    pub reduction: ReductionType,
}

impl ReducedCurve {
    pub fn is_good(&self) -> bool {
        self.reduction == ReductionType::Good
    }
}

pub fn reduce_curve(curve: &Curve, ell: u64) -> Result<ReducedCurve> {
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    let bad = curve.discriminant().is_multiple_of(&BigInt::from(ell));
    Ok(ReducedCurve {
        modulus: ell,
        b_mod: residue(curve.b(), ell),
        c_mod: residue(curve.c(), ell),
        reduction: if bad {
            ReductionType::Bad
        } else {
            ReductionType::Good
        },
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Quadratic character of `a` modulo an odd prime, by Euler's criterion.
pub fn legendre_symbol(a: u64, ell: u64) -> i8 {
    assert!(
        ell > 2 && ell % 2 == 1,
        "legendre_symbol needs an odd prime"
    );
    let a = a % ell;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (ell - 1) / 2, ell) == 1 {
        1
    } else {
        -1
    }
}

/// `1 + #{(x, y) : y^2 = x^3 + bx + c}` whether or not the reduction is smooth.
pub fn count_points_unchecked(rc: &ReducedCurve) -> u64 {
    let ell = rc.modulus;
    // solutions[a] = #{y : y^2 = a}
    let mut solutions = vec![0u64; ell as usize];
    for y in 0..ell {
        solutions[mul_mod(y, y, ell) as usize] += 1;
    }
    let mut total = 1;
    for x in 0..ell {
        let x2 = mul_mod(x, x, ell);
        let f = (mul_mod(x2, x, ell) + mul_mod(rc.b_mod, x, ell) + rc.c_mod) % ell;
        total += solutions[f as usize];
    }
    total
}

/// `(N - ℓ - 1)^2 <= 4ℓ`.
pub fn within_hasse_bound(count: u64, ell: u64) -> bool {
    let trace = count as i128 - ell as i128 - 1;
    trace * trace <= 4 * ell as i128
}

/// `#E(F_ℓ)` for a curve with good reduction, with the Hasse bound enforced.
pub fn count_points(rc: &ReducedCurve) -> Result<u64> {
    if !rc.is_good() {
        return Err(Error::BadReduction(rc.modulus));
    }
    let n = count_points_unchecked(rc);
    if !within_hasse_bound(n, rc.modulus) {
        return Err(Error::HasseViolation {
            modulus: rc.modulus,
            count: n,
        });
    }
    Ok(n)
}

/// Point count via the character sum `ℓ + 1 + Σ χ(x^3 + bx + c)`; odd ℓ only.
pub fn count_points_by_character_sum(rc: &ReducedCurve) -> u64 {
    let ell = rc.modulus;
    let sum: i64 = (0..ell)
        .map(|x| {
            let f =
                (mul_mod(mul_mod(x, x, ell), x, ell) + mul_mod(rc.b_mod, x, ell) + rc.c_mod) % ell;
            legendre_symbol(f, ell) as i64
        })
        .sum();
    (ell as i64 + 1 + sum) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(b: i64, c: i64, ell: u64) -> u64 {
        let curve = Curve::new(b, c).unwrap();
        count_points(&reduce_curve(&curve, ell).unwrap()).unwrap()
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(1, 5), 1);
        assert_eq!(legendre_symbol(0, 7), 0);
        assert_eq!(legendre_symbol(3, 7), -1);
        assert_eq!(legendre_symbol(2, 7), 1);
    }

    #[test]
    fn reduce_examples() {
        let fam = Curve::new(-4, 53361).unwrap();
        assert!(reduce_curve(&fam, 5).unwrap().is_good());
        let at3 = reduce_curve(&fam, 3).unwrap();
        assert_eq!((at3.b_mod, at3.c_mod), (2, 0));
        // Δ = -1230075206576 = -16 * 76879700411 and 3 | 27c^2 but 3 ∤ 4b^3
        assert!(at3.is_good());
        let y2x = Curve::new(-1, 0).unwrap();
        assert_eq!(reduce_curve(&y2x, 2).unwrap().reduction, ReductionType::Bad);
        assert_eq!(reduce_curve(&y2x, 9), Err(Error::NotPrime(9)));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count(0, 1, 5), 6);
        assert_eq!(count(0, 4, 7), 3);
        assert_eq!(count(-1, 0, 3), 4);
        let y2x = Curve::new(-1, 0).unwrap();
        assert_eq!(
            count_points(&reduce_curve(&y2x, 2).unwrap()),
            Err(Error::BadReduction(2))
        );
    }

    #[test]
    fn character_sum_matches_table_count() {
        for ell in [3u64, 5, 7, 11, 13, 97] {
            for b in 0..ell.min(13) {
                for c in 0..ell.min(13) {
                    let rc = ReducedCurve {
                        modulus: ell,
                        b_mod: b,
                        c_mod: c,
                        reduction: ReductionType::Good,
                    };
                    assert_eq!(
                        count_points_unchecked(&rc),
                        count_points_by_character_sum(&rc)
                    );
                }
            }
        }
    }
}
