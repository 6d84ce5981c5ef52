//! The family `E_m : y^2 = x^3 - m^2 x + (pqr)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::is_prime_u64;
use crate::curve::{Curve, Point};
use crate::error::{Error, Result};

/// The 2-adic level checked by [`validate_hypotheses`]: `m ≡ 2 (mod 2^5)`.
pub const HYPOTHESIS_K: u32 = 5;

/// Reported as `k_witness` for `m = 2`, where `m ≡ 2 (mod 2^k)` holds for every k.
pub const K_WITNESS_UNBOUNDED: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FamilyParams {
    #[serde(serialize_with = "crate::serde_util::display")]
    pub m: u64,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub p: u64,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub q: u64,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub r: u64,
    pub k_witness: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HypothesisReport {
    pub mod3_ok: bool,
    pub mod2k_ok: bool,
    pub coprime_ok: bool,
    pub primes_ok: bool,
}

impl HypothesisReport {
    /// Every hypothesis of the torsion theorem holds.
    pub fn all(&self) -> bool {
        self.mod3_ok && self.mod2k_ok && self.coprime_ok && self.primes_ok
    }

    /// Hypotheses of the rank theorem as printed, which do not mention coprimality.
    pub fn rank_hypotheses(&self) -> bool {
        self.mod3_ok && self.mod2k_ok && self.primes_ok
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.mod3_ok {
            out.push("m ≡ 0 (mod 3)");
        }
        if !self.mod2k_ok {
            out.push("m ≢ 2 (mod 32)");
        }
        if !self.coprime_ok {
            out.push("one of p, q, r divides m");
        }
        if !self.primes_ok {
            out.push("p, q, r are not distinct odd primes");
        }
        out
    }
}

fn k_witness(m: u64) -> u32 {
    if m % 4 != 2 {
        return 0;
    }
    if m == 2 {
        return K_WITNESS_UNBOUNDED;
    }
    (m - 2).trailing_zeros()
}

impl FamilyParams {
    /// Validates that `p, q, r` are pairwise distinct odd primes and `m > 0`.
    pub fn new(m: u64, p: u64, q: u64, r: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::NonPositiveM);
        }
        for x in [p, q, r] {
            if x == 2 {
                return Err(Error::PrimeIsTwo);
            }
            if !is_prime_u64(x) {
                return Err(Error::NotPrime(x));
            }
        }
        if p == q || q == r || p == r {
            return Err(Error::PrimesNotDistinct(p, q, r));
        }
        Ok(FamilyParams {
            m,
            p,
            q,
            r,
            k_witness: k_witness(m),
        })
    }

    pub fn m_big(&self) -> BigInt {
        BigInt::from(self.m)
    }

    /// `pqr`.
    pub fn pqr(&self) -> BigInt {
        BigInt::from(self.p) * self.q * self.r
    }

    /// `16(4m^6 - 27(pqr)^4)`.
    pub fn family_discriminant(&self) -> BigInt {
        let m = self.m_big();
        let d = self.pqr();
        BigInt::from(16) * (BigInt::from(4) * m.pow(6) - BigInt::from(27) * d.pow(4))
    }
}

pub fn validate_hypotheses(params: &FamilyParams) -> HypothesisReport {
    let FamilyParams { m, p, q, r, .. } = *params;
    let odd_primes = [p, q, r].iter().all(|&x| x != 2 && is_prime_u64(x));
    HypothesisReport {
        mod3_ok: m % 3 != 0,
        mod2k_ok: m % (1 << HYPOTHESIS_K) == 2,
        coprime_ok: [p, q, r].iter().all(|&x| m % x != 0),
        primes_ok: odd_primes && p != q && q != r && p != r,
    }
}

pub fn build_family_curve(params: &FamilyParams) -> Result<Curve> {
    let m = params.m_big();
    let d = params.pqr();
    let curve = Curve::new(-(&m * &m), &d * &d)?;
    debug_assert_eq!(curve.discriminant(), params.family_discriminant());
    Ok(curve)
}

/// `A = (0, pqr)`, `B = (m, pqr)` and their sum `S = A ⊕ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CanonicalPoints {
    pub a: Point,
    pub b: Point,
    pub s: Point,
}

pub fn canonical_points(params: &FamilyParams) -> CanonicalPoints {
    let curve = build_family_curve(params).expect("family curves are nonsingular");
    let d = params.pqr();
    let a = Point::from_ints(0, d.clone());
    let b = Point::from_ints(params.m, d);
    let s = curve.add_unchecked(&a, &b);
    CanonicalPoints { a, b, s }
}

/// Doubling on `E_m` in the closed form
/// `x' = ((x^2 + m^2)^2 - 8x(pqr)^2) / 4y^2`, `y' = -y + λ(x - x')` with
/// `λ = (3x^2 - m^2) / 2y`.
pub fn closed_form_double(params: &FamilyParams, pt: &Point) -> Point {
    let (x, y) = match pt {
        Point::Infinity => return Point::Infinity,
        Point::Affine { x, y } => (x, y),
    };
    if y.is_zero() {
        return Point::Infinity;
    }
    let int = |n: i64| BigRational::from_integer(n.into());
    let m2 = BigRational::from_integer(params.m_big().pow(2));
    let d2 = BigRational::from_integer(params.pqr().pow(2));
    let c = x * x + &m2;
    let x1 = (&c * &c - int(8) * x * &d2) / (int(4) * y * y);
    let slope = (int(3) * x * x - &m2) / (int(2) * y);
    let y1 = slope * (x - &x1) - y;
    Point::Affine { x: x1, y: y1 }
}

/// `4P` by composing [`closed_form_double`] with itself.
pub fn closed_form_quadruple(params: &FamilyParams, pt: &Point) -> Point {
    closed_form_double(params, &closed_form_double(params, pt))
}
