//! Dense univariate polynomials over Z and exact integer / rational root extraction.
//!
//! Integer roots are found without factoring any coefficient: the real roots of
//! the derivative split the line into monotone pieces, and each piece holds at
//! most one root, located by integer bisection. Rational roots reduce to integer
//! roots of the monic transform `a_n^(n-1) f(y / a_n)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    /// Coefficients, constant term first. No trailing zeros.
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            })
    }

    /// Sign of `f(x)` as -1, 0, 1.
    fn sign_at(&self, x: &BigInt) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Divide every coefficient by `k`, panicking if any division is inexact.
    pub fn div_exact(&self, k: &BigInt) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(k);
                    assert!(r.is_zero(), "inexact coefficient division by {k}");
                    q
                })
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(BigInt::one()), |acc, _| &acc * self)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        self.div_exact(&g)
    }

    /// All distinct integer roots, ascending. Panics on the zero polynomial.
    pub fn integer_roots(&self) -> Vec<BigInt> {
        assert!(!self.is_zero(), "integer roots of the zero polynomial");
        integer_scan(self).roots
    }

    /// All distinct rational roots, ascending. Panics on the zero polynomial.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        assert!(!self.is_zero(), "rational roots of the zero polynomial");
        let mut f = self.clone();
        let mut out = Vec::new();
        // strip roots at zero so the monic transform is not degenerate
        let zeros = f.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zeros > 0 {
            out.push(BigRational::zero());
            f = IntPoly::new(f.coeffs[zeros..].to_vec());
        }
        let n = f.degree().unwrap();
        if n > 0 {
            let lead = f.leading();
            // y^n + a_{n-1} y^{n-1} + a_{n-2} a_n y^{n-2} + ... + a_0 a_n^{n-1}
            let mut monic = Vec::with_capacity(n + 1);
            let mut lead_pow = BigInt::one();
            for i in (0..n).rev() {
                monic.push(&f.coeffs[i] * &lead_pow);
                lead_pow *= &lead;
            }
            monic.reverse();
            monic.push(BigInt::one());
            let monic = IntPoly::new(monic);
            for y in monic.integer_roots() {
                let r = BigRational::new(y, lead.clone());
                debug_assert!(f.eval_rational(&r).is_zero());
                out.push(r);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Rational roots by the rational root theorem over explicit divisor lists of
    /// the constant and leading coefficients. Slow; used to cross-check.
    pub fn rational_roots_by_divisors(
        &self,
        constant_divisors: &[BigInt],
        leading_divisors: &[BigInt],
    ) -> Vec<BigRational> {
        let mut out = Vec::new();
        if self.coeff(0).is_zero() {
            out.push(BigRational::zero());
        }
        for u in constant_divisors {
            for v in leading_divisors {
                for s in [u.clone(), -u.clone()] {
                    let r = BigRational::new(s, v.clone());
                    if self.eval_rational(&r).is_zero() {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// `ceil(max |a_i| / |a_n|) + 1` bounds the absolute value of every real root.
fn cauchy_bound(f: &IntPoly) -> BigInt {
    let lead = f.leading().abs();
    let max = f.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default();
    max.div_ceil(&lead) + 1
}

struct Scan {
    /// Exact integer roots.
    roots: Vec<BigInt>,
    /// Integers `t` such that every real root lies in some `[t, t + 1]`.
    brackets: Vec<BigInt>,
}

fn integer_scan(f: &IntPoly) -> Scan {
    let deg = f.degree().expect("nonzero polynomial");
    if deg == 0 {
        return Scan {
            roots: Vec::new(),
            brackets: Vec::new(),
        };
    }
    let crit = if deg >= 2 {
        integer_scan(&f.derivative()).brackets
    } else {
        Vec::new()
    };
    let bound = cauchy_bound(f);
    let mut roots = Vec::new();
    let mut brackets: Vec<BigInt> = crit.clone();

    // integers adjacent to the critical brackets
    for c in &crit {
        for t in [c.clone(), c + 1] {
            if f.sign_at(&t) == 0 {
                roots.push(t);
            }
        }
    }

    // monotone pieces between consecutive critical brackets, clipped to the bound
    let mut pieces: Vec<(BigInt, BigInt)> = Vec::new();
    let lo_end = -bound.clone();
    let mut lo = lo_end.clone();
    for c in &crit {
        pieces.push((lo.clone(), c.clone()));
        lo = c + 1;
    }
    pieces.push((lo, bound.clone()));

    for (lo, hi) in pieces {
        let lo = lo.max(-bound.clone());
        let hi = hi.min(bound.clone());
        if lo > hi {
            continue;
        }
        let s_lo = f.sign_at(&lo);
        let s_hi = f.sign_at(&hi);
        if s_lo == 0 {
            roots.push(lo.clone());
            brackets.push(lo.clone());
        }
        if s_hi == 0 {
            roots.push(hi.clone());
            brackets.push(hi.clone());
        }
        if s_lo == 0 || s_hi == 0 || s_lo == s_hi {
            continue;
        }
        // invariant: sign(f(a)) = s_lo, sign(f(b)) = s_hi
        let (mut a, mut b) = (lo, hi);
        while &b - &a > BigInt::one() {
            let mid: BigInt = (&a + &b).div_floor(&BigInt::from(2));
            match f.sign_at(&mid) {
                0 => {
                    roots.push(mid.clone());
                    a = mid;
                    break;
                }
                s if s == s_lo => a = mid,
                _ => b = mid,
            }
        }
        brackets.push(a);
    }

    roots.sort();
    roots.dedup();
    brackets.sort();
    brackets.dedup();
    Scan { roots, brackets }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "IntPoly{:?}",
            self.coeffs
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        )
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roots_i64(f: &IntPoly) -> Vec<i64> {
        f.integer_roots()
            .iter()
            .map(|r| i64::try_from(r).unwrap())
            .collect()
    }

    #[test]
    fn roots_of_product_of_linears() {
        // (x - 3)(x + 5)(x - 7)^2 (x - 100)
        let lin = |r: i64| IntPoly::from_i64(&[-r, 1]);
        let f = [3, -5, 7, 7, 100]
            .iter()
            .fold(IntPoly::from_i64(&[1]), |acc, &r| &acc * &lin(r));
        assert_eq!(roots_i64(&f), vec![-5, 3, 7, 100]);
    }

    #[test]
    fn no_integer_roots_of_family_cubic() {
        // x^3 - 4x + 53361
        let f = IntPoly::from_i64(&[53361, -4, 0, 1]);
        assert!(f.integer_roots().is_empty());
    }

    #[test]
    fn close_irrational_roots_are_not_confused() {
        // (x^2 - 2)(x^2 - 3): four irrational roots, two in each of [1,2] and [-2,-1]
        let f = &IntPoly::from_i64(&[-2, 0, 1]) * &IntPoly::from_i64(&[-3, 0, 1]);
        assert!(f.integer_roots().is_empty());
        // double root at 1/2 inside a gap
        let g = &IntPoly::from_i64(&[-1, 2]) * &IntPoly::from_i64(&[-1, 2]);
        assert!(g.integer_roots().is_empty());
        assert_eq!(
            g.rational_roots(),
            vec![BigRational::new(1.into(), 2.into())]
        );
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 3)(5x + 1)(x^2 + 1) x
        let f = &(&IntPoly::from_i64(&[-3, 2]) * &IntPoly::from_i64(&[1, 5]))
            * &(&IntPoly::from_i64(&[1, 0, 1]) * &IntPoly::x());
        let r = f.rational_roots();
        let expect = vec![
            BigRational::new((-1).into(), 5.into()),
            BigRational::zero(),
            BigRational::new(3.into(), 2.into()),
        ];
        assert_eq!(r, expect);
    }

    #[test]
    fn display_is_readable() {
        let f = IntPoly::from_i64(&[-16, 640332, -24, 0, 3]);
        assert_eq!(f.to_string(), "3x^4 - 24x^2 + 640332x - 16");
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        let f = IntPoly::from_i64(&[6, -4, -2]);
        assert_eq!(f.primitive(), IntPoly::from_i64(&[-3, 2, 1]));
    }
}
