//! Short Weierstrass curves `y^2 = x^3 + bx + c` over Q with exact group law.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Nonsingular curve `y^2 = x^3 + bx + c` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    b: BigInt,
    c: BigInt,
}

/// A rational point: the point at infinity or an affine pair in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl Point {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        Point::Affine { x, y }
    }

    pub fn from_ints(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Point::Affine {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            Point::Infinity => None,
            Point::Affine { y, .. } => Some(y),
        }
    }

    /// Both coordinates are integers.
    pub fn is_integral(&self) -> bool {
        match self {
            Point::Infinity => false,
            Point::Affine { x, y } => x.is_integer() && y.is_integer(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Infinity => s.serialize_str("O"),
            Point::Affine { x, y } => {
                let mut st = s.serialize_struct("Point", 2)?;
                st.serialize_field("x", &x.to_string())?;
                st.serialize_field("y", &y.to_string())?;
                st.end()
            }
        }
    }
}

fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

impl Curve {
    /// Build `y^2 = x^3 + bx + c`, rejecting singular models.
    pub fn new(b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let (b, c) = (b.into(), c.into());
        let curve = Curve { b, c };
        if curve.discriminant().is_zero() {
            return Err(Error::SingularCurve {
                b: curve.b,
                c: curve.c,
            });
        }
        Ok(curve)
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// `-16(4b^3 + 27c^2)`.
    pub fn discriminant(&self) -> BigInt {
        let four_b3 = BigInt::from(4) * &self.b * &self.b * &self.b;
        let tw7_c2 = BigInt::from(27) * &self.c * &self.c;
        BigInt::from(-16) * (four_b3 + tw7_c2)
    }

    /// `x^3 + bx + c` at a rational `x`.
    pub fn rhs(&self, x: &BigRational) -> BigRational {
        x * x * x + rat(&self.b) * x + rat(&self.c)
    }

    pub fn rhs_int(&self, x: &BigInt) -> BigInt {
        x * x * x + &self.b * x + &self.c
    }

    pub fn is_on_curve(&self, pt: &Point) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine { x, y } => y * y == self.rhs(x),
        }
    }

    fn check(&self, pt: &Point) -> Result<()> {
        if self.is_on_curve(pt) {
            Ok(())
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    pub fn negate(&self, pt: &Point) -> Result<Point> {
        self.check(pt)?;
        Ok(negate_unchecked(pt))
    }

    pub fn add(&self, p: &Point, q: &Point) -> Result<Point> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.add_unchecked(p, q))
    }

    pub fn double(&self, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(self.double_unchecked(p))
    }

    /// `n * P`; negative `n` multiplies `-P`.
    pub fn scalar_mul(&self, n: &BigInt, p: &Point) -> Result<Point> {
        self.check(p)?;
        Ok(self.scalar_mul_unchecked(n, p))
    }

    pub(crate) fn add_unchecked(&self, p: &Point, q: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        if x1 == x2 {
            if y1 == y2 {
                return self.double_unchecked(p);
            }
            return Point::Infinity;
        }
        let slope = (y2 - y1) / (x2 - x1);
        let x3 = &slope * &slope - x1 - x2;
        let y3 = slope * (x1 - &x3) - y1;
        Point::Affine { x: x3, y: y3 }
    }

    pub(crate) fn double_unchecked(&self, p: &Point) -> Point {
        let (x, y) = match p {
            Point::Infinity => return Point::Infinity,
            Point::Affine { x, y } => (x, y),
        };
        if y.is_zero() {
            return Point::Infinity;
        }
        let two = BigRational::from_integer(2.into());
        let three = BigRational::from_integer(3.into());
        let slope = (three * x * x + rat(&self.b)) / (&two * y);
        let x3 = &slope * &slope - &two * x;
        let y3 = slope * (x - &x3) - y;
        Point::Affine { x: x3, y: y3 }
    }

    pub(crate) fn scalar_mul_unchecked(&self, n: &BigInt, p: &Point) -> Point {
        let base = if n.is_negative() {
            negate_unchecked(p)
        } else {
            p.clone()
        };
        let k = n.abs();
        let mut acc = Point::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.double_unchecked(&acc);
            if k.bit(i) {
                acc = self.add_unchecked(&acc, &base);
            }
        }
        acc
    }

    /// Smallest `n` in `1..=limit` with `nP = O`, else `None`.
    pub fn order_up_to(&self, p: &Point, limit: u32) -> Option<u32> {
        let mut acc = p.clone();
        for n in 1..=limit {
            if acc.is_infinity() {
                return Some(n);
            }
            acc = self.add_unchecked(&acc, p);
        }
        None
    }
}

pub(crate) fn negate_unchecked(p: &Point) -> Point {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine { x, y } => Point::Affine {
            x: x.clone(),
            y: -y,
        },
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3")?;
        if !self.b.is_zero() {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            if self.b.abs().is_one() {
                write!(f, " {sign} x")?;
            } else {
                write!(f, " {sign} {}x", self.b.abs())?;
            }
        }
        if !self.c.is_zero() {
            let sign = if self.c.is_negative() { '-' } else { '+' };
            write!(f, " {sign} {}", self.c.abs())?;
        }
        Ok(())
    }
}
