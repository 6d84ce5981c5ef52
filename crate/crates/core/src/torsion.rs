//! Rational torsion: reduction bound, Nagell-Lutz enumeration, division
//! polynomial root tests and replays of the family's congruence obstructions.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::factor::DEFAULT_RHO_BUDGET;
use crate::arith::{exact_sqrt, factor, odd_primes, IntPoly};
use crate::curve::{Curve, Point};
use crate::error::{Error, Result};
use crate::family::FamilyParams;
use crate::finite_field::{count_points, reduce_curve};

/// Largest order of a rational torsion point (Mazur).
pub const MAZUR_MAX_ORDER: u32 = 12;

/// Admissible torsion subgroup orders over Q.
pub const MAZUR_ORDERS: [u64; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12];

pub const OBSTRUCTION_ORDERS: [u32; 4] = [2, 3, 5, 7];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCount {
    #[serde(serialize_with = "crate::serde_util::display")]
    pub ell: u64,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub count: u64,
}

/// gcd of `#E(F_ℓ)` over the first `num_primes` odd primes of good reduction.
pub fn torsion_order_bound(curve: &Curve, num_primes: usize) -> Result<(u64, Vec<PrimeCount>)> {
    assert!(num_primes >= 1, "need at least one reduction prime");
    let mut evidence = Vec::with_capacity(num_primes);
    let mut bound = 0u64;
    for ell in odd_primes() {
        if evidence.len() == num_primes {
            break;
        }
        let rc = reduce_curve(curve, ell)?;
        if !rc.is_good() {
            continue;
        }
        let count = count_points(&rc)?;
        bound = bound.gcd(&count);
        evidence.push(PrimeCount { ell, count });
    }
    Ok((bound, evidence))
}

/// Reduced division polynomial `F_n`: `ψ_n = F_n` for odd n and `ψ_n = y F_n`
/// for even n, with `y^2` replaced by `x^3 + bx + c`.
pub fn division_polynomial(curve: &Curve, n: u32) -> IntPoly {
    let mut cache: Vec<IntPoly> = Vec::new();
    build_division(curve, n as usize, &mut cache);
    cache[n as usize].clone()
}

fn build_division(curve: &Curve, n: usize, cache: &mut Vec<IntPoly>) {
    let a = curve.b().clone();
    let b = curve.c().clone();
    let big = |v: i64| BigInt::from(v);
    let f = IntPoly::new(vec![b.clone(), a.clone(), BigInt::zero(), BigInt::from(1)]);
    let f2 = &f * &f;
    while cache.len() <= n {
        let k = cache.len();
        let next = match k {
            0 => IntPoly::zero(),
            1 => IntPoly::from_i64(&[1]),
            2 => IntPoly::from_i64(&[2]),
            3 => IntPoly::new(vec![
                -(&a * &a),
                big(12) * &b,
                big(6) * &a,
                BigInt::zero(),
                big(3),
            ]),
            4 => IntPoly::new(vec![
                -(big(8) * &b * &b) - &a * &a * &a,
                -(big(4) * &a * &b),
                -(big(5) * &a * &a),
                big(20) * &b,
                big(5) * &a,
                BigInt::zero(),
                big(1),
            ])
            .scale(&big(4)),
            _ if k % 2 == 1 => {
                let j = (k - 1) / 2;
                let t1 = &cache[j + 2] * &cache[j].pow(3);
                let t2 = &cache[j - 1] * &cache[j + 1].pow(3);
                if j.is_multiple_of(2) {
                    &(&f2 * &t1) - &t2
                } else {
                    &t1 - &(&f2 * &t2)
                }
            }
            _ => {
                let j = k / 2;
                let inner = &(&cache[j + 2] * &cache[j - 1].pow(2))
                    - &(&cache[j - 2] * &cache[j + 1].pow(2));
                (&cache[j] * &inner).div_exact(&big(2))
            }
        };
        cache.push(next);
    }
}

/// Outcome of an integer-root test on a division polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisionVerdict {
    pub order: u32,
    pub degree: usize,
    #[serde(serialize_with = "crate::serde_util::display_seq")]
    pub integer_roots: Vec<BigInt>,
    /// No integer root, hence no rational point of exact order `order`.
    pub no_point_of_order: bool,
}

/// Integer-root test of the polynomial cutting out points of order `n`:
/// the cubic `x^3 + bx + c` for `n = 2`, the division polynomial otherwise.
pub fn division_poly_has_integer_root(curve: &Curve, n: u32) -> Result<DivisionVerdict> {
    if !OBSTRUCTION_ORDERS.contains(&n) {
        return Err(Error::UnsupportedOrder(n));
    }
    let poly = if n == 2 {
        IntPoly::new(vec![
            curve.c().clone(),
            curve.b().clone(),
            BigInt::zero(),
            BigInt::from(1),
        ])
    } else {
        division_polynomial(curve, n)
    };
    let roots = poly.integer_roots();
    Ok(DivisionVerdict {
        order: n,
        degree: poly.degree().unwrap_or(0),
        no_point_of_order: roots.is_empty(),
        integer_roots: roots,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionPoint {
    pub point: Point,
    pub order: u32,
}

/// The full rational torsion subgroup found by Nagell-Lutz enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionGroup {
    /// Integral points with `y = 0` or `y^2 | Δ`.
    pub integral_candidates: Vec<Point>,
    /// Finite-order points, `O` included.
    pub points: Vec<TorsionPoint>,
    pub generators: Vec<Point>,
    pub structure: String,
}

impl TorsionGroup {
    pub fn order(&self) -> u64 {
        self.points.len() as u64
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.iter().any(|t| &t.point == p)
    }

    pub fn has_point_of_order(&self, n: u32) -> bool {
        self.points.iter().any(|t| t.order == n)
    }
}

/// Enumerate torsion by Nagell-Lutz: candidates are integral points with
/// `y = 0` or `y^2 | Δ`; each is kept iff `nP = O` for some `n <= 12`.
/// Returns `None` only if `Δ` cannot be factored within the rho budget.
pub fn nagell_lutz_torsion(curve: &Curve) -> Option<TorsionGroup> {
    let disc = curve.discriminant().abs().to_biguint().unwrap();
    let fac = factor(&disc, DEFAULT_RHO_BUDGET)?;
    let mut ys: Vec<BigInt> = vec![BigInt::zero()];
    for d in fac.square_divisor_roots() {
        let d = BigInt::from(d);
        ys.push(-d.clone());
        ys.push(d);
    }
    let mut candidates = Vec::new();
    for y in &ys {
        let poly = IntPoly::new(vec![
            curve.c() - y * y,
            curve.b().clone(),
            BigInt::zero(),
            BigInt::from(1),
        ]);
        for x in poly.integer_roots() {
            candidates.push(Point::from_ints(x, y.clone()));
        }
    }
    candidates.sort();

    let mut points = vec![TorsionPoint {
        point: Point::Infinity,
        order: 1,
    }];
    for cand in &candidates {
        if let Some(order) = finite_order(curve, cand) {
            points.push(TorsionPoint {
                point: cand.clone(),
                order,
            });
        }
    }
    let (generators, structure) = group_structure(curve, &points);
    Some(TorsionGroup {
        integral_candidates: candidates,
        points,
        generators,
        structure,
    })
}

/// Order of `p` if finite. Non-integral multiples prove infinite order.
fn finite_order(curve: &Curve, p: &Point) -> Option<u32> {
    let mut acc = p.clone();
    for n in 1..=MAZUR_MAX_ORDER {
        if acc.is_infinity() {
            return Some(n);
        }
        if !acc.is_integral() {
            return None;
        }
        acc = curve.add_unchecked(&acc, p);
    }
    None
}

fn group_structure(curve: &Curve, points: &[TorsionPoint]) -> (Vec<Point>, String) {
    let order = points.len() as u32;
    if order == 1 {
        return (Vec::new(), "trivial".into());
    }
    let big = points
        .iter()
        .max_by_key(|t| (t.order, std::cmp::Reverse(t.point.clone())))
        .unwrap();
    if big.order == order {
        return (vec![big.point.clone()], format!("Z/{order}Z"));
    }
    let multiples: Vec<Point> = (1..=big.order)
        .map(|k| curve.scalar_mul_unchecked(&BigInt::from(k), &big.point))
        .collect();
    let second = points
        .iter()
        .find(|t| t.order == 2 && !multiples.contains(&t.point))
        .expect("non-cyclic rational torsion is Z/2 x Z/2n");
    (
        vec![second.point.clone(), big.point.clone()],
        format!("Z/2Z x Z/{}Z", big.order),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaVerdict {
    /// No rational point of this order can exist.
    Obstructed,
    /// The congruence hypothesis of the argument fails for this `m`.
    HypothesisNotMet,
    /// Hypothesis holds but the replayed chain failed to close.
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub modulus: u32,
    pub contradiction: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReplay {
    pub order: u32,
    pub hypothesis: &'static str,
    pub hypothesis_met: bool,
    pub cases: Vec<CaseResult>,
    pub verdict: LemmaVerdict,
}

fn pow_mod_i(base: i64, exp: u32, m: i64) -> i64 {
    (0..exp).fold(1i64, |acc, _| (acc * base).rem_euclid(m))
}

/// Replay the family's congruence argument ruling out rational points of order `n`.
pub fn lemma_obstruction(params: &FamilyParams, n: u32) -> Result<LemmaReplay> {
    let m = params.m;
    let d = params.pqr();
    let (hypothesis, hypothesis_met, cases) = match n {
        2 => {
            // x | (pqr)^2 for any integral root of x^3 - m^2 x + (pqr)^2
            let c = &d * &d;
            let m2 = BigInt::from(m).pow(2);
            let mut divisors = vec![BigInt::from(1)];
            for prime in [params.p, params.q, params.r] {
                let mut next = Vec::new();
                for dv in &divisors {
                    for e in 0..=2u32 {
                        next.push(dv * BigInt::from(prime).pow(e));
                    }
                }
                divisors = next;
            }
            let root = divisors
                .iter()
                .flat_map(|x| [x.clone(), -x.clone()])
                .any(|x| (&x * &x * &x - &m2 * &x + &c).is_zero());
            let case = CaseResult {
                case: format!(
                    "no divisor x of (pqr)^2 solves x^3 - m^2 x + (pqr)^2 = 0 ({} checked)",
                    2 * divisors.len()
                ),
                modulus: 0,
                contradiction: !root,
            };
            ("none", true, vec![case])
        }
        3 => {
            let mm = (m % 3) as i64;
            let dd = crate::arith::residue(&d, 3) as i64;
            let solvable = (0..3i64).any(|x| {
                let v = 3 * x.pow(4) - 6 * mm * mm * x * x + 12 * dd * dd * x - mm.pow(4);
                v.rem_euclid(3) == 0
            });
            let case = CaseResult {
                case: "3x^4 - 6m^2x^2 + 12(pqr)^2x - m^4 ≡ 0 (mod 3) has no solution".into(),
                modulus: 3,
                contradiction: !solvable,
            };
            ("m ≢ 0 (mod 3)", !m.is_multiple_of(3), vec![case])
        }
        5 => {
            let mm = (m % 4) as i64;
            let even = CaseResult {
                case: "x even: forces m ≡ 0 (mod 4)".into(),
                modulus: 4,
                contradiction: mm != 0,
            };
            let odd = CaseResult {
                case: "x odd: forces (m^2 + 1)^8 ≡ 0 (mod 4)".into(),
                modulus: 4,
                contradiction: pow_mod_i(mm * mm + 1, 8, 4) != 0,
            };
            ("m ≡ 2 (mod 4)", m % 4 == 2, vec![even, odd])
        }
        7 => {
            let mm = (m % 8) as i64;
            let even = CaseResult {
                case: "x even: forces m ≡ 0 (mod 4)".into(),
                modulus: 4,
                contradiction: mm % 4 != 0,
            };
            let s = mm * mm + 1;
            let t = 3 - mm * mm;
            let chain = pow_mod_i(s, 16, 8)
                * (4 * pow_mod_i(t, 2, 8) * pow_mod_i(s, 6, 8) + pow_mod_i(s, 8, 8));
            let odd = CaseResult {
                case: "x odd: forces (1+m^2)^16 [4(3-m^2)^2 (1+m^2)^6 + (1+m^2)^8] ≡ 0 (mod 8)"
                    .into(),
                modulus: 8,
                contradiction: chain.rem_euclid(8) != 0,
            };
            ("m ≡ 2 (mod 8)", m % 8 == 2, vec![even, odd])
        }
        other => return Err(Error::UnsupportedOrder(other)),
    };
    let verdict = if !hypothesis_met {
        LemmaVerdict::HypothesisNotMet
    } else if cases.iter().all(|c| c.contradiction) {
        LemmaVerdict::Obstructed
    } else {
        LemmaVerdict::Open
    };
    Ok(LemmaReplay {
        order: n,
        hypothesis,
        hypothesis_met,
        cases,
        verdict,
    })
}

/// Everything known about the torsion of one curve, with per-route evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionReport {
    #[serde(serialize_with = "crate::serde_util::display")]
    pub bound_from_reduction: u64,
    pub primes_used: Vec<PrimeCount>,
    pub integral_candidates: Vec<Point>,
    /// Finite-order points, `O` included.
    pub points: Vec<Point>,
    /// `None` when Nagell-Lutz enumeration could not factor `Δ`.
    pub torsion_order: Option<u64>,
    pub structure: Option<String>,
    pub generators: Vec<Point>,
    pub division_polynomials: BTreeMap<u32, DivisionVerdict>,
    pub lemma_obstructions: BTreeMap<u32, LemmaReplay>,
}

impl TorsionReport {
    pub fn is_trivial(&self) -> bool {
        self.torsion_order == Some(1)
    }

    /// Triviality certified by division polynomials alone: no point of order
    /// 2, 3, 5 or 7, and by Mazur every nontrivial group has one.
    pub fn division_route_trivial(&self) -> bool {
        OBSTRUCTION_ORDERS.iter().all(|n| {
            self.division_polynomials
                .get(n)
                .is_some_and(|v| v.no_point_of_order)
        })
    }

    /// Triviality certified by the reduction bound alone.
    pub fn reduction_route_trivial(&self) -> bool {
        self.bound_from_reduction == 1
    }
}

/// Run every torsion route; the congruence replays only when `family` is given.
pub fn torsion_report(
    curve: &Curve,
    family: Option<&FamilyParams>,
    num_primes: usize,
) -> Result<TorsionReport> {
    let (bound, primes_used) = torsion_order_bound(curve, num_primes)?;
    let group = nagell_lutz_torsion(curve);
    let mut division_polynomials = BTreeMap::new();
    for n in OBSTRUCTION_ORDERS {
        division_polynomials.insert(n, division_poly_has_integer_root(curve, n)?);
    }
    let mut lemma_obstructions = BTreeMap::new();
    if let Some(params) = family {
        for n in OBSTRUCTION_ORDERS {
            lemma_obstructions.insert(n, lemma_obstruction(params, n)?);
        }
    }
    let report = TorsionReport {
        bound_from_reduction: bound,
        primes_used,
        integral_candidates: group
            .as_ref()
            .map(|g| g.integral_candidates.clone())
            .unwrap_or_default(),
        points: group
            .as_ref()
            .map(|g| g.points.iter().map(|t| t.point.clone()).collect())
            .unwrap_or_default(),
        torsion_order: group.as_ref().map(TorsionGroup::order),
        structure: group.as_ref().map(|g| g.structure.clone()),
        generators: group.map(|g| g.generators).unwrap_or_default(),
        division_polynomials,
        lemma_obstructions,
    };
    if let Some(t) = report.torsion_order {
        assert!(
            bound % t == 0,
            "torsion order {t} does not divide reduction bound {bound}"
        );
        assert!(
            MAZUR_ORDERS.contains(&t),
            "torsion order {t} outside Mazur's list"
        );
    }
    Ok(report)
}

/// Positive divisors of a nonzero integer, via [`factor`].
pub fn divisors_of(n: &BigInt) -> Option<Vec<BigInt>> {
    let abs: BigUint = n.abs().to_biguint()?;
    Some(
        factor(&abs, DEFAULT_RHO_BUDGET)?
            .divisors()
            .into_iter()
            .map(BigInt::from)
            .collect(),
    )
}

/// Integral points with `y = ±sqrt(x^3 + bx + c)` for `|x| <= bound`.
pub fn integral_points_in_range(curve: &Curve, bound: i64) -> Vec<Point> {
    let mut out = Vec::new();
    for x in -bound..=bound {
        let x = BigInt::from(x);
        if let Some(y) = exact_sqrt(&curve.rhs_int(&x)) {
            if y.is_zero() {
                out.push(Point::from_ints(x, y));
            } else {
                out.push(Point::from_ints(x.clone(), y.clone()));
                out.push(Point::from_ints(x, -y));
            }
        }
    }
    out
}
