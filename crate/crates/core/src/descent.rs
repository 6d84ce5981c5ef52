//! Membership in 2E(Q), the order-4 subgroup of E(Q)/2E(Q) spanned by the
//! canonical points, and rank lower-bound certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{exact_sqrt, rational_sqrt, IntPoly};
use crate::curve::{negate_unchecked, Curve, Point};
use crate::error::{Error, Result};
use crate::family::{
    build_family_curve, canonical_points, validate_hypotheses, FamilyParams, HypothesisReport,
};
use crate::torsion::{torsion_report, TorsionReport};

/// Primitive integer quartic whose rational roots are the x-coordinates of
/// every `R` with `x(2R) = x(source_point)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalvingQuartic {
    /// Constant term first.
    #[serde(serialize_with = "crate::serde_util::display_seq")]
    pub coefficients: Vec<BigInt>,
    pub source_point: Point,
}

impl HalvingQuartic {
    pub fn poly(&self) -> IntPoly {
        IntPoly::new(self.coefficients.clone())
    }
}

/// For target `x0 = u/v`:
/// `v (x^4 - 2b x^2 - 8c x + b^2) - 4u (x^3 + bx + c)`, made primitive.
pub fn halving_quartic(curve: &Curve, target: &Point) -> Result<HalvingQuartic> {
    let x0 = match target {
        Point::Infinity => return Err(Error::InfinityTarget),
        Point::Affine { x, .. } => x,
    };
    if !curve.is_on_curve(target) {
        return Err(Error::PointNotOnCurve);
    }
    let (u, v) = (x0.numer(), x0.denom());
    let (b, c) = (curve.b(), curve.c());
    let four = BigInt::from(4);
    let poly = IntPoly::new(vec![
        v * b * b - &four * u * c,
        -(BigInt::from(8) * c * v) - &four * u * b,
        -(BigInt::from(2) * b * v),
        -(&four * u),
        v.clone(),
    ])
    .primitive();
    Ok(HalvingQuartic {
        coefficients: poly.coeffs().to_vec(),
        source_point: target.clone(),
    })
}

/// Every rational `R` with `2R = target`, ascending.
pub fn halving_preimages(curve: &Curve, target: &Point) -> Result<Vec<Point>> {
    Ok(halve(curve, target)?.preimages)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalvingEvidence {
    pub quartic: HalvingQuartic,
    #[serde(serialize_with = "crate::serde_util::display_seq")]
    pub rational_roots: Vec<BigRational>,
    pub preimages: Vec<Point>,
}

fn halve(curve: &Curve, target: &Point) -> Result<HalvingEvidence> {
    let quartic = halving_quartic(curve, target)?;
    let roots = quartic.poly().rational_roots();
    let mut preimages = Vec::new();
    for x in &roots {
        let Some(y) = rational_sqrt(&curve.rhs(x)) else {
            continue;
        };
        if y.is_zero() {
            continue;
        }
        for y in [y.clone(), -y] {
            let r = Point::affine(x.clone(), y);
            if curve.double_unchecked(&r) == *target {
                preimages.push(r);
            }
        }
    }
    preimages.sort();
    Ok(HalvingEvidence {
        quartic,
        rational_roots: roots,
        preimages,
    })
}

/// Which canonical point a congruence replay is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalKind {
    /// `(0, ±pqr)`.
    A,
    /// `(m, ±pqr)`.
    B,
    /// `(-m, ±pqr)`, the class of `A ⊕ B`.
    Sum,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReplay {
    pub kind: CanonicalKind,
    pub equation: &'static str,
    pub modulus: u32,
    /// `m ≡ 2 (mod 32)`.
    pub hypothesis_met: bool,
    /// Residues of the free variable that satisfy the congruence.
    pub solutions: Vec<u32>,
    pub obstructed: bool,
}

fn identify_canonical(params: &FamilyParams, pt: &Point) -> Option<CanonicalKind> {
    let (x, y) = (pt.x()?, pt.y()?);
    let d = BigRational::from_integer(params.pqr());
    if y.abs() != d {
        return None;
    }
    let m = BigRational::from_integer(params.m_big());
    if x.is_zero() {
        Some(CanonicalKind::A)
    } else if *x == m {
        Some(CanonicalKind::B)
    } else if *x == -m {
        Some(CanonicalKind::Sum)
    } else {
        None
    }
}

/// Replay the 2-adic argument that a canonical point is not a double.
pub fn congruence_replay(params: &FamilyParams, kind: CanonicalKind) -> CongruenceReplay {
    let m = BigInt::from(params.m);
    let d2 = params.pqr().pow(2);
    let (equation, modulus, solutions): (&'static str, u32, Vec<u32>) = match kind {
        CanonicalKind::A => {
            // (x^2 + m^2)^2 = 8x(pqr)^2 forces x = 2k^2
            let modulus = 32u32;
            let sols = (0..modulus)
                .filter(|&k| {
                    let k = BigInt::from(k);
                    let v = BigInt::from(16) * k.pow(8)
                        + BigInt::from(8) * k.pow(4) * &m * &m
                        + m.pow(4)
                        - BigInt::from(16) * &k * &k * &d2;
                    v.mod_floor(&BigInt::from(modulus)).is_zero()
                })
                .collect();
            ("16k^8 + 8k^4 m^2 + m^4 = 16k^2 (pqr)^2", modulus, sols)
        }
        CanonicalKind::B => {
            // (2s^2 - m^2)^2 = (pqr)^2 (4s + 3m) forces 4s + 3m = w^2
            let modulus = 4u32;
            let target = (BigInt::from(3) * &m).mod_floor(&BigInt::from(modulus));
            let sols = (0..modulus)
                .filter(|&w| BigInt::from(w * w % modulus) == target)
                .collect();
            ("w^2 = 4s + 3m", modulus, sols)
        }
        CanonicalKind::Sum => {
            let modulus = 16u32;
            let sols = (0..modulus)
                .filter(|&s| {
                    let s = BigInt::from(s);
                    let v = BigInt::from(4) * s.pow(4)
                        + BigInt::from(16) * &m * s.pow(3)
                        + BigInt::from(20) * m.pow(2) * s.pow(2)
                        + BigInt::from(8) * m.pow(3) * &s
                        - BigInt::from(4) * &s * &d2
                        + m.pow(4)
                        - &d2 * &m;
                    v.mod_floor(&BigInt::from(modulus)).is_zero()
                })
                .collect();
            (
                "4s^4 + 16ms^3 + 20m^2s^2 + 8m^3s - 4s(pqr)^2 + m^4 - (pqr)^2 m = 0",
                modulus,
                sols,
            )
        }
    };
    let hypothesis_met = validate_hypotheses(params).mod2k_ok;
    CongruenceReplay {
        kind,
        equation,
        modulus,
        hypothesis_met,
        obstructed: solutions.is_empty(),
        solutions,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassVerdict {
    /// Not in 2E(Q).
    Nonzero,
    /// In 2E(Q).
    Zero,
    /// The congruence route and the halving route contradict each other.
    RoutesDisagree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCheck {
    pub point: Point,
    pub halving: HalvingEvidence,
    pub congruence: Option<CongruenceReplay>,
    pub verdict: ClassVerdict,
}

impl ClassCheck {
    pub fn is_nonzero(&self) -> bool {
        self.verdict == ClassVerdict::Nonzero
    }
}

/// Decide whether `[P] ≠ 0` in E(Q)/2E(Q). The halving route always runs;
/// for canonical points of a family curve the congruence route is replayed too.
pub fn class_is_nonzero(
    curve: &Curve,
    pt: &Point,
    family: Option<&FamilyParams>,
) -> Result<ClassCheck> {
    let halving = halve(curve, pt)?;
    let congruence = family
        .and_then(|params| identify_canonical(params, pt).map(|k| congruence_replay(params, k)));
    let by_halving = halving.preimages.is_empty();
    let verdict = match &congruence {
        Some(c) if c.hypothesis_met && c.obstructed && !by_halving => ClassVerdict::RoutesDisagree,
        _ if by_halving => ClassVerdict::Nonzero,
        _ => ClassVerdict::Zero,
    };
    Ok(ClassCheck {
        point: pt.clone(),
        halving,
        congruence,
        verdict,
    })
}

/// Rank lower bound from the certificate's verdicts.
pub fn decide_rank_bound(
    torsion_trivial: bool,
    b_infinite_order: bool,
    classes: [ClassVerdict; 3],
) -> u32 {
    if torsion_trivial && classes.iter().all(|v| *v == ClassVerdict::Nonzero) {
        2
    } else if b_infinite_order {
        1
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeCandidate {
    pub point: Point,
    /// `[C]`, `[C ⊕ A]`, `[C ⊕ B]`, `[C ⊕ A ⊕ B]`.
    pub classes: Vec<ClassCheck>,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    #[serde(serialize_with = "crate::serde_util::display")]
    pub height_bound: u64,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub max_denominator: u64,
    pub points_found: Vec<Point>,
    pub candidates: Vec<ProbeCandidate>,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    pub params: FamilyParams,
    pub hypotheses: HypothesisReport,
    pub torsion_trivial: bool,
    pub b_infinite_order: bool,
    pub class_a: ClassCheck,
    pub class_b: ClassCheck,
    pub class_ab: ClassCheck,
    pub classes_distinct: bool,
    pub rank_lower_bound: u32,
    pub extra_points: Option<ProbeReport>,
}

/// Certificate that `rank E_m(Q) >= 2`, given an already computed torsion report.
pub fn rank_ge_2_certificate_with(
    params: &FamilyParams,
    torsion: &TorsionReport,
) -> Result<RankCertificate> {
    let curve = build_family_curve(params)?;
    let pts = canonical_points(params);
    let class_a = class_is_nonzero(&curve, &pts.a, Some(params))?;
    let class_b = class_is_nonzero(&curve, &pts.b, Some(params))?;
    let class_ab = class_is_nonzero(&curve, &pts.s, Some(params))?;
    // [A] ≠ [B] iff [A ⊕ B] ≠ 0, [A] ≠ [A ⊕ B] iff [B] ≠ 0, [B] ≠ [A ⊕ B] iff [A] ≠ 0
    let classes_distinct = class_a.is_nonzero() && class_b.is_nonzero() && class_ab.is_nonzero();
    let torsion_trivial = torsion.is_trivial();
    // a point outside the (fully enumerated) torsion subgroup has infinite order
    let b_infinite_order = torsion.torsion_order.is_some() && !torsion.points.contains(&pts.b);
    let rank_lower_bound = decide_rank_bound(
        torsion_trivial,
        b_infinite_order,
        [class_a.verdict, class_b.verdict, class_ab.verdict],
    );
    Ok(RankCertificate {
        params: params.clone(),
        hypotheses: validate_hypotheses(params),
        torsion_trivial,
        b_infinite_order,
        class_a,
        class_b,
        class_ab,
        classes_distinct,
        rank_lower_bound,
        extra_points: None,
    })
}

pub fn rank_ge_2_certificate(params: &FamilyParams, num_primes: usize) -> Result<RankCertificate> {
    let curve = build_family_curve(params)?;
    let torsion = torsion_report(&curve, Some(params), num_primes)?;
    rank_ge_2_certificate_with(params, &torsion)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeOptions {
    pub height_bound: u64,
    /// Rational points `x = u/d^2` are searched for `2 <= d <= max_denominator`.
    pub max_denominator: u64,
    /// Stop after testing this many candidates.
    pub max_candidates: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            height_bound: 10_000,
            max_denominator: 3,
            max_candidates: 32,
        }
    }
}

/// Points with `x = u/d^2`, `|u| <= height_bound`, `gcd(u, d) = 1`, `y > 0`
/// (or `y = 0`), for `1 <= d <= max_denominator`.
pub fn search_points(curve: &Curve, height_bound: u64, max_denominator: u64) -> Vec<Point> {
    let h = height_bound as i64;
    let mut out = Vec::new();
    for d in 1..=max_denominator.max(1) {
        let d = BigInt::from(d);
        let d2 = &d * &d;
        let d4 = &d2 * &d2;
        let d6 = &d4 * &d2;
        let d3 = &d2 * &d;
        for u in -h..=h {
            let u = BigInt::from(u);
            if !u.gcd(&d).is_one() {
                continue;
            }
            let val = &u * &u * &u + curve.b() * &u * &d4 + curve.c() * &d6;
            if let Some(y) = exact_sqrt(&val) {
                out.push(Point::affine(
                    BigRational::new(u.clone(), d2.clone()),
                    BigRational::new(y, d3.clone()),
                ));
            }
        }
    }
    out.sort();
    out
}

/// Class checks of `[C], [C ⊕ A], [C ⊕ B], [C ⊕ A ⊕ B]`, stopping at the first zero.
pub fn probe_candidate(params: &FamilyParams, c: &Point) -> Result<ProbeCandidate> {
    let curve = build_family_curve(params)?;
    if !curve.is_on_curve(c) {
        return Err(Error::PointNotOnCurve);
    }
    let pts = canonical_points(params);
    let c_a = curve.add_unchecked(c, &pts.a);
    let c_b = curve.add_unchecked(c, &pts.b);
    let c_s = curve.add_unchecked(c, &pts.s);
    let mut classes = Vec::with_capacity(4);
    for p in [c, &c_a, &c_b, &c_s] {
        if p.is_infinity() {
            break;
        }
        let check = class_is_nonzero(&curve, p, Some(params))?;
        let stop = !check.is_nonzero();
        classes.push(check);
        if stop {
            break;
        }
    }
    let independent = classes.len() == 4 && classes.iter().all(ClassCheck::is_nonzero);
    Ok(ProbeCandidate {
        point: c.clone(),
        classes,
        independent,
    })
}

/// Search for a third independent class: a point `C` with
/// `[C], [C ⊕ A], [C ⊕ B], [C ⊕ A ⊕ B]` all nonzero.
pub fn rank_ge_3_probe_with(
    base: RankCertificate,
    options: ProbeOptions,
) -> Result<RankCertificate> {
    let params = base.params.clone();
    let curve = build_family_curve(&params)?;
    let pts = canonical_points(&params);
    let points_found = if options.height_bound == 0 {
        Vec::new()
    } else {
        search_points(&curve, options.height_bound, options.max_denominator)
    };
    let a_minus_b = curve.add_unchecked(&pts.a, &negate_unchecked(&pts.b));
    let known: Vec<Point> = [&pts.a, &pts.b, &pts.s, &a_minus_b]
        .iter()
        .flat_map(|p| [(*p).clone(), negate_unchecked(p)])
        .collect();
    let mut candidates = Vec::new();
    let mut success = false;
    for c in points_found
        .iter()
        .filter(|p| !known.contains(p) && p.y().is_some_and(|y| !y.is_zero()))
    {
        if candidates.len() >= options.max_candidates || success {
            break;
        }
        let candidate = probe_candidate(&params, c)?;
        let independent = candidate.independent;
        success = independent && base.rank_lower_bound >= 2;
        candidates.push(candidate);
    }
    let mut cert = base;
    if success {
        cert.rank_lower_bound = 3;
    }
    cert.extra_points = Some(ProbeReport {
        height_bound: options.height_bound,
        max_denominator: options.max_denominator,
        points_found,
        candidates,
        success,
    });
    Ok(cert)
}

pub fn rank_ge_3_probe(
    params: &FamilyParams,
    height_bound: u64,
    num_primes: usize,
) -> Result<RankCertificate> {
    let base = rank_ge_2_certificate(params, num_primes)?;
    rank_ge_3_probe_with(
        base,
        ProbeOptions {
            height_bound,
            ..ProbeOptions::default()
        },
    )
}
