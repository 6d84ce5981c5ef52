#![allow(dead_code)]

use emcurve::family::{build_family_curve, canonical_points, FamilyParams};
use emcurve::{Curve, Point};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

pub const SMALL_ODD_PRIMES: [u64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

pub fn random_family<R: Rng>(rng: &mut R) -> FamilyParams {
    let m = rng.gen_range(1..=400);
    let primes: Vec<u64> = SMALL_ODD_PRIMES.choose_multiple(rng, 3).copied().collect();
    FamilyParams::new(m, primes[0], primes[1], primes[2]).unwrap()
}

/// `i A + j B` for `|i|, |j| <= radius`, where A and B are the canonical points.
pub fn lattice_points(params: &FamilyParams, radius: i64) -> (Curve, Vec<Point>) {
    let curve = build_family_curve(params).unwrap();
    let pts = canonical_points(params);
    let mut out = Vec::new();
    for i in -radius..=radius {
        let ia = curve.scalar_mul(&BigInt::from(i), &pts.a).unwrap();
        for j in -radius..=radius {
            let jb = curve.scalar_mul(&BigInt::from(j), &pts.b).unwrap();
            out.push(curve.add(&ia, &jb).unwrap());
        }
    }
    (curve, out)
}

/// A random integral curve together with multiples of a known integral point on it.
pub fn random_curve_with_points<R: Rng>(rng: &mut R, multiples: i64) -> (Curve, Vec<Point>) {
    loop {
        let x0: i64 = rng.gen_range(-30..=30);
        let y0: i64 = rng.gen_range(1..=60);
        let b: i64 = rng.gen_range(-50..=50);
        let c = y0 * y0 - x0 * x0 * x0 - b * x0;
        let Ok(curve) = Curve::new(b, c) else {
            continue;
        };
        let g = Point::from_ints(x0, y0);
        let pts = (-multiples..=multiples)
            .map(|k| curve.scalar_mul(&BigInt::from(k), &g).unwrap())
            .collect();
        return (curve, pts);
    }
}
