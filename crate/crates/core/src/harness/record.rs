//! Self-contained per-curve records and their re-verification.

use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::descent::{
    rank_ge_2_certificate_with, rank_ge_3_probe_with, ProbeOptions, RankCertificate,
};
use crate::error::{Error, Result};
use crate::family::{build_family_curve, validate_hypotheses, FamilyParams, HypothesisReport};
use crate::torsion::{torsion_report, TorsionReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_REDUCTION_PRIMES: usize = 5;
pub const DEFAULT_HEIGHT_BOUND: u64 = 10_000;

/// Knobs that influence a record's content; stored in the record so that
/// `recheck` can reproduce it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub reduction_primes: usize,
    pub height_bound: u64,
    pub max_denominator: u64,
    pub max_candidates: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let probe = ProbeOptions::default();
        VerifyOptions {
            reduction_primes: DEFAULT_REDUCTION_PRIMES,
            height_bound: DEFAULT_HEIGHT_BOUND,
            max_denominator: probe.max_denominator,
            max_candidates: probe.max_candidates,
        }
    }
}

impl VerifyOptions {
    fn probe(&self) -> ProbeOptions {
        ProbeOptions {
            height_bound: self.height_bound,
            max_denominator: self.max_denominator,
            max_candidates: self.max_candidates,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveCoefficients {
    #[serde(serialize_with = "crate::serde_util::display")]
    pub b: BigInt,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub c: BigInt,
}

/// Wall-clock milliseconds per stage. Excluded from every comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub torsion_ms: f64,
    pub descent_ms: f64,
    pub probe_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRecord {
    pub schema: u32,
    pub params: FamilyParams,
    pub options: VerifyOptions,
    pub curve: CurveCoefficients,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub discriminant: BigInt,
    pub hypotheses: HypothesisReport,
    pub torsion: TorsionReport,
    pub certificate: RankCertificate,
    pub torsion_trivial: bool,
    pub rank_lower_bound: u32,
    pub probe_success: bool,
    pub timings: Timings,
}

impl CurveRecord {
    /// Exit-code contract: certificate issued iff rank >= 2 and torsion trivial.
    pub fn verified(&self) -> bool {
        self.rank_lower_bound >= 2 && self.torsion_trivial
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    /// The record as JSON with the timings removed.
    pub fn to_comparable(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("records always serialize");
        strip_timings(&mut v);
        v
    }
}

fn ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Full pipeline on one family curve.
pub fn build_record(params: &FamilyParams, options: &VerifyOptions) -> Result<CurveRecord> {
    let total = Instant::now();
    let curve = build_family_curve(params)?;

    let t = Instant::now();
    let torsion = torsion_report(&curve, Some(params), options.reduction_primes.max(1))?;
    let torsion_ms = ms(t);

    let t = Instant::now();
    let base = rank_ge_2_certificate_with(params, &torsion)?;
    let descent_ms = ms(t);

    let t = Instant::now();
    let certificate = rank_ge_3_probe_with(base, options.probe())?;
    let probe_ms = ms(t);

    let probe_success = certificate.extra_points.as_ref().is_some_and(|p| p.success);
    Ok(CurveRecord {
        schema: SCHEMA_VERSION,
        params: params.clone(),
        options: *options,
        curve: CurveCoefficients {
            b: curve.b().clone(),
            c: curve.c().clone(),
        },
        discriminant: curve.discriminant(),
        hypotheses: validate_hypotheses(params),
        torsion_trivial: torsion.is_trivial(),
        torsion,
        rank_lower_bound: certificate.rank_lower_bound,
        certificate,
        probe_success,
        timings: Timings {
            torsion_ms,
            descent_ms,
            probe_ms,
            total_ms: ms(total),
        },
    })
}

fn strip_timings(v: &mut Value) {
    if let Value::Object(map) = v {
        map.remove("timings");
    }
}

#[derive(Deserialize)]
struct RawParams {
    m: String,
    p: String,
    q: String,
    r: String,
}

#[derive(Deserialize)]
struct RecordHeader {
    schema: u32,
    params: RawParams,
    options: VerifyOptions,
}

fn parse_u64(s: &str, field: &str) -> Result<u64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("field {field}: {s:?} is not an integer")))
}

/// Outcome of re-deriving one stored record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecheckOutcome {
    pub identical: bool,
    /// Top-level fields whose content differs from the re-derivation.
    pub mismatched_fields: Vec<String>,
}

/// Re-derive a record from its params and options and compare every field but the timings.
pub fn recheck_line(line: &str) -> Result<RecheckOutcome> {
    let mut stored: Value = serde_json::from_str(line)?;
    let header: RecordHeader = serde_json::from_value(stored.clone())?;
    if header.schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unsupported schema {}",
            header.schema
        )));
    }
    let params = FamilyParams::new(
        parse_u64(&header.params.m, "m")?,
        parse_u64(&header.params.p, "p")?,
        parse_u64(&header.params.q, "q")?,
        parse_u64(&header.params.r, "r")?,
    )?;
    let fresh = build_record(&params, &header.options)?.to_comparable();
    strip_timings(&mut stored);
    let mut mismatched_fields = Vec::new();
    if let (Value::Object(a), Value::Object(b)) = (&stored, &fresh) {
        for key in a.keys().chain(b.keys()) {
            if a.get(key) != b.get(key) && !mismatched_fields.contains(key) {
                mismatched_fields.push(key.clone());
            }
        }
    }
    Ok(RecheckOutcome {
        identical: stored == fresh,
        mismatched_fields,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            height_bound: 200,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn fresh_record_rechecks() {
        let params = FamilyParams::new(2, 3, 7, 11).unwrap();
        let rec = build_record(&params, &quick()).unwrap();
        assert!(rec.verified());
        let out = recheck_line(&rec.to_json_line()).unwrap();
        assert!(out.identical, "{:?}", out.mismatched_fields);
    }

    #[test]
    fn tampered_verdict_is_caught() {
        let params = FamilyParams::new(2, 3, 7, 11).unwrap();
        let line = build_record(&params, &quick()).unwrap().to_json_line();
        let tampered = line.replacen("\"verdict\":\"nonzero\"", "\"verdict\":\"zero\"", 1);
        assert_ne!(tampered, line);
        let out = recheck_line(&tampered).unwrap();
        assert!(!out.identical);
        assert_eq!(out.mismatched_fields, vec!["certificate".to_string()]);
    }

    #[test]
    fn timings_do_not_matter() {
        let params = FamilyParams::new(2, 3, 7, 11).unwrap();
        let a = build_record(&params, &quick()).unwrap();
        let mut b = a.clone();
        b.timings.total_ms += 1000.0;
        assert_eq!(a.to_comparable(), b.to_comparable());
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(recheck_line("{not json"), Err(Error::Parse(_))));
        assert!(matches!(
            recheck_line("{\"schema\":1}"),
            Err(Error::Parse(_))
        ));
    }
}
