//! Parameter sweeps over `(m, {p, q, r})` with an ordered, resumable writer.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::family::FamilyParams;

use super::record::{build_record, CurveRecord, VerifyOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MValues {
    List(Vec<u64>),
    Progression { start: u64, step: u64, count: u64 },
}

impl MValues {
    /// Sorted, deduplicated values.
    pub fn values(&self) -> Vec<u64> {
        let mut v = match self {
            MValues::List(v) => v.clone(),
            MValues::Progression { start, step, count } => {
                (0..*count).map(|i| start + i * step).collect()
            }
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl std::str::FromStr for MValues {
    type Err = Error;

    /// `2,34,66` or `start:step:count`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSweep(format!("cannot parse m values {s:?}"));
        if s.contains(':') {
            let parts: Vec<u64> = s
                .split(':')
                .map(|t| t.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            match parts[..] {
                [start, step, count] => Ok(MValues::Progression { start, step, count }),
                _ => Err(bad()),
            }
        } else {
            let v = s
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse().map_err(|_| bad()))
                .collect::<Result<Vec<u64>>>()?;
            Ok(MValues::List(v))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::InvalidSweep(format!("unknown format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "m,p,q,r,discriminant,torsion_order,rank_lower_bound,probe_success";

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub m_values: MValues,
    pub prime_pool: Vec<u64>,
    pub options: VerifyOptions,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    /// Require every `m ≡ 2 (mod 32)`.
    pub hypothesis_mode: bool,
    /// Worker count; `None` uses every available core.
    pub threads: Option<usize>,
    /// Skip records already present in `output_path`.
    pub resume: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub total: usize,
    pub resumed: usize,
    pub written: usize,
    /// Records without a rank >= 2 certificate and trivial torsion.
    pub unverified: Vec<(u64, u64, u64, u64)>,
    pub probe_successes: Vec<(u64, u64, u64, u64)>,
}

/// Parameter sets in lexicographic `(m, p, q, r)` order with `p < q < r`.
pub fn sweep_parameters(spec: &SweepSpec) -> Result<Vec<FamilyParams>> {
    let mut pool = spec.prime_pool.clone();
    pool.sort_unstable();
    pool.dedup();
    if pool.is_empty() {
        return Err(Error::InvalidSweep("empty prime pool".into()));
    }
    for &p in &pool {
        if p == 2 {
            return Err(Error::PrimeIsTwo);
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
    }
    if pool.len() < 3 {
        return Err(Error::InvalidSweep(
            "prime pool needs at least three primes".into(),
        ));
    }
    let ms = spec.m_values.values();
    if ms.is_empty() {
        return Err(Error::InvalidSweep("no m values".into()));
    }
    if spec.hypothesis_mode {
        if let Some(bad) = ms.iter().find(|&&m| m % 32 != 2) {
            return Err(Error::InvalidSweep(format!("m = {bad} is not 2 mod 32")));
        }
    }
    let mut out = Vec::new();
    for &m in &ms {
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                for k in j + 1..pool.len() {
                    out.push(FamilyParams::new(m, pool[i], pool[j], pool[k])?);
                }
            }
        }
    }
    Ok(out)
}

pub fn csv_row(rec: &CurveRecord) -> String {
    let p = &rec.params;
    format!(
        "{},{},{},{},{},{},{},{}",
        p.m,
        p.p,
        p.q,
        p.r,
        rec.discriminant,
        rec.torsion
            .torsion_order
            .map(|t| t.to_string())
            .unwrap_or_default(),
        rec.rank_lower_bound,
        rec.probe_success
    )
}

/// Count complete records already in `path`, truncating a trailing partial line.
fn existing_records(path: &Path, format: OutputFormat) -> Result<usize> {
    let Ok(file) = File::open(path) else {
        return Ok(0);
    };
    let mut reader = BufReader::new(file);
    let mut complete_bytes = 0u64;
    let mut lines = 0usize;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 || buf.last() != Some(&b'\n') {
            break;
        }
        complete_bytes += n as u64;
        lines += 1;
    }
    OpenOptions::new()
        .write(true)
        .open(path)?
        .set_len(complete_bytes)?;
    Ok(match format {
        OutputFormat::Jsonl => lines,
        OutputFormat::Csv => lines.saturating_sub(1),
    })
}

/// Run a sweep, writing one record per parameter set in order. Records are
/// computed by a worker pool and handed to a single writer by sequence number.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepSummary> {
    let params = sweep_parameters(spec)?;
    let resumed = if spec.resume {
        existing_records(&spec.output_path, spec.output_format)?.min(params.len())
    } else {
        0
    };
    let mut out = if resumed > 0 || (spec.resume && spec.output_path.exists()) {
        OpenOptions::new().append(true).open(&spec.output_path)?
    } else {
        File::create(&spec.output_path)?
    };
    if spec.output_format == OutputFormat::Csv && out.metadata()?.len() == 0 {
        writeln!(out, "{CSV_HEADER}")?;
    }

    let todo = &params[resumed..];
    let threads = spec
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, todo.len().max(1));
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut summary = SweepSummary {
        total: params.len(),
        resumed,
        ..SweepSummary::default()
    };

    std::thread::scope(|scope| -> Result<()> {
        let (tx, rx) = mpsc::channel::<(usize, Result<CurveRecord>)>();
        for _ in 0..threads {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(p) = todo.get(i) else { break };
                if tx.send((i, build_record(p, &spec.options))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending: BTreeMap<usize, CurveRecord> = BTreeMap::new();
        let mut expected = 0usize;
        let mut failure: Option<Error> = None;
        for (i, rec) in rx {
            match rec {
                Ok(rec) => {
                    pending.insert(i, rec);
                }
                Err(e) => {
                    stop.store(true, Ordering::Relaxed);
                    failure.get_or_insert(e);
                    continue;
                }
            }
            while let Some(rec) = pending.remove(&expected) {
                let line = match spec.output_format {
                    OutputFormat::Jsonl => rec.to_json_line(),
                    OutputFormat::Csv => csv_row(&rec),
                };
                if let Err(e) = writeln!(out, "{line}").and_then(|_| out.flush()) {
                    stop.store(true, Ordering::Relaxed);
                    failure.get_or_insert(e.into());
                    break;
                }
                let key = (rec.params.m, rec.params.p, rec.params.q, rec.params.r);
                if !rec.verified() {
                    summary.unverified.push(key);
                }
                if rec.probe_success {
                    summary.probe_successes.push(key);
                }
                summary.written += 1;
                expected += 1;
            }
            if failure.is_some() {
                break;
            }
        }
        failure.map_or(Ok(()), Err)
    })?;
    Ok(summary)
}
