use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use emcurve::family::{build_family_curve, validate_hypotheses, FamilyParams};
use emcurve::finite_field::{count_points, count_points_unchecked, reduce_curve};
use emcurve::harness::record::{DEFAULT_HEIGHT_BOUND, DEFAULT_REDUCTION_PRIMES};
use emcurve::harness::{
    build_record, recheck_line, run_sweep, CurveRecord, MValues, OutputFormat, SweepSpec,
    VerifyOptions,
};
use emcurve::torsion::torsion_report;
use emcurve::{Curve, Error};

const EXIT_OK: u8 = 0;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Largest modulus `count` accepts unless overridden.
const DEFAULT_MAX_MODULUS: u64 = 1000;

#[derive(Parser)]
#[command(name = "emcurve")]
#[command(about = "Torsion and rank certificates for y^2 = x^3 - m^2 x + (pqr)^2")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    r: u64,
}

#[derive(Args, Clone)]
struct PipelineArgs {
    /// Search bound for the rank-3 probe (|numerator of x|)
    #[arg(long, default_value_t = DEFAULT_HEIGHT_BOUND)]
    height_bound: u64,
    /// Number of good odd primes used for the reduction bound
    #[arg(long, default_value_t = DEFAULT_REDUCTION_PRIMES)]
    reduction_primes: usize,
}

impl PipelineArgs {
    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            height_bound: self.height_bound,
            reduction_primes: self.reduction_primes,
            ..VerifyOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one family curve
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also write the record (one JSON line) to this file
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the machine record instead of the summary
        #[arg(long)]
        json: bool,
    },
    /// Sweep m values against every 3-subset of a prime pool
    Sweep {
        /// Comma list `2,34,66` or progression `start:step:count`
        #[arg(long)]
        m_list: String,
        /// Comma list of odd primes
        #[arg(long, value_delimiter = ',')]
        prime_pool: Vec<u64>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "jsonl")]
        format: String,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// Reject m values that are not 2 mod 32
        #[arg(long)]
        hypothesis_mode: bool,
        /// Continue an interrupted sweep in the same output file
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        json: bool,
    },
    /// Count points of y^2 = x^3 + bx + c over F_mod
    Count {
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true)]
        c: i64,
        #[arg(long = "mod")]
        modulus: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_MODULUS)]
        max_modulus: u64,
        #[arg(long)]
        json: bool,
    },
    /// Torsion report for a family curve (--m --p --q --r) or any curve (--b --c)
    Torsion {
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_REDUCTION_PRIMES)]
        reduction_primes: usize,
        #[arg(long)]
        json: bool,
    },
    /// Re-derive every record in a jsonl file and compare
    Recheck { record_path: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io(_) => EXIT_FAILED,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Verify {
            family,
            pipeline,
            out,
            json,
        } => {
            let params = FamilyParams::new(family.m, family.p, family.q, family.r)?;
            let rec = build_record(&params, &pipeline.options())?;
            let line = rec.to_json_line();
            if let Some(path) = out {
                fs::write(path, format!("{line}\n"))?;
            }
            if json {
                println!("{line}");
            } else {
                print_summary(&rec);
            }
            Ok(if rec.verified() { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Sweep {
            m_list,
            prime_pool,
            pipeline,
            out,
            format,
            threads,
            hypothesis_mode,
            resume,
            json,
        } => {
            let spec = SweepSpec {
                m_values: m_list.parse::<MValues>()?,
                prime_pool,
                options: pipeline.options(),
                output_path: out,
                output_format: format.parse::<OutputFormat>()?,
                hypothesis_mode,
                threads,
                resume,
            };
            let s = run_sweep(&spec)?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "total": s.total,
                        "resumed": s.resumed,
                        "written": s.written,
                        "unverified": s.unverified,
                        "probe_successes": s.probe_successes,
                    })
                );
            } else {
                println!(
                    "{} records ({} resumed, {} written) -> {}",
                    s.total,
                    s.resumed,
                    s.written,
                    spec.output_path.display()
                );
                println!("without rank >= 2 certificate: {}", s.unverified.len());
                for (m, p, q, r) in &s.unverified {
                    println!("  m={m} p={p} q={q} r={r}");
                }
                println!("rank-3 probe successes: {}", s.probe_successes.len());
                for (m, p, q, r) in &s.probe_successes {
                    println!("  m={m} p={p} q={q} r={r}");
                }
            }
            Ok(if s.unverified.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Count {
            b,
            c,
            modulus,
            max_modulus,
            json,
        } => {
            if modulus > max_modulus {
                return Err(Error::ModulusTooLarge(modulus, max_modulus));
            }
            let curve = Curve::new(b, c)?;
            let rc = reduce_curve(&curve, modulus)?;
            let (count, good) = match count_points(&rc) {
                Ok(n) => (n, true),
                Err(Error::BadReduction(_)) => (count_points_unchecked(&rc), false),
                Err(e) => return Err(e),
            };
            if json {
                println!(
                    "{}",
                    serde_json::json!({"b": b.to_string(), "c": c.to_string(), "modulus": modulus, "count": count, "good_reduction": good})
                );
            } else if good {
                println!("{count}");
            } else {
                println!("{count} (bad reduction: {modulus} divides the discriminant)");
            }
            Ok(EXIT_OK)
        }
        Command::Torsion {
            m,
            p,
            q,
            r,
            b,
            c,
            reduction_primes,
            json,
        } => {
            let (curve, params) = match (m, p, q, r, b, c) {
                (Some(m), Some(p), Some(q), Some(r), None, None) => {
                    let params = FamilyParams::new(m, p, q, r)?;
                    (build_family_curve(&params)?, Some(params))
                }
                (None, None, None, None, Some(b), Some(c)) => (Curve::new(b, c)?, None),
                _ => {
                    eprintln!("error: give either --m --p --q --r or --b --c");
                    return Ok(EXIT_USAGE);
                }
            };
            let rep = torsion_report(&curve, params.as_ref(), reduction_primes.max(1))?;
            if json {
                println!("{}", serde_json::to_string(&rep).expect("serializable"));
            } else {
                println!("curve: {curve}");
                println!("discriminant: {}", curve.discriminant());
                let counts: Vec<String> = rep
                    .primes_used
                    .iter()
                    .map(|e| format!("#E(F_{})={}", e.ell, e.count))
                    .collect();
                println!(
                    "reduction bound: {} [{}]",
                    rep.bound_from_reduction,
                    counts.join(", ")
                );
                match (&rep.torsion_order, &rep.structure) {
                    (Some(n), Some(s)) => println!("torsion: {s} (order {n})"),
                    _ => println!("torsion: unknown (discriminant not factored)"),
                }
                for g in &rep.generators {
                    println!("  generator {g}");
                }
                for (n, v) in &rep.division_polynomials {
                    println!(
                        "order {n}: division polynomial (deg {}) {}",
                        v.degree,
                        if v.no_point_of_order {
                            "has no integer root"
                        } else {
                            "has integer roots"
                        }
                    );
                }
                for (n, l) in &rep.lemma_obstructions {
                    println!("order {n}: congruence replay {:?}", l.verdict);
                }
            }
            // family curves must have trivial torsion; other curves only need a complete answer
            let ok = if params.is_some() {
                rep.is_trivial()
            } else {
                rep.torsion_order.is_some()
            };
            Ok(if ok { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Recheck { record_path } => {
            let text = fs::read_to_string(&record_path)?;
            let mut all = true;
            let mut n = 0;
            for (i, line) in text
                .lines()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty())
            {
                let out = recheck_line(line)?;
                n += 1;
                if !out.identical {
                    all = false;
                    println!(
                        "record {}: MISMATCH in {}",
                        i + 1,
                        out.mismatched_fields.join(", ")
                    );
                }
            }
            println!(
                "{}",
                if all {
                    format!("true ({n} records identical)")
                } else {
                    "false".into()
                }
            );
            Ok(if all { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

fn print_summary(rec: &CurveRecord) {
    let p = &rec.params;
    println!(
        "E_{}: y^2 = x^3 - {}^2 x + ({}·{}·{})^2",
        p.m, p.m, p.p, p.q, p.r
    );
    println!("  b = {}, c = {}", rec.curve.b, rec.curve.c);
    println!("  discriminant = {}", rec.discriminant);
    let h = validate_hypotheses(p);
    if h.all() {
        println!("  hypotheses: all satisfied");
    } else {
        println!("  hypotheses failing: {}", h.failures().join("; "));
    }
    let t = &rec.torsion;
    println!(
        "  torsion: {} (reduction bound {}, division polynomials {})",
        t.structure.as_deref().unwrap_or("unknown"),
        t.bound_from_reduction,
        if t.division_route_trivial() {
            "rule out orders 2,3,5,7"
        } else {
            "admit roots"
        }
    );
    let c = &rec.certificate;
    println!(
        "  classes in E/2E: [A] {:?}, [B] {:?}, [A+B] {:?}",
        c.class_a.verdict, c.class_b.verdict, c.class_ab.verdict
    );
    if let Some(probe) = &c.extra_points {
        println!(
            "  rank-3 probe: {} points up to height {}, candidates tested: {}, {}",
            probe.points_found.len(),
            probe.height_bound,
            probe.candidates.len(),
            if probe.success {
                "third independent class FOUND"
            } else {
                "no third class"
            }
        );
    }
    println!("  rank >= {}", rec.rank_lower_bound);
}
