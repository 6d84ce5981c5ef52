//! Records, re-verification and parameter sweeps behind the `emcurve` CLI.

pub mod record;
pub mod sweep;

pub use record::{build_record, recheck_line, CurveRecord, RecheckOutcome, VerifyOptions};
pub use sweep::{run_sweep, MValues, OutputFormat, SweepSpec, SweepSummary};
