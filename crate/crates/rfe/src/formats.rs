//! CSV and JSON writers.
//!
//! Floats are written with Rust's shortest round-trip formatting and lines
//! end in `\n`, so equal inputs give byte-identical files.

use std::io::Write;

use serde::Serialize;

use rfe_core::Complex64;

use crate::error::Result;
use crate::harness::SweepRow;

pub const SWEEP_HEADER: [&str; 7] = ["parameter", "M_predicted", "trials", "successes", "rate", "ci_lo", "ci_hi"];

/// Value written in the `M_predicted` column for points past their threshold.
pub const UNACHIEVABLE: &str = "unachievable";

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let m = row.m_predicted.map_or_else(|| UNACHIEVABLE.to_string(), |m| m.to_string());
        w.write_record([
            row.parameter.to_string(),
            m,
            row.trials.to_string(),
            row.successes.to_string(),
            opt(row.rate),
            opt(row.ci_lo),
            opt(row.ci_hi),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `j,re,im,abs`, plus `expected_re,expected_im,expected_abs` when
/// `expected` is given.
pub fn write_spectrum_csv<W: Write>(out: W, estimated: &[Complex64], expected: Option<&[Complex64]>) -> Result<()> {
    let mut w = writer(out);
    let mut header = vec!["j", "re", "im", "abs"];
    if expected.is_some() {
        header.extend(["expected_re", "expected_im", "expected_abs"]);
    }
    w.write_record(&header)?;
    for (j, z) in estimated.iter().enumerate() {
        let mut record = vec![j.to_string(), z.re.to_string(), z.im.to_string(), z.norm().to_string()];
        if let Some(e) = expected.and_then(|e| e.get(j)) {
            record.extend([e.re.to_string(), e.im.to_string(), e.norm().to_string()]);
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
