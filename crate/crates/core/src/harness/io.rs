//! JSON and CSV input/output.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::roc::RocCurve;
use super::study::AccuracyRow;
use crate::error::{Error, Result};
use crate::faithfulness::ScanSummary;

/// `x` with 12 significant digits; scientific notation outside
/// `[1e-4, 1e12)`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// One row per time step, columns `y_1..y_n`, header included.
pub fn write_data_csv<W: Write>(out: W, data: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record((1..=data.nrows()).map(|k| format!("y_{k}")))?;
    for t in 0..data.ncols() {
        w.write_record(data.column(t).iter().map(|&v| sig12(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the layout written by [`write_data_csv`] into an `n x T` array.
pub fn read_data_csv<R: Read>(input: R) -> Result<DMatrix<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let n = r.headers()?.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec?;
        for field in rec.iter() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("row {}: '{field}' is not a number", rows + 1)))?;
            values.push(v);
        }
        rows += 1;
    }
    // column-major n x T is the row-major T x n buffer
    Ok(DMatrix::from_vec(n, rows, values))
}

pub fn write_roc_csv<W: Write>(out: W, curves: &[RocCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["horizon", "threshold", "tpr", "fpr"])?;
    for c in curves {
        for p in &c.points {
            w.write_record([c.horizon.to_string(), sig12(p.threshold), sig12(p.tpr), sig12(p.fpr)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_accuracy_csv<W: Write>(out: W, rows: &[AccuracyRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["horizon", "accuracy", "trials"])?;
    for r in rows {
        w.write_record([r.horizon.to_string(), sig12(r.accuracy), r.trials.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(out: W, summary: &ScanSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "seed", "faithful", "violations"])?;
    for t in &summary.per_trial {
        let verdict = match t.faithful {
            Some(true) => "true",
            Some(false) => "false",
            None => "unstable",
        };
        w.write_record([t.trial.to_string(), t.seed.to_string(), verdict.to_string(), t.violations.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
