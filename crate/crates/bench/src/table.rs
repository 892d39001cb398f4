//! CSV and Markdown renderings of benchmark records.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{BenchError, Result};
use crate::run::{BenchRecord, Prediction};

pub const CSV_HEADER: &str = "case,split,cores,precision,variant,mcs,total_s,vol_s,vol_pct,checksum";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.3},{:.6},{:.6},{:.2},{}",
            r.case, r.split, r.cores, r.precision, r.variant, r.mcs, r.total_s, r.vol_s, r.vol_pct, r.checksum
        );
    }
    out
}

pub fn to_markdown(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    out.push_str("| Case | Split | Cores | Precision | Variant | MC/s | Time (s) | Vol. Time (s) | V/T % | Checksum |\n");
    out.push_str("|---|---|---:|---|---|---:|---:|---:|---:|---|\n");
    for r in records {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {:.1} | {:.3} | {:.3} | {:.0} | {} |",
            r.case,
            r.split,
            r.cores,
            r.precision,
            r.variant,
            r.mcs,
            r.total_s,
            r.vol_s,
            r.vol_pct,
            &r.checksum[..r.checksum.len().min(12)]
        );
    }
    out
}

pub fn predictions_markdown(rows: &[Prediction]) -> String {
    let mut out = String::new();
    out.push_str("| Precision | Variant | Accesses | Bandwidth MC/s | Compute MC/s | No-FMA MC/s | Cache side | Predicted MC/s | Step (ms) |\n");
    out.push_str("|---|---|---:|---:|---:|---:|---:|---:|---:|\n");
    for p in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.0} | {:.0} | {:.0} | {} | {:.0} | {:.0} |",
            p.precision,
            p.variant,
            p.accesses_per_field,
            p.bandwidth_mcs,
            p.compute_mcs,
            p.compute_no_fma_mcs,
            p.cache_side,
            p.predicted_mcs,
            p.step_ms
        );
    }
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}

/// Writes the CSV to `path` and the Markdown table next to it (`.md`).
/// Returns the Markdown path.
pub fn emit_tables(records: &[BenchRecord], path: &Path) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(BenchError::Config("no records to write".into()));
    }
    write(path, &to_csv(records))?;
    let md = path.with_extension("md");
    write(&md, &to_markdown(records))?;
    Ok(md)
}

/// Plain-text output for the other modes.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write(path, text)
}
