//! Report files. Every file is written to a temporary sibling and renamed
//! into place, so a failed run never leaves a truncated report behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};
use crate::histogram::Histogram;

pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::output(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn write_with(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> CliResult<()>,
    ) -> CliResult<()> {
        let path = self.root.join(name);
        let fail = |e: std::io::Error| CliError::output(format!("{}: {e}", path.display()));
        let mut tmp = NamedTempFile::new_in(&self.root).map_err(fail)?;
        {
            let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
            body(&mut buf)?;
            buf.flush().map_err(fail)?;
        }
        tmp.persist(&path).map_err(|e| fail(e.error))?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> CliResult<()> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)
                .map_err(|e| CliError::output(e.to_string()))?;
            w.write_all(b"\n")
                .map_err(|e| CliError::output(e.to_string()))
        })
    }

    /// CSV with a header row; `rows` are already formatted cells.
    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> CliResult<()> {
        self.write_with(name, |w| {
            let mut out = csv::Writer::from_writer(w);
            let fail = |e: csv::Error| CliError::output(e.to_string());
            out.write_record(header).map_err(fail)?;
            for r in rows {
                out.write_record(r).map_err(fail)?;
            }
            out.flush().map_err(|e| CliError::output(e.to_string()))
        })
    }

    /// Histogram with its binning recorded in a leading `#` line.
    pub fn write_histogram(&mut self, name: &str, h: &Histogram) -> CliResult<()> {
        self.write_with(name, |w| {
            let fail = |e: std::io::Error| CliError::output(e.to_string());
            writeln!(
                w,
                "# rule={} bins={} width={} edges={}",
                h.rule,
                h.mass.len(),
                h.width(),
                join(&h.edges)
            )
            .map_err(fail)?;
            writeln!(w, "lower,upper,mass,density").map_err(fail)?;
            for k in 0..h.mass.len() {
                writeln!(
                    w,
                    "{},{},{},{}",
                    h.edges[k],
                    h.edges[k + 1],
                    h.mass[k],
                    h.density(k)
                )
                .map_err(fail)?;
            }
            Ok(())
        })
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// `x` rounded to `digits` significant figures.
pub fn significant(x: f64, digits: u32) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mut magnitude = x.abs().log10().floor() as i32;
    let round_at = |decimals: i32| (x * 10f64.powi(decimals)).round() / 10f64.powi(decimals);
    // Rounding can carry into a new leading digit, e.g. 9.99996 -> 10.00.
    if round_at(digits as i32 - 1 - magnitude).abs() >= 10f64.powi(magnitude + 1) {
        magnitude += 1;
    }
    let decimals = digits as i32 - 1 - magnitude;
    if decimals >= 0 {
        format!("{:.*}", decimals as usize, x)
    } else {
        format!("{}", round_at(decimals))
    }
}
