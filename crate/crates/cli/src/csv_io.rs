//! Reading and writing triangles and exposures as CSV.
//!
//! A triangle file has the header `j1,...,jn` and one row per accident year;
//! row `i` holds `n - i + 1` values followed by empty cells.

use std::io::{Read, Write};
use std::path::Path;

use ctreserve_core::triangle::{ExposureVector, Triangle};

use crate::error::{CliError, CliResult};

fn parse_number(raw: &str, what: impl Fn() -> String) -> CliResult<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| CliError::data(format!("{}: {raw:?} is not a number", what())))?;
    if !v.is_finite() {
        return Err(CliError::data(format!("{}: {raw:?} is not finite", what())));
    }
    Ok(v)
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

pub fn read_triangle<R: Read>(input: R) -> CliResult<Triangle<f64>> {
    let mut rdr = reader(input);
    let header = rdr
        .headers()
        .map_err(|e| CliError::data(e.to_string()))?
        .clone();
    let n = header.len();
    for (k, h) in header.iter().enumerate() {
        if h != format!("j{}", k + 1) {
            return Err(CliError::data(format!(
                "header column {} is {h:?}, expected \"j{}\"",
                k + 1,
                k + 1
            )));
        }
    }
    let mut rows = Vec::with_capacity(n);
    for (r, rec) in rdr.records().enumerate() {
        let i = r + 1;
        let rec = rec.map_err(|e| CliError::data(e.to_string()))?;
        if i > n {
            return Err(CliError::data(format!("more than {n} accident years")));
        }
        if rec.len() > n {
            return Err(CliError::data(format!(
                "row {i} has {} cells, the header has {n}",
                rec.len()
            )));
        }
        let mut row = Vec::with_capacity(n + 1 - i);
        for j in 1..=n {
            let cell = rec.get(j - 1).unwrap_or("");
            let observed = i + j <= n + 1;
            match (observed, cell.is_empty()) {
                (true, true) => return Err(CliError::data(format!("cell ({i}, {j}) is missing"))),
                (true, false) => row.push(parse_number(cell, || format!("cell ({i}, {j})"))?),
                (false, false) => {
                    return Err(CliError::data(format!(
                        "cell ({i}, {j}) lies outside the observed triangle"
                    )))
                }
                (false, true) => {}
            }
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(CliError::data(format!(
            "{} accident years for {n} development years",
            rows.len()
        )));
    }
    Ok(Triangle::from_rows(rows)?)
}

pub fn read_exposure<R: Read>(input: R) -> CliResult<ExposureVector<f64>> {
    let mut rdr = reader(input);
    let mut values = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::data(e.to_string()))?;
        let cell = rec.get(0).unwrap_or("");
        values.push(parse_number(cell, || format!("exposure row {}", r + 1))?);
    }
    Ok(ExposureVector::new(values)?)
}

pub fn write_triangle<W: Write>(tri: &Triangle<f64>, out: W) -> CliResult<()> {
    let n = tri.n();
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::output(e.to_string());
    w.write_record((1..=n).map(|j| format!("j{j}")))
        .map_err(fail)?;
    for i in 1..=n {
        let cells = (1..=n).map(|j| {
            if tri.is_populated(i, j) {
                tri.at(i, j).to_string()
            } else {
                String::new()
            }
        });
        w.write_record(cells).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::output(e.to_string()))
}

pub fn write_exposure<W: Write>(e: &ExposureVector<f64>, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::output(e.to_string());
    w.write_record(["exposure"]).map_err(fail)?;
    for v in e.as_slice() {
        w.write_record([v.to_string()]).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::output(e.to_string()))
}

fn open(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::open(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn read_triangle_file(path: &Path) -> CliResult<Triangle<f64>> {
    read_triangle(open(path)?).map_err(|e| e.context(path.display()))
}

pub fn read_exposure_file(path: &Path) -> CliResult<ExposureVector<f64>> {
    read_exposure(open(path)?).map_err(|e| e.context(path.display()))
}
