//! File formats: trace CSV/JSON, dense transforms and magnitude/coefficient lists.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::LinearTransform;
use crate::magproj::MagnitudeSpec;
use crate::solvers::{Trace, TraceRecord};
use crate::vector::CoefVec;

pub const TRACE_HEADER: [&str; 8] = [
    "n", "d2", "delta_t", "lyapunov", "residual", "ssnr_c", "ssnr_y", "pole_hit",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    /// Picks JSON for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => TraceFormat::Json,
            _ => TraceFormat::Csv,
        }
    }
}

// 17 significant digits: every f64 survives a round trip.
fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv<W: Write>(records: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            fmt_float(r.d2),
            fmt_float(r.delta_t),
            fmt_float(r.lyapunov),
            fmt_float(r.residual),
            fmt_float(r.ssnr_c),
            fmt_float(r.ssnr_y),
            u8::from(r.pole_hit).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != TRACE_HEADER {
        return Err(Error::Parse(format!("unexpected trace header {header:?}")));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            let f = |i: usize| -> Result<f64> {
                rec[i]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {:?}", &rec[i])))
            };
            Ok(TraceRecord {
                n: rec[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index {:?}", &rec[0])))?,
                d2: f(1)?,
                delta_t: f(2)?,
                lyapunov: f(3)?,
                residual: f(4)?,
                ssnr_c: f(5)?,
                ssnr_y: f(6)?,
                pole_hit: match &rec[7] {
                    "1" | "true" => true,
                    "0" | "false" => false,
                    other => return Err(Error::Parse(format!("bad pole flag {other:?}"))),
                },
            })
        })
        .collect()
}

/// JSON object `{algorithm, k1, k2, init_in_range, records: [...]}`.
pub fn write_trace_json<W: Write>(trace: &Trace, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, trace)?;
    Ok(())
}

pub fn read_trace_json<R: Read>(input: R) -> Result<Trace> {
    Ok(serde_json::from_reader(input)?)
}

pub fn export_trace(trace: &Trace, path: impl AsRef<Path>, format: TraceFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        TraceFormat::Csv => write_trace_csv(&trace.records, &mut out)?,
        TraceFormat::Json => write_trace_json(trace, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn numbers<R: Read>(input: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    rdr.records()
        .map(|rec| {
            rec?.iter()
                .filter(|f| !f.is_empty())
                .map(|f| f.parse().map_err(|_| Error::Parse(format!("bad number {f:?}"))))
                .collect()
        })
        .filter(|row: &Result<Vec<f64>>| !matches!(row, Ok(r) if r.is_empty()))
        .collect()
}

/// Dense transform from rows of `re,im` pairs (row-major, one matrix row per line).
pub fn read_dense_csv<R: Read>(input: R) -> Result<LinearTransform> {
    let rows = numbers(input)?;
    let m = rows.len();
    if m == 0 {
        return Err(Error::EmptyFile);
    }
    let width = rows[0].len();
    if width == 0 || width % 2 != 0 {
        return Err(Error::Parse(format!("row 0 has {width} numbers, need re,im pairs")));
    }
    let mut entries = Vec::with_capacity(m * width / 2);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Parse(format!(
                "row {i} has {} numbers, expected {width}",
                row.len()
            )));
        }
        entries.extend(row.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
    }
    LinearTransform::dense(DMatrix::from_row_slice(m, width / 2, &entries))
}

pub fn write_dense_csv<W: Write>(matrix: &DMatrix<Complex64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols())
            .flat_map(|j| {
                let z = matrix[(i, j)];
                [fmt_float(z.re), fmt_float(z.im)]
            })
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Magnitudes listed in order, separated by commas and/or newlines.
pub fn read_magnitudes_csv<R: Read>(input: R) -> Result<MagnitudeSpec> {
    let values: Vec<f64> = numbers(input)?.into_iter().flatten().collect();
    if values.is_empty() {
        return Err(Error::EmptyFile);
    }
    MagnitudeSpec::new(values)
}

/// One `re,im` pair per line.
pub fn read_coefs_csv<R: Read>(input: R) -> Result<CoefVec> {
    numbers(input)?
        .into_iter()
        .enumerate()
        .map(|(i, row)| match row.as_slice() {
            [re, im] => Ok(Complex64::new(*re, *im)),
            [re] => Ok(Complex64::new(*re, 0.0)),
            _ => Err(Error::Parse(format!("line {i}: expected re,im"))),
        })
        .collect()
}

pub fn write_coefs_csv<W: Write>(c: &[Complex64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for z in c {
        w.write_record([fmt_float(z.re), fmt_float(z.im)])?;
    }
    w.flush()?;
    Ok(())
}
