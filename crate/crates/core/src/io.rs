//! CSV and JSON artifacts.
//!
//! Floating-point values are written with 17 significant digits, enough for
//! every `f64` to parse back to the same bits. Positions and times are
//! integers. Density CSVs carry their moments as leading `# key=value`
//! lines ahead of the column header.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::coin::Basis;
use crate::error::{Error, Result};
use crate::evolve::Distribution;
use crate::limit::{ConvergenceReport, LimitDensity};
use crate::pathsum::PqrsCoefficients;

/// `v` with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("cannot parse {what} from {field:?}")))
}

fn parse_int<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("cannot parse {what} from {field:?}")))
}

fn expect_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::config(format!(
            "expected columns {expected:?}, found {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    Ok(())
}

pub fn write_distribution_csv(out: impl Write, dist: &Distribution) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["position", "probability"])?;
    for (x, p) in dist.iter() {
        w.write_record([x.to_string(), format_float(p)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a full parity-class table; the time is one less than the row count.
pub fn read_distribution_csv(input: impl Read) -> Result<Distribution> {
    let mut r = csv::Reader::from_reader(input);
    expect_header(&mut r, &["position", "probability"])?;
    let mut pairs = Vec::new();
    for record in r.records() {
        let record = record?;
        pairs.push((
            parse_int::<i64>(&record[0], "position")?,
            parse_float(&record[1], "probability")?,
        ));
    }
    let time = pairs
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::config("distribution table has no rows"))?;
    let expected = (0..=time as i64).map(|j| 2 * j - time as i64);
    if pairs.iter().map(|(x, _)| *x).ne(expected) {
        return Err(Error::config(format!(
            "positions do not form the time-{time} lattice"
        )));
    }
    Distribution::from_pairs(time, pairs)
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    time: usize,
    rows: Vec<DistributionRow>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRow {
    position: i64,
    probability: f64,
}

pub fn write_distribution_json(mut out: impl Write, dist: &Distribution) -> Result<()> {
    let doc = DistributionJson {
        time: dist.time(),
        rows: dist
            .iter()
            .map(|(position, probability)| DistributionRow {
                position,
                probability,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_distribution_json(input: impl Read) -> Result<Distribution> {
    let doc: DistributionJson = serde_json::from_reader(input)?;
    Distribution::from_pairs(
        doc.time,
        doc.rows.into_iter().map(|r| (r.position, r.probability)),
    )
}

/// A sampled limit density with its moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub sine_coefficient: f64,
    pub mean: f64,
    pub variance: f64,
    pub points: Vec<DensityPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub x: f64,
    pub density: f64,
}

impl DensityTable {
    pub fn sample(density: &LimitDensity, points: usize) -> Result<Self> {
        let (mean, variance) = density.moments();
        Ok(DensityTable {
            sine_coefficient: density.mean_sin(),
            mean,
            variance,
            points: density
                .grid(points)?
                .into_iter()
                .map(|(x, density)| DensityPoint { x, density })
                .collect(),
        })
    }
}

const DENSITY_KEYS: [&str; 3] = ["sine_coefficient", "mean", "variance"];

pub fn write_density_csv(mut out: impl Write, table: &DensityTable) -> Result<()> {
    for (key, v) in DENSITY_KEYS
        .iter()
        .zip([table.sine_coefficient, table.mean, table.variance])
    {
        writeln!(out, "# {key}={}", format_float(v))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "density"])?;
    for p in &table.points {
        w.write_record([format_float(p.x), format_float(p.density)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_density_csv(input: impl Read) -> Result<DensityTable> {
    let mut lines = BufReader::new(input);
    let mut header = [f64::NAN; 3];
    for (slot, key) in header.iter_mut().zip(DENSITY_KEYS) {
        let mut line = String::new();
        lines.read_line(&mut line)?;
        let value = line
            .trim()
            .strip_prefix("# ")
            .and_then(|l| l.strip_prefix(key))
            .and_then(|l| l.strip_prefix('='))
            .ok_or_else(|| Error::config(format!("expected `# {key}=` line, found {line:?}")))?;
        *slot = parse_float(value, key)?;
    }
    let mut r = csv::Reader::from_reader(lines);
    expect_header(&mut r, &["x", "density"])?;
    let mut points = Vec::new();
    for record in r.records() {
        let record = record?;
        points.push(DensityPoint {
            x: parse_float(&record[0], "x")?,
            density: parse_float(&record[1], "density")?,
        });
    }
    Ok(DensityTable {
        sine_coefficient: header[0],
        mean: header[1],
        variance: header[2],
        points,
    })
}

pub fn write_density_json(mut out: impl Write, table: &DensityTable) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, table)?;
    writeln!(out)?;
    Ok(())
}

/// One row of a convergence sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub ks: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn convergence_rows(report: &ConvergenceReport) -> Vec<ConvergenceRow> {
    (0..report.n_values.len())
        .map(|i| ConvergenceRow {
            n: report.n_values[i],
            ks: report.ks_distances[i],
            mean: report.empirical_means[i],
            variance: report.empirical_variances[i],
        })
        .collect()
}

pub fn write_convergence_csv(out: impl Write, rows: &[ConvergenceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "ks", "mean", "variance"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            format_float(r.ks),
            format_float(r.mean),
            format_float(r.variance),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_convergence_csv(input: impl Read) -> Result<Vec<ConvergenceRow>> {
    let mut r = csv::Reader::from_reader(input);
    expect_header(&mut r, &["n", "ks", "mean", "variance"])?;
    r.records()
        .map(|record| {
            let record = record?;
            Ok(ConvergenceRow {
                n: parse_int(&record[0], "n")?,
                ks: parse_float(&record[1], "ks")?,
                mean: parse_float(&record[2], "mean")?,
                variance: parse_float(&record[3], "variance")?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct ConvergenceJson<'a> {
    limit_mean: f64,
    limit_variance: f64,
    rows: &'a [ConvergenceRow],
}

pub fn write_convergence_json(mut out: impl Write, report: &ConvergenceReport) -> Result<()> {
    let rows = convergence_rows(report);
    let doc = ConvergenceJson {
        limit_mean: report.limit_mean,
        limit_variance: report.limit_variance,
        rows: &rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CoefficientRow {
    basis: String,
    re: f64,
    im: f64,
}

fn coefficient_rows(c: &PqrsCoefficients) -> Vec<CoefficientRow> {
    Basis::ALL
        .iter()
        .map(|&b| CoefficientRow {
            basis: b.to_string(),
            re: c.get(b).re,
            im: c.get(b).im,
        })
        .collect()
}

pub fn write_coefficients_csv(out: impl Write, c: &PqrsCoefficients) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["basis", "re", "im"])?;
    for row in coefficient_rows(c) {
        w.write_record([row.basis, format_float(row.re), format_float(row.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coefficients_json(mut out: impl Write, c: &PqrsCoefficients) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &coefficient_rows(c))?;
    writeln!(out)?;
    Ok(())
}
