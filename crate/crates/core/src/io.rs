//! File formats for clouds and matrices.
//!
//! Clouds: CSV with a header row, `label,x1,...,xd` (the label column is
//! optional on input and detected from the header), or JSON
//! `{"dim": d, "points": [{"label": "...", "coords": [...]}]}`.
//!
//! Matrices: JSON `{"n": n, "entries": [[...]]}` or headerless CSV rows.
//!
//! Floats are written in shortest round-trip form, so a write/read cycle is
//! lossless.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, PointCloud};

fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("json"))
        == Some(true)
}

fn parse_coord(field: &str, row: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("row {row}: cannot parse coordinate {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::input(format!("row {row}: non-finite coordinate {field:?}")));
    }
    Ok(v)
}

pub fn read_cloud_csv<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let has_label = headers.get(0).map(|h| h.eq_ignore_ascii_case("label")) == Some(true);
    let dim = headers.len() - usize::from(has_label);
    if dim == 0 {
        return Err(Error::input("CSV header declares no coordinate columns"));
    }
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let mut fields = record.iter();
        let label = if has_label {
            fields.next().filter(|s| !s.is_empty()).map(str::to_owned)
        } else {
            None
        };
        let coords = fields.map(|f| parse_coord(f, row)).collect::<Result<Vec<_>>>()?;
        points.push(coords);
        labels.push(label);
    }
    PointCloud::with_labels(dim, points, labels)
}

pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    let mut header = vec!["label".to_string()];
    header.extend((1..=cloud.dim()).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (p, l) in cloud.points().iter().zip(cloud.labels()) {
        let mut rec = vec![l.clone().unwrap_or_default()];
        rec.extend(p.iter().map(|c| c.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cloud, choosing JSON for `.json` paths and CSV otherwise.
pub fn read_cloud(path: &Path) -> Result<PointCloud> {
    let file = BufReader::new(File::open(path)?);
    if is_json(path) {
        Ok(serde_json::from_reader(file)?)
    } else {
        read_cloud_csv(file)
    }
}

pub fn write_cloud(cloud: &PointCloud, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    if is_json(path) {
        serde_json::to_writer_pretty(&mut file, cloud)?;
        writeln!(file)?;
    } else {
        write_cloud_csv(cloud, &mut file)?;
    }
    file.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(reader: R) -> Result<DistanceMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::input(format!("row {row}: cannot parse entry {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(values);
    }
    DistanceMatrix::from_rows(rows)
}

pub fn write_matrix_csv<W: Write>(m: &DistanceMatrix, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..m.n() {
        w.write_record(m.row_slice(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DistanceMatrix> {
    let file = BufReader::new(File::open(path)?);
    if is_json(path) {
        Ok(serde_json::from_reader(file)?)
    } else {
        read_matrix_csv(file)
    }
}

pub fn write_matrix(m: &DistanceMatrix, path: &Path) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    if is_json(path) {
        serde_json::to_writer(&mut file, m)?;
        writeln!(file)?;
    } else {
        write_matrix_csv(m, &mut file)?;
    }
    file.flush()?;
    Ok(())
}
