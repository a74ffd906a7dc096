use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Example, PpmDataset, Privacy};

fn header(dim: usize) -> Vec<String> {
    (1..=dim)
        .map(|i| format!("x{i}"))
        .chain(["y".to_string(), "p".to_string()])
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        other => Error::Parse {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Writes `x1,...,xd,y,p` rows; `f64` display is the shortest text that
/// reads back to the same value.
pub fn write_csv<W: Write>(dataset: &PpmDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header(dataset.dim())).map_err(csv_err)?;
    let mut row: Vec<String> = Vec::with_capacity(dataset.dim() + 2);
    for e in dataset.examples() {
        row.clear();
        row.extend(e.x.iter().map(|v| v.to_string()));
        row.push(u8::from(e.y).to_string());
        row.push(e.privacy.bit().to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_path(dataset: &PpmDataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(dataset, File::create(path)?)
}

fn bit(field: &str, name: &str, line: u64) -> Result<u8> {
    match field.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::Parse {
            line,
            message: format!("{name} must be 0 or 1, got {other:?}"),
        }),
    }
}

pub fn read_csv<R: Read>(reader: R) -> Result<PpmDataset> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let head = r.headers().map_err(csv_err)?.clone();
    let names: Vec<&str> = head.iter().map(str::trim).collect();
    if names.len() < 3 {
        return Err(Error::Schema(format!("header {names:?} needs x1..xd,y,p")));
    }
    let dim = names.len() - 2;
    if names != header(dim) {
        return Err(Error::Schema(format!(
            "header {:?} does not match x1,...,x{dim},y,p",
            names.join(",")
        )));
    }
    let mut examples = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != dim + 2 {
            return Err(Error::Schema(format!(
                "line {line}: {} fields imply d = {}, header declares d = {dim}",
                rec.len(),
                rec.len().saturating_sub(2)
            )));
        }
        let x = rec
            .iter()
            .take(dim)
            .map(|f| {
                f.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("bad coordinate {f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let y = bit(&rec[dim], "y", line)? == 1;
        let p = Privacy::from_bit(bit(&rec[dim + 1], "p", line)?).expect("bit is 0 or 1");
        examples.push(Example::new(x, y, p));
    }
    PpmDataset::new(dim, examples)
}

pub fn read_csv_path(path: impl AsRef<Path>) -> Result<PpmDataset> {
    read_csv(File::open(path)?)
}
