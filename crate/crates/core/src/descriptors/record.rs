use std::io::{BufRead, Write};
use std::path::PathBuf;

use crate::error::{Result, ShapeError};
use crate::scalar::Scalar;

use super::{Descriptor, DescriptorKind};

/// One descriptor with the image it came from and that image's class.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorRecord<T> {
    pub path: PathBuf,
    pub label: String,
    pub descriptor: Descriptor<T>,
}

/// Writes one tab-separated line per record: path, label, kind, dims, then
/// the values with 17 significant digits.
pub fn write_records<T: Scalar, W: Write>(
    mut out: W,
    records: &[DescriptorRecord<T>],
) -> Result<()> {
    for r in records {
        let path = r.path.to_string_lossy();
        if path.contains(['\t', '\n']) || r.label.contains(['\t', '\n']) || r.label.is_empty() {
            return Err(ShapeError::InvalidParams(format!(
                "path {path:?} or label {:?} cannot be stored in a record",
                r.label
            )));
        }
        write!(
            out,
            "{path}\t{}\t{}\t{}",
            r.label,
            r.descriptor.kind(),
            r.descriptor.dims()
        )?;
        for v in r.descriptor.values() {
            write!(out, "\t{:.16e}", v.as_f64())?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Parses records written by [`write_records`]; blank lines are skipped.
pub fn read_records<T: Scalar, R: BufRead>(input: R) -> Result<Vec<DescriptorRecord<T>>> {
    let mut out = Vec::new();
    for (no, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| ShapeError::Parse(format!("line {}: {what}", no + 1));
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(bad("expected path, label, kind and dims"));
        }
        let kind: DescriptorKind = fields[2].parse()?;
        let dims: usize = fields[3].parse().map_err(|_| bad("dims is not a count"))?;
        let values = fields[4..]
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .and_then(T::from_f64)
                    .ok_or_else(|| bad("bad value"))
            })
            .collect::<Result<Vec<T>>>()?;
        if values.len() != dims {
            return Err(ShapeError::DimMismatch {
                expected: dims,
                got: values.len(),
            });
        }
        out.push(DescriptorRecord {
            path: PathBuf::from(fields[0]),
            label: fields[1].to_string(),
            descriptor: Descriptor::new(kind, values)?,
        });
    }
    Ok(out)
}
