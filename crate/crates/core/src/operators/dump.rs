//! Flat binary matrix dumps: `<name>.bin` holds row-major complex128
//! little-endian values (re, im interleaved), `<name>.txt` the descriptor.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{OperatorKind, OperatorMatrix};
use crate::error::{BemError, Result};

pub fn write_matrix(dir: &Path, name: &str, m: &OperatorMatrix) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let bin = dir.join(format!("{name}.bin"));
    let txt = dir.join(format!("{name}.txt"));
    let (rows, cols) = m.entries.shape();
    let mut bytes = Vec::with_capacity(rows * cols * 16);
    for i in 0..rows {
        for j in 0..cols {
            let v = m.entries[(i, j)];
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    std::fs::File::create(&bin)?.write_all(&bytes)?;
    let lam = m.wavenumber.value();
    let mut d = String::new();
    writeln!(d, "rows {rows}").unwrap();
    writeln!(d, "cols {cols}").unwrap();
    writeln!(d, "kind {}", m.kind.name()).unwrap();
    writeln!(d, "lambda {:?} {:?}", lam.re, lam.im).unwrap();
    writeln!(d, "row_space {:?}", m.rows).unwrap();
    writeln!(d, "col_space {:?}", m.cols).unwrap();
    writeln!(d, "format complex128-le row-major").unwrap();
    std::fs::write(&txt, d)?;
    Ok((bin, txt))
}

/// Descriptor fields of a dump.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpDescriptor {
    pub rows: usize,
    pub cols: usize,
    pub kind: OperatorKind,
    pub lambda: Complex64,
}

pub fn read_descriptor(path: &Path) -> Result<DumpDescriptor> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = None;
    let mut cols = None;
    let mut kind = None;
    let mut lambda = None;
    for (ln, line) in text.lines().enumerate() {
        let err = |m: &str| BemError::Parse {
            line: ln + 1,
            message: m.into(),
        };
        let mut it = line.split_whitespace();
        match it.next() {
            Some("rows") => rows = Some(it.next().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad rows"))?),
            Some("cols") => cols = Some(it.next().and_then(|v| v.parse().ok()).ok_or_else(|| err("bad cols"))?),
            Some("kind") => {
                kind = Some(
                    it.next()
                        .and_then(OperatorKind::from_name)
                        .ok_or_else(|| err("bad kind"))?,
                )
            }
            Some("lambda") => {
                let re: f64 = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("bad lambda"))?;
                let im: f64 = it
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| err("bad lambda"))?;
                lambda = Some(Complex64::new(re, im));
            }
            _ => {}
        }
    }
    let missing = |f: &str| BemError::Parse {
        line: 0,
        message: format!("descriptor lacks {f}"),
    };
    Ok(DumpDescriptor {
        rows: rows.ok_or_else(|| missing("rows"))?,
        cols: cols.ok_or_else(|| missing("cols"))?,
        kind: kind.ok_or_else(|| missing("kind"))?,
        lambda: lambda.ok_or_else(|| missing("lambda"))?,
    })
}

pub fn read_matrix(bin: &Path, rows: usize, cols: usize) -> Result<DMatrix<Complex64>> {
    let bytes = std::fs::read(bin)?;
    if bytes.len() != rows * cols * 16 {
        return Err(BemError::Dimension(format!(
            "{} holds {} bytes, expected {}",
            bin.display(),
            bytes.len(),
            rows * cols * 16
        )));
    }
    let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        let o = (i * cols + j) * 16;
        Complex64::new(f(o), f(o + 8))
    }))
}
