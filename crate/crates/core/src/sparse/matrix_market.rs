//! Matrix Market coordinate and array files.
//!
//! Values are written with Rust's shortest round-trip formatting, so reading a
//! file back yields bit-identical `f64`s.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::CsrMatrix;
use crate::error::{Error, Result};

pub fn coordinate_to_string(m: &CsrMatrix) -> String {
    let (nr, nc) = m.shape();
    let mut s = String::with_capacity(32 * m.nnz() + 64);
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{nr} {nc} {}", m.nnz());
    for (r, c, v) in m.iter() {
        let _ = writeln!(s, "{} {} {:e}", r + 1, c + 1, v);
    }
    s
}

pub fn array_to_string(v: &[f64]) -> String {
    let mut s = String::with_capacity(24 * v.len() + 64);
    s.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(s, "{} 1", v.len());
    for x in v {
        let _ = writeln!(s, "{x:e}");
    }
    s
}

pub fn write_coordinate(path: impl AsRef<Path>, m: &CsrMatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, coordinate_to_string(m)).map_err(|e| Error::io(path, e))
}

pub fn write_array(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, array_to_string(v)).map_err(|e| Error::io(path, e))
}

pub fn read_coordinate(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    parse_coordinate(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn read_array(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_array(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

fn mm_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MatrixMarket {
        line,
        msg: msg.into(),
    }
}

struct Header {
    format: String,
    symmetry: String,
}

fn parse_header(line: Option<&str>) -> Result<Header> {
    let line = line.ok_or_else(|| mm_err(1, "empty file"))?;
    let toks: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(mm_err(1, "missing %%MatrixMarket matrix header"));
    }
    if toks[3] != "real" && toks[3] != "integer" {
        return Err(mm_err(1, format!("unsupported field `{}`", toks[3])));
    }
    if toks[4] != "general" && toks[4] != "symmetric" {
        return Err(mm_err(1, format!("unsupported symmetry `{}`", toks[4])));
    }
    Ok(Header {
        format: toks[2].clone(),
        symmetry: toks[4].clone(),
    })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T> {
    tok.ok_or_else(|| mm_err(line, "missing field"))?
        .parse()
        .map_err(|_| mm_err(line, "malformed number"))
}

pub fn parse_coordinate(text: &str) -> Result<CsrMatrix> {
    let header = parse_header(text.lines().next())?;
    if header.format != "coordinate" {
        return Err(mm_err(1, "expected coordinate format"));
    }
    let mut lines = data_lines(text);
    let (ln, size) = lines.next().ok_or_else(|| mm_err(2, "missing size line"))?;
    let mut it = size.split_whitespace();
    let nr: usize = parse_num(it.next(), ln)?;
    let nc: usize = parse_num(it.next(), ln)?;
    let nnz: usize = parse_num(it.next(), ln)?;
    let mut trips = Vec::with_capacity(nnz);
    for (ln, l) in lines {
        let mut it = l.split_whitespace();
        let r: usize = parse_num(it.next(), ln)?;
        let c: usize = parse_num(it.next(), ln)?;
        let v: f64 = parse_num(it.next(), ln)?;
        if r == 0 || c == 0 || r > nr || c > nc {
            return Err(mm_err(ln, format!("index ({r}, {c}) outside {nr}x{nc}")));
        }
        trips.push((r - 1, c - 1, v));
        if header.symmetry == "symmetric" && r != c {
            trips.push((c - 1, r - 1, v));
        }
    }
    let expected = if header.symmetry == "symmetric" {
        trips.iter().filter(|(r, c, _)| r >= c).count()
    } else {
        trips.len()
    };
    if expected != nnz {
        return Err(mm_err(
            0,
            format!("declared {nnz} entries, found {expected}"),
        ));
    }
    CsrMatrix::from_triplets(nr, nc, trips)
}

pub fn parse_array(text: &str) -> Result<Vec<f64>> {
    let header = parse_header(text.lines().next())?;
    if header.format != "array" {
        return Err(mm_err(1, "expected array format"));
    }
    let mut lines = data_lines(text);
    let (ln, size) = lines.next().ok_or_else(|| mm_err(2, "missing size line"))?;
    let mut it = size.split_whitespace();
    let nr: usize = parse_num(it.next(), ln)?;
    let nc: usize = parse_num(it.next(), ln)?;
    if nc != 1 {
        return Err(mm_err(ln, "only single-column arrays are supported"));
    }
    let v = lines
        .map(|(ln, l)| parse_num::<f64>(Some(l), ln))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != nr {
        return Err(mm_err(
            0,
            format!("declared {nr} values, found {}", v.len()),
        ));
    }
    Ok(v)
}
