//! Plain-text serialization of morphisms.
//!
//! The format is line-oriented and self-describing:
//!
//! ```text
//! <rows> <cols>
//! <re>,<im> <re>,<im> ... (cols entries)   \
//! ...                                       } rows lines
//! <re>,<im> ...                            /
//! ```
//!
//! Floats are written with Rust's shortest-round-trip formatting, so a
//! write/read cycle reproduces every entry bit for bit. Reading produces a
//! morphism between freshly built chosen-basis objects of the recorded
//! dimensions; basis tags and labels are not serialized.

use std::io::{BufRead, Write};

use num_complex::Complex;

use crate::category::{Morphism, TruncObject};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Writes a morphism in the plain-text matrix format.
pub fn write_matrix<T: Scalar, W: Write>(f: &Morphism<T>, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", f.rows(), f.cols())?;
    let mut line = String::new();
    for m in 1..=f.rows() {
        line.clear();
        for n in 1..=f.cols() {
            if n > 1 {
                line.push(' ');
            }
            let z = f.entry(m, n);
            line.push_str(&format!("{},{}", z.re, z.im));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Serializes a morphism to a `String` in the plain-text matrix format.
pub fn matrix_to_string<T: Scalar>(f: &Morphism<T>) -> String {
    let mut buf = Vec::new();
    write_matrix(f, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("matrix text is ASCII")
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Reads a morphism in the plain-text matrix format. The result connects
/// chosen-basis objects labeled `"in"` and `"out"` with the recorded
/// dimensions.
pub fn read_matrix<T: Scalar, R: BufRead>(r: R) -> Result<Morphism<T>> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected a '<rows> <cols>' header"))?;
    let header = header?;
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .ok_or_else(|| parse_err(1, "missing row count"))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad row count: {e}")))?;
    let cols: usize = parts
        .next()
        .ok_or_else(|| parse_err(1, "missing column count"))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad column count: {e}")))?;
    if parts.next().is_some() {
        return Err(parse_err(1, "trailing tokens after '<rows> <cols>' header"));
    }
    if rows == 0 || cols == 0 {
        return Err(parse_err(1, "dimensions must be at least 1"));
    }

    let mut data: Vec<Complex<T>> = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            return Err(parse_err(lineno, "blank line inside matrix body"));
        }
        if seen_rows == rows {
            return Err(parse_err(lineno, format!("expected {rows} rows, found more")));
        }
        let mut count = 0usize;
        for tok in line.split_whitespace() {
            let (re, im) = tok
                .split_once(',')
                .ok_or_else(|| parse_err(lineno, format!("entry '{tok}' is not 're,im'")))?;
            let re: T = re
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad real part '{re}': {e}")))?;
            let im: T = im
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad imaginary part '{im}': {e}")))?;
            data.push(Complex::new(re, im));
            count += 1;
        }
        if count != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} entries in row, found {count}"),
            ));
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        return Err(parse_err(
            seen_rows + 1,
            format!("expected {rows} rows, found {seen_rows}"),
        ));
    }
    let dom = TruncObject::standard(cols, "in").expect("cols >= 1");
    let cod = TruncObject::standard(rows, "out").expect("rows >= 1");
    Morphism::new(dom, cod, data)
}
