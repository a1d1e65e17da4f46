//! Dense square complex matrices and the plain-text matrix file format.
//!
//! File format: UTF-8 text, `#`-prefixed lines are comments and blank lines
//! are ignored. The first data line is the dimension `N`, followed by `N`
//! rows of `N` whitespace-separated entries written as `re,im`. A state
//! vector uses the same header followed by either one row of `N` entries or
//! `N` rows of one entry each.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense `N x N` complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from `dim * dim` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension {
                dim,
                reason: "dimension must be positive",
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::BadShape {
                len: entries.len(),
                expected: dim * dim,
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if !inner.is_square() || inner.nrows() == 0 {
            return Err(Error::BadShape {
                len: inner.len(),
                expected: inner.nrows() * inner.nrows(),
            });
        }
        for ((row, col), z) in indexed(&inner) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        Ok(Self { inner })
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self {
            inner: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)),
        }
    }

    pub(crate) fn from_dmatrix_unchecked(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.inner[(i, j)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            inner: &self.inner * &other.inner,
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    /// max_ij |A_ij - conj(A_ji)|
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// max_ij |(A^dag A - I)_ij|
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.inner.adjoint() * &self.inner;
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.inner[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Serializes to the matrix file format with 17 significant digits.
    pub fn to_file_string(&self) -> String {
        let n = self.dim();
        let mut out = format!("{n}\n");
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format_entry(self.inner[(i, j)])).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn indexed(m: &DMatrix<Complex64>) -> impl Iterator<Item = ((usize, usize), &Complex64)> {
    let rows = m.nrows();
    m.iter()
        .enumerate()
        .map(move |(k, z)| ((k % rows, k / rows), z))
}

/// `re,im` with 17 significant digits each.
pub fn format_entry(z: Complex64) -> String {
    format!("{:.16e},{:.16e}", z.re, z.im)
}

/// Serializes a state vector as a single row.
pub fn vector_to_file_string(amps: &[Complex64]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", amps.len());
    let row: Vec<String> = amps.iter().map(|&z| format_entry(z)).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
    out
}

/// Parsed content of a matrix file.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Matrix(ComplexMatrix),
    Vector(Vec<Complex64>),
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (idx, ch) in line
        .char_indices()
        .chain(std::iter::once((line.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(idx),
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &line[s..idx],
                    line: line_no,
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    tokens
}

fn parse_complex(tok: &Token<'_>) -> Result<Complex64> {
    let err = |message: String| Error::Parse {
        line: tok.line,
        column: tok.column,
        message,
    };
    let (re, im) = tok
        .text
        .split_once(',')
        .ok_or_else(|| err(format!("expected `re,im`, found `{}`", tok.text)))?;
    let re: f64 = re
        .parse()
        .map_err(|_| err(format!("invalid real part `{re}`")))?;
    let im: f64 = im
        .parse()
        .map_err(|_| err(format!("invalid imaginary part `{im}`")))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(err(format!("non-finite entry `{}`", tok.text)));
    }
    Ok(Complex64::new(re, im))
}

/// Parses the matrix file format. Line and column numbers in errors are 1-based.
pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "missing dimension line".into(),
    })?;
    let header_tokens = tokenize(header_line, header);
    if header_tokens.len() != 1 {
        let col = header_tokens.get(1).map_or(1, |t| t.column);
        return Err(Error::Parse {
            line: header_line,
            column: col,
            message: "dimension line must hold a single integer".into(),
        });
    }
    let dim: usize = header_tokens[0].text.parse().map_err(|_| Error::Parse {
        line: header_line,
        column: header_tokens[0].column,
        message: format!("invalid dimension `{}`", header_tokens[0].text),
    })?;
    if dim == 0 {
        return Err(Error::Parse {
            line: header_line,
            column: header_tokens[0].column,
            message: "dimension must be positive".into(),
        });
    }

    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        let tokens = tokenize(line_no, line);
        let row = tokens
            .iter()
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }

    let widths: Vec<usize> = rows.iter().map(Vec::len).collect();
    if rows.len() == dim && widths.iter().all(|&w| w == dim) {
        let entries: Vec<Complex64> = rows.into_iter().flatten().collect();
        return ComplexMatrix::from_row_major(dim, &entries).map(MatrixFile::Matrix);
    }
    if rows.len() == 1 && widths[0] == dim {
        return Ok(MatrixFile::Vector(rows.remove(0)));
    }
    if rows.len() == dim && widths.iter().all(|&w| w == 1) {
        return Ok(MatrixFile::Vector(rows.into_iter().flatten().collect()));
    }
    Err(Error::Parse {
        line: last_line,
        column: 1,
        message: format!(
            "expected {dim} rows of {dim} entries (matrix) or {dim} entries (vector), found row widths {widths:?}"
        ),
    })
}
