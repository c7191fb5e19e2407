//! Binary addressings: one fixed-length bit string per vertex.
//!
//! An addressing is valid for a distance matrix at scale `lambda` when every
//! pair of rows is at Hamming distance at least `lambda` times the graph
//! distance of the corresponding vertices.

mod schemes;

use std::fmt;

use thiserror::Error;

use crate::graph::{DistanceMatrix, GraphError};

pub use schemes::{
    complete_graph_addressing, cycle_addressing, cyclic_order_addressing, hadamard_addressing,
    hadamard_code, k4_addressing, linear_order_addressing, path_addressing, tree_addressing,
    triangle_addressing,
};
pub(crate) use schemes::{ceil_log2, from_cuts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressingError {
    #[error("dimension mismatch: expected {expected} rows, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("weights are not weight-minimal: some edge is longer than the detour around it")]
    NotWeightMinimal,
    #[error("triangle ({a}, {b}, {c}) violates a <= b <= c <= a + b")]
    TriangleViolation { a: u64, b: u64, c: u64 },
    #[error("graph is not a tree")]
    NotATree,
    #[error("expected a graph on {expected} vertices, found {found}")]
    WrongSize { expected: usize, found: usize },
    #[error("scale lambda must be a positive integer")]
    ZeroLambda,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An `n x len` binary matrix; row `i` is the address of vertex `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Addressing {
    n: usize,
    len: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Addressing {
    /// All-zero addressing.
    pub fn zeros(n: usize, len: usize) -> Self {
        let words = len.div_ceil(64);
        Self { n, len, words, bits: vec![0; n * words] }
    }

    /// Builds an addressing from rows of `'0'`/`'1'` characters.
    pub fn from_strs<S: AsRef<str>>(rows: &[S]) -> Result<Self, AddressingError> {
        let len = rows.first().map_or(0, |r| r.as_ref().len());
        let mut a = Self::zeros(rows.len(), len);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != len {
                return Err(AddressingError::Parse {
                    line: i + 1,
                    message: format!("row has {} bits, expected {len}", r.len()),
                });
            }
            for (c, ch) in r.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => a.set(i, c, true),
                    _ => {
                        return Err(AddressingError::Parse {
                            line: i + 1,
                            message: format!("unexpected character `{ch}`"),
                        })
                    }
                }
            }
        }
        Ok(a)
    }

    /// Builds an addressing from boolean rows of equal length.
    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Self {
        let len = rows.first().map_or(0, Vec::len);
        let mut a = Self::zeros(rows.len(), len);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), len, "ragged rows");
            for (c, &b) in r.iter().enumerate() {
                a.set(i, c, b);
            }
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Code length (number of columns).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        (self.bits[row * self.words + col / 64] >> (col % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let w = &mut self.bits[row * self.words + col / 64];
        if value {
            *w |= 1 << (col % 64);
        } else {
            *w &= !(1 << (col % 64));
        }
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        self.bits[row * self.words + col / 64] ^= 1 << (col % 64);
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.bits[row * self.words..(row + 1) * self.words]
    }

    pub fn hamming(&self, i: usize, j: usize) -> u64 {
        self.row_words(i)
            .iter()
            .zip(self.row_words(j))
            .map(|(a, b)| u64::from((a ^ b).count_ones()))
            .sum()
    }

    pub fn row_string(&self, row: usize) -> String {
        (0..self.len).map(|c| if self.get(row, c) { '1' } else { '0' }).collect()
    }

    pub fn rows(&self) -> Vec<String> {
        (0..self.n).map(|i| self.row_string(i)).collect()
    }

    /// Row `i` of the result is row `order[i]` of `self`.
    pub fn select_rows(&self, order: &[usize]) -> Self {
        let mut out = Self::zeros(order.len(), self.len);
        for (i, &src) in order.iter().enumerate() {
            out.bits[i * self.words..(i + 1) * self.words].copy_from_slice(self.row_words(src));
        }
        out
    }

    /// Appends `other`'s columns to the right, row by row.
    pub fn hconcat(&self, other: &Self) -> Result<Self, AddressingError> {
        if self.n != other.n {
            return Err(AddressingError::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut out = Self::zeros(self.n, self.len + other.len);
        for i in 0..self.n {
            for c in 0..self.len {
                out.set(i, c, self.get(i, c));
            }
            for c in 0..other.len {
                out.set(i, self.len + c, other.get(i, c));
            }
        }
        Ok(out)
    }

    /// Adds `extra` all-zero columns.
    pub fn padded(&self, extra: usize) -> Self {
        self.hconcat(&Self::zeros(self.n, extra)).expect("same row count")
    }

    /// Addressing of a Cartesian product: row `i * b.n() + j` is row `i` of
    /// `self` followed by row `j` of `b`.
    pub fn product_concat(&self, b: &Self) -> Self {
        let mut out = Self::zeros(self.n * b.n, self.len + b.len);
        for i in 0..self.n {
            for j in 0..b.n {
                let r = i * b.n + j;
                for c in 0..self.len {
                    out.set(r, c, self.get(i, c));
                }
                for c in 0..b.len {
                    out.set(r, self.len + c, b.get(j, c));
                }
            }
        }
        out
    }

    /// Number of columns whose one-set is exactly `mask` (rows as bits),
    /// after complementing columns so that row 0 is zero. Only defined for
    /// `n <= 64`.
    pub fn column_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "column masks need n <= 64");
        (0..self.len)
            .map(|c| {
                let m = (0..self.n).fold(0u64, |m, i| m | (u64::from(self.get(i, c)) << i));
                if m & 1 == 1 {
                    !m & mask_all(self.n)
                } else {
                    m
                }
            })
            .collect()
    }

    /// Text form: header `n l`, then one line of `l` bits per vertex.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.len);
        for i in 0..self.n {
            s.push_str(&self.row_string(i));
            s.push('\n');
        }
        s
    }
}

fn mask_all(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Debug for Addressing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Addressing")
            .field("n", &self.n)
            .field("len", &self.len)
            .field("rows", &self.rows())
            .finish()
    }
}

impl fmt::Display for Addressing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the addressing text format written by [`Addressing::to_text`].
pub fn parse_addressing(text: &str) -> Result<Addressing, AddressingError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .ok_or(AddressingError::Parse { line: 1, message: "missing header".into() })?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| AddressingError::Parse { line: hline, message: "bad header".into() })?;
    let [n, len] = nums[..] else {
        return Err(AddressingError::Parse { line: hline, message: "expected `n l`".into() });
    };
    if len == 0 {
        return Ok(Addressing::zeros(n, 0));
    }
    let rows: Vec<(usize, &str)> =
        lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('#')).collect();
    if rows.len() != n {
        return Err(AddressingError::Parse {
            line: rows.last().map_or(hline, |r| r.0),
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    let mut a = Addressing::zeros(n, len);
    for (i, (line, r)) in rows.into_iter().enumerate() {
        if r.len() != len {
            return Err(AddressingError::Parse {
                line,
                message: format!("row has {} bits, expected {len}", r.len()),
            });
        }
        for (c, ch) in r.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => a.set(i, c, true),
                _ => {
                    return Err(AddressingError::Parse {
                        line,
                        message: format!("unexpected character `{ch}`"),
                    })
                }
            }
        }
    }
    Ok(a)
}

/// Outcome of checking an addressing against a distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    /// Minimum over pairs of `hamming - lambda * d`; `None` with fewer than
    /// two vertices.
    pub min_slack: Option<i64>,
    /// A pair attaining the minimum slack.
    pub tightest_pair: Option<(usize, usize)>,
}

/// Checks `lambda * d(u, v) <= hamming(u, v)` for every pair.
pub fn verify(a: &Addressing, dm: &DistanceMatrix, lambda: u64) -> Result<bool, AddressingError> {
    Ok(verify_report(a, dm, lambda)?.valid)
}

/// Like [`verify`] but also reports the minimum slack and where it occurs.
pub fn verify_report(
    a: &Addressing,
    dm: &DistanceMatrix,
    lambda: u64,
) -> Result<Verification, AddressingError> {
    if a.n() != dm.n() {
        return Err(AddressingError::DimensionMismatch { expected: dm.n(), found: a.n() });
    }
    let mut best: Option<(i64, (usize, usize))> = None;
    for (i, j) in dm.pairs() {
        let slack = a.hamming(i, j) as i64 - (lambda * dm.get(i, j)) as i64;
        if best.is_none_or(|(s, _)| slack < s) {
            best = Some((slack, (i, j)));
        }
    }
    Ok(Verification {
        valid: best.is_none_or(|(s, _)| s >= 0),
        min_slack: best.map(|b| b.0),
        tightest_pair: best.map(|b| b.1),
    })
}

/// True iff every pair is at Hamming distance exactly `lambda * d`.
pub fn is_isometric(a: &Addressing, dm: &DistanceMatrix, lambda: u64) -> bool {
    a.n() == dm.n() && dm.pairs().all(|(i, j)| a.hamming(i, j) == lambda * dm.get(i, j))
}
