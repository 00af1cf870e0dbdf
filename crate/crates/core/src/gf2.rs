//! Dense matrices over the two-element field.
//!
//! Rows are packed into `u64` words and reduced with XOR row updates. Entry
//! access is 0-based; the pattern generators follow the usual 1-based
//! convention in their documentation (entry `(i, j)` with `i > j` is "below
//! the diagonal").

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("near-triangular patterns need diagonal bits; other patterns take none")]
    DiagonalBits,
    #[error("diagonal bit vector has length {got}, expected {expected}")]
    DiagonalLength { expected: usize, got: usize },
    #[error("pattern size must be at least 1")]
    EmptyPattern,
    #[error("rows have inconsistent lengths")]
    Ragged,
    #[error("unknown pattern class `{0}`")]
    UnknownPattern(String),
}

/// Shape classes of the small square matrices used as rank certificates.
///
/// `Unstructured` constrains no entry; a witness of that class relies on the
/// computed rank alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternClass {
    Diagonal,
    Antidiagonal,
    Triangular,
    NearTriangular,
    Unstructured,
}

impl PatternClass {
    pub const ALL: [PatternClass; 5] = [
        PatternClass::Diagonal,
        PatternClass::Antidiagonal,
        PatternClass::Triangular,
        PatternClass::NearTriangular,
        PatternClass::Unstructured,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternClass::Diagonal => "diagonal",
            PatternClass::Antidiagonal => "antidiagonal",
            PatternClass::Triangular => "triangular",
            PatternClass::NearTriangular => "near_triangular",
            PatternClass::Unstructured => "unstructured",
        }
    }

    /// Required value of entry `(i, j)` (0-based), or `None` when the class
    /// leaves it free.
    pub fn expected_entry(self, i: usize, j: usize) -> Option<bool> {
        match self {
            PatternClass::Diagonal => Some(i == j),
            PatternClass::Antidiagonal => Some(i != j),
            PatternClass::Triangular => Some(i >= j),
            PatternClass::NearTriangular => {
                if i == j {
                    None
                } else {
                    Some(i > j)
                }
            }
            PatternClass::Unstructured => None,
        }
    }

    /// Rank that every square matrix of this class and `size` is guaranteed
    /// to reach.
    pub fn guaranteed_rank(self, size: usize) -> usize {
        match self {
            PatternClass::Diagonal | PatternClass::Triangular => size,
            PatternClass::Antidiagonal => {
                if size % 2 == 1 {
                    size - 1
                } else {
                    size
                }
            }
            PatternClass::NearTriangular => size / 2,
            PatternClass::Unstructured => 0,
        }
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternClass {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternClass::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Gf2Error::UnknownPattern(s.to_string()))
    }
}

/// A 0/1 matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let stride = n_cols.div_ceil(WORD);
        Gf2Matrix {
            n_rows,
            n_cols,
            stride,
            words: vec![0; stride * n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut entry: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                if entry(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values (any nonzero byte is a one).
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, Gf2Error> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n_cols) {
            return Err(Gf2Error::Ragged);
        }
        Ok(Self::from_fn(rows.len(), n_cols, |i, j| rows[i].as_ref()[j] != 0))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i}, {j}) out of range");
        (self.words[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i}, {j}) out of range");
        let w = &mut self.words[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i))
    }

    /// The submatrix on the given row and column indices, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |a, b| self.get(rows[a], cols[b]))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Rank over GF(2).
    ///
    /// Pivots are taken column by column from the lowest index, using the
    /// lowest-index row that still has a one in the pivot column.
    pub fn rank(&self) -> usize {
        let mut work = self.words.clone();
        eliminate(&mut work, self.n_rows, self.n_cols, self.stride).len()
    }

    /// Indices of rows forming a basis of the row space, chosen greedily
    /// from the lowest index.
    pub fn basis_rows(&self) -> Vec<usize> {
        let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
        let mut chosen = Vec::new();
        for i in 0..self.n_rows {
            let mut row = self.row_words(i).to_vec();
            for (lead, b) in &basis {
                if (row[lead / WORD] >> (lead % WORD)) & 1 == 1 {
                    row.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
                }
            }
            if let Some(lead) = leading_bit(&row) {
                basis.push((lead, row));
                chosen.push(i);
            }
        }
        chosen
    }

    /// Row and column indices of a nonsingular `size × size` submatrix, if the
    /// rank allows one.
    pub fn nonsingular_core(&self, size: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let rows: Vec<usize> = self.basis_rows().into_iter().take(size).collect();
        if rows.len() < size {
            return None;
        }
        let all_cols: Vec<usize> = (0..self.n_cols).collect();
        let strip = self.submatrix(&rows, &all_cols).transpose();
        let cols: Vec<usize> = strip.basis_rows().into_iter().take(size).collect();
        debug_assert_eq!(cols.len(), size);
        Some((rows, cols))
    }

    /// True when every entry constrained by `class` has its required value.
    pub fn matches_pattern(&self, class: PatternClass) -> bool {
        if !self.is_square() {
            return false;
        }
        (0..self.n_rows).all(|i| {
            (0..self.n_cols).all(|j| class.expected_entry(i, j).is_none_or(|want| self.get(i, j) == want))
        })
    }
}

/// Forward elimination in place; returns the pivot columns in order.
fn eliminate(words: &mut [u64], n_rows: usize, n_cols: usize, stride: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..n_cols {
        if top == n_rows {
            break;
        }
        let (w, bit) = (col / WORD, 1u64 << (col % WORD));
        let Some(p) = (top..n_rows).find(|&r| words[r * stride + w] & bit != 0) else {
            continue;
        };
        if p != top {
            for x in 0..stride {
                words.swap(p * stride + x, top * stride + x);
            }
        }
        let (head, tail) = words.split_at_mut((top + 1) * stride);
        let pivot_row = &head[top * stride..];
        for r in 0..n_rows - top - 1 {
            let row = &mut tail[r * stride..(r + 1) * stride];
            if row[w] & bit != 0 {
                // Words before `w` are already zero in the pivot row.
                for x in w..stride {
                    row[x] ^= pivot_row[x];
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    pivots
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
}

/// Rank of a matrix whose rows each fit in one word (at most 64 columns).
/// Consumes the rows as scratch space.
pub fn rank_of_word_rows(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let x = rows[i];
        if x == 0 {
            continue;
        }
        let low = x & x.wrapping_neg();
        for r in rows[i + 1..].iter_mut() {
            if *r & low != 0 {
                *r ^= x;
            }
        }
        rank += 1;
    }
    rank
}

/// Generates the `r × r` matrix of the given class.
///
/// `diagonal_bits` must be supplied exactly when `class` is near-triangular;
/// bit `i` becomes entry `(i, i)`.
pub fn pattern(class: PatternClass, r: usize, diagonal_bits: Option<&[bool]>) -> Result<Gf2Matrix, Gf2Error> {
    if r == 0 {
        return Err(Gf2Error::EmptyPattern);
    }
    match (class, diagonal_bits) {
        (PatternClass::NearTriangular, Some(bits)) => {
            if bits.len() != r {
                return Err(Gf2Error::DiagonalLength { expected: r, got: bits.len() });
            }
            Ok(Gf2Matrix::from_fn(r, r, |i, j| if i == j { bits[i] } else { i > j }))
        }
        (PatternClass::NearTriangular, None) | (_, Some(_)) => Err(Gf2Error::DiagonalBits),
        (PatternClass::Unstructured, None) => Err(Gf2Error::UnknownPattern("unstructured".into())),
        (class, None) => Ok(Gf2Matrix::from_fn(r, r, |i, j| class.expected_entry(i, j).unwrap_or(false))),
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.n_rows, self.n_cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
