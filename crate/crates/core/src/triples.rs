//! The nine adjacency patterns between two ordered sets `X = {u¹..uᵏ}` and
//! `X' = {v¹..vᵏ}`.
//!
//! Positions are 1-based. `j` always indexes the first set (rows) and `j'`
//! the second (columns); the relations are not symmetric in `(j, j')`.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::Gf2Matrix;

/// Largest `k` for which [`triple_matrix`] builds the full `k × k` matrix.
pub const DEFAULT_TRIPLE_MATRIX_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("{kind} requires k ≡ 2 (mod 4), got k = {k}")]
    SkewModulus { kind: TripleKind, k: usize },
    #[error("set size k must be at least 1")]
    EmptySet,
    #[error("position {pos} outside 1..={k}")]
    Position { pos: usize, k: usize },
    #[error("k = {k} exceeds the materialization cap {cap}")]
    Cap { k: usize, cap: usize },
    #[error("unknown triple kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TripleKind {
    RegularMatching,
    RegularAntimatching,
    RegularCrossing,
    ExpandingMatching,
    ExpandingAntimatching,
    ExpandingCrossing,
    SkewExpandingMatching,
    SkewExpandingAntimatching,
    SkewExpandingCrossing,
}

/// How a kind pairs up positions; used when naming witness structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Regular,
    Expanding,
    SkewExpanding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Matching,
    Antimatching,
    Crossing,
}

impl TripleKind {
    pub const ALL: [TripleKind; 9] = [
        TripleKind::RegularMatching,
        TripleKind::RegularAntimatching,
        TripleKind::RegularCrossing,
        TripleKind::ExpandingMatching,
        TripleKind::ExpandingAntimatching,
        TripleKind::ExpandingCrossing,
        TripleKind::SkewExpandingMatching,
        TripleKind::SkewExpandingAntimatching,
        TripleKind::SkewExpandingCrossing,
    ];

    pub fn new(family: Family, shape: Shape) -> Self {
        use TripleKind::*;
        match (family, shape) {
            (Family::Regular, Shape::Matching) => RegularMatching,
            (Family::Regular, Shape::Antimatching) => RegularAntimatching,
            (Family::Regular, Shape::Crossing) => RegularCrossing,
            (Family::Expanding, Shape::Matching) => ExpandingMatching,
            (Family::Expanding, Shape::Antimatching) => ExpandingAntimatching,
            (Family::Expanding, Shape::Crossing) => ExpandingCrossing,
            (Family::SkewExpanding, Shape::Matching) => SkewExpandingMatching,
            (Family::SkewExpanding, Shape::Antimatching) => SkewExpandingAntimatching,
            (Family::SkewExpanding, Shape::Crossing) => SkewExpandingCrossing,
        }
    }

    pub fn family(self) -> Family {
        use TripleKind::*;
        match self {
            RegularMatching | RegularAntimatching | RegularCrossing => Family::Regular,
            ExpandingMatching | ExpandingAntimatching | ExpandingCrossing => Family::Expanding,
            SkewExpandingMatching | SkewExpandingAntimatching | SkewExpandingCrossing => Family::SkewExpanding,
        }
    }

    pub fn shape(self) -> Shape {
        use TripleKind::*;
        match self {
            RegularMatching | ExpandingMatching | SkewExpandingMatching => Shape::Matching,
            RegularAntimatching | ExpandingAntimatching | SkewExpandingAntimatching => Shape::Antimatching,
            RegularCrossing | ExpandingCrossing | SkewExpandingCrossing => Shape::Crossing,
        }
    }

    pub fn is_regular(self) -> bool {
        self.family() == Family::Regular
    }

    pub fn is_expanding(self) -> bool {
        self.family() == Family::Expanding
    }

    pub fn is_skew(self) -> bool {
        self.family() == Family::SkewExpanding
    }

    /// Matchings and antimatchings.
    pub fn is_parallel(self) -> bool {
        !self.is_cross()
    }

    /// Crossings of any family.
    pub fn is_cross(self) -> bool {
        self.shape() == Shape::Crossing
    }

    pub fn as_str(self) -> &'static str {
        use TripleKind::*;
        match self {
            RegularMatching => "regular_matching",
            RegularAntimatching => "regular_antimatching",
            RegularCrossing => "regular_crossing",
            ExpandingMatching => "expanding_matching",
            ExpandingAntimatching => "expanding_antimatching",
            ExpandingCrossing => "expanding_crossing",
            SkewExpandingMatching => "skew_expanding_matching",
            SkewExpandingAntimatching => "skew_expanding_antimatching",
            SkewExpandingCrossing => "skew_expanding_crossing",
        }
    }

    /// Evaluates the kind's rule without range or modulus checks.
    ///
    /// Callers must ensure `1 ≤ j, jp ≤ k` and that `k` is valid for the kind.
    #[inline]
    pub fn adjacent_unchecked(self, k: usize, j: usize, jp: usize) -> bool {
        use TripleKind::*;
        match self {
            RegularMatching => j == jp,
            RegularAntimatching => j != jp,
            RegularCrossing => j + jp > k,
            ExpandingMatching => jp == 2 * j || jp == 2 * j + 1,
            ExpandingAntimatching => jp != 2 * j && jp != 2 * j + 1,
            ExpandingCrossing => 2 * j + jp >= 2 * k + 2,
            SkewExpandingMatching | SkewExpandingAntimatching => {
                let (low, high) = skew_bounds(k);
                if j <= low {
                    jp == 2 * j || jp == 2 * j + 1
                } else if j <= high {
                    self == SkewExpandingAntimatching
                } else {
                    // jp = 2j - k - 2 or 2j - k - 1; rows here have 2j ≥ k + 2.
                    jp + k + 2 == 2 * j || jp + k + 1 == 2 * j
                }
            }
            SkewExpandingCrossing => {
                let (low, high) = skew_bounds(k);
                let half = k / 2;
                if j <= low {
                    2 * j + jp >= k
                } else if j <= half {
                    jp > half
                } else if j <= high {
                    jp + 1 >= half
                } else {
                    2 * j + jp >= 2 * k + 2
                }
            }
        }
    }
}

impl fmt::Display for TripleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TripleKind {
    type Err = TripleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TripleKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| TripleError::UnknownKind(s.to_string()))
    }
}

/// `((k−2)/4, (3k+2)/4)`: the last rows of the first and second skew ranges.
#[inline]
fn skew_bounds(k: usize) -> (usize, usize) {
    ((k - 2) / 4, (3 * k + 2) / 4)
}

/// The row ranges `1..=(k−2)/4`, `(k−2)/4+1..=(3k+2)/4` and
/// `(3k+2)/4+1..=k` of the skew kinds. The crossing further splits the middle
/// range at `k/2`.
pub fn skew_row_ranges(k: usize) -> [RangeInclusive<usize>; 3] {
    let (low, high) = skew_bounds(k);
    [1..=low, low + 1..=high, high + 1..=k]
}

pub fn validate_kind(kind: TripleKind, k: usize) -> Result<(), TripleError> {
    if k == 0 {
        return Err(TripleError::EmptySet);
    }
    if kind.is_skew() {
        if k % 4 != 2 {
            return Err(TripleError::SkewModulus { kind, k });
        }
        let ranges = skew_row_ranges(k);
        let covered: usize = ranges.iter().map(|r| r.clone().count()).sum();
        assert!(
            covered == k && *ranges[0].start() == 1 && *ranges[2].end() == k,
            "skew row ranges must partition 1..={k}"
        );
    }
    Ok(())
}

fn check_position(pos: usize, k: usize) -> Result<(), TripleError> {
    if pos == 0 || pos > k {
        return Err(TripleError::Position { pos, k });
    }
    Ok(())
}

/// Whether `uʲ vʲ'` is an edge in a triple of the given kind on sets of size `k`.
pub fn triple_adjacent(kind: TripleKind, k: usize, j: usize, jp: usize) -> Result<bool, TripleError> {
    validate_kind(kind, k)?;
    check_position(j, k)?;
    check_position(jp, k)?;
    Ok(kind.adjacent_unchecked(k, j, jp))
}

/// `{2j, 2j+1} ∩ [1, k]`: the positions an expanding matching pairs with `j`.
pub fn expanding_image(j: usize, k: usize) -> Result<Vec<usize>, TripleError> {
    if k == 0 {
        return Err(TripleError::EmptySet);
    }
    check_position(j, k)?;
    Ok([2 * j, 2 * j + 1].into_iter().filter(|&p| p <= k).collect())
}

/// The `k × k` matrix of the triple, entry `(j−1, j'−1)` for positions `j, j'`.
pub fn triple_matrix(kind: TripleKind, k: usize, cap: usize) -> Result<Gf2Matrix, TripleError> {
    validate_kind(kind, k)?;
    if k > cap {
        return Err(TripleError::Cap { k, cap });
    }
    Ok(Gf2Matrix::from_fn(k, k, |a, b| kind.adjacent_unchecked(k, a + 1, b + 1)))
}
