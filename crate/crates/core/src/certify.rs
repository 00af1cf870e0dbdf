//! Rank lower bounds for carousels: the order calculator, blocks and labels,
//! structured rank witnesses, propagation checks and sampled certification
//! of carousels far too large to reduce in full.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::carousel::{Carousel, CarouselError, CarouselFlavor, PartRef, VertexRef};
use crate::gf2::PatternClass;
use crate::graph::{cut_matrix, is_balanced, Adjacency, Bipartition, GraphError, Vertex};
use crate::triples::{Shape, TripleKind};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Carousel(#[from] CarouselError),
    #[error("the threshold r must be at least {min}, got {r}")]
    Threshold { r: usize, min: usize },
    #[error("empty ordered set")]
    EmptySet,
    #[error("gap (X1, X2) must be a regular crossing, found {0}")]
    FirstKind(TripleKind),
    #[error("gap index {i} outside 1..={n}")]
    Gap { i: usize, n: usize },
    #[error("part index {j} has no successor part (s = {s})")]
    NoNextPart { j: usize, s: u32 },
    #[error("partition covers {got} vertices, graph has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("partition is not balanced ({y} of {n} vertices in Y)")]
    Unbalanced { y: usize, n: usize },
    #[error("window {q}..={end} exceeds the order s = {s}")]
    Window { q: usize, end: usize, s: u32 },
    #[error("witness rejected: {0}")]
    Rejected(String),
    #[error("witness parse error: {0}")]
    Parse(String),
}

/// `(q, s)` with `q ≥ 1` minimal such that
/// `2^(q+c·r−1) ≥ 10(n+1)(q+c·r+1)r` and `s = q + c·r + 1`, where `c` is 8
/// for even carousels and 16 for odd ones.
pub fn min_order(n: usize, r: usize, flavor: CarouselFlavor) -> (usize, usize) {
    assert!(n >= 3 && r >= 2, "min_order needs n ≥ 3 and r ≥ 2");
    let c = order_factor(flavor);
    let mut q = 1;
    while !order_inequality(n, r, flavor, q) {
        q += 1;
    }
    // The left side doubles while the right side grows linearly.
    debug_assert!(order_inequality(n, r, flavor, q + 1));
    (q, q + c * r + 1)
}

fn order_factor(flavor: CarouselFlavor) -> usize {
    match flavor {
        CarouselFlavor::Even => 8,
        CarouselFlavor::Odd => 16,
    }
}

/// Whether `q` satisfies the order inequality of [`min_order`].
pub fn order_inequality(n: usize, r: usize, flavor: CarouselFlavor, q: usize) -> bool {
    let e = q + order_factor(flavor) * r;
    let lhs = BigUint::from(1u8) << (e - 1);
    let rhs = BigUint::from(10u8) * BigUint::from(n + 1) * BigUint::from(e + 1) * BigUint::from(r);
    lhs >= rhs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Y,
    Z,
}

impl Side {
    pub fn of(p: &Bipartition, v: Vertex) -> Side {
        if p.in_y(v) {
            Side::Y
        } else {
            Side::Z
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Y => Side::Z,
            Side::Z => Side::Y,
        }
    }
}

/// A maximal monochromatic interval `start..=end` of an ordered set, as
/// 0-based indices into that ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub side: Side,
}

/// Blocks of the ordered set `x` with respect to `p`, in order.
pub fn blocks(p: &Bipartition, x: &[Vertex]) -> Result<Vec<Block>, CertifyError> {
    blocks_upto(p, x, usize::MAX)
}

/// Like [`blocks`] but stops once `limit` blocks are found.
fn blocks_upto(p: &Bipartition, x: &[Vertex], limit: usize) -> Result<Vec<Block>, CertifyError> {
    let first = *x.first().ok_or(CertifyError::EmptySet)?;
    let mut out = Vec::new();
    let mut cur = Block {
        start: 0,
        end: 0,
        side: Side::of(p, first),
    };
    for (idx, &v) in x.iter().enumerate().skip(1) {
        let side = Side::of(p, v);
        if side == cur.side {
            cur.end = idx;
        } else {
            out.push(cur);
            if out.len() == limit {
                return Ok(out);
            }
            cur = Block {
                start: idx,
                end: idx,
                side,
            };
        }
    }
    out.push(cur);
    Ok(out)
}

/// `⌈y / r⌉` for a set with `y` vertices in `Y`.
pub fn label_of_count(y: usize, r: usize) -> usize {
    assert!(r >= 1);
    y.div_ceil(r)
}

/// `⌈|S ∩ Y| / r⌉`.
pub fn label(s: &[Vertex], p: &Bipartition, r: usize) -> usize {
    label_of_count(s.iter().filter(|&&v| p.in_y(v)).count(), r)
}

/// Rows and columns of a cut submatrix with a declared pattern and a rank
/// lower bound, checked against the graph on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWitness {
    rows: Vec<Vertex>,
    cols: Vec<Vertex>,
    pattern: PatternClass,
    claimed: usize,
}

impl RankWitness {
    pub fn new<G: Adjacency + ?Sized>(
        g: &G,
        rows: Vec<Vertex>,
        cols: Vec<Vertex>,
        pattern: PatternClass,
        claimed: usize,
    ) -> Result<Self, CertifyError> {
        let w = RankWitness {
            rows,
            cols,
            pattern,
            claimed,
        };
        w.verify(g, None)?;
        Ok(w)
    }

    pub fn rows(&self) -> &[Vertex] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vertex] {
        &self.cols
    }

    pub fn pattern(&self) -> PatternClass {
        self.pattern
    }

    pub fn claimed(&self) -> usize {
        self.claimed
    }

    /// Re-evaluates the submatrix through `g`. With a partition, also checks
    /// that all rows sit on one side and all columns on the other, so that
    /// the claim bounds that partition's rank.
    pub fn verify<G: Adjacency + ?Sized>(&self, g: &G, partition: Option<&Bipartition>) -> Result<(), CertifyError> {
        let rej = |m: String| CertifyError::Rejected(m);
        if self.rows.is_empty() || self.cols.is_empty() {
            return Err(rej("empty witness".into()));
        }
        let m = cut_matrix(g, &self.rows, &self.cols)?;
        if !m.matches_pattern(self.pattern) {
            return Err(rej(format!("submatrix does not have the {} pattern", self.pattern)));
        }
        let rank = m.rank();
        if rank < self.claimed {
            return Err(rej(format!("rank {rank} is below the claimed {}", self.claimed)));
        }
        if let Some(p) = partition {
            if p.len() != g.vertex_count() {
                return Err(CertifyError::PartitionSize {
                    expected: g.vertex_count(),
                    got: p.len(),
                });
            }
            let side = Side::of(p, self.rows[0]);
            if self.rows.iter().any(|&v| Side::of(p, v) != side) {
                return Err(rej("rows straddle the partition".into()));
            }
            if self.cols.iter().any(|&v| Side::of(p, v) == side) {
                return Err(rej("columns are not all on the opposite side".into()));
            }
        }
        Ok(())
    }

    /// `witness <pattern> <claimed>`, then `rows` and `cols` lines of
    /// 1-based vertex ids.
    pub fn to_text(&self) -> String {
        let ids = |vs: &[Vertex]| vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        writeln!(out, "witness {} {}", self.pattern, self.claimed).unwrap();
        writeln!(out, "rows {}", ids(&self.rows)).unwrap();
        writeln!(out, "cols {}", ids(&self.cols)).unwrap();
        out
    }

    /// Parses [`RankWitness::to_text`] output and verifies it against `g`.
    pub fn parse<G: Adjacency + ?Sized>(g: &G, text: &str) -> Result<Self, CertifyError> {
        let perr = |m: &str| CertifyError::Parse(m.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> = lines.next().ok_or_else(|| perr("empty input"))?.split_whitespace().collect();
        let (pattern, claimed) = match header.as_slice() {
            ["witness", p, c] => (
                p.parse::<PatternClass>().map_err(|e| CertifyError::Parse(e.to_string()))?,
                c.parse::<usize>().map_err(|_| perr("bad claimed bound"))?,
            ),
            _ => return Err(perr("expected `witness <pattern> <claimed>`")),
        };
        let mut list = |key: &str| -> Result<Vec<Vertex>, CertifyError> {
            let line = lines.next().ok_or_else(|| CertifyError::Parse(format!("missing `{key}` line")))?;
            let mut f = line.split_whitespace();
            if f.next() != Some(key) {
                return Err(CertifyError::Parse(format!("expected `{key}` line")));
            }
            f.map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(CertifyError::Parse(format!("bad vertex id `{t}`"))),
            })
            .collect()
        };
        let rows = list("rows")?;
        let cols = list("cols")?;
        RankWitness::new(g, rows, cols, pattern, claimed)
    }
}

impl fmt::Display for RankWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}x{} witness, rank >= {}", self.pattern, self.rows.len(), self.cols.len(), self.claimed)
    }
}

fn check_partition(c: &Carousel, p: &Bipartition) -> Result<(), CertifyError> {
    if p.len() != c.vertex_count() {
        return Err(CertifyError::PartitionSize {
            expected: c.vertex_count(),
            got: p.len(),
        });
    }
    Ok(())
}

fn check_r(r: usize, min: usize) -> Result<(), CertifyError> {
    if r < min {
        return Err(CertifyError::Threshold { r, min });
    }
    Ok(())
}

/// When `X₁` has at least `8r` blocks, a near-triangular `2r × 2r` witness
/// of rank at least `r` between representatives of the first `8r` blocks
/// and their mirror images in `X₂`.
///
/// Block `b` gets its lowest position as representative; blocks are paired
/// `(1,2), (3,4), …` and a representative from pair `a` is adjacent to the
/// image of one from pair `b` whenever `a > b`, never when `a < b`.
pub fn block_witness(c: &Carousel, p: &Bipartition, r: usize) -> Result<Option<RankWitness>, CertifyError> {
    check_r(r, 1)?;
    check_partition(c, p)?;
    if c.kind(1) != TripleKind::RegularCrossing {
        return Err(CertifyError::FirstKind(c.kind(1)));
    }
    let k = c.k();
    let x1: Vec<Vertex> = c.set_ids(1).collect();
    let found = blocks_upto(p, &x1, 8 * r)?;
    if found.len() < 8 * r {
        return Ok(None);
    }
    let odd_side = found[0].side;
    // reps[a] = (position from odd block, position from even block), 1-based.
    let reps: Vec<(usize, usize)> = (0..4 * r).map(|a| (found[2 * a].start + 1, found[2 * a + 1].start + 1)).collect();
    let image = |pos: usize| c.id(VertexRef::new(2, k - pos + 1));

    let mut odd_count = 0usize;
    for &(u, v) in &reps {
        for pos in [u, v] {
            if Side::of(p, image(pos)) == odd_side {
                odd_count += 1;
            }
        }
    }
    // Columns come from the majority side of the images; rows from the
    // blocks on the other side.
    let col_side = if odd_count >= 4 * r { odd_side } else { odd_side.other() };
    let mut rows = Vec::with_capacity(2 * r);
    let mut cols = Vec::with_capacity(2 * r);
    for &(u, v) in &reps {
        if rows.len() == 2 * r {
            break;
        }
        let mut imgs = [(k - u + 1, u), (k - v + 1, v)];
        imgs.sort();
        let Some(&(_, src)) = imgs.iter().find(|&&(_, src)| Side::of(p, image(src)) == col_side) else {
            continue;
        };
        let row_pos = if col_side == odd_side { v } else { u };
        rows.push(c.id(VertexRef::new(1, row_pos)));
        cols.push(image(src));
    }
    if rows.len() < 2 * r {
        return Ok(None);
    }
    let w = RankWitness::new(c, rows, cols, PatternClass::NearTriangular, r)?;
    debug_assert!(w.verify(c, Some(p)).is_ok());
    Ok(Some(w))
}

/// One label-propagation statement: the label of `target` stays within
/// `tolerance` of the label of `source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagationStatement {
    pub gap: usize,
    pub source: PartRef,
    pub target: PartRef,
    pub tolerance: usize,
    /// Source position `p` corresponds to target positions `2p, 2p+1`
    /// (before mirroring) instead of `p`.
    pub doubling: bool,
    pub pattern: PatternClass,
}

fn statement_pattern(kind: TripleKind) -> PatternClass {
    match (kind, kind.shape()) {
        (TripleKind::SkewExpandingAntimatching, _) => PatternClass::Diagonal,
        (_, Shape::Matching) => PatternClass::Diagonal,
        (_, Shape::Antimatching) => PatternClass::Antidiagonal,
        (_, Shape::Crossing) => PatternClass::Triangular,
    }
}

/// The propagation statements that apply to gap `(Xᵢ, Xᵢ₊₁)` and part
/// index `j`.
///
/// Gaps `1..n` are regular and map part `j` to part `j` (mirrored across a
/// cross gap). The closing gap maps part `j` of `Xₙ` to part `j+1` of `X₁`;
/// an expanding gap only relates the unmirrored source of a parallel gap
/// and the mirrored source of a cross gap to the unmirrored target.
pub fn propagation_statements(c: &Carousel, i: usize, j: usize) -> Result<Vec<PropagationStatement>, CertifyError> {
    let n = c.n();
    if i == 0 || i > n {
        return Err(CertifyError::Gap { i, n });
    }
    let s = c.s();
    if j == 0 || j > s as usize {
        return Err(CarouselError::PartIndex { j, s }.into());
    }
    let kind = c.kind(i);
    let pattern = statement_pattern(kind);
    let cross = kind.is_cross();
    let next = if i == n { 1 } else { i + 1 };
    let mk = |sb: bool, tb: bool, tj: usize, tolerance: usize, doubling: bool| PropagationStatement {
        gap: i,
        source: PartRef::new(i, j, sb),
        target: PartRef::new(next, tj, tb),
        tolerance,
        doubling,
        pattern,
    };
    if kind.is_regular() {
        return Ok(vec![mk(false, cross, j, 1, false), mk(true, !cross, j, 1, false)]);
    }
    if j >= s as usize {
        return Err(CertifyError::NoNextPart { j, s });
    }
    if kind.is_skew() {
        Ok(vec![mk(false, cross, j + 1, 2, true), mk(true, !cross, j + 1, 2, true)])
    } else if cross {
        Ok(vec![mk(true, false, j + 1, 2, true)])
    } else {
        Ok(vec![mk(false, false, j + 1, 2, true)])
    }
}

/// Every statement of the carousel, gap by gap.
pub fn all_statements(c: &Carousel) -> Vec<PropagationStatement> {
    let mut out = Vec::new();
    for i in 1..=c.n() {
        for j in 1..=c.s() as usize {
            if let Ok(st) = propagation_statements(c, i, j) {
                out.extend(st);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementOutcome {
    Compliant { source_label: usize, target_label: usize },
    Witness { source_label: usize, target_label: usize, witness: RankWitness },
    /// The labels violate the statement but too few opposite-side pairs
    /// exist for a witness of rank at least `r − 1`.
    Unresolved { source_label: usize, target_label: usize, pairs: usize },
}

impl StatementOutcome {
    pub fn witness(&self) -> Option<&RankWitness> {
        match self {
            StatementOutcome::Witness { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// Positions of the source part with their corresponding target positions.
fn statement_pairs(c: &Carousel, st: &PropagationStatement) -> Vec<(usize, Vec<usize>)> {
    let k = c.k();
    let mirror = |pos: usize, barred: bool| if barred { k - pos + 1 } else { pos };
    let lo = 1usize << (st.source.index - 1);
    (lo..2 * lo)
        .map(|q| {
            let targets = if st.doubling { vec![2 * q, 2 * q + 1] } else { vec![q] };
            (
                mirror(q, st.source.barred),
                targets.into_iter().map(|t| mirror(t, st.target.barred)).collect(),
            )
        })
        .collect()
}

/// Checks one statement; on violation, extracts as many source/target pairs
/// with opposite sides as the direction of the violation requires.
pub fn check_statement(
    c: &Carousel,
    p: &Bipartition,
    r: usize,
    st: &PropagationStatement,
) -> Result<StatementOutcome, CertifyError> {
    check_r(r, 1)?;
    check_partition(c, p)?;
    let src_ids = c.part_ids(st.source)?;
    let tgt_ids = c.part_ids(st.target)?;
    let source_label = label(&src_ids, p, r);
    let target_label = label(&tgt_ids, p, r);
    let up = target_label > source_label + st.tolerance;
    let down = target_label + st.tolerance < source_label;
    if !up && !down {
        return Ok(StatementOutcome::Compliant {
            source_label,
            target_label,
        });
    }
    // Rising labels need sources in Z with an image in Y; falling ones the reverse.
    let (row_side, col_side) = if up { (Side::Z, Side::Y) } else { (Side::Y, Side::Z) };
    let (si, ti) = (st.source.set, st.target.set);
    let mut pairs = Vec::new();
    for (spos, tposs) in statement_pairs(c, st) {
        if pairs.len() == r + 1 {
            break;
        }
        let sv = c.id(VertexRef::new(si, spos));
        if Side::of(p, sv) != row_side {
            continue;
        }
        let mut sorted = tposs.clone();
        sorted.sort();
        if let Some(&tp) = sorted.iter().find(|&&tp| Side::of(p, c.id(VertexRef::new(ti, tp))) == col_side) {
            pairs.push((sv, c.id(VertexRef::new(ti, tp))));
        }
    }
    let size = pairs.len();
    let claimed = st.pattern.guaranteed_rank(size);
    if size == 0 || claimed + 1 < r {
        return Ok(StatementOutcome::Unresolved {
            source_label,
            target_label,
            pairs: size,
        });
    }
    let (rows, cols): (Vec<Vertex>, Vec<Vertex>) = pairs.iter().copied().unzip();
    let witness = match RankWitness::new(c, rows.clone(), cols.clone(), st.pattern, claimed) {
        Ok(w) => w,
        Err(_) => {
            let rows: Vec<Vertex> = rows.into_iter().rev().collect();
            let cols: Vec<Vertex> = cols.into_iter().rev().collect();
            RankWitness::new(c, rows, cols, st.pattern, claimed)?
        }
    };
    Ok(StatementOutcome::Witness {
        source_label,
        target_label,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropagationOutcome {
    Ok,
    Witness(RankWitness),
    Unresolved(Vec<(PropagationStatement, StatementOutcome)>),
}

/// Checks every statement for gap `i` and part `j`, returning the first
/// witness found.
pub fn propagation_check(
    c: &Carousel,
    p: &Bipartition,
    r: usize,
    i: usize,
    j: usize,
) -> Result<PropagationOutcome, CertifyError> {
    let mut unresolved = Vec::new();
    for st in propagation_statements(c, i, j)? {
        match check_statement(c, p, r, &st)? {
            StatementOutcome::Compliant { .. } => {}
            StatementOutcome::Witness { witness, .. } => return Ok(PropagationOutcome::Witness(witness)),
            other => unresolved.push((st, other)),
        }
    }
    if unresolved.is_empty() {
        Ok(PropagationOutcome::Ok)
    } else {
        Ok(PropagationOutcome::Unresolved(unresolved))
    }
}

/// The first `t` in the scan window `q ..= q + 8r − 1` (even) or
/// `q ..= q + 16r − 1` (odd) such that `X₁,ₜ` (even) or `X₁,ₜ ∪ X₁,ₜ₊₁` (odd)
/// lies entirely on one side, with that side.
pub fn monochromatic_window(c: &Carousel, p: &Bipartition, r: usize, q: usize) -> Result<Option<(usize, Side)>, CertifyError> {
    check_r(r, 1)?;
    check_partition(c, p)?;
    let s = c.s();
    let (span, pair) = match c.flavor() {
        CarouselFlavor::Even => (8 * r, false),
        CarouselFlavor::Odd => (16 * r, true),
    };
    let end = q + span - 1 + usize::from(pair);
    if q == 0 || end > s as usize {
        return Err(CertifyError::Window { q, end, s });
    }
    for t in q..q + span {
        let mut ids = c.part_ids(PartRef::new(1, t, false))?;
        if pair {
            ids.extend(c.part_ids(PartRef::new(1, t + 1, false))?);
        }
        let ys = ids.iter().filter(|&&v| p.in_y(v)).count();
        if ys == 0 {
            return Ok(Some((t, Side::Z)));
        }
        if ys == ids.len() {
            return Ok(Some((t, Side::Y)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Blocks,
    Propagation,
    Probe,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Blocks => "blocks",
            Method::Propagation => "propagation",
            Method::Probe => "probe",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    Certified { method: Method, witness: RankWitness },
    Uncertified,
}

/// Searches for a witness that `p` has rank at least `r`: the block
/// witness, then every propagation statement, then probing of candidate
/// submatrices around block boundaries and their images.
pub fn certify_partition(c: &Carousel, p: &Bipartition, r: usize, seed: u64) -> Result<Certification, CertifyError> {
    check_r(r, 1)?;
    check_partition(c, p)?;
    if !is_balanced(c, p) {
        return Err(CertifyError::Unbalanced {
            y: p.y_count(),
            n: p.len(),
        });
    }
    if let Some(w) = block_witness(c, p, r)? {
        return Ok(Certification::Certified {
            method: Method::Blocks,
            witness: w,
        });
    }
    for st in all_statements(c) {
        if let StatementOutcome::Witness { witness, .. } = check_statement(c, p, r, &st)? {
            if witness.claimed() >= r {
                return Ok(Certification::Certified {
                    method: Method::Propagation,
                    witness,
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(w) = probe(c, p, r, &mut rng)? {
        return Ok(Certification::Certified {
            method: Method::Probe,
            witness: w,
        });
    }
    Ok(Certification::Uncertified)
}

const PROBE_SIDE: usize = 384;
const PROBE_ROUNDS: usize = 8;

fn probe<R: Rng>(c: &Carousel, p: &Bipartition, r: usize, rng: &mut R) -> Result<Option<RankWitness>, CertifyError> {
    let k = c.k();
    let mut positions = BTreeSet::new();
    let mut seeds = vec![1, 2, k / 2, k / 2 + 1, k.saturating_sub(1), k];
    for j in 0..=c.s() {
        seeds.push((1usize << j).saturating_sub(1));
        seeds.push(1usize << j);
    }
    for i in 1..=c.n() {
        let ids: Vec<Vertex> = c.set_ids(i).collect();
        let bs = blocks(p, &ids)?;
        let ends: Vec<usize> = bs.iter().map(|b| b.end + 1).collect();
        let keep = if ends.len() > 64 { [&ends[..32], &ends[ends.len() - 32..]].concat() } else { ends };
        seeds.extend(keep.iter().flat_map(|&e| [e, e + 1]));
    }
    for &q in &seeds {
        for x in [q, k + 1 - q.min(k), 2 * q, 2 * q + 1, q / 2, q.div_ceil(2), k.saturating_sub(2 * q), k + 1 - (2 * q).min(k)] {
            for d in [0isize, -1, 1] {
                let y = x as isize + d;
                if y >= 1 && y as usize <= k {
                    positions.insert(y as usize);
                }
            }
        }
    }
    let mut ys = Vec::new();
    let mut zs = Vec::new();
    for i in 1..=c.n() {
        for &pos in &positions {
            let v = c.id(VertexRef::new(i, pos));
            if p.in_y(v) {
                ys.push(v);
            } else {
                zs.push(v);
            }
        }
    }
    let n = c.vertex_count();
    let all_y = p.y_vertices();
    let all_z = p.z_vertices();
    for round in 0..=PROBE_ROUNDS {
        let (rows, cols) = if round == 0 {
            (thin(ys.clone(), rng), thin(zs.clone(), rng))
        } else {
            let pick = |side: &[Vertex], rng: &mut R| -> Vec<Vertex> {
                sample(rng, side.len(), PROBE_SIDE.min(side.len())).into_iter().map(|i| side[i]).collect()
            };
            (pick(&all_y, rng), pick(&all_z, rng))
        };
        if rows.is_empty() || cols.is_empty() {
            continue;
        }
        debug_assert!(rows.iter().chain(&cols).all(|&v| v < n));
        let m = cut_matrix(c, &rows, &cols)?;
        if let Some((ri, ci)) = m.nonsingular_core(r) {
            let rows = ri.into_iter().map(|i| rows[i]).collect();
            let cols = ci.into_iter().map(|i| cols[i]).collect();
            return Ok(Some(RankWitness::new(c, rows, cols, PatternClass::Unstructured, r)?));
        }
    }
    Ok(None)
}

fn thin<R: Rng>(mut v: Vec<Vertex>, rng: &mut R) -> Vec<Vertex> {
    if v.len() > PROBE_SIDE {
        let keep = sample(rng, v.len(), PROBE_SIDE).into_vec();
        let mut keep: Vec<usize> = keep;
        keep.sort_unstable();
        v = keep.into_iter().map(|i| v[i]).collect();
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialFamily {
    Uniform,
    Interval,
    PartAligned,
    SetAligned,
}

impl TrialFamily {
    pub const ALL: [TrialFamily; 4] = [
        TrialFamily::Uniform,
        TrialFamily::Interval,
        TrialFamily::PartAligned,
        TrialFamily::SetAligned,
    ];
}

impl fmt::Display for TrialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialFamily::Uniform => "uniform",
            TrialFamily::Interval => "interval",
            TrialFamily::PartAligned => "part_aligned",
            TrialFamily::SetAligned => "set_aligned",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub index: usize,
    pub family: TrialFamily,
    pub partition: Bipartition,
    pub result: Certification,
}

impl TrialOutcome {
    pub fn certified(&self) -> bool {
        matches!(self.result, Certification::Certified { .. })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SampledReport {
    pub r: usize,
    pub trials: Vec<TrialOutcome>,
}

impl SampledReport {
    pub fn certified_count(&self) -> usize {
        self.trials.iter().filter(|t| t.certified()).count()
    }
}

/// Seeded balanced bipartition of the given family.
pub fn sample_partition(c: &Carousel, family: TrialFamily, rng: &mut ChaCha8Rng) -> Bipartition {
    let n = c.vertex_count();
    let k = c.k();
    loop {
        let p = match family {
            TrialFamily::Uniform => {
                let mut p = Bipartition::all_z(n);
                for v in 0..n {
                    if rng.gen::<bool>() {
                        p.set_side(v, true);
                    }
                }
                p
            }
            TrialFamily::Interval => {
                let len = rng.gen_range(n.div_ceil(3)..=2 * n / 3);
                let start = rng.gen_range(0..n);
                Bipartition::from_y(n, (0..len).map(|d| (start + d) % n)).expect("ids in range")
            }
            TrialFamily::PartAligned => {
                let mut p = Bipartition::all_z(n);
                let bars: &[bool] = match c.flavor() {
                    CarouselFlavor::Even => &[false],
                    CarouselFlavor::Odd => &[false, true],
                };
                for i in 1..=c.n() {
                    for j in 1..=c.s() as usize {
                        for &b in bars {
                            if rng.gen::<bool>() {
                                for v in c.part_ids(PartRef::new(i, j, b)).expect("valid part") {
                                    p.set_side(v, true);
                                }
                            }
                        }
                    }
                }
                p
            }
            TrialFamily::SetAligned => {
                let mut p = Bipartition::all_z(n);
                let sets = rng.gen_range(0..c.n());
                let first = rng.gen_range(1..=c.n());
                for d in 0..sets {
                    for v in c.set_ids((first - 1 + d) % c.n() + 1) {
                        p.set_side(v, true);
                    }
                }
                let extra = (first - 1 + sets) % c.n() + 1;
                let len = rng.gen_range(0..=k);
                let from_top = rng.gen::<bool>();
                let ids: Vec<Vertex> = c.set_ids(extra).collect();
                let chosen = if from_top { &ids[..len] } else { &ids[k - len..] };
                for &v in chosen {
                    p.set_side(v, true);
                }
                p
            }
        };
        if is_balanced(c, &p) {
            return p;
        }
    }
}

/// Certifies `trials` seeded balanced bipartitions, cycling through the
/// trial families. Trials run in parallel; the report is ordered by trial
/// index and depends only on `seed`.
pub fn sampled_certificate(c: &Carousel, r: usize, trials: usize, seed: u64) -> Result<SampledReport, CertifyError> {
    check_r(r, 1)?;
    let outcomes: Result<Vec<TrialOutcome>, CertifyError> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let family = TrialFamily::ALL[index % TrialFamily::ALL.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let partition = sample_partition(c, family, &mut rng);
            let result = certify_partition(c, &partition, r, rng.gen())?;
            Ok(TrialOutcome {
                index,
                family,
                partition,
                result,
            })
        })
        .collect();
    Ok(SampledReport { r, trials: outcomes? })
}
