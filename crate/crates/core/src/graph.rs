//! Graphs as adjacency oracles, explicit neighbor-set graphs, bipartitions and
//! cut matrices.
//!
//! Vertices are flat `usize` ids `0..N` in memory. Text formats (DIMACS, DOT,
//! witness and partition files) print them 1-based.

use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::gf2::Gf2Matrix;

pub type Vertex = usize;

/// Default vertex cap for [`materialize`].
pub const DEFAULT_MATERIALIZE_CAP: usize = 50_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    OutOfRange { vertex: Vertex, n: usize },
    #[error("vertex {0} appears on both sides")]
    Overlap(Vertex),
    #[error("vertex {0} listed twice")]
    Duplicate(Vertex),
    #[error("partition covers {got} vertices, graph has {expected}")]
    PartitionSize { expected: usize, got: usize },
    #[error("graph has {n} vertices, above the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("graph6 cannot encode {0} vertices")]
    Graph6Size(usize),
    #[error("malformed graph6 input: {0}")]
    Graph6Parse(String),
    #[error("unknown export format `{0}`")]
    UnknownFormat(String),
}

/// A symmetric, irreflexive adjacency predicate on `0..vertex_count()`.
pub trait Adjacency: Send + Sync {
    fn vertex_count(&self) -> usize;

    /// Whether `u` and `v` are adjacent. Both must be in range; `u == v`
    /// is never adjacent.
    fn adjacent(&self, u: Vertex, v: Vertex) -> bool;
}

impl<G: Adjacency + ?Sized> Adjacency for &G {
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        (**self).adjacent(u, v)
    }
}

/// A graph with stored neighbor bit-sets.
#[derive(Clone, PartialEq, Eq)]
pub struct ExplicitGraph {
    neighbors: Vec<FixedBitSet>,
}

impl std::fmt::Debug for ExplicitGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExplicitGraph")
            .field("n", &self.vertex_count())
            .field("edges", &self.edges())
            .finish()
    }
}

impl ExplicitGraph {
    pub fn empty(n: usize) -> Self {
        ExplicitGraph {
            neighbors: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `uv`; loops are ignored.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        let n = self.vertex_count();
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::OutOfRange { vertex: w, n });
            }
        }
        if u != v {
            self.neighbors[u].insert(v);
            self.neighbors[v].insert(u);
        }
        Ok(())
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            g.neighbors[u].insert_range(..);
            g.neighbors[u].set(u, false);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("in range")
    }

    pub fn cycle(n: usize) -> Self {
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("in range")
    }

    pub fn neighbors(&self, v: Vertex) -> &FixedBitSet {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(|s| s.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        (0..self.vertex_count())
            .flat_map(|u| self.neighbors[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    /// Graph induced on `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[Vertex]) -> ExplicitGraph {
        let mut g = ExplicitGraph::empty(vertices.len());
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if self.adjacent(u, v) {
                    g.neighbors[a].insert(b);
                    g.neighbors[b].insert(a);
                }
            }
        }
        g
    }

    /// The same graph with vertex `v` renamed `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> ExplicitGraph {
        let mut g = ExplicitGraph::empty(self.vertex_count());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]).expect("permutation in range");
        }
        g
    }
}

impl Adjacency for ExplicitGraph {
    fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors[u].contains(v)
    }
}

/// A partition `(Y, Z)` of the vertex set, stored as the indicator of `Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    in_y: FixedBitSet,
}

impl std::fmt::Debug for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bipartition")
            .field("n", &self.len())
            .field("y", &self.y_count())
            .finish()
    }
}

impl Bipartition {
    /// All vertices in `Z`.
    pub fn all_z(n: usize) -> Self {
        Bipartition {
            in_y: FixedBitSet::with_capacity(n),
        }
    }

    pub fn all_y(n: usize) -> Self {
        let mut p = Self::all_z(n);
        p.in_y.insert_range(..);
        p
    }

    pub fn from_y(n: usize, y: impl IntoIterator<Item = Vertex>) -> Result<Self, GraphError> {
        let mut p = Self::all_z(n);
        for v in y {
            if v >= n {
                return Err(GraphError::OutOfRange { vertex: v, n });
            }
            p.in_y.insert(v);
        }
        Ok(p)
    }

    /// Partition on `n ≤ 64` vertices whose `Y` side is the bit mask `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut p = Self::all_z(n);
        for v in 0..n {
            if (mask >> v) & 1 == 1 {
                p.in_y.insert(v);
            }
        }
        p
    }

    pub fn from_indicator(indicator: FixedBitSet) -> Self {
        Bipartition { in_y: indicator }
    }

    pub fn indicator(&self) -> &FixedBitSet {
        &self.in_y
    }

    pub fn len(&self) -> usize {
        self.in_y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.in_y.is_empty()
    }

    #[inline]
    pub fn in_y(&self, v: Vertex) -> bool {
        self.in_y.contains(v)
    }

    pub fn set_side(&mut self, v: Vertex, in_y: bool) {
        self.in_y.set(v, in_y);
    }

    pub fn y_count(&self) -> usize {
        self.in_y.count_ones(..)
    }

    pub fn z_count(&self) -> usize {
        self.len() - self.y_count()
    }

    /// Number of `Y` vertices whose ids fall in `range`.
    pub fn y_count_in(&self, range: std::ops::Range<usize>) -> usize {
        self.in_y.count_ones(range)
    }

    pub fn y_vertices(&self) -> Vec<Vertex> {
        self.in_y.ones().collect()
    }

    pub fn z_vertices(&self) -> Vec<Vertex> {
        self.in_y.zeroes().collect()
    }

    /// The partition `(Z, Y)`.
    pub fn swapped(&self) -> Self {
        let mut in_y = self.in_y.clone();
        in_y.toggle_range(..);
        Bipartition { in_y }
    }

    fn check_graph<G: Adjacency + ?Sized>(&self, g: &G) -> Result<(), GraphError> {
        if self.len() != g.vertex_count() {
            return Err(GraphError::PartitionSize {
                expected: g.vertex_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

fn check_vertices(n: usize, side: &[Vertex], seen: &mut FixedBitSet) -> Result<(), GraphError> {
    for &v in side {
        if v >= n {
            return Err(GraphError::OutOfRange { vertex: v, n });
        }
        if seen.put(v) {
            return Err(GraphError::Duplicate(v));
        }
    }
    Ok(())
}

/// The matrix with rows indexed by `ys` and columns by `zs`, in the order
/// given, whose entry is 1 exactly when the two vertices are adjacent.
pub fn cut_matrix<G: Adjacency + ?Sized>(g: &G, ys: &[Vertex], zs: &[Vertex]) -> Result<Gf2Matrix, GraphError> {
    let n = g.vertex_count();
    let mut seen_y = FixedBitSet::with_capacity(n);
    check_vertices(n, ys, &mut seen_y)?;
    let mut seen_z = FixedBitSet::with_capacity(n);
    check_vertices(n, zs, &mut seen_z)?;
    if let Some(v) = seen_y.intersection(&seen_z).next() {
        return Err(GraphError::Overlap(v));
    }
    Ok(cut_matrix_unchecked(g, ys, zs))
}

pub(crate) fn cut_matrix_unchecked<G: Adjacency + ?Sized>(g: &G, ys: &[Vertex], zs: &[Vertex]) -> Gf2Matrix {
    Gf2Matrix::from_fn(ys.len(), zs.len(), |a, b| g.adjacent(ys[a], zs[b]))
}

/// `rk(Y, Z)`: the GF(2) rank of `M[Y, Z]` with both sides in ascending order.
pub fn partition_rank<G: Adjacency + ?Sized>(g: &G, p: &Bipartition) -> Result<usize, GraphError> {
    p.check_graph(g)?;
    Ok(cut_matrix_unchecked(g, &p.y_vertices(), &p.z_vertices()).rank())
}

/// `N/3 ≤ |Y| ≤ 2N/3`, both inclusive, in integers.
pub fn is_balanced_sizes(n: usize, y: usize) -> bool {
    let (n, y) = (n as u128, y as u128);
    y <= n && 3 * y >= n && 3 * y <= 2 * n
}

pub fn is_balanced<G: Adjacency + ?Sized>(g: &G, p: &Bipartition) -> bool {
    p.len() == g.vertex_count() && is_balanced_sizes(p.len(), p.y_count())
}

/// Evaluates the oracle on every pair and stores the result.
pub fn materialize<G: Adjacency + ?Sized>(g: &G, cap: usize) -> Result<ExplicitGraph, GraphError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(GraphError::CapExceeded { n, cap });
    }
    let mut out = ExplicitGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if g.adjacent(u, v) {
                out.neighbors[u].insert(v);
                out.neighbors[v].insert(u);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Graph6,
    Dimacs,
    Dot,
}

impl std::str::FromStr for ExportFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph6" | "g6" => Ok(ExportFormat::Graph6),
            "dimacs" => Ok(ExportFormat::Dimacs),
            "dot" => Ok(ExportFormat::Dot),
            other => Err(GraphError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn export(g: &ExplicitGraph, format: ExportFormat) -> Result<Vec<u8>, GraphError> {
    match format {
        ExportFormat::Graph6 => {
            let mut s = to_graph6(g)?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        ExportFormat::Dimacs => Ok(to_dimacs(g).into_bytes()),
        ExportFormat::Dot => Ok(to_dot(g).into_bytes()),
    }
}

const GRAPH6_MAX: usize = 68_719_476_735;

fn graph6_size_header(n: usize, out: &mut Vec<u8>) -> Result<(), GraphError> {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else if n <= GRAPH6_MAX {
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        return Err(GraphError::Graph6Size(n));
    }
    Ok(())
}

/// graph6 encoding without the optional `>>graph6<<` header.
///
/// Upper-triangle bits are listed column by column (`(0,1), (0,2), (1,2),
/// (0,3), …`), packed big-endian into 6-bit groups, each offset by 63.
pub fn to_graph6(g: &ExplicitGraph) -> Result<String, GraphError> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    graph6_size_header(n, &mut out)?;
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.adjacent(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 is printable ASCII"))
}

pub fn from_graph6(text: &str) -> Result<ExplicitGraph, GraphError> {
    let text = text.trim();
    let text = text.strip_prefix(">>graph6<<").unwrap_or(text);
    let bytes = text.as_bytes();
    if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
        return Err(GraphError::Graph6Parse("byte outside 63..=126".into()));
    }
    let six = |b: u8| (b - 63) as usize;
    let (n, body) = match bytes {
        [] => return Err(GraphError::Graph6Parse("empty input".into())),
        [126, 126, rest @ ..] if rest.len() >= 6 => (rest[..6].iter().fold(0, |n, &b| (n << 6) | six(b)), &rest[6..]),
        [126, rest @ ..] if rest.len() >= 3 => (rest[..3].iter().fold(0, |n, &b| (n << 6) | six(b)), &rest[3..]),
        [126, ..] => return Err(GraphError::Graph6Parse("truncated size header".into())),
        [b, rest @ ..] => (six(*b), rest),
    };
    let bits = n * n.saturating_sub(1) / 2;
    if body.len() != bits.div_ceil(6) {
        return Err(GraphError::Graph6Parse(format!(
            "expected {} data bytes for {n} vertices, found {}",
            bits.div_ceil(6),
            body.len()
        )));
    }
    let mut g = ExplicitGraph::empty(n);
    let mut idx = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = six(body[idx / 6]);
            if (byte >> (5 - idx % 6)) & 1 == 1 {
                g.neighbors[i].insert(j);
                g.neighbors[j].insert(i);
            }
            idx += 1;
        }
    }
    Ok(g)
}

pub fn to_dimacs(g: &ExplicitGraph) -> String {
    let edges = g.edges();
    let mut s = format!("p edge {} {}\n", g.vertex_count(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    s
}

pub fn to_dot(g: &ExplicitGraph) -> String {
    let mut s = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        let _ = writeln!(s, "  {};", v + 1);
    }
    for (u, v) in g.edges() {
        let _ = writeln!(s, "  {} -- {};", u + 1, v + 1);
    }
    s.push_str("}\n");
    s
}
