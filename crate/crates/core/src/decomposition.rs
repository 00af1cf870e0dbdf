//! Cubic-tree decompositions, their widths, exact rank-width by exhaustive
//! search, and the exhaustive balanced-partition lower bound.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::rank_of_word_rows;
use crate::graph::{is_balanced_sizes, partition_rank, Adjacency, Bipartition, GraphError, Vertex};

pub const DEFAULT_RANKWIDTH_CAP: usize = 10;
pub const DEFAULT_CERTIFICATE_CAP: usize = 24;

/// Above this many vertices the exact search stops tabulating cut ranks.
const RANK_TABLE_LIMIT: usize = 22;
/// Number of leaves placed before the exact search fans out in parallel.
const PREFIX_LEAVES: usize = 6;

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("{n} vertices exceed the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("graph on {0} vertices has no balanced bipartition")]
    TooSmall(usize),
    #[error("({0}, {1}) is not an edge of the tree")]
    ForeignEdge(usize, usize),
    #[error("invalid tree decomposition: {0}")]
    Invalid(String),
    #[error("tree has {leaves} leaves but the graph has {vertices} vertices")]
    LeafMismatch { leaves: usize, vertices: usize },
    #[error("tree parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An undirected tree edge, stored with the smaller node first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeEdge(pub usize, pub usize);

impl TreeEdge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            TreeEdge(a, b)
        } else {
            TreeEdge(b, a)
        }
    }
}

/// A cubic tree whose leaves are in bijection with the vertices of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    adj: Vec<Vec<usize>>,
    leaf_vertex: Vec<Option<Vertex>>,
    vertex_leaf: Vec<usize>,
}

impl TreeDecomposition {
    /// Checks that the edges form a tree whose internal nodes have degree 3
    /// and that `leaves` maps every degree-1 node to a distinct vertex
    /// `0..L`.
    pub fn new(node_count: usize, edges: &[(usize, usize)], leaves: &[(usize, Vertex)]) -> Result<Self, DecompositionError> {
        let invalid = |m: String| DecompositionError::Invalid(m);
        if node_count < 2 {
            return Err(invalid(format!("needs at least 2 nodes, got {node_count}")));
        }
        if edges.len() != node_count - 1 {
            return Err(invalid(format!("{} edges on {node_count} nodes", edges.len())));
        }
        let mut adj = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a >= node_count || b >= node_count || a == b {
                return Err(invalid(format!("bad edge ({a}, {b})")));
            }
            if adj[a].contains(&b) {
                return Err(invalid(format!("repeated edge ({a}, {b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; node_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("tree is disconnected".into()));
        }
        let mut leaf_vertex = vec![None; node_count];
        for &(node, v) in leaves {
            if node >= node_count {
                return Err(invalid(format!("leaf node {node} out of range")));
            }
            if leaf_vertex[node].replace(v).is_some() {
                return Err(invalid(format!("node {node} labelled twice")));
            }
        }
        for (x, nbrs) in adj.iter().enumerate() {
            match (nbrs.len(), leaf_vertex[x]) {
                (1, Some(_)) | (3, None) => {}
                (1, None) => return Err(invalid(format!("leaf node {x} has no vertex"))),
                (d, Some(_)) => return Err(invalid(format!("labelled node {x} has degree {d}"))),
                (d, None) => return Err(invalid(format!("internal node {x} has degree {d}"))),
            }
        }
        let mut vertex_leaf = vec![usize::MAX; leaves.len()];
        for &(node, v) in leaves {
            if v >= leaves.len() || vertex_leaf[v] != usize::MAX {
                return Err(invalid(format!("leaf labels are not a bijection onto 0..{}", leaves.len())));
            }
            vertex_leaf[v] = node;
        }
        Ok(TreeDecomposition {
            adj,
            leaf_vertex,
            vertex_leaf,
        })
    }

    /// Caterpillar whose leaves, read along the spine, are `order`.
    pub fn caterpillar(order: &[Vertex]) -> Result<Self, DecompositionError> {
        let n = order.len();
        if n < 2 {
            return Err(DecompositionError::Invalid("caterpillar needs at least 2 leaves".into()));
        }
        if n == 2 {
            return Self::new(2, &[(0, 1)], &[(0, order[0]), (1, order[1])]);
        }
        // Spine nodes 0..n-2, leaf for order[i] is node n-2+i.
        let spine = n - 2;
        let mut edges: Vec<(usize, usize)> = (1..spine).map(|i| (i - 1, i)).collect();
        let attach = |i: usize| -> usize {
            match i {
                0 | 1 => 0,
                _ if i >= n - 2 => spine - 1,
                _ => i - 1,
            }
        };
        let mut leaves = Vec::with_capacity(n);
        for (i, &v) in order.iter().enumerate() {
            edges.push((attach(i), spine + i));
            leaves.push((spine + i, v));
        }
        Self::new(2 * n - 2, &edges, &leaves)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_leaf.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn edges(&self) -> Vec<TreeEdge> {
        let mut out: Vec<TreeEdge> = (0..self.adj.len())
            .flat_map(|a| self.adj[a].iter().filter(move |&&b| a < b).map(move |&b| TreeEdge(a, b)))
            .collect();
        out.sort();
        out
    }

    pub fn has_edge(&self, e: TreeEdge) -> bool {
        e.0 < self.adj.len() && self.adj[e.0].contains(&e.1)
    }

    pub fn leaf_of(&self, v: Vertex) -> usize {
        self.vertex_leaf[v]
    }

    pub fn vertex_at(&self, node: usize) -> Option<Vertex> {
        self.leaf_vertex[node]
    }

    /// The partition of `V(G)` induced by deleting `e`; `Y` holds the leaves
    /// on `e.0`'s side.
    pub fn side(&self, e: TreeEdge) -> Result<Bipartition, DecompositionError> {
        if !self.has_edge(e) {
            return Err(DecompositionError::ForeignEdge(e.0, e.1));
        }
        let mut p = Bipartition::all_z(self.vertex_count());
        let mut stack = vec![(e.0, e.1)];
        while let Some((x, from)) = stack.pop() {
            if let Some(v) = self.leaf_vertex[x] {
                p.set_side(v, true);
            }
            for &y in &self.adj[x] {
                if y != from {
                    stack.push((y, x));
                }
            }
        }
        Ok(p)
    }

    fn check_graph<G: Adjacency + ?Sized>(&self, g: &G) -> Result<(), DecompositionError> {
        if self.vertex_count() != g.vertex_count() {
            return Err(DecompositionError::LeafMismatch {
                leaves: self.vertex_count(),
                vertices: g.vertex_count(),
            });
        }
        Ok(())
    }

    /// Parent-array text: a `tree <nodes> <vertices>` header, then one
    /// `<node> <parent> <vertex>` line per node with `-` for "none". Node 0
    /// is the root; vertices are written 1-based.
    pub fn to_text(&self) -> String {
        let mut parent = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        let mut out = format!("tree {} {}\n", self.adj.len(), self.vertex_count());
        for (x, parent) in parent.iter().enumerate() {
            let p = parent.map_or("-".to_string(), |p| p.to_string());
            let v = self.leaf_vertex[x].map_or("-".to_string(), |v| (v + 1).to_string());
            writeln!(out, "{x} {p} {v}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, DecompositionError> {
        let perr = |m: String| DecompositionError::Parse(m);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| perr("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (nodes, vertices) = match fields.as_slice() {
            ["tree", a, b] => (
                a.parse::<usize>().map_err(|_| perr(format!("bad node count `{a}`")))?,
                b.parse::<usize>().map_err(|_| perr(format!("bad vertex count `{b}`")))?,
            ),
            _ => return Err(perr(format!("bad header `{header}`"))),
        };
        let mut edges = Vec::new();
        let mut leaves = Vec::new();
        let mut seen = vec![false; nodes];
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(perr(format!("bad line `{line}`")));
            }
            let node: usize = f[0].parse().map_err(|_| perr(format!("bad node `{}`", f[0])))?;
            if node >= nodes || std::mem::replace(&mut seen[node], true) {
                return Err(perr(format!("node {node} out of range or repeated")));
            }
            if f[1] != "-" {
                let p: usize = f[1].parse().map_err(|_| perr(format!("bad parent `{}`", f[1])))?;
                edges.push((p, node));
            }
            if f[2] != "-" {
                let v: usize = f[2].parse().map_err(|_| perr(format!("bad vertex `{}`", f[2])))?;
                if v == 0 {
                    return Err(perr("vertices are 1-based".into()));
                }
                leaves.push((node, v - 1));
            }
        }
        if leaves.len() != vertices {
            return Err(perr(format!("header promises {vertices} vertices, found {}", leaves.len())));
        }
        Self::new(nodes, &edges, &leaves)
    }
}

/// Rank of the cut obtained by deleting `e`.
pub fn edge_width<G: Adjacency + ?Sized>(g: &G, t: &TreeDecomposition, e: TreeEdge) -> Result<usize, DecompositionError> {
    t.check_graph(g)?;
    Ok(partition_rank(g, &t.side(e)?)?)
}

/// Maximum edge width over the tree.
pub fn width<G: Adjacency + ?Sized>(g: &G, t: &TreeDecomposition) -> Result<usize, DecompositionError> {
    t.check_graph(g)?;
    let mut best = 0;
    for e in t.edges() {
        best = best.max(partition_rank(g, &t.side(e)?)?);
    }
    Ok(best)
}

/// An edge whose induced partition is balanced.
///
/// Walks from the root along the edge whose far side holds more than two
/// thirds of the leaves; such a walk cannot end in a sink, so it meets a
/// balanced edge.
pub fn balanced_edge<G: Adjacency + ?Sized>(g: &G, t: &TreeDecomposition) -> Result<TreeEdge, DecompositionError> {
    t.check_graph(g)?;
    let n = t.vertex_count();
    if n < 2 {
        return Err(DecompositionError::TooSmall(n));
    }
    let nodes = t.node_count();
    let mut parent = vec![usize::MAX; nodes];
    let mut order = Vec::with_capacity(nodes);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in t.neighbors(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut below = vec![0usize; nodes];
    for &x in order.iter().rev() {
        if t.vertex_at(x).is_some() {
            below[x] += 1;
        }
        if x != 0 {
            below[parent[x]] += below[x];
        }
    }
    let mut cur = 0;
    let mut prev = usize::MAX;
    for _ in 0..nodes {
        let mut next = None;
        for &y in t.neighbors(cur) {
            let far = if parent[y] == cur && y != 0 { below[y] } else { n - below[cur] };
            if is_balanced_sizes(n, far) {
                return Ok(TreeEdge::new(cur, y));
            }
            if 3 * far > 2 * n {
                debug_assert_ne!(y, prev);
                next = Some(y);
            }
        }
        prev = cur;
        cur = next.expect("an all-unbalanced tree would have a sink");
    }
    unreachable!("orientation walk revisited a node")
}

/// A uniformly chosen leaf-insertion tree on `n ≥ 2` leaves with shuffled
/// vertex labels.
pub fn random_cubic_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TreeDecomposition {
    assert!(n >= 2);
    let mut edges = vec![(0usize, 1usize)];
    let mut leaf_nodes = vec![0usize, 1];
    let mut nodes = 2;
    for _ in 2..n {
        let e = rng.gen_range(0..edges.len());
        let (a, b) = edges[e];
        let (c, leaf) = (nodes, nodes + 1);
        nodes += 2;
        edges[e] = (a, c);
        edges.push((c, b));
        edges.push((c, leaf));
        leaf_nodes.push(leaf);
    }
    let mut labels: Vec<Vertex> = (0..n).collect();
    labels.shuffle(rng);
    let leaves: Vec<(usize, Vertex)> = leaf_nodes.into_iter().zip(labels).collect();
    TreeDecomposition::new(nodes, &edges, &leaves).expect("leaf insertion yields a cubic tree")
}

fn adjacency_masks<G: Adjacency + ?Sized>(g: &G) -> Vec<u64> {
    let n = g.vertex_count();
    (0..n)
        .map(|u| (0..n).filter(|&v| v != u && g.adjacent(u, v)).fold(0u64, |m, v| m | (1 << v)))
        .collect()
}

#[inline]
fn cut_rank_masks(adj: &[u64], all: u64, side: u64) -> usize {
    let other = all & !side;
    let mut rows = [0u64; 64];
    let mut len = 0;
    let mut s = side;
    while s != 0 {
        let u = s.trailing_zeros() as usize;
        s &= s - 1;
        rows[len] = adj[u] & other;
        len += 1;
    }
    rank_of_word_rows(&mut rows[..len])
}

/// Tree under construction: edges `(a, b, leaves on a's side)` where leaf
/// `v` is bit `v`.
#[derive(Clone)]
struct Partial {
    edges: Vec<(usize, usize, u64)>,
    leaf_nodes: Vec<usize>,
    nodes: usize,
    width: usize,
}

struct ExactSearch<'a> {
    n: usize,
    adj: &'a [u64],
    table: Option<Vec<Vec<u8>>>,
    global: AtomicUsize,
}

impl ExactSearch<'_> {
    fn rank(&self, leaves: usize, side: u64) -> usize {
        match &self.table {
            Some(t) => t[leaves][side as usize] as usize,
            None => cut_rank_masks(self.adj, (1u64 << leaves) - 1, side),
        }
    }

    /// Subdivides edge `e` of a tree on leaves `0..t` with a pendant leaf `t`.
    fn insert(&self, p: &Partial, e: usize) -> Partial {
        let t = p.leaf_nodes.len();
        let vb = 1u64 << t;
        let (a, b, ma) = p.edges[e];
        let (c, leaf) = (p.nodes, p.nodes + 1);
        let mut edges = Vec::with_capacity(p.edges.len() + 2);
        for (idx, &(x, y, mx)) in p.edges.iter().enumerate() {
            if idx == e {
                edges.push((a, c, ma));
            } else if mx & !ma == 0 || mx & ma == 0 {
                // x's side lies on one side of e, so e and the new leaf are on y's side.
                edges.push((x, y, mx));
            } else {
                edges.push((x, y, mx | vb));
            }
        }
        edges.push((c, b, ma | vb));
        edges.push((leaf, c, vb));
        let width = edges.iter().fold(p.width, |w, &(_, _, m)| w.max(self.rank(t + 1, m)));
        let mut leaf_nodes = p.leaf_nodes.clone();
        leaf_nodes.push(leaf);
        Partial {
            edges,
            leaf_nodes,
            nodes: p.nodes + 2,
            width,
        }
    }

    /// Depth-first search for the first minimum-width completion of `p`.
    fn dfs(&self, p: &Partial, best: &mut Option<Partial>) {
        if p.leaf_nodes.len() == self.n {
            if best.as_ref().is_none_or(|b| p.width < b.width) {
                self.global.fetch_min(p.width, Ordering::Relaxed);
                *best = Some(p.clone());
            }
            return;
        }
        for e in 0..p.edges.len() {
            let child = self.insert(p, e);
            if child.width > self.global.load(Ordering::Relaxed) {
                continue;
            }
            if best.as_ref().is_some_and(|b| child.width >= b.width) {
                continue;
            }
            self.dfs(&child, best);
        }
    }
}

/// Exact rank-width with a witnessing tree.
///
/// Enumerates every labelled cubic tree by leaf insertion, pruning partial
/// trees whose width already exceeds the best known one (inserting a leaf
/// never lowers the width). Graphs with at most one vertex have width 0 and
/// no tree. The result does not depend on the number of threads.
pub fn rankwidth_exact<G: Adjacency + ?Sized>(g: &G, cap: usize) -> Result<(usize, Option<TreeDecomposition>), DecompositionError> {
    let n = g.vertex_count();
    if n > cap || n > 63 {
        return Err(DecompositionError::CapExceeded { n, cap: cap.min(63) });
    }
    if n <= 1 {
        return Ok((0, None));
    }
    let adj = adjacency_masks(g);
    let table = (n <= RANK_TABLE_LIMIT).then(|| {
        (0..=n)
            .map(|t| {
                let all = (1u64 << t) - 1;
                (0..1u64 << t).into_par_iter().map(|side| cut_rank_masks(&adj, all, side) as u8).collect()
            })
            .collect()
    });
    let search = ExactSearch {
        n,
        adj: &adj,
        table,
        global: AtomicUsize::new(usize::MAX),
    };
    let caterpillar = TreeDecomposition::caterpillar(&(0..n).collect::<Vec<_>>())?;
    search.global.store(width(g, &caterpillar)?, Ordering::Relaxed);

    let start = Partial {
        edges: vec![(0, 1, 1)],
        leaf_nodes: vec![0, 1],
        nodes: 2,
        width: search.rank(2, 1),
    };
    let mut prefixes = vec![start];
    while prefixes[0].leaf_nodes.len() < PREFIX_LEAVES.min(n) {
        prefixes = prefixes
            .iter()
            .flat_map(|p| (0..p.edges.len()).map(|e| search.insert(p, e)).collect::<Vec<_>>())
            .collect();
    }
    let winner = prefixes
        .par_iter()
        .enumerate()
        .filter_map(|(idx, p)| {
            if p.width > search.global.load(Ordering::Relaxed) {
                return None;
            }
            let mut best = None;
            search.dfs(p, &mut best);
            best.map(|b| (b.width, idx, b))
        })
        .min_by_key(|(w, idx, _)| (*w, *idx))
        .map(|(_, _, b)| b)
        .expect("the caterpillar bound is attained by some tree");

    let edges: Vec<(usize, usize)> = winner.edges.iter().map(|&(a, b, _)| (a, b)).collect();
    let leaves: Vec<(usize, Vertex)> = winner.leaf_nodes.iter().enumerate().map(|(v, &node)| (node, v)).collect();
    let tree = TreeDecomposition::new(winner.nodes, &edges, &leaves)?;
    Ok((winner.width, Some(tree)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    /// Minimum cut rank over the balanced bipartitions examined.
    pub min_balanced_rank: usize,
    /// The first examined balanced bipartition attaining the minimum.
    pub witness_partition: Bipartition,
    /// Bipartitions enumerated, balanced or not.
    pub partitions_examined: u64,
    pub balanced_examined: u64,
    /// Set when the scan stopped at a balanced bipartition of rank below
    /// the requested threshold.
    pub early_exit: bool,
}

/// Minimum rank over all balanced bipartitions, a lower bound on the
/// rank-width. Vertex 0 is pinned to `Y`, so `2^(N−1)` bipartitions are
/// scanned. With `r_max`, the scan stops at the first balanced bipartition
/// of rank below `r_max`.
pub fn certify_lower_bound<G: Adjacency + ?Sized>(
    g: &G,
    r_max: Option<usize>,
    cap: usize,
) -> Result<CertificateReport, DecompositionError> {
    let n = g.vertex_count();
    if n > cap || n > 63 {
        return Err(DecompositionError::CapExceeded { n, cap: cap.min(63) });
    }
    if n < 2 {
        return Err(DecompositionError::TooSmall(n));
    }
    let adj = adjacency_masks(g);
    let all = (1u64 << n) - 1;
    let total = 1u64 << (n - 1);
    let eval = |m: u64| -> Option<usize> {
        let side = 1 | (m << 1);
        is_balanced_sizes(n, side.count_ones() as usize).then(|| cut_rank_masks(&adj, all, side))
    };

    let (best, examined, balanced, early_exit) = match r_max {
        Some(limit) => {
            let mut best: Option<(usize, u64)> = None;
            let mut balanced = 0;
            let mut examined = 0;
            let mut early = false;
            for m in 0..total {
                examined += 1;
                if let Some(r) = eval(m) {
                    balanced += 1;
                    if best.is_none_or(|(b, _)| r < b) {
                        best = Some((r, m));
                    }
                    if r < limit {
                        early = true;
                        break;
                    }
                }
            }
            (best, examined, balanced, early)
        }
        None => {
            const BLOCK: u64 = 1 << 12;
            let blocks = total.div_ceil(BLOCK);
            let (best, balanced) = (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut best: Option<(usize, u64)> = None;
                    let mut balanced = 0u64;
                    for m in b * BLOCK..((b + 1) * BLOCK).min(total) {
                        if let Some(r) = eval(m) {
                            balanced += 1;
                            if best.is_none_or(|x| (r, m) < x) {
                                best = Some((r, m));
                            }
                        }
                    }
                    (best, balanced)
                })
                .reduce(
                    || (None, 0),
                    |(a, ca), (b, cb)| {
                        let best = match (a, b) {
                            (Some(x), Some(y)) => Some(x.min(y)),
                            (x, None) => x,
                            (None, y) => y,
                        };
                        (best, ca + cb)
                    },
                );
            (best, total, balanced, false)
        }
    };
    let (rank, m) = best.expect("every graph on at least two vertices has a balanced bipartition");
    Ok(CertificateReport {
        min_balanced_rank: rank,
        witness_partition: Bipartition::from_mask(n, 1 | (m << 1)),
        partitions_examined: examined,
        balanced_examined: balanced,
        early_exit,
    })
}
