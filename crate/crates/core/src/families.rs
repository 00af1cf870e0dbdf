//! Graph families built from carousels, and brute-force verifiers for the
//! properties they are meant to have.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::carousel::{Carousel, CarouselError, CarouselFlavor, CarouselSpec, IntraSetPolicy, LongRangePolicy};
use crate::graph::{Adjacency, ExplicitGraph, Vertex};
use crate::triples::TripleKind;

pub const DEFAULT_DILWORTH_CAP: usize = 2000;
pub const DEFAULT_HOLE_CAP: usize = 24;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Carousel(#[from] CarouselError),
    #[error("not a partition of the vertex set: {0}")]
    NotPartition(String),
    #[error("{n} vertices exceed the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
}

/// Even carousel on four sets with regular crossings at the first three
/// gaps and an expanding crossing closing the cycle, where `X₁ ∪ X₃` is a
/// clique and `X₂ ∪ X₄` is stable.
#[derive(Debug, Clone)]
pub struct SplitCarousel {
    inner: Carousel,
}

impl SplitCarousel {
    pub fn carousel(&self) -> &Carousel {
        &self.inner
    }

    fn in_clique_side(&self, v: Vertex) -> bool {
        // Sets X₁ and X₃ have indices 0 and 2.
        (v / self.inner.k()).is_multiple_of(2)
    }

    pub fn clique_side(&self) -> Vec<Vertex> {
        (0..self.vertex_count()).filter(|&v| self.in_clique_side(v)).collect()
    }

    pub fn stable_side(&self) -> Vec<Vertex> {
        (0..self.vertex_count()).filter(|&v| !self.in_clique_side(v)).collect()
    }
}

impl Adjacency for SplitCarousel {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        if u == v {
            return false;
        }
        match (self.in_clique_side(u), self.in_clique_side(v)) {
            (true, true) => true,
            (false, false) => false,
            _ => self.inner.adjacent(u, v),
        }
    }
}

pub fn split_spec(s: u32) -> CarouselSpec {
    use TripleKind::*;
    CarouselSpec::new(
        4,
        s,
        CarouselFlavor::Even,
        vec![RegularCrossing, RegularCrossing, RegularCrossing, ExpandingCrossing],
    )
}

/// The split graph of Dilworth number 2 on `4(2ˢ − 1)` vertices.
pub fn build_split_dilworth2(s: u32) -> Result<SplitCarousel, FamilyError> {
    Ok(SplitCarousel {
        inner: Carousel::build(split_spec(s))?,
    })
}

/// Ordered parts `X₁..Xₙ` partitioning the vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPartition {
    parts: Vec<Vec<Vertex>>,
}

impl RingPartition {
    pub fn new(parts: Vec<Vec<Vertex>>) -> Self {
        RingPartition { parts }
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    /// Part index of every vertex, or an error if the parts do not
    /// partition `0..n` or there are fewer than three.
    fn index(&self, n: usize) -> Result<Vec<usize>, FamilyError> {
        if self.parts.len() < 3 {
            return Err(FamilyError::NotPartition(format!("{} parts, need at least 3", self.parts.len())));
        }
        let mut owner = vec![usize::MAX; n];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                if v >= n {
                    return Err(FamilyError::NotPartition(format!("vertex {v} out of range")));
                }
                if owner[v] != usize::MAX {
                    return Err(FamilyError::NotPartition(format!("vertex {v} in two parts")));
                }
                owner[v] = i;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(FamilyError::NotPartition(format!("vertex {v} in no part")));
        }
        Ok(owner)
    }
}

pub fn ring_spec(n: usize, s: u32) -> CarouselSpec {
    let flavor = if n.is_multiple_of(2) { CarouselFlavor::Even } else { CarouselFlavor::Odd };
    let mut kinds = vec![TripleKind::RegularCrossing; n.saturating_sub(1)];
    kinds.push(match flavor {
        CarouselFlavor::Even => TripleKind::ExpandingCrossing,
        CarouselFlavor::Odd => TripleKind::SkewExpandingCrossing,
    });
    let mut spec = CarouselSpec::new(n, s, flavor, kinds);
    spec.intra_set = IntraSetPolicy::Clique;
    spec.long_range = LongRangePolicy::Empty;
    spec
}

/// Carousel whose sets are cliques and whose gaps are all crossings; even
/// for even `n`, odd for odd `n`.
pub fn build_ring(n: usize, s: u32) -> Result<(Carousel, RingPartition), FamilyError> {
    let c = Carousel::build(ring_spec(n, s))?;
    let parts = (1..=n).map(|i| c.set_ids(i).collect()).collect();
    Ok((c, RingPartition::new(parts)))
}

fn check_split_sides(n: usize, k: &[Vertex], s: &[Vertex]) -> Result<(), FamilyError> {
    let mut seen = FixedBitSet::with_capacity(n);
    for &v in k.iter().chain(s) {
        if v >= n {
            return Err(FamilyError::NotPartition(format!("vertex {v} out of range")));
        }
        if seen.put(v) {
            return Err(FamilyError::NotPartition(format!("vertex {v} listed twice")));
        }
    }
    if seen.count_ones(..) != n {
        return Err(FamilyError::NotPartition("sides do not cover every vertex".into()));
    }
    Ok(())
}

/// True iff `k` is a clique and `s` is stable.
pub fn is_split<G: Adjacency + ?Sized>(g: &G, k: &[Vertex], s: &[Vertex]) -> Result<bool, FamilyError> {
    check_split_sides(g.vertex_count(), k, s)?;
    let clique = k.iter().enumerate().all(|(a, &u)| k[a + 1..].iter().all(|&v| g.adjacent(u, v)));
    let stable = s.iter().enumerate().all(|(a, &u)| s[a + 1..].iter().all(|&v| !g.adjacent(u, v)));
    Ok(clique && stable)
}

/// `N(x) ⊆ N[y]`.
pub fn vicinal_le(g: &ExplicitGraph, x: Vertex, y: Vertex) -> bool {
    g.neighbors(x).ones().all(|w| w == y || g.neighbors(y).contains(w))
}

/// Maximum number of pairwise incomparable vertices under `N(x) ⊆ N[y]`.
///
/// The relation is a preorder. Its width is the number of equivalence
/// classes minus a maximum matching in the strict-order bipartite graph
/// (minimum chain cover).
pub fn dilworth_number(g: &ExplicitGraph, cap: usize) -> Result<usize, FamilyError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(FamilyError::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(0);
    }
    let le: Vec<FixedBitSet> = (0..n)
        .map(|x| {
            let mut row = FixedBitSet::with_capacity(n);
            for y in 0..n {
                if x == y || vicinal_le(g, x, y) {
                    row.insert(y);
                }
            }
            row
        })
        .collect();
    let mut class = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if class[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for y in x..n {
            if le[x].contains(y) && le[y].contains(x) {
                class[y] = id;
            }
        }
    }
    let m = reps.len();
    let succ: Vec<Vec<usize>> = reps
        .iter()
        .map(|&x| le[x].ones().map(|y| class[y]).filter(|&c| c != class[x]).collect::<Vec<_>>())
        .map(|mut v| {
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    Ok(m - hopcroft_karp(m, m, &succ))
}

/// Maximum matching size in a bipartite graph with `left` and `right`
/// vertex counts and adjacency lists from the left.
fn hopcroft_karp(left: usize, right: usize, adj: &[Vec<usize>]) -> usize {
    const NIL: usize = usize::MAX;
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut total = 0;
    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v] {
                    NIL => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return total;
        }
        fn augment(u: usize, adj: &[Vec<usize>], ml: &mut [usize], mr: &mut [usize], dist: &mut [usize]) -> bool {
            for &v in &adj[u] {
                let w = mr[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, ml, mr, dist)) {
                    ml[u] = v;
                    mr[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist) {
                total += 1;
            }
        }
    }
}

/// Which of the ring conditions hold.
///
/// Nesting compares closed neighbourhoods `N[x] ⊆ N[x']`: inside a clique
/// of two or more vertices open neighbourhoods are never nested, since
/// each vertex lies in the other's neighbourhood but not its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingReport {
    pub cliques: bool,
    pub nested: bool,
    pub confined: bool,
    pub dominated: bool,
}

impl RingReport {
    pub fn holds(&self) -> bool {
        self.cliques && self.nested && self.confined && self.dominated
    }
}

pub fn ring_report(g: &ExplicitGraph, p: &RingPartition) -> Result<RingReport, FamilyError> {
    let n = g.vertex_count();
    let owner = p.index(n)?;
    let parts = p.parts();
    let count = parts.len();
    let closed = |x: Vertex| {
        let mut s = g.neighbors(x).clone();
        s.insert(x);
        s
    };
    let cliques = parts
        .iter()
        .all(|part| part.iter().all(|&u| part.iter().all(|&v| u == v || g.neighbors(u).contains(v))));
    let nested = parts.iter().all(|part| {
        part.iter().all(|&x| {
            part.iter().all(|&y| {
                let (nx, ny) = (closed(x), closed(y));
                nx.is_subset(&ny) || ny.is_subset(&nx)
            })
        })
    });
    let confined = (0..n).all(|x| {
        let i = owner[x];
        g.neighbors(x).ones().all(|w| {
            let d = (owner[w] + count - i) % count;
            d == 0 || d == 1 || d == count - 1
        })
    });
    let dominated = (0..count).all(|i| {
        let prev = &parts[(i + count - 1) % count];
        let next = &parts[(i + 1) % count];
        parts[i]
            .iter()
            .any(|&x| prev.iter().chain(next).all(|&w| w == x || g.neighbors(x).contains(w)))
    });
    Ok(RingReport {
        cliques,
        nested,
        confined,
        dominated,
    })
}

/// The parts are cliques and all three ring conditions hold.
pub fn is_ring(g: &ExplicitGraph, p: &RingPartition) -> Result<bool, FamilyError> {
    Ok(ring_report(g, p)?.holds())
}

/// Returns an even hole (chordless cycle of even length at least 4), if
/// any, as a vertex sequence.
///
/// Grows induced paths from each start vertex through larger vertices only
/// and closes them when the last vertex sees the start.
pub fn find_even_hole(g: &ExplicitGraph, cap: usize) -> Result<Option<Vec<Vertex>>, FamilyError> {
    let n = g.vertex_count();
    if n > cap || n > 64 {
        return Err(FamilyError::CapExceeded { n, cap: cap.min(64) });
    }
    let nb: Vec<u64> = (0..n).map(|v| g.neighbors(v).ones().fold(0u64, |m, w| m | (1 << w))).collect();

    fn extend(nb: &[u64], path: &mut Vec<Vertex>, inner: u64, allowed: u64) -> bool {
        let start = path[0];
        let last = *path.last().unwrap();
        let mut cands = nb[last] & allowed & !inner;
        while cands != 0 {
            let w = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            // `inner` holds the path apart from its start and last vertex.
            if nb[w] & inner != 0 {
                continue;
            }
            if path.len() >= 2 && nb[w] & (1 << start) != 0 {
                if (path.len() + 1).is_multiple_of(2) && path.len() + 1 >= 4 {
                    path.push(w);
                    return true;
                }
                continue;
            }
            path.push(w);
            let next_inner = if path.len() > 2 { inner | (1 << last) } else { inner };
            if extend(nb, path, next_inner, allowed & !(1 << w)) {
                return true;
            }
            path.pop();
        }
        false
    }

    for v in 0..n {
        let allowed = if v + 1 >= 64 { 0 } else { !0u64 << (v + 1) } & mask(n);
        let mut path = vec![v];
        if extend(&nb, &mut path, 0, allowed) {
            return Ok(Some(path));
        }
    }
    Ok(None)
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

pub fn is_even_hole_free(g: &ExplicitGraph, cap: usize) -> Result<bool, FamilyError> {
    Ok(find_even_hole(g, cap)?.is_none())
}
