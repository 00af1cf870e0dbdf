//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every expected value is computed by an oracle local to this file
//! (naive elimination, brute-force enumeration, direct re-reading of the
//! adjacency predicate) rather than by the library routine under test.

#[path = "fixtures/triples.rs"]
mod triple_fixtures;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use carousel_core::carousel::{Carousel, CarouselFlavor, CarouselSpec, VertexRef};
use carousel_core::certify::{
    check_statement, min_order, order_inequality, propagation_statements, sampled_certificate, Certification,
    PropagationStatement, RankWitness, StatementOutcome,
};
use carousel_core::decomposition::{
    balanced_edge, certify_lower_bound, random_cubic_tree, rankwidth_exact, TreeDecomposition, TreeEdge,
    DEFAULT_CERTIFICATE_CAP, DEFAULT_RANKWIDTH_CAP,
};
use carousel_core::families::{
    build_ring, build_split_dilworth2, dilworth_number, is_even_hole_free, is_ring, is_split, DEFAULT_DILWORTH_CAP,
    DEFAULT_HOLE_CAP,
};
use carousel_core::gf2::{pattern, Gf2Matrix, PatternClass};
use carousel_core::graph::{
    is_balanced, materialize, partition_rank, Adjacency, Bipartition, ExplicitGraph, Vertex, DEFAULT_MATERIALIZE_CAP,
};
use carousel_core::triples::{skew_row_ranges, triple_matrix, validate_kind, TripleKind, DEFAULT_TRIPLE_MATRIX_CAP};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed(budget: Duration, f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let start = Instant::now();
    let mut v = f();
    let elapsed = start.elapsed();
    if elapsed > budget {
        v.pass = false;
        v.detail = format!("{}; exceeded {:?} budget", v.detail, budget);
    }
    (v, elapsed)
}

// ---------------------------------------------------------------- oracles

/// Row reduction on `Vec<bool>` rows, one entry at a time.
fn naive_rank(mut m: Vec<Vec<bool>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c]) else {
            continue;
        };
        m.swap(rank, pivot);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] {
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn matrix_rows(m: &Gf2Matrix) -> Vec<Vec<bool>> {
    (0..m.n_rows()).map(|i| (0..m.n_cols()).map(|j| m.get(i, j)).collect()).collect()
}

fn cut_rows<G: Adjacency + ?Sized>(g: &G, rows: &[Vertex], cols: &[Vertex]) -> Vec<Vec<bool>> {
    rows.iter().map(|&u| cols.iter().map(|&v| g.adjacent(u, v)).collect()).collect()
}

/// Rank of the cut between `ys` and its complement.
fn naive_cut_rank<G: Adjacency + ?Sized>(g: &G, in_y: &[bool]) -> usize {
    let ys: Vec<Vertex> = (0..in_y.len()).filter(|&v| in_y[v]).collect();
    let zs: Vec<Vertex> = (0..in_y.len()).filter(|&v| !in_y[v]).collect();
    if ys.is_empty() || zs.is_empty() {
        return 0;
    }
    naive_rank(cut_rows(g, &ys, &zs))
}

fn balanced_count(n: usize, y: usize) -> bool {
    3 * y >= n && 3 * y <= 2 * n
}

/// Entry forced by a pattern at `(i, j)`, written out from the class
/// definitions.
fn forced_entry(class: PatternClass, i: usize, j: usize) -> Option<bool> {
    match class {
        PatternClass::Diagonal => Some(i == j),
        PatternClass::Antidiagonal => Some(i != j),
        PatternClass::Triangular => Some(i >= j),
        PatternClass::NearTriangular if i > j => Some(true),
        PatternClass::NearTriangular if i < j => Some(false),
        PatternClass::NearTriangular | PatternClass::Unstructured => None,
    }
}

/// Re-checks a witness against the live adjacency predicate.
fn reverify<G: Adjacency + ?Sized>(g: &G, w: &RankWitness, p: Option<&Bipartition>) -> Result<(), String> {
    let (rows, cols) = (w.rows(), w.cols());
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(format!("shape {}x{}", rows.len(), cols.len()));
    }
    let n = g.vertex_count();
    if rows.iter().chain(cols).any(|&v| v >= n) {
        return Err("vertex out of range".into());
    }
    let mut seen = vec![false; n];
    for &v in rows.iter().chain(cols) {
        if std::mem::replace(&mut seen[v], true) {
            return Err(format!("vertex {v} repeated"));
        }
    }
    if let Some(p) = p {
        let row_side = p.in_y(rows[0]);
        if rows.iter().any(|&v| p.in_y(v) != row_side) || cols.iter().any(|&v| p.in_y(v) == row_side) {
            return Err("rows and columns not on opposite sides".into());
        }
    }
    let m = cut_rows(g, rows, cols);
    for (i, row) in m.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            if let Some(want) = forced_entry(w.pattern(), i, j) {
                if want != e {
                    return Err(format!("entry ({i},{j}) is {e}, {} needs {want}", w.pattern()));
                }
            }
        }
    }
    let rank = naive_rank(m);
    if rank < w.claimed() {
        return Err(format!("rank {rank} below claimed {}", w.claimed()));
    }
    Ok(())
}

#[derive(Default)]
struct WitnessLog {
    checked: usize,
    failures: Vec<String>,
}

impl WitnessLog {
    fn record<G: Adjacency + ?Sized>(&mut self, origin: &str, g: &G, w: &RankWitness, p: Option<&Bipartition>) -> bool {
        self.checked += 1;
        match reverify(g, w, p) {
            Ok(()) => true,
            Err(e) => {
                self.failures.push(format!("{origin}: {e}"));
                false
            }
        }
    }
}

/// Leaves on the `a` side of tree edge `(a, b)`, found by walking the tree.
fn tree_side(t: &TreeDecomposition, e: TreeEdge) -> Vec<bool> {
    let mut in_y = vec![false; t.vertex_count()];
    let mut stack = vec![(e.0, e.1)];
    while let Some((node, from)) = stack.pop() {
        if let Some(v) = t.vertex_at(node) {
            in_y[v] = true;
        }
        for &next in t.neighbors(node) {
            if next != from {
                stack.push((next, node));
            }
        }
    }
    in_y
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> ExplicitGraph {
    let density: f64 = rng.gen_range(0.15..0.85);
    let mut g = ExplicitGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

// ---------------------------------------------------------------- 1-3

fn crit_structured_ranks() -> Verdict {
    let mut bad = Vec::new();
    for r in 1..=64usize {
        let antidiag_expected = if r % 2 == 1 { r - 1 } else { r };
        let expected = [
            (PatternClass::Diagonal, r),
            (PatternClass::Triangular, r),
            (PatternClass::Antidiagonal, antidiag_expected),
        ];
        for (class, want) in expected {
            let m = pattern(class, r, None).unwrap();
            let direct: Vec<Vec<bool>> = (0..r)
                .map(|i| (0..r).map(|j| forced_entry(class, i, j).unwrap()).collect())
                .collect();
            if matrix_rows(&m) != direct {
                bad.push(format!("{class} r={r}: generated matrix differs from definition"));
            }
            let (packed, naive) = (m.rank(), naive_rank(direct));
            if packed != want || naive != want {
                bad.push(format!("{class} r={r}: packed {packed}, naive {naive}, expected {want}"));
            }
        }
    }
    Verdict::new(bad.is_empty(), summarize("192 matrices", &bad))
}

fn near_triangular_rank(size: usize, bits: &[bool]) -> Result<(), String> {
    let m = pattern(PatternClass::NearTriangular, size, Some(bits)).unwrap();
    let direct: Vec<Vec<bool>> = (0..size)
        .map(|i| (0..size).map(|j| forced_entry(PatternClass::NearTriangular, i, j).unwrap_or(bits[i])).collect())
        .collect();
    if matrix_rows(&m) != direct {
        return Err(format!("size {size}: generated matrix differs from definition"));
    }
    let (packed, naive) = (m.rank(), naive_rank(direct));
    if packed != naive || packed < size / 2 {
        return Err(format!("size {size} diagonal {bits:?}: packed {packed}, naive {naive}"));
    }
    Ok(())
}

fn crit_near_triangular() -> Verdict {
    let mut bad = Vec::new();
    let mut count = 0usize;
    for size in (2..=12).step_by(2) {
        for mask in 0u32..(1 << size) {
            let bits: Vec<bool> = (0..size).map(|i| mask >> i & 1 == 1).collect();
            count += 1;
            if let Err(e) = near_triangular_rank(size, &bits) {
                bad.push(e);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x2);
    for size in [16, 32, 64] {
        for _ in 0..1000 {
            let bits: Vec<bool> = (0..size).map(|_| rng.gen()).collect();
            count += 1;
            if let Err(e) = near_triangular_rank(size, &bits) {
                bad.push(e);
            }
        }
    }
    Verdict::new(bad.is_empty(), summarize(&format!("{count} diagonals"), &bad))
}

fn crit_rank_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3);
    let mut bad = Vec::new();
    for t in 0..10_000 {
        let (rows, cols) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
        let density: f64 = [0.02, 0.1, 0.5, 0.9][t % 4];
        let entries: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(density)).collect()).collect();
        let m = Gf2Matrix::from_fn(rows, cols, |i, j| entries[i][j]);
        let (packed, naive) = (m.rank(), naive_rank(entries));
        if packed != naive {
            bad.push(format!("trial {t} ({rows}x{cols}): packed {packed}, naive {naive}"));
        }
    }
    Verdict::new(bad.is_empty(), summarize("10000 matrices", &bad))
}

// ---------------------------------------------------------------- 4-6

fn crit_balanced_edge() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4);
    let mut bad = Vec::new();
    for t in 0..10_000 {
        let n = rng.gen_range(2..=64);
        let tree = random_cubic_tree(n, &mut rng);
        let g = ExplicitGraph::empty(n);
        let result = balanced_edge(&g, &tree).map_err(|e| e.to_string()).and_then(|e| {
            if !tree.has_edge(e) {
                return Err(format!("{e:?} is not a tree edge"));
            }
            let in_y = tree_side(&tree, e);
            let y = in_y.iter().filter(|&&b| b).count();
            let lib = tree.side(e).map_err(|e| e.to_string())?;
            if !balanced_count(n, y) || !is_balanced(&g, &lib) || lib.y_count() != y {
                return Err(format!("edge {e:?} splits {y}/{}", n - y));
            }
            Ok(())
        });
        if let Err(e) = result {
            bad.push(format!("trial {t}, {n} leaves: {e}"));
        }
    }
    Verdict::new(bad.is_empty(), summarize("10000 trees", &bad))
}

/// Width of `t` recomputed from tree walks and naive ranks.
fn naive_width<G: Adjacency + ?Sized>(g: &G, t: &TreeDecomposition) -> usize {
    t.edges().into_iter().map(|e| naive_cut_rank(g, &tree_side(t, e))).max().unwrap_or(0)
}

fn random_small_graphs() -> Vec<ExplicitGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(2..=7);
            random_graph(&mut rng, n)
        })
        .collect()
}

fn crit_rankwidth_exact(graphs: &[ExplicitGraph], widths: &mut Vec<usize>) -> Verdict {
    let mut bad = Vec::new();
    let mut check = |name: String, g: &ExplicitGraph, want: Option<usize>| -> Option<usize> {
        match rankwidth_exact(g, DEFAULT_RANKWIDTH_CAP) {
            Ok((w, Some(t))) => {
                let recomputed = naive_width(g, &t);
                if recomputed != w {
                    bad.push(format!("{name}: returned {w}, its tree has width {recomputed}"));
                }
                if let Some(want) = want {
                    if w != want {
                        bad.push(format!("{name}: width {w}, expected {want}"));
                    }
                }
                Some(w)
            }
            Ok((w, None)) => {
                bad.push(format!("{name}: width {w} without a tree"));
                None
            }
            Err(e) => {
                bad.push(format!("{name}: {e}"));
                None
            }
        }
    };
    for n in 2..=8 {
        check(format!("K{n}"), &ExplicitGraph::complete(n), Some(1));
        check(format!("empty{n}"), &ExplicitGraph::empty(n), Some(0));
        check(format!("P{n}"), &ExplicitGraph::path(n), Some(1));
    }
    check("C5".into(), &ExplicitGraph::cycle(5), Some(2));
    for (i, g) in graphs.iter().enumerate() {
        widths.push(check(format!("random #{i}"), g, None).unwrap_or(usize::MAX));
    }
    Verdict::new(bad.is_empty(), summarize("fixed families and 200 random graphs", &bad))
}

fn crit_balanced_bound(graphs: &[ExplicitGraph], widths: &[usize]) -> Verdict {
    let mut bad = Vec::new();
    for (i, (g, &w)) in graphs.iter().zip(widths).enumerate() {
        match certify_lower_bound(g, None, DEFAULT_CERTIFICATE_CAP) {
            Ok(rep) if w != usize::MAX && w >= rep.min_balanced_rank => {}
            Ok(rep) => bad.push(format!("random #{i}: width {w} < balanced bound {}", rep.min_balanced_rank)),
            Err(e) => bad.push(format!("random #{i}: {e}")),
        }
    }
    Verdict::new(bad.is_empty(), summarize(&format!("{} graphs", graphs.len()), &bad))
}

// ---------------------------------------------------------------- 7

fn crit_triples() -> Verdict {
    let mut bad = Vec::new();
    let mut seen: HashMap<TripleKind, usize> = HashMap::new();
    for &(name, k, table) in triple_fixtures::TRIPLE_TABLES {
        let kind: TripleKind = name.parse().unwrap();
        *seen.entry(kind).or_default() += 1;
        let m = match triple_matrix(kind, k, DEFAULT_TRIPLE_MATRIX_CAP) {
            Ok(m) => m,
            Err(e) => {
                bad.push(format!("{name} k={k}: {e}"));
                continue;
            }
        };
        for (j, row) in table.iter().enumerate() {
            for (jp, ch) in row.bytes().enumerate() {
                if m.get(j, jp) != (ch == b'1') {
                    bad.push(format!("{name} k={k}: entry ({}, {})", j + 1, jp + 1));
                }
            }
        }
    }
    for kind in TripleKind::ALL {
        let smallest: Vec<usize> = (1..64).filter(|&k| validate_kind(kind, k).is_ok()).take(3).collect();
        let fixture: Vec<usize> = triple_fixtures::TRIPLE_TABLES
            .iter()
            .filter(|(name, _, _)| *name == kind.as_str())
            .map(|&(_, k, _)| k)
            .collect();
        if smallest != fixture {
            bad.push(format!("{kind:?}: fixture sizes {fixture:?}, smallest valid {smallest:?}"));
        }
    }
    for k in 1..=64 {
        let mat = triple_matrix(TripleKind::RegularMatching, k, DEFAULT_TRIPLE_MATRIX_CAP).unwrap();
        let anti = triple_matrix(TripleKind::RegularAntimatching, k, DEFAULT_TRIPLE_MATRIX_CAP).unwrap();
        if (0..k).any(|a| (0..k).any(|b| mat.get(a, b) == anti.get(a, b))) {
            bad.push(format!("k={k}: matching and antimatching are not complements"));
        }
    }
    let mut skew_sizes = 0;
    for k in (1..=2000).filter(|&k| validate_kind(TripleKind::SkewExpandingMatching, k).is_ok()) {
        skew_sizes += 1;
        let mut hits = vec![0u32; k + 1];
        for range in skew_row_ranges(k) {
            for j in range {
                if (1..=k).contains(&j) {
                    hits[j] += 1;
                } else {
                    hits[0] += 1;
                }
            }
        }
        if hits[0] != 0 || hits[1..].iter().any(|&h| h != 1) {
            bad.push(format!("skew row ranges at k={k} do not partition 1..=k"));
        }
    }
    Verdict::new(
        bad.is_empty(),
        summarize(
            &format!("{} tables, complements for k<=64, {skew_sizes} skew sizes", triple_fixtures::TRIPLE_TABLES.len()),
            &bad,
        ),
    )
}

// ---------------------------------------------------------------- 9

struct GapCase {
    name: &'static str,
    flavor: CarouselFlavor,
    variants: Vec<[TripleKind; 3]>,
    gap: usize,
    statement: usize,
    parts: std::ops::RangeInclusive<usize>,
}

fn gap_cases() -> Vec<GapCase> {
    use TripleKind::*;
    let even = |name, variants, gap, parts| GapCase {
        name,
        flavor: CarouselFlavor::Even,
        variants,
        gap,
        statement: 0,
        parts,
    };
    let skew = |name, variants, statement| GapCase {
        name,
        flavor: CarouselFlavor::Odd,
        variants,
        gap: 3,
        statement,
        parts: 3..=5,
    };
    let mut cases = vec![
        even(
            "regular parallel",
            vec![[RegularCrossing, RegularMatching, ExpandingCrossing], [RegularCrossing, RegularAntimatching, ExpandingCrossing]],
            2,
            3..=6,
        ),
        even("regular cross", vec![[RegularCrossing, RegularMatching, ExpandingCrossing]], 1, 3..=6),
        even(
            "expanding parallel",
            vec![[RegularCrossing, RegularCrossing, ExpandingMatching], [RegularCrossing, RegularCrossing, ExpandingAntimatching]],
            3,
            3..=5,
        ),
        even("expanding cross", vec![[RegularCrossing, RegularMatching, ExpandingCrossing]], 3, 3..=5),
    ];
    let skew_parallel = vec![
        [RegularCrossing, RegularMatching, SkewExpandingMatching],
        [RegularCrossing, RegularMatching, SkewExpandingAntimatching],
    ];
    let skew_cross = vec![[RegularCrossing, RegularCrossing, SkewExpandingCrossing]];
    cases.push(skew("skew parallel, unbarred source", skew_parallel.clone(), 0));
    cases.push(skew("skew parallel, barred source", skew_parallel, 1));
    cases.push(skew("skew cross, unbarred source", skew_cross.clone(), 0));
    cases.push(skew("skew cross, barred source", skew_cross, 1));
    cases
}

/// Source vertices of a statement, each with its corresponding targets.
fn statement_map(c: &Carousel, st: &PropagationStatement) -> Vec<(Vertex, Vec<Vertex>)> {
    let k = c.k();
    let mirror = |pos: usize, barred: bool| if barred { k + 1 - pos } else { pos };
    let j = st.source.index;
    ((1usize << (j - 1))..(1usize << j))
        .map(|q| {
            let images: Vec<usize> = if st.doubling { vec![2 * q, 2 * q + 1] } else { vec![q] };
            (
                c.id(VertexRef::new(st.source.set, mirror(q, st.source.barred))),
                images
                    .into_iter()
                    .map(|t| c.id(VertexRef::new(st.target.set, mirror(t, st.target.barred))))
                    .collect(),
            )
        })
        .collect()
}

fn max_label(size: usize, r: usize) -> usize {
    size.div_ceil(r)
}

fn count_for_label(rng: &mut ChaCha8Rng, m: usize, size: usize, r: usize) -> usize {
    if m == 0 {
        0
    } else {
        rng.gen_range((m - 1) * r + 1..=(m * r).min(size))
    }
}

#[derive(Clone, Copy)]
enum Craft {
    Violating,
    Compliant,
}

/// A bipartition whose labels on the statement's parts are chosen first.
/// Violating ones place target `Y` vertices to leave as few opposite-side
/// pairs as possible.
fn craft_partition(
    c: &Carousel,
    st: &PropagationStatement,
    r: usize,
    craft: Craft,
    rng: &mut ChaCha8Rng,
) -> Option<(Bipartition, usize, usize)> {
    let map = statement_map(c, st);
    let targets: Vec<Vertex> = map.iter().flat_map(|(_, t)| t.clone()).collect();
    let (ls, lt) = (max_label(map.len(), r), max_label(targets.len(), r));
    let tol = st.tolerance;
    let ms = rng.gen_range(0..=ls);
    let choices: Vec<usize> = (0..=lt)
        .filter(|&mt| match craft {
            Craft::Violating => mt > ms + tol || mt + tol < ms,
            Craft::Compliant => mt <= ms + tol && mt + tol >= ms,
        })
        .collect();
    let &mt = choices.choose(rng)?;
    let a = count_for_label(rng, ms, map.len(), r);
    let b = count_for_label(rng, mt, targets.len(), r);

    let mut in_y: Vec<bool> = (0..c.vertex_count()).map(|_| rng.gen()).collect();
    let mut order: Vec<usize> = (0..map.len()).collect();
    order.shuffle(rng);
    let (src_y, src_z) = order.split_at(a);
    for (idx, &(v, _)) in map.iter().enumerate() {
        in_y[v] = src_y.contains(&idx);
    }
    let mut target_order: Vec<Vertex> = Vec::new();
    match craft {
        Craft::Compliant => {
            target_order = targets.clone();
            target_order.shuffle(rng);
        }
        Craft::Violating if mt > ms => {
            // Rising: hide target Y vertices behind Y sources, then spend the
            // rest on as few Z sources as possible.
            let mut hidden: Vec<Vertex> = src_y.iter().flat_map(|&i| map[i].1.clone()).collect();
            hidden.shuffle(rng);
            target_order.extend(hidden);
            for &i in src_z {
                target_order.extend(map[i].1.iter().copied());
            }
        }
        Craft::Violating => {
            // Falling: cover every image of as many Y sources as possible.
            for &i in src_y {
                target_order.extend(map[i].1.iter().copied());
            }
            let mut rest: Vec<Vertex> = src_z.iter().flat_map(|&i| map[i].1.clone()).collect();
            rest.shuffle(rng);
            target_order.extend(rest);
        }
    }
    for (idx, &v) in target_order.iter().enumerate() {
        in_y[v] = idx < b;
    }
    let ys: Vec<Vertex> = (0..in_y.len()).filter(|&v| in_y[v]).collect();
    Some((Bipartition::from_y(c.vertex_count(), ys).unwrap(), ms, mt))
}

fn crit_propagation(log: &mut WitnessLog) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9);
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for case in gap_cases() {
        let carousels: Vec<Carousel> = case
            .variants
            .iter()
            .map(|kinds| Carousel::build(CarouselSpec::new(3, 6, case.flavor, kinds.to_vec())).unwrap())
            .collect();
        let (mut violating_ok, mut compliant_ok) = (0, 0);
        let mut case_failures = Vec::new();
        for (craft, wanted) in [(Craft::Violating, 100), (Craft::Compliant, 100)] {
            let mut done = 0;
            while done < wanted {
                let c = &carousels[done % carousels.len()];
                let r = rng.gen_range(2..=3);
                let j = rng.gen_range(case.parts.clone());
                let sts = propagation_statements(c, case.gap, j).unwrap();
                let st = sts[case.statement.min(sts.len() - 1)];
                let Some((p, ms, mt)) = craft_partition(c, &st, r, craft, &mut rng) else {
                    continue;
                };
                done += 1;
                let tag = format!("{} r={r} j={j} labels {ms}->{mt}", case.name);
                match (craft, check_statement(c, &p, r, &st)) {
                    (_, Err(e)) => case_failures.push(format!("{tag}: {e}")),
                    (Craft::Compliant, Ok(StatementOutcome::Compliant { .. })) => compliant_ok += 1,
                    (Craft::Violating, Ok(StatementOutcome::Witness { witness, .. })) => {
                        if witness.claimed() + 1 < r {
                            case_failures.push(format!("{tag}: claimed {} < r-1", witness.claimed()));
                        } else if log.record(&tag, c, &witness, Some(&p)) {
                            violating_ok += 1;
                        } else {
                            case_failures.push(format!("{tag}: witness failed re-verification"));
                        }
                    }
                    (_, Ok(other)) => case_failures.push(format!("{tag}: {other:?}")),
                }
            }
        }
        lines.push(format!("{}: {violating_ok}/100 witnessed, {compliant_ok}/100 compliant", case.name));
        bad.extend(case_failures);
    }
    let mut detail = lines.join("; ");
    if !bad.is_empty() {
        detail = format!("{detail}; {} failures, first: {}", bad.len(), bad[0]);
    }
    Verdict::new(bad.is_empty(), detail)
}

// ---------------------------------------------------------------- 10-11

fn crit_small_exhaustive() -> Verdict {
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for (name, s, flavor) in [("even n=3 s=2", 2, CarouselFlavor::Even), ("odd n=3 s=1", 1, CarouselFlavor::Odd)] {
        let c = Carousel::build(CarouselSpec::standard(3, s, flavor)).unwrap();
        let n = c.vertex_count();
        let report = match certify_lower_bound(&c, None, DEFAULT_CERTIFICATE_CAP) {
            Ok(rep) => rep,
            Err(e) => {
                bad.push(format!("{name}: {e}"));
                continue;
            }
        };
        let mut naive_min = usize::MAX;
        let mut lib_min = usize::MAX;
        for mask in 0u64..(1 << n) {
            let in_y: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            if !balanced_count(n, mask.count_ones() as usize) {
                continue;
            }
            naive_min = naive_min.min(naive_cut_rank(&c, &in_y));
            lib_min = lib_min.min(partition_rank(&c, &Bipartition::from_mask(n, mask)).unwrap());
        }
        lines.push(format!(
            "{name}: certificate {}, enumeration {naive_min}, partition_rank {lib_min}",
            report.min_balanced_rank
        ));
        if report.min_balanced_rank != naive_min || naive_min != lib_min {
            bad.push(name.to_string());
        }
    }
    Verdict::new(bad.is_empty(), lines.join("; "))
}

fn crit_sampled(log: &mut WitnessLog) -> Verdict {
    let (q, s) = min_order(3, 2, CarouselFlavor::Even);
    if (q, s) != (1, 18) {
        return Verdict::new(false, format!("min_order(3, 2, even) = ({q}, {s})"));
    }
    let c = Carousel::build(CarouselSpec::standard(3, s as u32, CarouselFlavor::Even)).unwrap();
    if c.vertex_count() != 786_429 {
        return Verdict::new(false, format!("{} vertices", c.vertex_count()));
    }
    let report = match sampled_certificate(&c, 2, 100, 0x5eed) {
        Ok(rep) => rep,
        Err(e) => return Verdict::new(false, e.to_string()),
    };
    let mut methods: HashMap<String, usize> = HashMap::new();
    let mut bad = Vec::new();
    for t in &report.trials {
        if !is_balanced(&c, &t.partition) {
            bad.push(format!("trial {} unbalanced", t.index));
        }
        match &t.result {
            Certification::Certified { method, witness } => {
                *methods.entry(method.to_string()).or_default() += 1;
                if witness.claimed() < 2 {
                    bad.push(format!("trial {} claims {}", t.index, witness.claimed()));
                }
                if !log.record(&format!("sampled trial {}", t.index), &c, witness, Some(&t.partition)) {
                    bad.push(format!("trial {} witness failed re-verification", t.index));
                }
            }
            Certification::Uncertified => bad.push(format!("trial {} ({}) uncertified", t.index, t.family)),
        }
    }
    let mut methods: Vec<_> = methods.into_iter().collect();
    methods.sort();
    let detail = format!(
        "N={}, {}/100 certified {:?}",
        c.vertex_count(),
        report.certified_count(),
        methods
    );
    Verdict::new(bad.is_empty() && report.trials.len() == 100, summarize(&detail, &bad))
}

// ---------------------------------------------------------------- 12

fn masks(g: &ExplicitGraph) -> Vec<u64> {
    (0..g.vertex_count())
        .map(|v| g.neighbors(v).ones().fold(0u64, |m, u| m | 1 << u))
        .collect()
}

/// Largest set of pairwise incomparable vertices, by subset enumeration.
fn brute_dilworth(g: &ExplicitGraph) -> usize {
    let nb = masks(g);
    let n = nb.len();
    let le = |x: usize, y: usize| nb[x] & !(nb[y] | 1 << y) == 0;
    let incomparable: Vec<u64> = (0..n)
        .map(|x| (0..n).filter(|&y| y != x && !le(x, y) && !le(y, x)).fold(0u64, |m, y| m | 1 << y))
        .collect();
    (1u64..1 << n)
        .filter(|&s| (0..n).filter(|&x| s >> x & 1 == 1).all(|x| s & !(1 << x) & !incomparable[x] == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Whether some vertex subset of even size at least four induces a cycle.
fn brute_has_even_hole(g: &ExplicitGraph) -> bool {
    let nb = masks(g);
    let n = nb.len();
    (1u64..1 << n).any(|s| {
        let size = s.count_ones();
        if size < 4 || size % 2 == 1 {
            return false;
        }
        let members: Vec<usize> = (0..n).filter(|&v| s >> v & 1 == 1).collect();
        if members.iter().any(|&v| (nb[v] & s).count_ones() != 2) {
            return false;
        }
        let mut reached = 1u64 << members[0];
        loop {
            let next = members
                .iter()
                .filter(|&&v| reached >> v & 1 == 1)
                .fold(reached, |m, &v| m | (nb[v] & s));
            if next == reached {
                break;
            }
            reached = next;
        }
        reached == s
    })
}

/// Ring conditions read directly off the adjacency, with nesting of closed
/// neighbourhoods inside each part.
fn brute_ring(g: &ExplicitGraph, parts: &[Vec<Vertex>]) -> [bool; 4] {
    let nb = masks(g);
    let n = parts.len();
    let part_mask = |i: usize| parts[i].iter().fold(0u64, |m, &v| m | 1 << v);
    let closed = |v: usize| nb[v] | 1 << v;
    let cliques = (0..n).all(|i| parts[i].iter().all(|&v| part_mask(i) & !closed(v) == 0));
    let nested = parts.iter().all(|p| {
        p.iter()
            .all(|&x| p.iter().all(|&y| closed(x) & !closed(y) == 0 || closed(y) & !closed(x) == 0))
    });
    let around = |i: usize| part_mask((i + n - 1) % n) | part_mask((i + 1) % n);
    let confined = (0..n).all(|i| parts[i].iter().all(|&v| nb[v] & !(around(i) | part_mask(i)) == 0));
    let dominated = (0..n).all(|i| parts[i].iter().any(|&v| around(i) & !nb[v] == 0));
    [cliques, nested, confined, dominated]
}

fn crit_families() -> Verdict {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    for s in 1..=3u32 {
        let sc = match build_split_dilworth2(s) {
            Ok(sc) => sc,
            Err(e) => {
                bad.push(format!("split s={s}: {e}"));
                continue;
            }
        };
        match is_split(&sc, &sc.clique_side(), &sc.stable_side()) {
            Ok(true) => {}
            other => bad.push(format!("split s={s}: is_split {other:?}")),
        }
        let g = materialize(&sc, DEFAULT_MATERIALIZE_CAP).unwrap();
        let d = dilworth_number(&g, DEFAULT_DILWORTH_CAP).unwrap();
        let mut note = format!("split s={s} dilworth {d}");
        if s <= 2 {
            let brute = brute_dilworth(&g);
            note.push_str(&format!(" (brute {brute})"));
            if brute != d {
                bad.push(format!("split s={s}: dilworth {d}, brute force {brute}"));
            }
        }
        if d != 2 {
            bad.push(format!("split s={s}: dilworth {d}, expected 2"));
        }
        notes.push(note);
    }
    for n in 3..=6usize {
        for s in 1..=6u32 {
            let k = if n % 2 == 0 { (1usize << s) - 1 } else { 2 * ((1usize << s) - 1) };
            if n * k > 24 {
                break;
            }
            let (c, partition) = build_ring(n, s).unwrap();
            let g = materialize(&c, DEFAULT_MATERIALIZE_CAP).unwrap();
            let oracle = brute_ring(&g, partition.parts());
            let lib = is_ring(&g, &partition).unwrap();
            let oracle_holds = oracle.iter().all(|&b| b);
            if lib != oracle_holds {
                bad.push(format!("ring n={n} s={s}: is_ring {lib}, direct check {oracle:?}"));
            }
            if !lib {
                let names = ["cliques", "nested", "confined", "dominating vertex"];
                let failing: Vec<&str> = names.iter().zip(oracle).filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
                bad.push(format!("ring n={n} s={s}: not a ring ({})", failing.join(", ")));
            }
            let d = dilworth_number(&g, DEFAULT_DILWORTH_CAP).unwrap();
            if d > n {
                bad.push(format!("ring n={n} s={s}: dilworth {d} > {n}"));
            }
            if n == 5 {
                let lib = is_even_hole_free(&g, DEFAULT_HOLE_CAP).unwrap();
                let brute = !brute_has_even_hole(&g);
                if lib != brute || !lib {
                    bad.push(format!("ring n={n} s={s}: even-hole-free {lib}, brute force {brute}"));
                }
            }
            notes.push(format!("ring n={n} s={s} ring={lib} dilworth {d}"));
        }
    }
    let mut detail = notes.join(", ");
    if !bad.is_empty() {
        detail = format!("{detail}; failures: {}", bad.join("; "));
    }
    Verdict::new(bad.is_empty(), detail)
}

// ---------------------------------------------------------------- 13

fn inequality_holds(n: usize, r: usize, factor: usize, q: usize) -> bool {
    let e = q + factor * r;
    let lhs = BigUint::from(2u32).pow((e - 1) as u32);
    let rhs = BigUint::from(10 * (n + 1) * (e + 1) * r);
    lhs >= rhs
}

fn crit_min_order() -> Verdict {
    let mut bad = Vec::new();
    for n in 3..=8 {
        for r in 2..=6 {
            for (flavor, factor) in [(CarouselFlavor::Even, 8), (CarouselFlavor::Odd, 16)] {
                let (q, s) = min_order(n, r, flavor);
                let ok = q >= 1
                    && inequality_holds(n, r, factor, q)
                    && (q == 1 || !inequality_holds(n, r, factor, q - 1))
                    && s == q + factor * r + 1
                    && order_inequality(n, r, flavor, q) == inequality_holds(n, r, factor, q);
                if !ok {
                    bad.push(format!("n={n} r={r} {flavor}: ({q}, {s})"));
                }
            }
        }
    }
    Verdict::new(bad.is_empty(), summarize("60 cases", &bad))
}

// ---------------------------------------------------------------- driver

fn summarize(what: &str, bad: &[String]) -> String {
    match bad {
        [] => what.to_string(),
        [first, ..] => format!("{what}; {} failures, first: {first}", bad.len()),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, Verdict, Duration)> = Vec::new();
    let mut log = WitnessLog::default();
    let mut push = |id: usize, (v, d): (Verdict, Duration)| results.push((id, v, d));

    push(1, timed(Duration::from_secs(1), crit_structured_ranks));
    push(2, timed(Duration::from_secs(10), crit_near_triangular));
    push(3, timed(Duration::from_secs(30), crit_rank_oracle));
    push(4, timed(Duration::from_secs(30), crit_balanced_edge));
    let graphs = random_small_graphs();
    let mut widths = Vec::new();
    push(5, timed(Duration::from_secs(300), || crit_rankwidth_exact(&graphs, &mut widths)));
    push(6, timed(Duration::from_secs(300), || crit_balanced_bound(&graphs, &widths)));
    push(7, timed(Duration::from_secs(60), crit_triples));
    push(9, timed(Duration::from_secs(60), || crit_propagation(&mut log)));
    push(10, timed(Duration::from_secs(10), crit_small_exhaustive));
    push(11, timed(Duration::from_secs(600), || crit_sampled(&mut log)));
    push(12, timed(Duration::from_secs(120), crit_families));
    push(13, timed(Duration::from_secs(60), crit_min_order));
    let witness_verdict = Verdict::new(
        log.checked > 0 && log.failures.is_empty(),
        summarize(&format!("{} witnesses re-verified", log.checked), &log.failures),
    );
    results.push((8, witness_verdict, Duration::ZERO));
    results.sort_by_key(|(id, _, _)| *id);

    let mut failed = 0;
    for (id, v, d) in &results {
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {status}  [{:.2}s] {}", d.as_secs_f64(), v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
