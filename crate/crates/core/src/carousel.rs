//! Carousel parameter records and the implicit graphs they describe.
//!
//! A carousel on `n` sets `X₁..Xₙ` of size `k` puts a triple of kind
//! `kinds[i]` between `Xᵢ` and `Xᵢ₊₁` (indices modulo `n`). What happens inside
//! a set and between non-consecutive sets is left to two policies.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Adjacency, Vertex};
use crate::triples::{validate_kind, TripleKind};

/// Upper bound on `n·k` accepted by [`validate_spec`].
pub const MAX_VERTICES: u128 = 1 << 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarouselFlavor {
    Even,
    Odd,
}

impl CarouselFlavor {
    /// `2ˢ − 1` for even carousels, `2(2ˢ − 1)` for odd ones.
    pub fn set_size(self, s: u32) -> Option<usize> {
        let base = 1usize.checked_shl(s)?.checked_sub(1)?;
        match self {
            CarouselFlavor::Even => Some(base),
            CarouselFlavor::Odd => base.checked_mul(2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CarouselFlavor::Even => "even",
            CarouselFlavor::Odd => "odd",
        }
    }
}

impl FromStr for CarouselFlavor {
    type Err = CarouselError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(CarouselFlavor::Even),
            "odd" => Ok(CarouselFlavor::Odd),
            other => Err(CarouselError::Parse(format!("unknown flavor `{other}`"))),
        }
    }
}

impl fmt::Display for CarouselFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Adjacency inside each set `Xᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntraSetPolicy {
    Empty,
    Clique,
    SeededRandom,
}

/// Adjacency between `Xᵢ` and `Xⱼ` for `j ∉ {i−1, i, i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LongRangePolicy {
    Empty,
    SeededRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarouselSpec {
    pub n: usize,
    pub s: u32,
    pub flavor: CarouselFlavor,
    /// `kinds[i]` governs the gap `(Xᵢ₊₁, Xᵢ₊₂)` in 1-based set names, so
    /// `kinds[0]` is `(X₁, X₂)` and `kinds[n−1]` is `(Xₙ, X₁)`.
    pub kinds: Vec<TripleKind>,
    pub intra_set: IntraSetPolicy,
    pub long_range: LongRangePolicy,
    /// Shared by both random policies.
    pub seed: u64,
    /// Edge probability for the random policies, in `[0, 1]`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecViolation {
    #[error("n_at_least_3: n = {0}")]
    TooFewSets(usize),
    #[error("s_at_least_1: s = {0}")]
    OrderZero(u32),
    #[error("order_fits: n·k overflows the supported vertex range")]
    TooLarge,
    #[error("kinds_length: expected {expected} kinds, got {got}")]
    KindsLength { expected: usize, got: usize },
    #[error("first_regular_crossing: gap 1 is {0}")]
    FirstNotRegularCrossing(TripleKind),
    #[error("interior_regular: gap {gap} is {kind}")]
    InteriorNotRegular { gap: usize, kind: TripleKind },
    #[error("even_last_expanding: gap n is {0}")]
    EvenLastNotExpanding(TripleKind),
    #[error("odd_last_skew: gap n is {0}")]
    OddLastNotSkew(TripleKind),
    #[error("crossing_parity: {count} crossings, {flavor} carousels need an {} count", if *.flavor == CarouselFlavor::Even { "even" } else { "odd" })]
    CrossingParity { count: usize, flavor: CarouselFlavor },
    #[error("kind_valid_for_k: gap {gap} ({kind}) is invalid for k = {k}")]
    KindInvalidForK { gap: usize, kind: TripleKind, k: usize },
    #[error("density_in_unit_interval: density = {0}")]
    Density(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CarouselError {
    #[error("invalid carousel spec: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<SpecViolation>),
    #[error("spec parse error: {0}")]
    Parse(String),
    #[error("set index {i} outside 1..={n}")]
    SetIndex { i: usize, n: usize },
    #[error("position {j} outside 1..={k}")]
    Position { j: usize, k: usize },
    #[error("part index {j} outside 1..={s}")]
    PartIndex { j: usize, s: u32 },
}

impl CarouselSpec {
    /// Spec with empty intra-set and long-range policies.
    pub fn new(n: usize, s: u32, flavor: CarouselFlavor, kinds: Vec<TripleKind>) -> Self {
        CarouselSpec {
            n,
            s,
            flavor,
            kinds,
            intra_set: IntraSetPolicy::Empty,
            long_range: LongRangePolicy::Empty,
            seed: 0,
            density: 0.5,
        }
    }

    /// A valid spec: regular crossing, then regular matchings, closed by the
    /// expanding (even) or skew expanding (odd) kind that fixes the parity.
    pub fn standard(n: usize, s: u32, flavor: CarouselFlavor) -> Self {
        let mut kinds = vec![TripleKind::RegularCrossing];
        kinds.extend(std::iter::repeat_n(TripleKind::RegularMatching, n.saturating_sub(2)));
        kinds.push(match flavor {
            CarouselFlavor::Even => TripleKind::ExpandingCrossing,
            CarouselFlavor::Odd => TripleKind::SkewExpandingMatching,
        });
        Self::new(n, s, flavor, kinds)
    }

    /// Set size `k`, if it fits in `usize`.
    pub fn k(&self) -> Option<usize> {
        self.flavor.set_size(self.s)
    }

    pub fn crossing_count(&self) -> usize {
        self.kinds.iter().filter(|k| k.is_cross()).count()
    }

    pub fn to_text(&self) -> String {
        let kinds: Vec<&str> = self.kinds.iter().map(|k| k.as_str()).collect();
        let intra = match self.intra_set {
            IntraSetPolicy::Empty => "empty",
            IntraSetPolicy::Clique => "clique",
            IntraSetPolicy::SeededRandom => "random",
        };
        let long = match self.long_range {
            LongRangePolicy::Empty => "empty",
            LongRangePolicy::SeededRandom => "random",
        };
        format!(
            "n={}\ns={}\nflavor={}\nkinds={}\nintra_set={intra}\nlong_range={long}\nseed={}\ndensity={}\n",
            self.n,
            self.s,
            self.flavor,
            kinds.join(","),
            self.seed,
            self.density
        )
    }

    /// Parses the `key=value` format written by [`CarouselSpec::to_text`].
    /// Blank lines and lines starting with `#` are ignored; `seed`,
    /// `density`, `intra_set` and `long_range` are optional.
    pub fn parse(text: &str) -> Result<Self, CarouselError> {
        let perr = |m: String| CarouselError::Parse(m);
        let mut n = None;
        let mut s = None;
        let mut flavor = None;
        let mut kinds = None;
        let mut spec = CarouselSpec::new(0, 0, CarouselFlavor::Even, Vec::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| perr(format!("line {}: bad {what} `{value}`", lineno + 1));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad("n"))?),
                "s" => s = Some(value.parse::<u32>().map_err(|_| bad("s"))?),
                "flavor" => flavor = Some(value.parse::<CarouselFlavor>()?),
                "kinds" => {
                    kinds = Some(
                        value
                            .split(',')
                            .map(|k| k.trim().parse::<TripleKind>().map_err(|e| perr(e.to_string())))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "intra_set" => {
                    spec.intra_set = match value {
                        "empty" => IntraSetPolicy::Empty,
                        "clique" => IntraSetPolicy::Clique,
                        "random" | "seeded_random" => IntraSetPolicy::SeededRandom,
                        _ => return Err(bad("intra_set")),
                    }
                }
                "long_range" => {
                    spec.long_range = match value {
                        "empty" => LongRangePolicy::Empty,
                        "random" | "seeded_random" => LongRangePolicy::SeededRandom,
                        _ => return Err(bad("long_range")),
                    }
                }
                "seed" => spec.seed = value.parse().map_err(|_| bad("seed"))?,
                "density" => spec.density = value.parse().map_err(|_| bad("density"))?,
                other => return Err(perr(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        spec.n = n.ok_or_else(|| perr("missing key `n`".into()))?;
        spec.s = s.ok_or_else(|| perr("missing key `s`".into()))?;
        spec.flavor = flavor.ok_or_else(|| perr("missing key `flavor`".into()))?;
        spec.kinds = kinds.ok_or_else(|| perr("missing key `kinds`".into()))?;
        Ok(spec)
    }
}

/// Checks every clause of the carousel definition and reports all failures.
pub fn validate_spec(spec: &CarouselSpec) -> Result<(), Vec<SpecViolation>> {
    let mut out = Vec::new();
    if spec.n < 3 {
        out.push(SpecViolation::TooFewSets(spec.n));
    }
    if spec.s == 0 {
        out.push(SpecViolation::OrderZero(spec.s));
    }
    let k = spec.k();
    match k {
        Some(k) if (k as u128) * (spec.n as u128) <= MAX_VERTICES => {}
        _ => out.push(SpecViolation::TooLarge),
    }
    if spec.kinds.len() != spec.n {
        out.push(SpecViolation::KindsLength {
            expected: spec.n,
            got: spec.kinds.len(),
        });
    }
    if let Some(&first) = spec.kinds.first() {
        if first != TripleKind::RegularCrossing {
            out.push(SpecViolation::FirstNotRegularCrossing(first));
        }
    }
    if spec.kinds.len() >= 2 {
        for (idx, &kind) in spec.kinds.iter().enumerate().take(spec.kinds.len() - 1).skip(1) {
            if !kind.is_regular() {
                out.push(SpecViolation::InteriorNotRegular { gap: idx + 1, kind });
            }
        }
        let last = *spec.kinds.last().unwrap();
        match spec.flavor {
            CarouselFlavor::Even if !last.is_expanding() => out.push(SpecViolation::EvenLastNotExpanding(last)),
            CarouselFlavor::Odd if !last.is_skew() => out.push(SpecViolation::OddLastNotSkew(last)),
            _ => {}
        }
    }
    let count = spec.crossing_count();
    let want_even = spec.flavor == CarouselFlavor::Even;
    if count.is_multiple_of(2) != want_even {
        out.push(SpecViolation::CrossingParity {
            count,
            flavor: spec.flavor,
        });
    }
    if let Some(k) = k.filter(|&k| k > 0) {
        for (idx, &kind) in spec.kinds.iter().enumerate() {
            if validate_kind(kind, k).is_err() {
                out.push(SpecViolation::KindInvalidForK { gap: idx + 1, kind, k });
            }
        }
    }
    if !(0.0..=1.0).contains(&spec.density) {
        out.push(SpecViolation::Density(spec.density));
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A vertex `xᵢʲ` named by set index `i ∈ 1..=n` and position `j ∈ 1..=k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexRef {
    pub set: usize,
    pub pos: usize,
}

impl VertexRef {
    pub fn new(set: usize, pos: usize) -> Self {
        VertexRef { set, pos }
    }
}

/// `Xᵢ,ⱼ = {xᵢ^(2^(j−1)), …, xᵢ^(2^j − 1)}`, or its mirror image when `barred`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartRef {
    pub set: usize,
    pub index: usize,
    pub barred: bool,
}

impl PartRef {
    pub fn new(set: usize, index: usize, barred: bool) -> Self {
        PartRef { set, index, barred }
    }
}

impl fmt::Display for PartRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "bar(X[{},{}])", self.set, self.index)
        } else {
            write!(f, "X[{},{}]", self.set, self.index)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetRole {
    Top,
    Bottom,
}

impl SetRole {
    pub fn flipped(self) -> Self {
        match self {
            SetRole::Top => SetRole::Bottom,
            SetRole::Bottom => SetRole::Top,
        }
    }
}

/// Role of `Xᵢ`: `X₁` is a top set and the role flips across every cross
/// triple `(Xₜ, Xₜ₊₁)`, `t < i`.
pub fn set_role(spec: &CarouselSpec, i: usize) -> Result<SetRole, CarouselError> {
    if i == 0 || i > spec.n {
        return Err(CarouselError::SetIndex { i, n: spec.n });
    }
    Ok(spec.kinds[..i - 1]
        .iter()
        .fold(SetRole::Top, |role, kind| if kind.is_cross() { role.flipped() } else { role }))
}

/// Positions of `Xᵢ,ⱼ` in ascending order, or their mirror images `k − p + 1`
/// in the same order when barred.
pub fn part_positions(k: usize, s: u32, index: usize, barred: bool) -> Result<Vec<usize>, CarouselError> {
    if index == 0 || index > s as usize {
        return Err(CarouselError::PartIndex { j: index, s });
    }
    let range = (1usize << (index - 1))..(1usize << index);
    Ok(range.map(|p| if barred { k - p + 1 } else { p }).collect())
}

/// Validated carousel, usable as an implicit graph on `n·k` vertices.
///
/// Vertex `xᵢʲ` has flat id `(i−1)·k + (j−1)`.
#[derive(Debug, Clone)]
pub struct Carousel {
    spec: CarouselSpec,
    k: usize,
    random_threshold: u64,
}

const INTRA_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const LONG_SALT: u64 = 0xc2b2_ae3d_27d4_eb4f;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based pseudorandom bit for the unordered pair `{u, v}`.
fn pair_hash(seed: u64, salt: u64, u: Vertex, v: Vertex) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    splitmix(splitmix(splitmix(seed ^ salt) ^ a as u64) ^ b as u64)
}

impl Carousel {
    pub fn build(spec: CarouselSpec) -> Result<Self, CarouselError> {
        validate_spec(&spec).map_err(CarouselError::Invalid)?;
        let k = spec.k().expect("validated");
        // Pairs hash below the threshold with probability `density`.
        let random_threshold = if spec.density >= 1.0 {
            u64::MAX
        } else {
            (spec.density * (u64::MAX as f64)) as u64
        };
        Ok(Carousel {
            spec,
            k,
            random_threshold,
        })
    }

    pub fn spec(&self) -> &CarouselSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn s(&self) -> u32 {
        self.spec.s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn flavor(&self) -> CarouselFlavor {
        self.spec.flavor
    }

    /// Kind of the gap `(Xᵢ, Xᵢ₊₁)`, `i` 1-based.
    pub fn kind(&self, i: usize) -> TripleKind {
        self.spec.kinds[i - 1]
    }

    pub fn id(&self, v: VertexRef) -> Vertex {
        (v.set - 1) * self.k + (v.pos - 1)
    }

    pub fn vertex_ref(&self, id: Vertex) -> VertexRef {
        VertexRef::new(id / self.k + 1, id % self.k + 1)
    }

    pub fn checked_id(&self, v: VertexRef) -> Result<Vertex, CarouselError> {
        if v.set == 0 || v.set > self.n() {
            return Err(CarouselError::SetIndex { i: v.set, n: self.n() });
        }
        if v.pos == 0 || v.pos > self.k {
            return Err(CarouselError::Position { j: v.pos, k: self.k });
        }
        Ok(self.id(v))
    }

    /// Flat ids of `Xᵢ`.
    pub fn set_ids(&self, i: usize) -> Range<Vertex> {
        (i - 1) * self.k..i * self.k
    }

    /// `x̄ᵢʲ = xᵢ^(k−j+1)`.
    pub fn bar(&self, v: VertexRef) -> VertexRef {
        VertexRef::new(v.set, self.k - v.pos + 1)
    }

    pub fn set_role(&self, i: usize) -> Result<SetRole, CarouselError> {
        set_role(&self.spec, i)
    }

    pub fn part_vertices(&self, p: PartRef) -> Result<Vec<VertexRef>, CarouselError> {
        if p.set == 0 || p.set > self.n() {
            return Err(CarouselError::SetIndex { i: p.set, n: self.n() });
        }
        Ok(part_positions(self.k, self.s(), p.index, p.barred)?
            .into_iter()
            .map(|pos| VertexRef::new(p.set, pos))
            .collect())
    }

    pub fn part_ids(&self, p: PartRef) -> Result<Vec<Vertex>, CarouselError> {
        Ok(self.part_vertices(p)?.into_iter().map(|v| self.id(v)).collect())
    }

    #[inline]
    fn random_edge(&self, salt: u64, u: Vertex, v: Vertex) -> bool {
        pair_hash(self.spec.seed, salt, u, v) < self.random_threshold
            || (self.random_threshold == u64::MAX)
    }
}

impl Adjacency for Carousel {
    fn vertex_count(&self) -> usize {
        self.spec.n * self.k
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        if u == v {
            return false;
        }
        let n = self.spec.n;
        let (iu, ju) = (u / self.k, u % self.k + 1);
        let (iv, jv) = (v / self.k, v % self.k + 1);
        if iu == iv {
            return match self.spec.intra_set {
                IntraSetPolicy::Empty => false,
                IntraSetPolicy::Clique => true,
                IntraSetPolicy::SeededRandom => self.random_edge(INTRA_SALT, u, v),
            };
        }
        if (iu + 1) % n == iv {
            return self.spec.kinds[iu].adjacent_unchecked(self.k, ju, jv);
        }
        if (iv + 1) % n == iu {
            return self.spec.kinds[iv].adjacent_unchecked(self.k, jv, ju);
        }
        match self.spec.long_range {
            LongRangePolicy::Empty => false,
            LongRangePolicy::SeededRandom => self.random_edge(LONG_SALT, u, v),
        }
    }
}

/// `(|Xᵢ,ₛ₋₁| + |Xᵢ,ₛ|, |Xᵢ|)` for an even carousel of order `s ≥ 2`, as exact
/// integers: `(2^(s−2) + 2^(s−1), 2^s − 1)`.
pub fn last_two_parts_share(s: u32) -> (u128, u128) {
    assert!((2..=120).contains(&s));
    ((1u128 << (s - 2)) + (1u128 << (s - 1)), (1u128 << s) - 1)
}
