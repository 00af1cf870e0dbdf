//! Rank-width tools for carousel graphs: GF(2) cut ranks, triple gadgets,
//! carousel construction, exact and sampled rank-width certification, and
//! the graph families built from carousels.

pub mod carousel;
pub mod certify;
pub mod decomposition;
pub mod families;
pub mod gf2;
pub mod graph;
pub mod triples;
