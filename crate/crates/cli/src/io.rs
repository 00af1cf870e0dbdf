//! Graph loading, cap overrides and output routing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use carousel_core::carousel::{Carousel, CarouselSpec};
use carousel_core::decomposition::{DEFAULT_CERTIFICATE_CAP, DEFAULT_RANKWIDTH_CAP};
use carousel_core::families::{DEFAULT_DILWORTH_CAP, DEFAULT_HOLE_CAP};
use carousel_core::graph::{from_graph6, materialize, Adjacency, ExplicitGraph, Vertex, DEFAULT_MATERIALIZE_CAP};
use clap::Args;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CAROUSEL_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub materialize: usize,
    pub rankwidth: usize,
    pub certificate: usize,
    pub dilworth: usize,
    pub hole: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            materialize: DEFAULT_MATERIALIZE_CAP,
            rankwidth: DEFAULT_RANKWIDTH_CAP,
            certificate: DEFAULT_CERTIFICATE_CAP,
            dilworth: DEFAULT_DILWORTH_CAP,
            hole: DEFAULT_HOLE_CAP,
        }
    }
}

impl Caps {
    pub const KEYS: [&'static str; 5] = ["materialize", "rankwidth", "certificate", "dilworth", "hole"];

    /// Applies `key=value` overrides in order.
    pub fn with_overrides(overrides: &[String]) -> Result<Self> {
        let mut caps = Caps::default();
        for item in overrides {
            let Some((key, value)) = item.split_once('=') else {
                bail!("cap override `{item}` is not of the form key=value");
            };
            let value: usize = value
                .trim()
                .parse()
                .with_context(|| format!("cap `{key}` needs a non-negative integer, got `{value}`"))?;
            let slot = match key.trim() {
                "materialize" => &mut caps.materialize,
                "rankwidth" => &mut caps.rankwidth,
                "certificate" => &mut caps.certificate,
                "dilworth" => &mut caps.dilworth,
                "hole" => &mut caps.hole,
                other => bail!("unknown cap `{other}`; known caps are {}", Caps::KEYS.join(", ")),
            };
            *slot = value;
        }
        Ok(caps)
    }
}

/// Where a graph comes from: a carousel spec file or a graph6 string.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct GraphInput {
    /// Carousel spec file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Graph in graph6 format.
    #[arg(long)]
    pub graph6: Option<String>,
    /// File holding one graph6 line.
    #[arg(long)]
    pub graph6_file: Option<PathBuf>,
}

pub enum Loaded {
    Carousel(Carousel),
    Explicit(ExplicitGraph),
}

impl Loaded {
    pub fn adjacency(&self) -> &dyn Adjacency {
        match self {
            Loaded::Carousel(c) => c,
            Loaded::Explicit(g) => g,
        }
    }

    pub fn carousel(&self) -> Result<&Carousel> {
        match self {
            Loaded::Carousel(c) => Ok(c),
            Loaded::Explicit(_) => bail!("this command needs a carousel given with --spec"),
        }
    }

    pub fn explicit(&self, caps: &Caps) -> Result<ExplicitGraph> {
        match self {
            Loaded::Carousel(c) => Ok(materialize(c, caps.materialize)?),
            Loaded::Explicit(g) => Ok(g.clone()),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_spec(path: &Path) -> Result<CarouselSpec> {
    Ok(CarouselSpec::parse(&read_text(path)?)?)
}

pub fn load(input: &GraphInput) -> Result<Loaded> {
    if let Some(path) = &input.spec {
        return Ok(Loaded::Carousel(Carousel::build(read_spec(path)?)?));
    }
    let text = match (&input.graph6, &input.graph6_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => read_text(path)?,
        (None, None) => bail!("one of --spec, --graph6, --graph6-file is required"),
    };
    Ok(Loaded::Explicit(from_graph6(text.trim())?))
}

/// Parses a list of 1-based vertex ids such as `1,2,5-8`.
pub fn parse_ids(text: &str, n: usize) -> Result<Vec<Vertex>> {
    let mut out = Vec::new();
    for tok in text.split([',', ' ']).map(str::trim).filter(|t| !t.is_empty()) {
        let (lo, hi) = match tok.split_once('-') {
            Some((a, b)) => (parse_id(a, n)?, parse_id(b, n)?),
            None => {
                let v = parse_id(tok, n)?;
                (v, v)
            }
        };
        if lo > hi {
            bail!("empty range `{tok}`");
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_id(tok: &str, n: usize) -> Result<Vertex> {
    match tok.trim().parse::<usize>() {
        Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
        _ => bail!("vertex id `{tok}` is not in 1..={n}"),
    }
}

/// Resolves the output location: an explicit path wins, then the
/// environment's output directory joined with `default_name`.
pub fn output_path(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(default_name)))
}

/// Output directory for commands emitting several files.
pub fn output_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}
