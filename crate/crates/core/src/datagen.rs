//! Synthetic datasets: random labelled graphs, embedded patterns with known
//! frequency, and random edge splits into layers.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, so a given seed
//! produces the same dataset on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, HoMln, Layer, VertexId};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    pub vertex_labels: usize,
    pub edge_labels: usize,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet { vertex_labels: 5, edge_labels: 5 }
    }
}

/// Uniform random simple directed graph on vertices `1..=n_vertices`:
/// no self-loops and at most one edge per ordered vertex pair. Vertex labels
/// are `V0..`, edge labels `e0..`, both drawn uniformly.
pub fn generate_base(
    n_vertices: usize,
    n_edges: usize,
    alphabet: Alphabet,
    seed: u64,
) -> Result<Layer> {
    let capacity = n_vertices.saturating_mul(n_vertices.saturating_sub(1));
    if n_edges > capacity {
        return Err(Error::Config(format!(
            "{n_edges} edges do not fit in a simple graph on {n_vertices} vertices"
        )));
    }
    if n_vertices > VertexId::MAX as usize {
        return Err(Error::Config(format!("{n_vertices} vertices exceed the id space")));
    }
    if n_edges > 0 && (alphabet.vertex_labels == 0 || alphabet.edge_labels == 0) {
        return Err(Error::Config("label alphabets must be non-empty".into()));
    }
    let mut rng = rng(seed);
    let labels: Vec<usize> = (0..n_vertices).map(|_| rng.gen_range(0..alphabet.vertex_labels.max(1))).collect();

    let pairs: Vec<(VertexId, VertexId)> = if n_edges.saturating_mul(2) > capacity {
        let mut all: Vec<(VertexId, VertexId)> = (1..=n_vertices as VertexId)
            .flat_map(|s| (1..=n_vertices as VertexId).filter(move |&d| d != s).map(move |d| (s, d)))
            .collect();
        let (chosen, _) = all.partial_shuffle(&mut rng, n_edges);
        chosen.to_vec()
    } else {
        let mut seen: FxHashSet<(VertexId, VertexId)> = FxHashSet::default();
        let mut pairs = Vec::with_capacity(n_edges);
        while pairs.len() < n_edges {
            let s = rng.gen_range(1..=n_vertices as VertexId);
            let d = rng.gen_range(1..=n_vertices as VertexId);
            if s != d && seen.insert((s, d)) {
                pairs.push((s, d));
            }
        }
        pairs
    };

    let records: Vec<EdgeRecord> = pairs
        .into_iter()
        .map(|(s, d)| {
            let el = rng.gen_range(0..alphabet.edge_labels);
            EdgeRecord::new(
                format!("e{el}"),
                s,
                format!("V{}", labels[s as usize - 1]),
                d,
                format!("V{}", labels[d as usize - 1]),
            )
        })
        .collect();
    Layer::from_records(records)
}

/// Named patterns whose labels never occur in generated base graphs.
///
/// `star3` is a 3-edge out-star; `star5` grows it by two more edges, so
/// every `star5` copy also holds a `star3`-shaped instance.
pub fn builtin_pattern(name: &str) -> Option<Layer> {
    let records: &[(&str, VertexId, &str, VertexId, &str)] = match name {
        "star3" => &[("pa", 1, "P", 2, "Q"), ("pb", 1, "P", 3, "R"), ("pc", 1, "P", 4, "S")],
        "star5" => &[
            ("pa", 1, "P", 2, "Q"),
            ("pb", 1, "P", 3, "R"),
            ("pc", 1, "P", 4, "S"),
            ("pd", 2, "Q", 5, "T"),
            ("pe", 5, "T", 6, "U"),
        ],
        "path3" => &[("qa", 1, "K", 2, "L"), ("qb", 2, "L", 3, "M"), ("qc", 3, "M", 4, "N")],
        "path5" => &[
            ("ra", 1, "F", 2, "G"),
            ("rb", 2, "G", 3, "H"),
            ("rc", 3, "H", 4, "I"),
            ("rd", 4, "I", 5, "J"),
            ("re", 5, "J", 6, "W"),
        ],
        _ => return None,
    };
    Some(Layer::from_records(records.iter().copied()).expect("builtin patterns are valid"))
}

pub const BUILTIN_PATTERNS: &[&str] = &["star3", "star5", "path3", "path5"];

/// Copies of one pattern placed into a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedPattern {
    /// The pattern's edges in canonical text form.
    pub pattern: String,
    /// One canonical instance per copy.
    pub copies: Vec<String>,
    pub bridges: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub patterns: Vec<EmbeddedPattern>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedOptions {
    /// Attach each copy to the base graph by one random edge.
    pub bridge: bool,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { bridge: true }
    }
}

fn canonical_text(records: Vec<EdgeRecord>) -> String {
    let layer = Layer::from_records(records).expect("copy records are valid");
    layer.vocab().edges_text(layer.edges())
}

/// Adds `count` vertex-disjoint copies of `pattern` on fresh vertex ids.
///
/// The pattern's own vertex ids only serve as positions. With bridging on,
/// each copy gets one extra edge between a random copy vertex and a random
/// base vertex, labelled with a random base edge label and oriented at random.
pub fn embed_pattern(
    base: &Layer,
    pattern: &Layer,
    count: usize,
    seed: u64,
    opts: EmbedOptions,
) -> Result<(Layer, EmbeddedPattern)> {
    let pattern_ids = pattern.vertex_ids();
    let mut rng = rng(seed);
    let base_ids = base.vertex_ids();
    let mut next = base_ids.last().copied().unwrap_or(0) as u64 + 1;
    let needed = count as u64 * pattern_ids.len() as u64;
    if next + needed > VertexId::MAX as u64 {
        return Err(Error::Config("not enough fresh vertex ids for the embedded copies".into()));
    }
    let mut base_edge_labels: Vec<String> = base.records().map(|r| r.label).collect();
    base_edge_labels.sort();
    base_edge_labels.dedup();

    let pattern_records: Vec<EdgeRecord> = pattern.records().collect();
    let mut records: Vec<EdgeRecord> = base.records().collect();
    let mut copies = Vec::with_capacity(count);
    let mut bridges = Vec::new();
    for _ in 0..count {
        let fresh = |v: VertexId| -> VertexId {
            let pos = pattern_ids.binary_search(&v).expect("pattern vertex");
            (next + pos as u64) as VertexId
        };
        let copy: Vec<EdgeRecord> = pattern_records
            .iter()
            .map(|r| EdgeRecord {
                src: fresh(r.src),
                dst: fresh(r.dst),
                ..r.clone()
            })
            .collect();
        if opts.bridge && !base_ids.is_empty() && !base_edge_labels.is_empty() {
            let inner = &copy[rng.gen_range(0..copy.len())];
            let (v, v_label) = if rng.gen_bool(0.5) {
                (inner.src, inner.src_label.clone())
            } else {
                (inner.dst, inner.dst_label.clone())
            };
            let u = base_ids[rng.gen_range(0..base_ids.len())];
            let u_label = base
                .records()
                .find_map(|r| {
                    if r.src == u {
                        Some(r.src_label)
                    } else if r.dst == u {
                        Some(r.dst_label)
                    } else {
                        None
                    }
                })
                .expect("base vertex has an edge");
            let label = base_edge_labels[rng.gen_range(0..base_edge_labels.len())].clone();
            let bridge = if rng.gen_bool(0.5) {
                EdgeRecord::new(label, v, v_label, u, u_label)
            } else {
                EdgeRecord::new(label, u, u_label, v, v_label)
            };
            bridges.push(bridge.to_line());
            records.push(bridge);
        }
        copies.push(canonical_text(copy.clone()));
        records.extend(copy);
        next += pattern_ids.len() as u64;
    }
    let layer = Layer::from_records(records)?;
    let embedded = EmbeddedPattern {
        pattern: pattern.vocab().edges_text(pattern.edges()),
        copies,
        bridges,
    };
    Ok((layer, embedded))
}

/// Parses `50/50`, `70/30`, `0.9/0.1` and the like into fractions summing to 1.
pub fn parse_split(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split('/')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad split {s:?}"))))
        .collect::<Result<_>>()?;
    let total: f64 = parts.iter().sum();
    if parts.is_empty() || parts.iter().any(|p| !p.is_finite() || *p < 0.0) || total <= 0.0 {
        return Err(Error::Config(format!("bad split {s:?}")));
    }
    Ok(parts.into_iter().map(|p| p / total).collect())
}

/// Randomly deals the edges of `base` into `fractions.len()` layers. Every
/// edge goes to exactly one layer; layer sizes are the fractions rounded.
pub fn split_layers(base: &Layer, fractions: &[f64], seed: u64) -> Result<HoMln> {
    if fractions.is_empty()
        || fractions.iter().any(|f| !f.is_finite() || *f < 0.0)
        || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::Config(format!("layer fractions {fractions:?} must be non-negative and sum to 1")));
    }
    let mut edges = base.edges().to_vec();
    edges.shuffle(&mut rng(seed));
    let n = edges.len() as f64;
    let mut layers = Vec::with_capacity(fractions.len());
    let mut cum = 0.0;
    let mut start = 0usize;
    for (i, f) in fractions.iter().enumerate() {
        cum += f;
        let end = if i + 1 == fractions.len() { edges.len() } else { (cum * n).round() as usize };
        let end = end.clamp(start, edges.len());
        layers.push(Layer::from_parts(i, edges[start..end].to_vec(), base.vocab().clone()));
        start = end;
    }
    HoMln::new(layers)
}
