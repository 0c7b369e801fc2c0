//! Canonical instances (duplicate keys) and canonical substructures
//! (isomorph-class keys).

use std::cmp::Ordering;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{Edge, VertexId, Vocabulary};

/// Total order on edges: edge label, source label, destination label,
/// source id, destination id.
pub fn edge_order(a: &Edge, b: &Edge) -> Ordering {
    a.cmp(b)
}

/// A connected set of edges given by concrete vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    edges: Vec<Edge>,
    is_canonical: bool,
}

impl Instance {
    /// Wraps edges as given, without sorting or validation.
    pub fn from_edges(edges: Vec<Edge>) -> Self {
        let is_canonical = edges.len() <= 1;
        Instance { edges, is_canonical }
    }

    pub fn single(e: Edge) -> Self {
        Instance { edges: vec![e], is_canonical: true }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.is_canonical
    }

    pub fn contains(&self, e: &Edge) -> bool {
        if self.is_canonical {
            self.edges.binary_search(e).is_ok()
        } else {
            self.edges.contains(e)
        }
    }

    /// Distinct vertex ids in first-appearance order (src before dst).
    pub fn vertices(&self) -> SmallVec<[VertexId; 8]> {
        let mut out: SmallVec<[VertexId; 8]> = SmallVec::new();
        for e in &self.edges {
            for v in [e.src, e.dst] {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.edges.iter().any(|e| e.touches(v))
    }

    /// `self + e` with `e` inserted at its canonical position. `self` must be
    /// canonical and must not contain `e`.
    pub fn extended(&self, e: Edge) -> Instance {
        debug_assert!(self.is_canonical);
        let pos = self.edges.partition_point(|x| x < &e);
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.extend_from_slice(&self.edges[..pos]);
        edges.push(e);
        edges.extend_from_slice(&self.edges[pos..]);
        Instance { edges, is_canonical: true }
    }

    pub fn text(&self, vocab: &Vocabulary) -> String {
        vocab.edges_text(&self.edges)
    }
}

pub(crate) fn is_connected(edges: &[Edge]) -> bool {
    if edges.len() <= 1 {
        return true;
    }
    let mut reached: SmallVec<[VertexId; 16]> = SmallVec::new();
    reached.push(edges[0].src);
    reached.push(edges[0].dst);
    let mut used = vec![false; edges.len()];
    used[0] = true;
    let mut grew = true;
    while grew {
        grew = false;
        for (i, e) in edges.iter().enumerate() {
            if used[i] {
                continue;
            }
            let (s, d) = (reached.contains(&e.src), reached.contains(&e.dst));
            if s || d {
                used[i] = true;
                grew = true;
                if !s {
                    reached.push(e.src);
                }
                if !d {
                    reached.push(e.dst);
                }
            }
        }
    }
    used.iter().all(|&u| u)
}

/// Sorts the edges into canonical order. Idempotent.
pub fn canonicalize_instance(inst: Instance) -> Result<Instance> {
    let mut edges = inst.edges;
    edges.sort_unstable();
    if edges.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::contract("instance contains a repeated edge"));
    }
    if !is_connected(&edges) {
        return Err(Error::contract("instance is not connected"));
    }
    Ok(Instance { edges, is_canonical: true })
}

/// A canonical instance with vertex ids replaced by relative positions `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalSubstructure {
    edges: Vec<Edge>,
}

impl CanonicalSubstructure {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.edges.iter().map(|e| e.src.max(e.dst)).max().unwrap_or(0) as usize
    }

    pub fn text(&self, vocab: &Vocabulary) -> String {
        vocab.edges_text(&self.edges)
    }
}

/// Renumbers vertices by first appearance, scanning each edge's source
/// before its destination.
pub fn canonical_substructure(inst: &Instance) -> CanonicalSubstructure {
    debug_assert!(inst.is_canonical);
    let mut seen: SmallVec<[VertexId; 8]> = SmallVec::new();
    let mut relative = |v: VertexId| -> VertexId {
        match seen.iter().position(|&x| x == v) {
            Some(i) => i as VertexId + 1,
            None => {
                seen.push(v);
                seen.len() as VertexId
            }
        }
    };
    let edges = inst
        .edges
        .iter()
        .map(|e| {
            let src = relative(e.src);
            let dst = relative(e.dst);
            Edge { src, dst, ..*e }
        })
        .collect();
    CanonicalSubstructure { edges }
}

fn edges_key(edges: &[Edge]) -> Vec<u8> {
    // Fixed-width big-endian fields: byte order equals canonical edge order.
    let mut out = Vec::with_capacity(edges.len() * 20);
    for e in edges {
        for x in [e.label.index(), e.src_label.index(), e.dst_label.index(), e.src, e.dst] {
            out.extend_from_slice(&x.to_be_bytes());
        }
    }
    out
}

/// Injective byte key of a canonical instance.
pub fn instance_key(inst: &Instance) -> Vec<u8> {
    edges_key(&inst.edges)
}

/// Injective byte key of a canonical substructure.
pub fn substructure_key(sub: &CanonicalSubstructure) -> Vec<u8> {
    edges_key(&sub.edges)
}
