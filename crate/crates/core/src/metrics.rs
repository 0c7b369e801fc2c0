//! Isomorph counting, scoring and beam selection.
//!
//! Description lengths are plain node + edge counts. MDL is
//! `DL(G) / (DL(S) + DL(G|S))`, larger is better. `DL(G|S)` replaces a
//! greedily chosen vertex-disjoint subset of the class's instances by one
//! node each; edges from outside an instance are kept and re-attached to
//! its replacement node, merging any that become identical.

use std::cmp::Ordering;
use std::str::FromStr;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::canonical::{canonical_substructure, CanonicalSubstructure, Instance};
use crate::error::{Error, Result};
use crate::graph::{adjacency_of, Edge, Label, Layer, VertexId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Mdl,
    Freq,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mdl" => Ok(Metric::Mdl),
            "freq" => Ok(Metric::Freq),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Mdl => "mdl",
            Metric::Freq => "freq",
        })
    }
}

/// Distinct instances sharing one canonical substructure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsomorphGroup {
    pub sub: CanonicalSubstructure,
    /// Sorted by instance key.
    pub instances: Vec<Instance>,
}

impl IsomorphGroup {
    pub fn frequency(&self) -> usize {
        self.instances.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSubstructure<T> {
    pub sub: CanonicalSubstructure,
    pub instances: Vec<Instance>,
    pub frequency: usize,
    pub value: T,
}

/// Groups deduplicated instances by canonical substructure. Groups come back
/// sorted by substructure key.
pub fn group_isomorphs(instances: Vec<Instance>) -> Vec<IsomorphGroup> {
    let mut keyed: Vec<(CanonicalSubstructure, Instance)> =
        instances.into_iter().map(|i| (canonical_substructure(&i), i)).collect();
    keyed.sort_unstable();
    let mut groups: Vec<IsomorphGroup> = Vec::new();
    for (sub, inst) in keyed {
        match groups.last_mut() {
            Some(g) if g.sub == sub => g.instances.push(inst),
            _ => groups.push(IsomorphGroup { sub, instances: vec![inst] }),
        }
    }
    groups
}

/// Size of the graph in scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub vertices: u64,
    pub edges: u64,
}

impl GraphStats {
    pub fn of(graph: &Layer) -> Self {
        GraphStats {
            vertices: graph.vertex_ids().len() as u64,
            edges: graph.len() as u64,
        }
    }

    pub fn dl_g(&self) -> u64 {
        self.vertices + self.edges
    }
}

/// The graph MDL values are computed against.
#[derive(Debug, Clone)]
pub struct MdlContext {
    stats: GraphStats,
    incident: Vec<Edge>,
    spans: FxHashMap<VertexId, (usize, usize)>,
}

impl MdlContext {
    pub fn new(graph: &Layer) -> Self {
        let adjacency = adjacency_of(graph.edges());
        let mut incident = Vec::with_capacity(adjacency.total_len());
        let mut spans = FxHashMap::default();
        spans.reserve(adjacency.entries.len());
        for (v, list) in adjacency.entries {
            spans.insert(v, (incident.len(), incident.len() + list.len()));
            incident.extend(list);
        }
        MdlContext { stats: GraphStats::of(graph), incident, spans }
    }

    fn incident(&self, v: VertexId) -> &[Edge] {
        self.spans.get(&v).map_or(&[], |&(a, b)| &self.incident[a..b])
    }

    /// Counts `n` extra vertices with no edges toward `DL(G)`.
    pub fn with_isolated_vertices(mut self, n: u64) -> Self {
        self.stats.vertices += n;
        self
    }

    pub fn stats(&self) -> GraphStats {
        self.stats
    }
}

/// Indices of a vertex-disjoint subset of `instances`, taken greedily in the
/// given order.
pub fn greedy_disjoint_cover(instances: &[Instance]) -> Vec<usize> {
    let mut used: FxHashSet<VertexId> = FxHashSet::default();
    let mut chosen = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let vs = inst.vertices();
        if vs.iter().all(|v| !used.contains(v)) {
            used.extend(vs);
            chosen.push(i);
        }
    }
    chosen
}

#[derive(Hash, PartialEq, Eq)]
enum End {
    Vertex(VertexId),
    Node(usize),
}

/// `DL(G|S)` after replacing each of `selected` (pairwise vertex-disjoint)
/// by a single node.
pub fn compressed_length(ctx: &MdlContext, selected: &[&Instance]) -> u64 {
    let mut owner: FxHashMap<VertexId, usize> = FxHashMap::default();
    owner.reserve(selected.iter().map(|i| i.len() + 1).sum());
    let mut instance_edges = 0u64;
    for (j, inst) in selected.iter().enumerate() {
        instance_edges += inst.len() as u64;
        for v in inst.vertices() {
            let prev = owner.insert(v, j);
            debug_assert!(prev.is_none(), "selected instances must be vertex-disjoint");
        }
    }
    let end = |v: VertexId| match owner.get(&v) {
        Some(&j) => End::Node(j),
        None => End::Vertex(v),
    };
    let mut boundary = 0u64;
    let mut collapsed: FxHashSet<(Label, End, End)> = FxHashSet::default();
    for (&v, &j) in &owner {
        for e in ctx.incident(v) {
            // An edge with both ends replaced is seen from each end; keep the src visit.
            if (e.dst == v && owner.contains_key(&e.src)) || selected[j].contains(e) {
                continue;
            }
            boundary += 1;
            collapsed.insert((e.label, end(e.src), end(e.dst)));
        }
    }
    let nodes = ctx.stats.vertices - owner.len() as u64 + selected.len() as u64;
    let edges = ctx.stats.edges - instance_edges - boundary + collapsed.len() as u64;
    nodes + edges
}

pub fn mdl_score<T: Scalar>(group: &IsomorphGroup, ctx: &MdlContext) -> Result<T> {
    if group.instances.is_empty() {
        return Err(Error::contract("cannot score an empty group"));
    }
    let chosen = greedy_disjoint_cover(&group.instances);
    let selected: Vec<&Instance> = chosen.iter().map(|&i| &group.instances[i]).collect();
    let dl_s = (group.sub.vertex_count() + group.sub.len()) as u64;
    let dl_gs = compressed_length(ctx, &selected);
    Ok(T::ratio(ctx.stats.dl_g(), dl_s + dl_gs))
}

pub fn freq_score<T: Scalar>(group: &IsomorphGroup) -> Result<T> {
    if group.instances.is_empty() {
        return Err(Error::contract("cannot score an empty group"));
    }
    Ok(T::count(group.frequency() as u64))
}

pub fn score<T: Scalar>(
    group: IsomorphGroup,
    metric: Metric,
    ctx: &MdlContext,
) -> Result<ScoredSubstructure<T>> {
    let value = match metric {
        Metric::Mdl => mdl_score(&group, ctx)?,
        Metric::Freq => freq_score(&group)?,
    };
    Ok(ScoredSubstructure {
        frequency: group.instances.len(),
        sub: group.sub,
        instances: group.instances,
        value,
    })
}

/// Ranking order: higher value first, then smaller substructure key.
pub fn rank_order<T: Scalar>(a: &ScoredSubstructure<T>, b: &ScoredSubstructure<T>) -> Ordering {
    b.value.rank_cmp(&a.value).then_with(|| a.sub.cmp(&b.sub))
}

/// The `beam` best groups in ranking order. Ties at the cut are resolved by
/// substructure key, never kept beyond `beam`.
pub fn apply_beam<T: Scalar>(
    mut groups: Vec<ScoredSubstructure<T>>,
    beam: usize,
) -> Vec<ScoredSubstructure<T>> {
    groups.sort_by(rank_order);
    groups.truncate(beam);
    groups
}
