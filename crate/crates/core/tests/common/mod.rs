#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use mlsub::datagen::{generate_base, Alphabet};
use mlsub::{
    canonicalize_instance, dedup, expand_instance, partition_adjacency, make_ranges, Edge, IsomorphGroup, Instance, Layer,
    Strategy, VertexId,
};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SAMPLE: &str = "x,1,A,2,B\nz,1,A,3,A\ni,1,A,4,C\ny,2,B,4,C\ni,3,A,4,C\ny,5,c,4,C\n";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random simple graph with at most `max_edges` edges and small alphabets.
pub fn small_layer(seed: u64, max_edges: usize) -> Layer {
    let mut r = rng(seed);
    let n = r.gen_range(2..=8usize);
    let m = r.gen_range(1..=max_edges.min(n * (n - 1)));
    let alphabet = Alphabet { vertex_labels: r.gen_range(1..=3), edge_labels: r.gen_range(1..=3) };
    generate_base(n, m, alphabet, r.gen()).unwrap()
}

/// All connected instances of each size up to `k_max`, grown one edge at a
/// time from the single edges over a `p`-way partitioned adjacency list.
pub fn iterative_closure(layer: &Layer, k_max: usize, p: usize) -> BTreeMap<usize, BTreeSet<Instance>> {
    let ranges = make_ranges(layer, p, Strategy::EqualWidth).unwrap();
    let parts = partition_adjacency(layer, &ranges).unwrap();
    let mut out = BTreeMap::new();
    let mut current: Vec<Instance> = layer.edges().iter().copied().map(Instance::single).collect();
    for k in 1..=k_max {
        if current.is_empty() {
            break;
        }
        out.insert(k, current.iter().cloned().collect::<BTreeSet<_>>());
        let mut next = Vec::new();
        for inst in &current {
            for part in &parts {
                if inst.vertices().iter().any(|&v| part.owns(v)) {
                    next.extend(expand_instance(inst, part));
                }
            }
        }
        current = dedup(next).unwrap();
    }
    out
}

/// Backtracking isomorphism test on labelled directed instances.
pub fn isomorphic(a: &Instance, b: &Instance) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let va = a.vertices();
    let vb = b.vertices();
    if va.len() != vb.len() {
        return false;
    }
    let labels = |inst: &Instance| {
        let mut m = HashMap::new();
        for e in inst.edges() {
            m.insert(e.src, e.src_label);
            m.insert(e.dst, e.dst_label);
        }
        m
    };
    let (la, lb) = (labels(a), labels(b));
    let eb: HashSet<(u32, VertexId, VertexId)> =
        b.edges().iter().map(|e| (e.label.index(), e.src, e.dst)).collect();
    let mut map: HashMap<VertexId, VertexId> = HashMap::new();
    let mut used: HashSet<VertexId> = HashSet::new();

    #[allow(clippy::too_many_arguments)]
    fn search(
        i: usize,
        va: &[VertexId],
        vb: &[VertexId],
        a: &Instance,
        la: &HashMap<VertexId, mlsub::Label>,
        lb: &HashMap<VertexId, mlsub::Label>,
        eb: &HashSet<(u32, VertexId, VertexId)>,
        map: &mut HashMap<VertexId, VertexId>,
        used: &mut HashSet<VertexId>,
    ) -> bool {
        if i == va.len() {
            return a.edges().iter().all(|e| eb.contains(&(e.label.index(), map[&e.src], map[&e.dst])));
        }
        let v = va[i];
        for &w in vb {
            if used.contains(&w) || la[&v] != lb[&w] {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            // Prune: every edge between already-mapped vertices must exist.
            let ok = a.edges().iter().all(|e| match (map.get(&e.src), map.get(&e.dst)) {
                (Some(&s), Some(&d)) => eb.contains(&(e.label.index(), s, d)),
                _ => true,
            });
            if ok && search(i + 1, va, vb, a, la, lb, eb, map, used) {
                return true;
            }
            map.remove(&v);
            used.remove(&w);
        }
        false
    }
    search(0, &va, &vb, a, &la, &lb, &eb, &mut map, &mut used)
}

/// No two edges share an (edge label, src label, dst label) triple.
pub fn label_distinguishable(inst: &Instance) -> bool {
    let mut seen = HashSet::new();
    inst.edges().iter().all(|e| seen.insert((e.label, e.src_label, e.dst_label)))
}

/// Relabels vertex ids of `inst` through `perm`.
pub fn renumber(inst: &Instance, perm: &HashMap<VertexId, VertexId>) -> Instance {
    let edges = inst.edges().iter().map(|e| Edge { src: perm[&e.src], dst: perm[&e.dst], ..*e }).collect();
    canonicalize_instance(Instance::from_edges(edges)).unwrap()
}

/// Description length of `graph` after collapsing each selected instance to
/// one node, computed by building the compressed graph explicitly.
pub fn compressed_dl(graph: &Layer, selected: &[&Instance]) -> u64 {
    #[derive(Hash, PartialEq, Eq)]
    enum V {
        Plain(VertexId),
        Node(usize),
    }
    let mut node_of = HashMap::new();
    let mut inside = HashSet::new();
    for (j, inst) in selected.iter().enumerate() {
        for e in inst.edges() {
            node_of.insert(e.src, j);
            node_of.insert(e.dst, j);
            inside.insert(*e);
        }
    }
    let map = |v: VertexId| node_of.get(&v).map_or(V::Plain(v), |&j| V::Node(j));
    let mut vertices = HashSet::new();
    for v in graph.vertex_ids() {
        vertices.insert(map(v));
    }
    let edges: HashSet<_> = graph
        .edges()
        .iter()
        .filter(|e| !inside.contains(e))
        .map(|e| (e.label, map(e.src), map(e.dst)))
        .collect();
    (vertices.len() + edges.len()) as u64
}

fn disjoint(a: &Instance, b: &Instance) -> bool {
    a.vertices().iter().all(|v| !b.touches(*v))
}

/// Best MDL value over every vertex-disjoint subset of the group's
/// instances. `None` when the search exceeds `max_subsets`.
pub fn exhaustive_mdl(graph: &Layer, group: &IsomorphGroup, max_subsets: usize) -> Option<Rational64> {
    let insts = &group.instances;
    let mut best = u64::MAX;
    let mut visited = 0usize;
    let mut chosen: Vec<&Instance> = Vec::new();

    fn walk<'a>(
        i: usize,
        insts: &'a [Instance],
        graph: &Layer,
        chosen: &mut Vec<&'a Instance>,
        best: &mut u64,
        visited: &mut usize,
        cap: usize,
    ) -> bool {
        if i == insts.len() {
            *visited += 1;
            *best = (*best).min(compressed_dl(graph, chosen));
            return *visited <= cap;
        }
        if !walk(i + 1, insts, graph, chosen, best, visited, cap) {
            return false;
        }
        if chosen.iter().all(|c| disjoint(c, &insts[i])) {
            chosen.push(&insts[i]);
            let ok = walk(i + 1, insts, graph, chosen, best, visited, cap);
            chosen.pop();
            return ok;
        }
        true
    }
    if !walk(0, insts, graph, &mut chosen, &mut best, &mut visited, max_subsets) {
        return None;
    }
    let dl_g = (graph.vertex_ids().len() + graph.len()) as i64;
    let dl_s = (group.sub.vertex_count() + group.sub.len()) as i64;
    Some(Rational64::new(dl_g, dl_s + best as i64))
}
