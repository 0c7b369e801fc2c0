//! Inter-layer composition.
//!
//! After each iteration, instances that span layers are generated by growing
//! the surviving instances with edges taken from the adjacency lists of the
//! other layers. An instance whose edges all live in one common layer is an
//! intra-layer instance and is grown inside that layer instead.
//!
//! An edge present in several layers belongs to all of them, so an instance
//! is intra-layer for every layer in the intersection of its edges' layer
//! sets. It is grown in each of those layers and composed only with the
//! remaining ones, which together still offers it every edge of the
//! conflated graph exactly once per layer.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::canonical::Instance;
use crate::error::{Error, Result};
use crate::expand::dedup;
use crate::graph::{Edge, HoMln, LayerId};
use crate::metrics::ScoredSubstructure;
use crate::partition::AdjacencyListPartition;

pub const MAX_LAYERS: usize = 64;

/// Set of layer ids.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct LayerMask(u64);

impl LayerMask {
    pub const EMPTY: LayerMask = LayerMask(0);

    pub fn single(id: LayerId) -> Self {
        LayerMask(1 << id)
    }

    pub fn all(n: usize) -> Self {
        if n >= 64 {
            LayerMask(u64::MAX)
        } else {
            LayerMask((1u64 << n) - 1)
        }
    }

    pub fn contains(self, id: LayerId) -> bool {
        self.0 >> id & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersect(self, other: LayerMask) -> LayerMask {
        LayerMask(self.0 & other.0)
    }

    pub fn lowest(self) -> Option<LayerId> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as LayerId)
    }

    pub fn ids(self) -> impl Iterator<Item = LayerId> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// Which layers contain each edge of a network.
#[derive(Debug, Clone)]
pub struct EdgeLayerIndex {
    masks: FxHashMap<Edge, LayerMask>,
    layers: usize,
}

impl EdgeLayerIndex {
    pub fn new(mln: &HoMln) -> Result<Self> {
        if mln.num_layers() > MAX_LAYERS {
            return Err(Error::Config(format!(
                "at most {MAX_LAYERS} layers are supported, got {}",
                mln.num_layers()
            )));
        }
        let mut masks: FxHashMap<Edge, LayerMask> = FxHashMap::default();
        for layer in mln.layers() {
            for e in layer.edges() {
                masks.entry(*e).or_default().0 |= 1 << layer.id();
            }
        }
        Ok(EdgeLayerIndex { masks, layers: mln.num_layers() })
    }

    pub fn num_layers(&self) -> usize {
        self.layers
    }

    pub fn mask(&self, e: &Edge) -> Option<LayerMask> {
        self.masks.get(e).copied()
    }

    /// Layers containing every edge of `edges`; `None` if some edge is in no layer.
    pub fn common(&self, edges: &[Edge]) -> Option<LayerMask> {
        edges
            .iter()
            .try_fold(LayerMask::all(self.layers), |acc, e| Some(acc.intersect(self.mask(e)?)))
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Hash)]
pub enum Origin {
    /// Every edge lies in each of these layers.
    Intra(LayerMask),
    Composed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedInstance {
    pub inst: Instance,
    pub origin: Origin,
    /// One layer per edge; a layer that contains the edge.
    pub tags: Vec<LayerId>,
}

impl TaggedInstance {
    pub fn is_composed(&self) -> bool {
        self.origin == Origin::Composed
    }
}

pub fn tag(inst: Instance, index: &EdgeLayerIndex) -> Result<TaggedInstance> {
    let mut masks: SmallVec<[LayerMask; 8]> = SmallVec::new();
    for e in inst.edges() {
        masks.push(index.mask(e).ok_or_else(|| {
            Error::contract("instance has an edge that belongs to no layer")
        })?);
    }
    let common = masks.iter().fold(LayerMask::all(index.layers), |a, m| a.intersect(*m));
    let (origin, tags) = match common.lowest() {
        Some(l) => (Origin::Intra(common), vec![l; masks.len()]),
        None => (
            Origin::Composed,
            masks.iter().map(|m| m.lowest().expect("non-empty mask")).collect(),
        ),
    };
    Ok(TaggedInstance { inst, origin, tags })
}

/// Layers whose edges `origin` may be composed with.
fn permitted(origin: Origin, layers: usize) -> LayerMask {
    match origin {
        Origin::Intra(m) => LayerMask(LayerMask::all(layers).0 & !m.0),
        Origin::Composed => LayerMask::all(layers),
    }
}

/// Composition for one instance against one partition slice of every
/// layer (`alps[j]` is layer `j`'s partition, all over the same range).
/// Only results that no single layer contains are emitted.
pub fn compose_in_partition(
    tagged: &TaggedInstance,
    alps: &[&AdjacencyListPartition],
    index: &EdgeLayerIndex,
    out: &mut Vec<Instance>,
) {
    let allowed = permitted(tagged.origin, alps.len());
    let base = match tagged.origin {
        Origin::Intra(m) => m,
        Origin::Composed => LayerMask::EMPTY,
    };
    let inst = &tagged.inst;
    let mut added: SmallVec<[Edge; 16]> = SmallVec::new();
    for v in inst.vertices() {
        for (j, alp) in alps.iter().enumerate() {
            if !allowed.contains(j) || !alp.owns(v) {
                continue;
            }
            for e in alp.get(v) {
                if inst.contains(e) || added.contains(e) {
                    continue;
                }
                let m = index.mask(e).expect("adjacency edges are indexed");
                if base.intersect(m).is_empty() {
                    added.push(*e);
                }
            }
        }
    }
    added.sort_unstable();
    out.extend(added.into_iter().map(|e| inst.extended(e)));
}

/// One composition step over all partitions: grows every `(k-1)`-edge
/// survivor into the `k`-edge instances that span two or more layers.
///
/// `alps[layer][partition]`; every layer must be split over the same ranges.
pub fn compose_step(
    survivors: &[TaggedInstance],
    alps: &[Vec<AdjacencyListPartition>],
    index: &EdgeLayerIndex,
) -> Result<Vec<TaggedInstance>> {
    if let Some(first) = survivors.first() {
        let k = first.inst.len();
        if survivors.iter().any(|t| t.inst.len() != k || !t.inst.is_canonical()) {
            return Err(Error::contract("composition input must be canonical and of one size"));
        }
    }
    if alps.len() != index.num_layers() {
        return Err(Error::contract("one adjacency partition list per layer is required"));
    }
    let parts = alps.first().map_or(0, Vec::len);
    let mut raw = Vec::new();
    for t in survivors {
        for q in 0..parts {
            let slice: Vec<&AdjacencyListPartition> = alps.iter().map(|l| &l[q]).collect();
            compose_in_partition(t, &slice, index, &mut raw);
        }
    }
    dedup(raw)?.into_iter().map(|i| tag(i, index)).collect()
}

/// Survivors routed to their next job.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Separated {
    /// Intra-layer instances per layer; an instance shared by several layers
    /// is listed under each of them.
    pub per_layer: Vec<Vec<Instance>>,
    pub composed: Vec<Instance>,
}

pub fn separate<T>(
    survivors: &[ScoredSubstructure<T>],
    index: &EdgeLayerIndex,
) -> Result<Separated> {
    let mut out = Separated {
        per_layer: vec![Vec::new(); index.num_layers()],
        composed: Vec::new(),
    };
    for s in survivors {
        for inst in &s.instances {
            match tag(inst.clone(), index)?.origin {
                Origin::Intra(m) => {
                    for l in m.ids() {
                        out.per_layer[l].push(inst.clone());
                    }
                }
                Origin::Composed => out.composed.push(inst.clone()),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonicalize_instance;
    use crate::graph::{conflate_all, Layer};
    use crate::metrics::{group_isomorphs, score, Metric, MdlContext};
    use crate::partition::{make_ranges, partition_adjacency, RangePartitioning, Strategy};

    type Row<'a> = (&'a str, u32, &'a str, u32, &'a str);

    fn mln(layers: &[&[Row]]) -> HoMln {
        HoMln::new(
            layers
                .iter()
                .map(|l| Layer::from_records(l.iter().copied()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn alps(m: &HoMln, ranges: &RangePartitioning) -> Vec<Vec<AdjacencyListPartition>> {
        m.layers().iter().map(|l| partition_adjacency(l, ranges).unwrap()).collect()
    }

    fn singles(m: &HoMln, index: &EdgeLayerIndex) -> Vec<TaggedInstance> {
        let g = conflate_all(m);
        g.edges().iter().map(|e| tag(Instance::single(*e), index).unwrap()).collect()
    }

    fn texts(m: &HoMln, ts: &[TaggedInstance]) -> Vec<String> {
        ts.iter().map(|t| t.inst.text(m.vocab())).collect()
    }

    #[test]
    fn pairs_edges_across_two_layers() {
        let m = mln(&[&[("a", 1, "X", 2, "Y")], &[("b", 2, "Y", 3, "Z")]]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let out = compose_step(&singles(&m, &index), &alps(&m, &RangePartitioning::whole()), &index)
            .unwrap();
        assert_eq!(texts(&m, &out), ["(a,1,X,2,Y)|(b,2,Y,3,Z)"]);
        assert_eq!(out[0].origin, Origin::Composed);
        assert_eq!(out[0].tags, [0, 1]);
    }

    #[test]
    fn disjoint_layers_compose_nothing() {
        let m = mln(&[&[("a", 1, "X", 2, "Y")], &[("b", 3, "Y", 4, "Z")]]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let out = compose_step(&singles(&m, &index), &alps(&m, &RangePartitioning::whole()), &index)
            .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn composed_pair_grows_from_both_layers() {
        // a (layer 0) and b (layer 1) share vertex 2; c in layer 0 and d in
        // layer 1 each hang off the pair.
        let m = mln(&[
            &[("a", 1, "X", 2, "Y"), ("c", 1, "X", 5, "W")],
            &[("b", 2, "Y", 3, "Z"), ("d", 3, "Z", 4, "V")],
        ]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let g = conflate_all(&m);
        let pick = |t: &str| *g.edges().iter().find(|e| g.vocab().edge_text(e) == t).unwrap();
        let pair = canonicalize_instance(Instance::from_edges(vec![
            pick("(a,1,X,2,Y)"),
            pick("(b,2,Y,3,Z)"),
        ]))
        .unwrap();
        let pair = tag(pair, &index).unwrap();
        assert!(pair.is_composed());
        for p in [1, 2, 5] {
            let ranges = make_ranges(&g, p, Strategy::EqualLoad).unwrap();
            let out = compose_step(std::slice::from_ref(&pair), &alps(&m, &ranges), &index).unwrap();
            assert_eq!(
                texts(&m, &out),
                [
                    "(a,1,X,2,Y)|(b,2,Y,3,Z)|(c,1,X,5,W)",
                    "(a,1,X,2,Y)|(b,2,Y,3,Z)|(d,3,Z,4,V)",
                ],
                "p = {p}"
            );
        }
    }

    #[test]
    fn intra_instances_skip_own_layer() {
        let m = mln(&[&[("a", 1, "X", 2, "Y"), ("c", 2, "Y", 3, "Z")], &[("b", 2, "Y", 4, "Q")]]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let out = compose_step(&singles(&m, &index), &alps(&m, &RangePartitioning::whole()), &index)
            .unwrap();
        // a+c is intra-layer 0 and belongs to layer 0's own expansion
        assert_eq!(texts(&m, &out), ["(a,1,X,2,Y)|(b,2,Y,4,Q)", "(b,2,Y,4,Q)|(c,2,Y,3,Z)"]);
        assert!(out.iter().all(|t| t.tags.iter().collect::<std::collections::BTreeSet<_>>().len() >= 2));
    }

    #[test]
    fn shared_edge_is_not_counted_twice() {
        let m = mln(&[
            &[("a", 1, "X", 2, "Y"), ("s", 2, "Y", 3, "Z")],
            &[("s", 2, "Y", 3, "Z"), ("b", 3, "Z", 4, "W")],
        ]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let s = singles(&m, &index);
        let shared = s.iter().find(|t| t.inst.text(m.vocab()) == "(s,2,Y,3,Z)").unwrap();
        assert_eq!(shared.origin, Origin::Intra(LayerMask::all(2)));
        // a+s lies in layer 0 and s+b in layer 1: nothing spans both yet
        let out = compose_step(&s, &alps(&m, &RangePartitioning::whole()), &index).unwrap();
        assert!(out.is_empty());

        let g = conflate_all(&m);
        let pick = |t: &str| *g.edges().iter().find(|e| g.vocab().edge_text(e) == t).unwrap();
        let a_s = canonicalize_instance(Instance::from_edges(vec![
            pick("(a,1,X,2,Y)"),
            pick("(s,2,Y,3,Z)"),
        ]))
        .unwrap();
        let a_s = tag(a_s, &index).unwrap();
        assert_eq!(a_s.origin, Origin::Intra(LayerMask::single(0)));
        let out = compose_step(&[a_s], &alps(&m, &RangePartitioning::whole()), &index).unwrap();
        assert_eq!(texts(&m, &out), ["(a,1,X,2,Y)|(b,3,Z,4,W)|(s,2,Y,3,Z)"]);
    }

    #[test]
    fn separate_routes_by_origin() {
        let m = mln(&[
            &[("a", 1, "X", 2, "Y"), ("a", 5, "X", 6, "Y")],
            &[("b", 2, "Y", 3, "Z")],
        ]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let g = conflate_all(&m);
        let mut insts: Vec<Instance> = g.edges().iter().copied().map(Instance::single).collect();
        let composed = compose_step(&singles(&m, &index), &alps(&m, &RangePartitioning::whole()), &index)
            .unwrap();
        insts.extend(composed.into_iter().map(|t| t.inst));
        let ctx = MdlContext::new(&g);
        let scored: Vec<ScoredSubstructure<f64>> = group_isomorphs(insts.clone())
            .into_iter()
            .map(|grp| score(grp, Metric::Freq, &ctx).unwrap())
            .collect();
        let sep = separate(&scored, &index).unwrap();
        assert_eq!(sep.per_layer[0].len(), 2);
        assert_eq!(sep.per_layer[1].len(), 1);
        assert_eq!(sep.composed.len(), 1);

        let mut again: Vec<Instance> =
            sep.per_layer.into_iter().flatten().chain(sep.composed).collect();
        again.sort();
        insts.sort();
        assert_eq!(again, insts);
    }

    #[test]
    fn separate_rejects_unknown_edges() {
        let m = mln(&[&[("a", 1, "X", 2, "Y")], &[("b", 2, "Y", 3, "Z")]]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let other = Layer::from_records([("zz", 8, "X", 9, "Y")]).unwrap();
        let g = other.clone();
        let grp = group_isomorphs(vec![Instance::single(g.edges()[0])]).pop().unwrap();
        let s = score::<f64>(grp, Metric::Freq, &MdlContext::new(&g)).unwrap();
        assert!(matches!(separate(&[s], &index), Err(Error::Contract(_))));
    }

    #[test]
    fn all_composed_beam_leaves_layers_empty() {
        let m = mln(&[&[("a", 1, "X", 2, "Y")], &[("b", 2, "Y", 3, "Z")]]);
        let index = EdgeLayerIndex::new(&m).unwrap();
        let out = compose_step(&singles(&m, &index), &alps(&m, &RangePartitioning::whole()), &index)
            .unwrap();
        let g = conflate_all(&m);
        let grp = group_isomorphs(out.into_iter().map(|t| t.inst).collect()).pop().unwrap();
        let s = score::<f64>(grp, Metric::Freq, &MdlContext::new(&g)).unwrap();
        let sep = separate(&[s], &index).unwrap();
        assert!(sep.per_layer.iter().all(Vec::is_empty));
        assert_eq!(sep.composed.len(), 1);
    }
}
