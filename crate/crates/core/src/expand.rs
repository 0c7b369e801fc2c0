//! Independent, unconstrained one-edge expansion and duplicate elimination,
//! plus an exhaustive enumerator used as a completeness oracle.

use std::collections::{BTreeMap, BTreeSet};

use smallvec::SmallVec;

use crate::canonical::{canonicalize_instance, is_connected, Instance};
use crate::error::{Error, Result};
use crate::graph::{Edge, Layer};
use crate::partition::AdjacencyListPartition;

/// Default edge cap for [`brute_force_enumerate`].
pub const ORACLE_EDGE_CAP: usize = 14;

/// Grows `inst` by every edge incident on one of its vertices owned by `alp`.
///
/// Vertices outside the partition's range are skipped. The output is
/// canonical, sorted and free of duplicates.
pub fn expand_instance(inst: &Instance, alp: &AdjacencyListPartition) -> Vec<Instance> {
    let mut out = Vec::new();
    expand_into(inst, alp, &mut out);
    out
}

pub(crate) fn expand_into(inst: &Instance, alp: &AdjacencyListPartition, out: &mut Vec<Instance>) {
    let mut added: SmallVec<[Edge; 16]> = SmallVec::new();
    for v in inst.vertices() {
        if !alp.owns(v) {
            continue;
        }
        for e in alp.get(v) {
            // an edge between two vertices of `inst` is reachable from both
            if !inst.contains(e) && !added.contains(e) {
                added.push(*e);
            }
        }
    }
    added.sort_unstable();
    out.extend(added.into_iter().map(|e| inst.extended(e)));
}

/// Keeps one representative per distinct instance, sorted by key.
pub fn dedup(instances: impl IntoIterator<Item = Instance>) -> Result<Vec<Instance>> {
    let mut all: Vec<Instance> = instances.into_iter().collect();
    if let Some(first) = all.first() {
        let k = first.len();
        if let Some(bad) = all.iter().find(|i| i.len() != k) {
            return Err(Error::contract(format!(
                "dedup over mixed sizes ({k} and {})",
                bad.len()
            )));
        }
        if let Some(bad) = all.iter().find(|i| !i.is_canonical()) {
            return Err(Error::contract(format!(
                "dedup input of size {} is not canonical",
                bad.len()
            )));
        }
    }
    all.sort_unstable();
    all.dedup();
    Ok(all)
}

/// Every connected edge subset of `layer` with at most `k_max` edges, by size.
///
/// Enumerates all `2^|E|` subsets, so the layer must have at most `cap` edges.
pub fn brute_force_enumerate(
    layer: &Layer,
    k_max: usize,
    cap: usize,
) -> Result<BTreeMap<usize, BTreeSet<Instance>>> {
    let edges = layer.edges();
    if edges.len() > cap {
        return Err(Error::Config(format!(
            "brute-force enumeration is capped at {cap} edges, layer has {}",
            edges.len()
        )));
    }
    if edges.len() >= usize::BITS as usize {
        return Err(Error::Config("layer too large to enumerate".into()));
    }
    let mut out: BTreeMap<usize, BTreeSet<Instance>> = BTreeMap::new();
    let mut subset = Vec::with_capacity(edges.len());
    for mask in 1usize..(1usize << edges.len()) {
        let k = mask.count_ones() as usize;
        if k > k_max {
            continue;
        }
        subset.clear();
        subset.extend((0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]));
        if is_connected(&subset) {
            let inst = canonicalize_instance(Instance::from_edges(subset.clone()))?;
            out.entry(k).or_default().insert(inst);
        }
    }
    Ok(out)
}
