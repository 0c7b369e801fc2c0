//! Iteration driver.
//!
//! Each iteration grows the surviving `k`-edge instances to `k + 1` edges in
//! three stages separated by barriers:
//!
//! 1. per layer: route instances to the partitions owning their vertices,
//!    expand each against the layer's partition, deduplicate;
//! 2. compose: the same routing, expanding against the other layers'
//!    partitions to build instances that span layers;
//! 3. count: global deduplication, grouping into isomorph classes, scoring
//!    and beam selection. All instances of the surviving classes go on to the
//!    next iteration, split by origin.
//!
//! The first iteration starts from every edge. A network with a single layer
//! is plain single-graph discovery, which is also how ground truth is computed.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::canonical::{canonical_substructure, CanonicalSubstructure, Instance};
use crate::compose::{compose_in_partition, tag, EdgeLayerIndex, Origin, TaggedInstance};
use crate::error::{Error, Result};
use crate::expand::expand_into;
use crate::graph::{conflate_all, or_conflate, HoMln, LayerId, Vocabulary};
use crate::metrics::{apply_beam, score, IsomorphGroup, Metric, MdlContext, ScoredSubstructure};
use crate::partition::{
    make_ranges, partition_adjacency, AdjacencyListPartition, RangePartitioning, Strategy,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryConfig {
    /// Classes kept per iteration.
    pub beam: usize,
    /// Largest substructure, in edges.
    pub max_size: usize,
    pub partitions: usize,
    pub workers: usize,
    pub metric: Metric,
    pub strategy: Strategy,
    /// Explicit ranges; overrides `partitions` and `strategy`.
    pub ranges: Option<RangePartitioning>,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        DiscoveryConfig {
            beam: 4,
            max_size: 5,
            partitions: 1,
            workers: 1,
            metric: Metric::Mdl,
            strategy: Strategy::EqualLoad,
            ranges: None,
        }
    }
}

impl DiscoveryConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beam", self.beam),
            ("max_size", self.max_size),
            ("partitions", self.partitions),
            ("workers", self.workers),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// What one iteration did. `iteration` 0 is the scoring of single edges.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    /// Edge count of the instances produced.
    pub size: usize,
    pub job1_seconds: Vec<f64>,
    pub job2_seconds: f64,
    pub job3_seconds: f64,
    /// Expansions emitted per layer before deduplication. Depends on the
    /// partitioning, since boundary vertices expand in several partitions.
    pub job1_raw: Vec<usize>,
    pub job1_unique: Vec<usize>,
    pub composed_raw: usize,
    pub composed_unique: usize,
    /// Distinct instances after the global deduplication.
    pub unique_instances: usize,
    pub classes: usize,
    pub survivors: Vec<CanonicalSubstructure>,
}

#[derive(Debug, Clone)]
pub struct DiscoveryResult<T> {
    /// Beam survivors of every size, best first.
    pub ranked: Vec<ScoredSubstructure<T>>,
    pub iterations: Vec<IterationReport>,
    pub vocab: Arc<Vocabulary>,
    pub config: DiscoveryConfig,
}

pub trait HasInstance {
    fn instance(&self) -> &Instance;
}

impl HasInstance for Instance {
    fn instance(&self) -> &Instance {
        self
    }
}

impl<T: HasInstance> HasInstance for &T {
    fn instance(&self) -> &Instance {
        (*self).instance()
    }
}

impl HasInstance for TaggedInstance {
    fn instance(&self) -> &Instance {
        &self.inst
    }
}

/// Sends each instance to every partition that owns at least one of its vertices.
pub fn route_instances<'a, I: HasInstance>(
    instances: &'a [I],
    ranges: &RangePartitioning,
) -> Result<Vec<Vec<&'a I>>> {
    let mut out: Vec<Vec<&I>> = vec![Vec::new(); ranges.len()];
    let mut owners: Vec<usize> = Vec::new();
    for item in instances {
        owners.clear();
        for v in item.instance().vertices() {
            owners.push(ranges.owner(v).ok_or(Error::Routing(v))?);
        }
        owners.sort_unstable();
        owners.dedup();
        for &q in &owners {
            out[q].push(item);
        }
    }
    Ok(out)
}

/// Concatenates per-worker outputs, then sorts and drops duplicates.
fn shuffle_dedup(parts: Vec<Vec<Instance>>) -> Vec<Instance> {
    let mut all: Vec<Instance> = parts.into_iter().flatten().collect();
    all.par_sort_unstable();
    all.dedup();
    all
}

/// Merges sorted, duplicate-free lists into one.
fn merge_sorted(parts: Vec<Vec<Instance>>) -> Vec<Instance> {
    let mut parts = parts.into_iter();
    let mut acc = parts.next().unwrap_or_default();
    for next in parts {
        let mut out = Vec::with_capacity(acc.len() + next.len());
        let mut a = acc.into_iter().peekable();
        let mut b = next.into_iter().peekable();
        loop {
            let item = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => match x.cmp(y) {
                    std::cmp::Ordering::Less => a.next(),
                    std::cmp::Ordering::Greater => b.next(),
                    std::cmp::Ordering::Equal => {
                        b.next();
                        a.next()
                    }
                },
                (Some(_), None) => a.next(),
                (None, Some(_)) => b.next(),
                (None, None) => break,
            };
            out.extend(item);
        }
        acc = out;
    }
    acc
}

/// Groups sorted instances by class; instance order inside a group is kept.
fn group_parallel(instances: Vec<Instance>) -> Vec<IsomorphGroup> {
    let subs: Vec<CanonicalSubstructure> = instances.par_iter().map(canonical_substructure).collect();
    let mut slots: FxHashMap<CanonicalSubstructure, usize> = FxHashMap::default();
    let mut groups: Vec<IsomorphGroup> = Vec::new();
    for (sub, inst) in subs.into_iter().zip(instances) {
        match slots.get(&sub) {
            Some(&g) => groups[g].instances.push(inst),
            None => {
                slots.insert(sub.clone(), groups.len());
                groups.push(IsomorphGroup { sub, instances: vec![inst] });
            }
        }
    }
    groups.par_sort_unstable_by(|a, b| a.sub.cmp(&b.sub));
    groups
}

struct Pipeline<'a> {
    cfg: &'a DiscoveryConfig,
    ranges: RangePartitioning,
    alps: Vec<Vec<AdjacencyListPartition>>,
    index: EdgeLayerIndex,
    ctx: MdlContext,
}

impl Pipeline<'_> {
    /// Groups, scores and beams one size's instances; returns the survivors
    /// and the number of classes seen.
    fn count<T: Scalar>(&self, instances: Vec<Instance>) -> Result<(Vec<ScoredSubstructure<T>>, usize)> {
        let t = Instant::now();
        let groups = group_parallel(instances);
        let classes = groups.len();
        log::debug!("grouped {classes} classes in {:.3}s", t.elapsed().as_secs_f64());
        let t = Instant::now();
        let scored = groups
            .into_par_iter()
            .map(|g| score::<T>(g, self.cfg.metric, &self.ctx))
            .collect::<Result<Vec<_>>>()?;
        log::debug!("scored in {:.3}s", t.elapsed().as_secs_f64());
        Ok((apply_beam(scored, self.cfg.beam), classes))
    }

    fn tag_all(&self, survivors: &[ScoredSubstructure<impl Scalar>]) -> Result<Vec<TaggedInstance>> {
        survivors
            .par_iter()
            .flat_map_iter(|s| s.instances.iter().cloned())
            .map(|i| tag(i, &self.index))
            .collect()
    }

    fn job1(&self, layer: LayerId, inputs: &[&Instance]) -> Result<(Vec<Instance>, usize)> {
        let routed = route_instances(inputs, &self.ranges)?;
        let parts = &self.alps[layer];
        let outputs: Vec<Vec<Instance>> = routed
            .par_iter()
            .enumerate()
            .map(|(q, insts)| {
                let mut out = Vec::new();
                for inst in insts {
                    expand_into(inst, &parts[q], &mut out);
                }
                out
            })
            .collect();
        let raw = outputs.iter().map(Vec::len).sum();
        Ok((shuffle_dedup(outputs), raw))
    }

    fn job2(&self, inputs: &[TaggedInstance]) -> Result<(Vec<Instance>, usize)> {
        if self.alps.len() < 2 {
            return Ok((Vec::new(), 0));
        }
        let routed = route_instances(inputs, &self.ranges)?;
        let outputs: Vec<Vec<Instance>> = routed
            .par_iter()
            .enumerate()
            .map(|(q, insts)| {
                let slice: Vec<&AdjacencyListPartition> = self.alps.iter().map(|l| &l[q]).collect();
                let mut out = Vec::new();
                for t in insts {
                    compose_in_partition(t, &slice, &self.index, &mut out);
                }
                out
            })
            .collect();
        let raw = outputs.iter().map(Vec::len).sum();
        Ok((shuffle_dedup(outputs), raw))
    }
}

impl<T: Scalar> DiscoveryResult<T> {
    fn empty(vocab: Arc<Vocabulary>, config: DiscoveryConfig) -> Self {
        DiscoveryResult { ranked: Vec::new(), iterations: Vec::new(), vocab, config }
    }
}

/// Runs discovery on a multilayer network. The result depends only on the
/// network and on `beam`, `max_size` and `metric`.
pub fn discover<T: Scalar>(mln: &HoMln, cfg: &DiscoveryConfig) -> Result<DiscoveryResult<T>> {
    cfg.validate()?;
    let graph = conflate_all(mln);
    if graph.is_empty() {
        return Ok(DiscoveryResult::empty(mln.vocab().clone(), cfg.clone()));
    }
    let ranges = match &cfg.ranges {
        Some(r) => r.clone(),
        None => make_ranges(&graph, cfg.partitions, cfg.strategy)?,
    };
    ranges.check_covers(&graph)?;
    let alps = mln
        .layers()
        .iter()
        .map(|l| partition_adjacency(l, &ranges))
        .collect::<Result<Vec<_>>>()?;
    let pipeline = Pipeline {
        cfg,
        ranges,
        alps,
        index: EdgeLayerIndex::new(mln)?,
        ctx: MdlContext::new(&graph),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    let n_layers = mln.num_layers();

    pool.install(|| {
        let mut ranked: Vec<ScoredSubstructure<T>> = Vec::new();
        let mut iterations = Vec::new();

        let start = Instant::now();
        let singles: Vec<Instance> = graph.edges().iter().copied().map(Instance::single).collect();
        let unique = singles.len();
        let mut current: Vec<TaggedInstance> = singles
            .par_iter()
            .map(|i| tag(i.clone(), &pipeline.index))
            .collect::<Result<_>>()?;
        let (survivors, classes) = pipeline.count::<T>(singles)?;
        iterations.push(IterationReport {
            iteration: 0,
            size: 1,
            job1_seconds: vec![0.0; n_layers],
            job2_seconds: 0.0,
            job3_seconds: start.elapsed().as_secs_f64(),
            job1_raw: vec![0; n_layers],
            job1_unique: vec![0; n_layers],
            composed_raw: 0,
            composed_unique: 0,
            unique_instances: unique,
            classes,
            survivors: survivors.iter().map(|s| s.sub.clone()).collect(),
        });
        ranked.extend(survivors);

        for size in 2..=cfg.max_size {
            if current.is_empty() {
                break;
            }
            let mut job1_seconds = Vec::with_capacity(n_layers);
            let mut job1_raw = Vec::with_capacity(n_layers);
            let mut job1_unique = Vec::with_capacity(n_layers);
            let mut produced: Vec<Vec<Instance>> = Vec::with_capacity(n_layers + 1);
            for layer in 0..n_layers {
                let t = Instant::now();
                let inputs: Vec<&Instance> = current
                    .iter()
                    .filter(|t| matches!(t.origin, Origin::Intra(m) if m.contains(layer)))
                    .map(|t| &t.inst)
                    .collect();
                let (out, raw) = pipeline.job1(layer, &inputs)?;
                job1_seconds.push(t.elapsed().as_secs_f64());
                job1_raw.push(raw);
                job1_unique.push(out.len());
                produced.push(out);
            }

            let t = Instant::now();
            let (composed, composed_raw) = pipeline.job2(&current)?;
            let job2_seconds = t.elapsed().as_secs_f64();
            let composed_unique = composed.len();
            produced.push(composed);

            let t = Instant::now();
            let all = merge_sorted(produced);
            log::debug!("merged {} instances in {:.3}s", all.len(), t.elapsed().as_secs_f64());
            let unique_instances = all.len();
            let (survivors, classes) = pipeline.count::<T>(all)?;
            current = pipeline.tag_all(&survivors)?;
            let job3_seconds = t.elapsed().as_secs_f64();

            iterations.push(IterationReport {
                iteration: size - 1,
                size,
                job1_seconds,
                job2_seconds,
                job3_seconds,
                job1_raw,
                job1_unique,
                composed_raw,
                composed_unique,
                unique_instances,
                classes,
                survivors: survivors.iter().map(|s| s.sub.clone()).collect(),
            });
            ranked.extend(survivors);
        }

        ranked.sort_by(crate::metrics::rank_order);
        Ok(DiscoveryResult {
            ranked,
            iterations,
            vocab: mln.vocab().clone(),
            config: cfg.clone(),
        })
    })
}

/// Discovery on the Boolean-OR conflation of the chosen layers.
pub fn run_ground_truth<T: Scalar>(
    mln: &HoMln,
    layer_ids: &[LayerId],
    cfg: &DiscoveryConfig,
) -> Result<DiscoveryResult<T>> {
    let conflated = or_conflate(mln, layer_ids)?;
    discover(&HoMln::single(conflated), cfg)
}
