//! Substructure discovery in homogeneous multilayer networks.
//!
//! Each layer is expanded independently, one edge at a time, over a
//! range-partitioned adjacency list; after every iteration a composition
//! step builds the instances that span layers. Instances are deduplicated by
//! their canonical edge order, grouped into isomorph classes by relative
//! vertex numbering, scored (MDL or frequency) and pruned to a beam.
//!
//! Scores are generic over [`Scalar`]; [`Score`] (`f64`) is the everyday
//! choice and [`ExactScore`] gives exact rational arithmetic.

pub mod canonical;
pub mod compose;
pub mod datagen;
pub mod engine;
pub mod error;
pub mod expand;
pub mod graph;
pub mod metrics;
pub mod partition;
pub mod report;
pub mod scalar;

pub use canonical::{
    canonical_substructure, canonicalize_instance, edge_order, instance_key, substructure_key,
    CanonicalSubstructure, Instance,
};
pub use compose::{compose_step, separate, tag, EdgeLayerIndex, LayerMask, Origin, TaggedInstance};
pub use engine::{discover, route_instances, run_ground_truth, DiscoveryConfig, IterationReport};
pub use error::{Error, Result};
pub use expand::{brute_force_enumerate, dedup, expand_instance, ORACLE_EDGE_CAP};
pub use graph::{
    build_adjacency_list, conflate_all, or_conflate, parse_edge_list, AdjacencyList, Edge,
    EdgeRecord, HoMln, Label, Layer, LayerId, VertexId, Vocabulary,
};
pub use metrics::{
    apply_beam, freq_score, group_isomorphs, mdl_score, GraphStats, IsomorphGroup, MdlContext,
    Metric,
};
pub use partition::{
    make_ranges, partition_adjacency, AdjacencyListPartition, RangePartitioning, Strategy,
};
pub use report::{compare_rankings, Divergence, ResultDocument};
pub use scalar::Scalar;

/// Default score type.
pub type Score = f64;
/// Exact rational score.
pub type ExactScore = num_rational::Rational64;

pub type ScoredSubstructure<T = Score> = metrics::ScoredSubstructure<T>;
pub type DiscoveryResult<T = Score> = engine::DiscoveryResult<T>;
