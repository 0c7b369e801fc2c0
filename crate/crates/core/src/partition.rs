//! Range-based partitioning of the vertex-id space.
//!
//! A vertex and its whole adjacency list belong to exactly one partition.
//! An edge whose endpoints fall in different ranges is therefore listed in
//! both partitions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::{build_adjacency_list, Edge, Layer, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    EqualWidth,
    #[default]
    EqualLoad,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal-width" => Ok(Strategy::EqualWidth),
            "equal-load" => Ok(Strategy::EqualLoad),
            other => Err(Error::Config(format!("unknown partition strategy {other:?}"))),
        }
    }
}

/// Sorted, disjoint, inclusive vertex-id ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangePartitioning {
    ranges: Vec<(VertexId, VertexId)>,
}

impl RangePartitioning {
    pub fn new(ranges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::Config("at least one range is required".into()));
        }
        for &(lo, hi) in &ranges {
            if lo > hi {
                return Err(Error::Config(format!("range {lo}-{hi} is empty")));
            }
        }
        if let Some(w) = ranges.windows(2).find(|w| w[0].1 >= w[1].0) {
            return Err(Error::Config(format!(
                "ranges {}-{} and {}-{} overlap or are out of order",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(RangePartitioning { ranges })
    }

    /// One range covering every possible id.
    pub fn whole() -> Self {
        RangePartitioning { ranges: vec![(1, VertexId::MAX)] }
    }

    pub fn ranges(&self) -> &[(VertexId, VertexId)] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Index of the range containing `v`.
    pub fn owner(&self, v: VertexId) -> Option<usize> {
        let i = self.ranges.partition_point(|&(_, hi)| hi < v);
        match self.ranges.get(i) {
            Some(&(lo, _)) if lo <= v => Some(i),
            _ => None,
        }
    }

    /// Errors on the first vertex of `layer` left uncovered.
    pub fn check_covers(&self, layer: &Layer) -> Result<()> {
        match layer.vertex_ids().into_iter().find(|&v| self.owner(v).is_none()) {
            Some(v) => Err(Error::Routing(v)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for RangePartitioning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (lo, hi)) in self.ranges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{lo}-{hi}")?;
        }
        Ok(())
    }
}

/// Parses `"1-3,4-5"`. A bare number `n` is the range `n-n`.
impl FromStr for RangePartitioning {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |part: &str| Error::Config(format!("bad range {part:?}"));
        let mut ranges = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (lo, hi) = match part.split_once('-') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (part, part),
            };
            let lo: VertexId = lo.parse().map_err(|_| bad(part))?;
            let hi: VertexId = hi.parse().map_err(|_| bad(part))?;
            ranges.push((lo, hi));
        }
        RangePartitioning::new(ranges)
    }
}

/// Splits the vertex ids present in `layer` into `p` contiguous ranges.
///
/// `EqualWidth` cuts `[min_id, max_id]` into equally wide intervals;
/// `EqualLoad` walks vertices in id order and closes a range once its share
/// of the total degree is reached. Asking for more ranges than there are
/// distinct vertices clamps `p` with a warning.
pub fn make_ranges(layer: &Layer, p: usize, strategy: Strategy) -> Result<RangePartitioning> {
    if p == 0 {
        return Err(Error::Config("partition count must be at least 1".into()));
    }
    let ids = layer.vertex_ids();
    if ids.is_empty() {
        return Ok(RangePartitioning::whole());
    }
    let p = if p > ids.len() {
        warn!("{p} partitions requested for {} vertices; using {}", ids.len(), ids.len());
        ids.len()
    } else {
        p
    };
    let (min, max) = (ids[0], ids[ids.len() - 1]);
    let ranges = match strategy {
        Strategy::EqualWidth => {
            let span = u64::from(max - min) + 1;
            let width = span.div_ceil(p as u64);
            let mut ranges = Vec::with_capacity(p);
            let mut lo = u64::from(min);
            while lo <= u64::from(max) {
                let hi = (lo + width - 1).min(u64::from(max));
                ranges.push((lo as VertexId, hi as VertexId));
                lo = hi + 1;
            }
            ranges
        }
        Strategy::EqualLoad => {
            let adj = build_adjacency_list(layer);
            let degrees: Vec<u64> = ids.iter().map(|&v| adj.degree(v) as u64).collect();
            let total: u64 = degrees.iter().sum();
            let mut ranges = Vec::with_capacity(p);
            let mut lo = min;
            let mut acc = 0u64;
            for (i, (&v, &d)) in ids.iter().zip(&degrees).enumerate() {
                acc += d;
                let closed = ranges.len();
                if closed + 1 == p {
                    break;
                }
                let remaining_vertices = ids.len() - i - 1;
                let remaining_ranges = p - closed - 1;
                let target = total * (closed as u64 + 1) / p as u64;
                if (acc >= target && remaining_vertices >= remaining_ranges)
                    || remaining_vertices == remaining_ranges
                {
                    ranges.push((lo, v));
                    lo = ids[i + 1];
                }
            }
            ranges.push((lo, max));
            ranges
        }
    };
    RangePartitioning::new(ranges)
}

/// Adjacency lists of the vertices owned by one range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyListPartition {
    pub id: usize,
    pub range: (VertexId, VertexId),
    pub entries: BTreeMap<VertexId, Vec<Edge>>,
}

impl AdjacencyListPartition {
    pub fn owns(&self, v: VertexId) -> bool {
        self.range.0 <= v && v <= self.range.1
    }

    pub fn get(&self, v: VertexId) -> &[Edge] {
        self.entries.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }
}

pub fn partition_adjacency(
    layer: &Layer,
    ranges: &RangePartitioning,
) -> Result<Vec<AdjacencyListPartition>> {
    let mut parts: Vec<AdjacencyListPartition> = ranges
        .ranges()
        .iter()
        .enumerate()
        .map(|(id, &range)| AdjacencyListPartition { id, range, entries: BTreeMap::new() })
        .collect();
    for (v, list) in build_adjacency_list(layer).entries {
        let owner = ranges.owner(v).ok_or(Error::Routing(v))?;
        parts[owner].entries.insert(v, list);
    }
    Ok(parts)
}
