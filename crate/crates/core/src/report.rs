//! Serialized forms of a discovery run.
//!
//! The structured document leaves out wall times and pre-deduplication
//! counts, so two runs over the same input with any worker or partition
//! count serialize to identical bytes. Those figures go to the timing CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::DiscoveryResult;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub size: usize,
    pub substructure: String,
    pub frequency: usize,
    /// Exact textual form of the score (`0.75`, `3/4`, ...).
    pub score: String,
    pub instances: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationEntry {
    pub iteration: usize,
    pub size: usize,
    pub layer_instances: Vec<usize>,
    pub composed_instances: usize,
    pub unique_instances: usize,
    pub classes: usize,
    pub survivors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub metric: String,
    pub beam: usize,
    pub max_size: usize,
    pub ranked: Vec<RankedEntry>,
    pub iterations: Vec<IterationEntry>,
}

impl ResultDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    /// `(substructure, frequency)` in rank order.
    pub fn classes(&self) -> Vec<(String, usize)> {
        self.ranked.iter().map(|r| (r.substructure.clone(), r.frequency)).collect()
    }
}

impl<T: Scalar> DiscoveryResult<T> {
    pub fn document(&self) -> ResultDocument {
        let v = &self.vocab;
        ResultDocument {
            metric: self.config.metric.to_string(),
            beam: self.config.beam,
            max_size: self.config.max_size,
            ranked: self
                .ranked
                .iter()
                .enumerate()
                .map(|(i, s)| RankedEntry {
                    rank: i + 1,
                    size: s.sub.len(),
                    substructure: s.sub.text(v),
                    frequency: s.frequency,
                    score: s.value.to_string(),
                    instances: s.instances.iter().map(|x| x.text(v)).collect(),
                })
                .collect(),
            iterations: self
                .iterations
                .iter()
                .map(|it| IterationEntry {
                    iteration: it.iteration,
                    size: it.size,
                    layer_instances: it.job1_unique.clone(),
                    composed_instances: it.composed_unique,
                    unique_instances: it.unique_instances,
                    classes: it.classes,
                    survivors: it.survivors.iter().map(|s| s.text(v)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        self.document().to_json()
    }

    /// Tab-separated: rank, size, frequency, score, canonical substructure.
    pub fn ranked_text(&self) -> String {
        let mut out = String::from("# rank\tsize\tfrequency\tscore\tsubstructure\n");
        for (i, s) in self.ranked.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                i + 1,
                s.sub.len(),
                s.frequency,
                s.value,
                s.sub.text(&self.vocab)
            );
        }
        out
    }

    /// `iteration,size,stage,seconds,raw_instances,unique_instances`
    pub fn timing_csv(&self) -> String {
        let mut out = String::from("iteration,size,stage,seconds,raw_instances,unique_instances\n");
        for it in &self.iterations {
            for (l, secs) in it.job1_seconds.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},job1:layer{l},{secs:.6},{},{}",
                    it.iteration, it.size, it.job1_raw[l], it.job1_unique[l]
                );
            }
            let _ = writeln!(
                out,
                "{},{},job2:compose,{:.6},{},{}",
                it.iteration, it.size, it.job2_seconds, it.composed_raw, it.composed_unique
            );
            let _ = writeln!(
                out,
                "{},{},job3:count+beam,{:.6},{},{}",
                it.iteration, it.size, it.job3_seconds, it.unique_instances, it.classes
            );
        }
        out
    }
}

/// One difference between two ranked class lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Divergence {
    Missing { rank: usize, substructure: String, frequency: usize },
    Extra { rank: usize, substructure: String, frequency: usize },
    Frequency { substructure: String, expected: usize, found: usize },
    Order { rank: usize, expected: String, found: String },
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Divergence::Missing { rank, substructure, frequency } => {
                write!(f, "missing: #{rank} {substructure} (frequency {frequency})")
            }
            Divergence::Extra { rank, substructure, frequency } => {
                write!(f, "extra: #{rank} {substructure} (frequency {frequency})")
            }
            Divergence::Frequency { substructure, expected, found } => {
                write!(f, "frequency: {substructure} expected {expected}, found {found}")
            }
            Divergence::Order { rank, expected, found } => {
                write!(f, "order: rank {rank} expected {expected}, found {found}")
            }
        }
    }
}

/// Compares `found` against the reference ranking `expected` on class keys,
/// frequencies and order.
pub fn compare_rankings(expected: &ResultDocument, found: &ResultDocument) -> Vec<Divergence> {
    let mut out = Vec::new();
    let exp = expected.classes();
    let got = found.classes();
    for (i, (sub, freq)) in exp.iter().enumerate() {
        match got.iter().find(|(s, _)| s == sub) {
            None => out.push(Divergence::Missing {
                rank: i + 1,
                substructure: sub.clone(),
                frequency: *freq,
            }),
            Some((_, f)) if f != freq => out.push(Divergence::Frequency {
                substructure: sub.clone(),
                expected: *freq,
                found: *f,
            }),
            _ => {}
        }
    }
    for (i, (sub, freq)) in got.iter().enumerate() {
        if !exp.iter().any(|(s, _)| s == sub) {
            out.push(Divergence::Extra { rank: i + 1, substructure: sub.clone(), frequency: *freq });
        }
    }
    if out.is_empty() {
        for (i, ((a, _), (b, _))) in exp.iter().zip(&got).enumerate() {
            if a != b {
                out.push(Divergence::Order { rank: i + 1, expected: a.clone(), found: b.clone() });
            }
        }
    }
    out
}
