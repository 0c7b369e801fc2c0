//! Edges, layers and homogeneous multilayer networks.
//!
//! Every graph in this crate is a set of directed, labelled edges written as
//! the 5-tuple `(edge_label, src_id, src_label, dst_id, dst_label)`. Labels are
//! interned into a [`Vocabulary`] whose ids follow the lexicographic order of
//! the label strings, so comparing interned labels is the same as comparing
//! the strings themselves.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type LayerId = usize;

/// Interned label. Ids are ranks in the owning [`Vocabulary`].
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Label(u32);

impl Label {
    pub fn index(self) -> u32 {
        self.0
    }
}

/// Sorted set of label strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    names: Vec<String>,
    index: FxHashMap<String, Label>,
}

impl Vocabulary {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names: Vec<String> = names.into_iter().map(|s| s.as_ref().to_owned()).collect();
        names.sort_unstable();
        names.dedup();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), Label(i as u32)))
            .collect();
        Vocabulary { names, index }
    }

    pub fn label(&self, name: &str) -> Option<Label> {
        self.index.get(name).copied()
    }

    pub fn name(&self, label: Label) -> &str {
        &self.names[label.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `(x,1,A,2,B)`
    pub fn edge_text(&self, e: &Edge) -> String {
        let mut s = String::new();
        self.write_edge(&mut s, e);
        s
    }

    /// Edges joined by `|`, e.g. `(x,1,A,2,B)|(y,2,B,4,C)`.
    pub fn edges_text(&self, edges: &[Edge]) -> String {
        let mut s = String::new();
        for (i, e) in edges.iter().enumerate() {
            if i > 0 {
                s.push('|');
            }
            self.write_edge(&mut s, e);
        }
        s
    }

    fn write_edge(&self, out: &mut String, e: &Edge) {
        let _ = write!(
            out,
            "({},{},{},{},{})",
            self.name(e.label),
            e.src,
            self.name(e.src_label),
            e.dst,
            self.name(e.dst_label)
        );
    }

    pub fn record(&self, e: &Edge) -> EdgeRecord {
        EdgeRecord {
            label: self.name(e.label).to_owned(),
            src: e.src,
            src_label: self.name(e.src_label).to_owned(),
            dst: e.dst,
            dst_label: self.name(e.dst_label).to_owned(),
        }
    }
}

/// An edge with owned string labels; the exchange form between files,
/// generators and interned [`Edge`]s.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRecord {
    pub label: String,
    pub src: VertexId,
    pub src_label: String,
    pub dst: VertexId,
    pub dst_label: String,
}

impl EdgeRecord {
    pub fn new(
        label: impl Into<String>,
        src: VertexId,
        src_label: impl Into<String>,
        dst: VertexId,
        dst_label: impl Into<String>,
    ) -> Self {
        EdgeRecord {
            label: label.into(),
            src,
            src_label: src_label.into(),
            dst,
            dst_label: dst_label.into(),
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.label, self.src, self.src_label, self.dst, self.dst_label
        )
    }
}

impl<'a> From<(&'a str, VertexId, &'a str, VertexId, &'a str)> for EdgeRecord {
    fn from(t: (&'a str, VertexId, &'a str, VertexId, &'a str)) -> Self {
        EdgeRecord::new(t.0, t.1, t.2, t.3, t.4)
    }
}

/// Directed labelled edge. Ordered by edge label, source label, destination
/// label, source id, destination id.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Edge {
    pub label: Label,
    pub src: VertexId,
    pub src_label: Label,
    pub dst: VertexId,
    pub dst_label: Label,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.src == self.dst
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.src == v || self.dst == v
    }

    pub fn other(&self, v: VertexId) -> VertexId {
        if self.src == v {
            self.dst
        } else {
            self.src
        }
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label
            .cmp(&other.label)
            .then(self.src_label.cmp(&other.src_label))
            .then(self.dst_label.cmp(&other.dst_label))
            .then(self.src.cmp(&other.src))
            .then(self.dst.cmp(&other.dst))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_label(label: &str) -> std::result::Result<(), String> {
    if label.is_empty() {
        return Err("empty label".into());
    }
    if let Some(c) = label.chars().find(|c| matches!(c, ',' | '\n' | '\r' | '(' | ')')) {
        return Err(format!("label {label:?} contains reserved character {c:?}"));
    }
    Ok(())
}

/// One simple directed graph of a multilayer network. Edges are kept sorted
/// in canonical edge order.
#[derive(Debug, Clone)]
pub struct Layer {
    id: LayerId,
    edges: Vec<Edge>,
    vocab: Arc<Vocabulary>,
}

impl Layer {
    /// Builds a layer, rejecting zero ids, bad labels, self-loops, duplicate
    /// edges and vertices carrying two different labels.
    pub fn from_records<I>(records: I) -> Result<Layer>
    where
        I: IntoIterator,
        I::Item: Into<EdgeRecord>,
    {
        let records: Vec<EdgeRecord> = records.into_iter().map(Into::into).collect();
        let vocab = Vocabulary::new(
            records
                .iter()
                .flat_map(|r| [r.label.as_str(), r.src_label.as_str(), r.dst_label.as_str()]),
        );
        let vocab = Arc::new(vocab);
        let edges = intern_records(&records, &vocab, |i| format!("edge {}", i + 1))?;
        Ok(Layer { id: 0, edges, vocab })
    }

    /// Assumes `edges` already satisfy every layer invariant.
    pub(crate) fn from_parts(id: LayerId, mut edges: Vec<Edge>, vocab: Arc<Vocabulary>) -> Layer {
        edges.sort_unstable();
        edges.dedup();
        Layer { id, edges, vocab }
    }

    pub fn id(&self) -> LayerId {
        self.id
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// Sorted, distinct vertex ids touched by some edge.
    pub fn vertex_ids(&self) -> Vec<VertexId> {
        let mut ids: Vec<VertexId> = self.edges.iter().flat_map(|e| [e.src, e.dst]).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn records(&self) -> impl Iterator<Item = EdgeRecord> + '_ {
        self.edges.iter().map(|e| self.vocab.record(e))
    }

    /// Serializes in the edge-list text format, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 16);
        for r in self.records() {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }
}

fn intern_records(
    records: &[EdgeRecord],
    vocab: &Vocabulary,
    locate: impl Fn(usize) -> String,
) -> Result<Vec<Edge>> {
    let mut labels_by_vertex: FxHashMap<VertexId, Label> = FxHashMap::default();
    let mut seen: FxHashSet<Edge> = FxHashSet::default();
    let mut edges = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        for l in [&r.label, &r.src_label, &r.dst_label] {
            check_label(l).map_err(|m| Error::validation(format!("{}: {m}", locate(i))))?;
        }
        if r.src == 0 || r.dst == 0 {
            return Err(Error::validation(format!("{}: vertex id 0 is not allowed", locate(i))));
        }
        if r.src == r.dst {
            return Err(Error::validation(format!(
                "{}: self-loop on vertex {}",
                locate(i),
                r.src
            )));
        }
        let lookup = |s: &str| vocab.label(s).expect("label interned");
        let e = Edge {
            label: lookup(&r.label),
            src: r.src,
            src_label: lookup(&r.src_label),
            dst: r.dst,
            dst_label: lookup(&r.dst_label),
        };
        for (v, l) in [(e.src, e.src_label), (e.dst, e.dst_label)] {
            let prev = *labels_by_vertex.entry(v).or_insert(l);
            if prev != l {
                return Err(Error::validation(format!(
                    "{}: vertex {v} labelled both {:?} and {:?}",
                    locate(i),
                    vocab.name(prev),
                    vocab.name(l)
                )));
            }
        }
        if !seen.insert(e) {
            return Err(Error::validation(format!(
                "{}: duplicate edge {}",
                locate(i),
                vocab.edge_text(&e)
            )));
        }
        edges.push(e);
    }
    edges.sort_unstable();
    Ok(edges)
}

/// Parses the edge-list text format: one `edge_label,src_id,src_label,dst_id,dst_label`
/// per line. Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<Layer> {
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 comma-separated fields, found {}", fields.len()),
            });
        }
        let id = |s: &str| -> Result<VertexId> {
            s.parse::<VertexId>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("{s:?} is not a vertex id"),
            })
        };
        let (src, dst) = (id(fields[1])?, id(fields[3])?);
        for l in [fields[0], fields[2], fields[4]] {
            check_label(l).map_err(|message| Error::Parse { line: line_no, message })?;
        }
        records.push(EdgeRecord::new(fields[0], src, fields[2], dst, fields[4]));
        lines.push(line_no);
    }
    let vocab = Arc::new(Vocabulary::new(
        records
            .iter()
            .flat_map(|r| [r.label.as_str(), r.src_label.as_str(), r.dst_label.as_str()]),
    ));
    let edges = intern_records(&records, &vocab, |i| format!("line {}", lines[i]))?;
    Ok(Layer { id: 0, edges, vocab })
}

/// Homogeneous multilayer network: layers over one shared vertex-id space in
/// which a vertex id carries the same label everywhere.
#[derive(Debug, Clone)]
pub struct HoMln {
    layers: Vec<Layer>,
    vocab: Arc<Vocabulary>,
    vertex_labels: BTreeMap<VertexId, Label>,
}

impl HoMln {
    /// Re-interns every layer into one merged vocabulary and numbers the
    /// layers `0..n` in the given order.
    pub fn new(layers: Vec<Layer>) -> Result<HoMln> {
        if layers.is_empty() {
            return Err(Error::validation("a multilayer network needs at least one layer"));
        }
        let shared = layers.windows(2).all(|w| Arc::ptr_eq(&w[0].vocab, &w[1].vocab));
        let vocab = if shared {
            layers[0].vocab.clone()
        } else {
            Arc::new(Vocabulary::new(
                layers.iter().flat_map(|l| l.vocab.names().iter().map(String::as_str)),
            ))
        };

        let mut vertex_labels: BTreeMap<VertexId, Label> = BTreeMap::new();
        let mut out = Vec::with_capacity(layers.len());
        for (id, layer) in layers.into_iter().enumerate() {
            let edges: Vec<Edge> = if shared {
                layer.edges
            } else {
                let remap: Vec<Label> = layer
                    .vocab
                    .names()
                    .iter()
                    .map(|n| vocab.label(n).expect("merged vocabulary"))
                    .collect();
                layer
                    .edges
                    .iter()
                    .map(|e| Edge {
                        label: remap[e.label.0 as usize],
                        src: e.src,
                        src_label: remap[e.src_label.0 as usize],
                        dst: e.dst,
                        dst_label: remap[e.dst_label.0 as usize],
                    })
                    .collect()
            };
            for e in &edges {
                for (v, l) in [(e.src, e.src_label), (e.dst, e.dst_label)] {
                    let prev = *vertex_labels.entry(v).or_insert(l);
                    if prev != l {
                        return Err(Error::validation(format!(
                            "vertex {v} labelled {:?} in one layer and {:?} in layer {id}",
                            vocab.name(prev),
                            vocab.name(l)
                        )));
                    }
                }
            }
            out.push(Layer::from_parts(id, edges, vocab.clone()));
        }
        Ok(HoMln { layers: out, vocab, vertex_labels })
    }

    pub fn single(layer: Layer) -> HoMln {
        HoMln::new(vec![layer]).expect("a valid layer is a valid network")
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, id: LayerId) -> Result<&Layer> {
        self.layers.get(id).ok_or(Error::UnknownLayer(id))
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn vertex_labels(&self) -> &BTreeMap<VertexId, Label> {
        &self.vertex_labels
    }

    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(Layer::is_empty)
    }
}

/// Every vertex mapped to all edges incident on it, in or out.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdjacencyList {
    pub entries: BTreeMap<VertexId, Vec<Edge>>,
}

impl AdjacencyList {
    pub fn get(&self, v: VertexId) -> &[Edge] {
        self.entries.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.get(v).len()
    }

    /// Sum of all entry lengths; twice the edge count.
    pub fn total_len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }
}

pub fn build_adjacency_list(layer: &Layer) -> AdjacencyList {
    adjacency_of(layer.edges())
}

pub(crate) fn adjacency_of(edges: &[Edge]) -> AdjacencyList {
    let mut entries: BTreeMap<VertexId, Vec<Edge>> = BTreeMap::new();
    // `edges` is sorted, so each pushed list stays sorted.
    for e in edges {
        entries.entry(e.src).or_default().push(*e);
        entries.entry(e.dst).or_default().push(*e);
    }
    for list in entries.values_mut() {
        if !list.is_sorted() {
            list.sort_unstable();
        }
    }
    AdjacencyList { entries }
}

/// Boolean-OR conflation: the union of the chosen layers' edge sets as one
/// simple graph.
pub fn or_conflate(mln: &HoMln, layer_ids: &[LayerId]) -> Result<Layer> {
    if layer_ids.is_empty() {
        return Err(Error::Config("no layers selected for conflation".into()));
    }
    let mut edges = Vec::new();
    for &id in layer_ids {
        edges.extend_from_slice(mln.layer(id)?.edges());
    }
    Ok(Layer::from_parts(0, edges, mln.vocab.clone()))
}

/// Conflation of every layer.
pub fn conflate_all(mln: &HoMln) -> Layer {
    let ids: Vec<LayerId> = (0..mln.num_layers()).collect();
    or_conflate(mln, &ids).expect("all layer ids are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = "x,1,A,2,B\nz,1,A,3,A\ni,1,A,4,C\ny,2,B,4,C\ni,3,A,4,C\ny,5,c,4,C\n";

    fn text_set(layer: &Layer) -> Vec<String> {
        let mut v: Vec<String> = layer.records().map(|r| r.to_line()).collect();
        v.sort();
        v
    }

    #[test]
    fn parses_sample_graph() {
        let layer = parse_edge_list(SAMPLE).unwrap();
        assert_eq!(layer.len(), 6);
        assert_eq!(layer.vertex_ids(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn literal_table_row_conflicts_on_vertex_four() {
        let text = "x,1,A,2,B\nz,1,A,3,A\ni,1,A,4,C\ny,2,B,4,C\ni,3,A,4,C\ny,5,c,4,c";
        let err = parse_edge_list(text).unwrap_err();
        assert!(matches!(err, Error::Validation(ref m) if m.contains("line 6")), "{err}");
    }

    #[test]
    fn empty_and_comment_only_inputs() {
        assert!(parse_edge_list("").unwrap().is_empty());
        assert!(parse_edge_list("# header\n\n").unwrap().is_empty());
    }

    #[test]
    fn rejects_self_loop_and_duplicates() {
        assert!(matches!(parse_edge_list("x,1,A,1,A"), Err(Error::Validation(_))));
        let dup = parse_edge_list("x,1,A,2,B\nx,1,A,2,B").unwrap_err();
        assert!(matches!(dup, Error::Validation(ref m) if m.contains("duplicate")));
    }

    #[test]
    fn malformed_lines_report_line_number() {
        match parse_edge_list("x,1,A,2,B\nx,1,A,2") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_edge_list("x,one,A,2,B") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_edge_list("x,0,A,2,B"), Err(Error::Validation(_))));
        assert!(matches!(parse_edge_list("x,1,A(,2,B"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn labels_are_case_sensitive() {
        let layer = parse_edge_list("i,1,A,4,C\nq,5,c,6,C").unwrap();
        assert_eq!(layer.vocab().len(), 5);
    }

    #[test]
    fn direction_is_kept() {
        let layer = parse_edge_list("a,1,X,2,X\na,2,X,1,X").unwrap();
        assert_eq!(layer.len(), 2);
    }

    #[test]
    fn sample_adjacency_matches_table() {
        let layer = parse_edge_list(SAMPLE).unwrap();
        let adj = build_adjacency_list(&layer);
        let v = layer.vocab();
        let at = |id| adj.get(id).iter().map(|e| v.edge_text(e)).collect::<Vec<_>>();
        assert_eq!(at(1), ["(i,1,A,4,C)", "(x,1,A,2,B)", "(z,1,A,3,A)"]);
        assert_eq!(at(4), ["(i,1,A,4,C)", "(i,3,A,4,C)", "(y,2,B,4,C)", "(y,5,c,4,C)"]);
        assert_eq!(adj.total_len(), 12);
    }

    #[test]
    fn single_edge_adjacency() {
        let layer = Layer::from_records([("a", 7, "P", 9, "Q")]).unwrap();
        let adj = build_adjacency_list(&layer);
        assert_eq!(adj.entries.len(), 2);
        assert_eq!(adj.get(7), adj.get(9));
    }

    #[test]
    fn conflation_is_set_union() {
        let a = Layer::from_records([("a", 1, "X", 2, "Y")]).unwrap();
        let b = Layer::from_records([("a", 1, "X", 2, "Y"), ("b", 2, "Y", 3, "Z")]).unwrap();
        let mln = HoMln::new(vec![a, b]).unwrap();
        let g = or_conflate(&mln, &[0, 1]).unwrap();
        assert_eq!(text_set(&g), ["a,1,X,2,Y", "b,2,Y,3,Z"]);
        assert!(matches!(or_conflate(&mln, &[2]), Err(Error::UnknownLayer(2))));
        assert!(or_conflate(&mln, &[]).is_err());
    }

    #[test]
    fn disjoint_layers_add_up() {
        let a = Layer::from_records([("a", 1, "X", 2, "Y"), ("a", 2, "Y", 3, "X")]).unwrap();
        let b = Layer::from_records([("b", 7, "Z", 8, "Z")]).unwrap();
        let mln = HoMln::new(vec![a, b]).unwrap();
        assert_eq!(conflate_all(&mln).len(), 3);
    }

    #[test]
    fn inconsistent_labels_across_layers_rejected() {
        let a = Layer::from_records([("a", 1, "X", 2, "Y")]).unwrap();
        let b = Layer::from_records([("b", 2, "Q", 3, "Z")]).unwrap();
        assert!(matches!(HoMln::new(vec![a, b]), Err(Error::Validation(_))));
    }

    #[test]
    fn merged_vocabulary_preserves_string_order() {
        let a = Layer::from_records([("m", 1, "B", 2, "D")]).unwrap();
        let b = Layer::from_records([("a", 2, "D", 3, "A")]).unwrap();
        let mln = HoMln::new(vec![a, b]).unwrap();
        let names = mln.vocab().names();
        assert!(names.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(mln.layers()[1].id(), 1);
        assert_eq!(mln.vertex_labels().len(), 3);
    }

    #[test]
    fn text_round_trip() {
        let layer = parse_edge_list(SAMPLE).unwrap();
        let again = parse_edge_list(&layer.to_edge_list()).unwrap();
        assert_eq!(text_set(&layer), text_set(&again));
    }
}
