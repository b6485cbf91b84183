//! Immutable edge-labeled knowledge graph.
//!
//! Graphs are read from tab-separated triple files (`subject\tpredicate\tobject`,
//! `#` comments). Vertex and label ids are dense and assigned in order of first
//! appearance, so the same file always produces the same ids. Triples whose
//! predicate is the configured type or subclass predicate additionally feed
//! [`SchemaInfo`]; they stay ordinary edges as well.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::labels::LabelSet;

/// Maximum number of distinct edge labels; a [`LabelSet`] is one `u64`.
pub const MAX_LABELS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(pub u8);

impl LabelId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: VertexId,
    pub label: LabelId,
    pub target: VertexId,
}

#[derive(Clone, Debug)]
pub struct IngestOptions {
    pub type_predicate: String,
    pub subclass_predicate: String,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            type_predicate: "rdf:type".to_owned(),
            subclass_predicate: "rdfs:subClassOf".to_owned(),
        }
    }
}

/// RDFS-style schema recovered from type and subclass triples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemaInfo {
    pub classes: BTreeSet<VertexId>,
    pub instance_of: BTreeMap<VertexId, BTreeSet<VertexId>>,
    pub subclass_of: BTreeMap<VertexId, BTreeSet<VertexId>>,
    instances: BTreeMap<VertexId, Vec<VertexId>>,
}

impl SchemaInfo {
    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Compressed adjacency: `offsets[v]..offsets[v + 1]` indexes into `items`.
#[derive(Clone, Debug, Default)]
struct Adjacency {
    offsets: Vec<u32>,
    items: Vec<(LabelId, VertexId)>,
}

impl Adjacency {
    fn build(vertex_count: usize, edges: &[Edge], outgoing: bool) -> Self {
        let mut offsets = vec![0u32; vertex_count + 1];
        for e in edges {
            let key = if outgoing { e.source } else { e.target };
            offsets[key.index() + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut items = vec![(LabelId(0), VertexId(0)); edges.len()];
        for e in edges {
            let (key, item) = if outgoing {
                (e.source, (e.label, e.target))
            } else {
                (e.target, (e.label, e.source))
            };
            let slot = &mut cursor[key.index()];
            items[*slot as usize] = item;
            *slot += 1;
        }
        Adjacency { offsets, items }
    }

    #[inline]
    fn of(&self, v: VertexId) -> &[(LabelId, VertexId)] {
        let lo = self.offsets[v.index()] as usize;
        let hi = self.offsets[v.index() + 1] as usize;
        &self.items[lo..hi]
    }
}

#[derive(Debug)]
pub struct KnowledgeGraph {
    vertex_names: Vec<String>,
    vertex_ids: HashMap<String, VertexId>,
    label_names: Vec<String>,
    label_ids: HashMap<String, LabelId>,
    edges: Vec<Edge>,
    out_adj: Adjacency,
    in_adj: Adjacency,
    schema: SchemaInfo,
    fingerprint: OnceLock<u64>,
}

impl KnowledgeGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label_count(&self) -> usize {
        self.label_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    /// Edges in input order, duplicates removed.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn full_label_set(&self) -> LabelSet {
        LabelSet::full(self.label_count())
    }

    #[inline]
    pub fn out_adjacency(&self, v: VertexId) -> &[(LabelId, VertexId)] {
        self.out_adj.of(v)
    }

    #[inline]
    pub fn in_adjacency(&self, v: VertexId) -> &[(LabelId, VertexId)] {
        self.in_adj.of(v)
    }

    /// Out-edges of `v` whose label is in `mask`, in stored order.
    #[inline]
    pub fn out_edges(
        &self,
        v: VertexId,
        mask: LabelSet,
    ) -> impl Iterator<Item = (LabelId, VertexId)> + '_ {
        self.out_adj
            .of(v)
            .iter()
            .copied()
            .filter(move |(l, _)| mask.contains(*l))
    }

    pub fn in_edges(
        &self,
        v: VertexId,
        mask: LabelSet,
    ) -> impl Iterator<Item = (LabelId, VertexId)> + '_ {
        self.in_adj
            .of(v)
            .iter()
            .copied()
            .filter(move |(l, _)| mask.contains(*l))
    }

    pub fn has_edge(&self, source: VertexId, label: LabelId, target: VertexId) -> bool {
        self.out_adj
            .of(source)
            .iter()
            .any(|&(l, w)| l == label && w == target)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_ids.get(name).copied()
    }

    pub fn label_name(&self, l: LabelId) -> &str {
        &self.label_names[l.index()]
    }

    pub fn label_by_name(&self, name: &str) -> Option<LabelId> {
        self.label_ids.get(name).copied()
    }

    pub fn schema(&self) -> &SchemaInfo {
        &self.schema
    }

    /// Instances of class `c`, sorted by id.
    pub fn instances_of_class(&self, c: VertexId) -> Result<Vec<VertexId>> {
        if !self.schema.classes.contains(&c) {
            return Err(Error::UnknownClass(
                self.vertex_names
                    .get(c.index())
                    .cloned()
                    .unwrap_or_else(|| c.to_string()),
            ));
        }
        Ok(self.schema.instances.get(&c).cloned().unwrap_or_default())
    }

    /// Parses a comma-separated list of label names (empty string = empty set).
    pub fn parse_label_list(&self, list: &str) -> Result<LabelSet> {
        let mut set = LabelSet::EMPTY;
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let l = self
                .label_by_name(name)
                .ok_or_else(|| Error::UnknownLabelName(name.to_owned()))?;
            set.insert(l);
        }
        Ok(set)
    }

    /// `{a,b,c}` with label names sorted alphabetically.
    pub fn format_label_set(&self, set: LabelSet) -> String {
        let mut names: Vec<&str> = set.iter().map(|l| self.label_name(l)).collect();
        names.sort_unstable();
        format!("{{{}}}", names.join(","))
    }

    /// Comma list in the order accepted by [`Self::parse_label_list`].
    pub fn label_list(&self, set: LabelSet) -> String {
        let mut names: Vec<&str> = set.iter().map(|l| self.label_name(l)).collect();
        names.sort_unstable();
        names.join(",")
    }

    pub fn write_triples<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.edges {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.vertex_name(e.source),
                self.label_name(e.label),
                self.vertex_name(e.target)
            )?;
        }
        Ok(())
    }

    pub fn to_triples_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_triples(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("names are UTF-8")
    }

    /// 64-bit digest of the canonical triple serialization.
    pub fn fingerprint(&self) -> u64 {
        *self.fingerprint.get_or_init(|| {
            let mut hasher = Sha256::new();
            let mut line = Vec::new();
            for e in &self.edges {
                line.clear();
                line.extend_from_slice(self.vertex_name(e.source).as_bytes());
                line.push(b'\t');
                line.extend_from_slice(self.label_name(e.label).as_bytes());
                line.push(b'\t');
                line.extend_from_slice(self.vertex_name(e.target).as_bytes());
                line.push(b'\n');
                hasher.update(&line);
            }
            let digest = hasher.finalize();
            let mut first = [0u8; 8];
            first.copy_from_slice(&digest[..8]);
            u64::from_le_bytes(first)
        })
    }
}

/// Incremental construction from named triples.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    options: IngestOptions,
    vertex_names: Vec<String>,
    vertex_ids: HashMap<String, VertexId>,
    label_names: Vec<String>,
    label_ids: HashMap<String, usize>,
    raw: Vec<(u32, usize, u32)>,
    seen: HashSet<(u32, usize, u32)>,
}

impl GraphBuilder {
    pub fn new(options: IngestOptions) -> Self {
        GraphBuilder {
            options,
            ..Default::default()
        }
    }

    fn intern_vertex(&mut self, name: &str) -> VertexId {
        if let Some(&v) = self.vertex_ids.get(name) {
            return v;
        }
        let v = VertexId(self.vertex_names.len() as u32);
        self.vertex_names.push(name.to_owned());
        self.vertex_ids.insert(name.to_owned(), v);
        v
    }

    fn intern_label(&mut self, name: &str) -> usize {
        if let Some(&l) = self.label_ids.get(name) {
            return l;
        }
        let l = self.label_names.len();
        self.label_names.push(name.to_owned());
        self.label_ids.insert(name.to_owned(), l);
        l
    }

    /// Adds a triple; returns false if it was already present.
    pub fn add_triple(&mut self, subject: &str, predicate: &str, object: &str) -> bool {
        let s = self.intern_vertex(subject);
        let l = self.intern_label(predicate);
        let o = self.intern_vertex(object);
        let key = (s.0, l, o.0);
        if self.seen.insert(key) {
            self.raw.push(key);
            true
        } else {
            false
        }
    }

    pub fn triple_count(&self) -> usize {
        self.raw.len()
    }

    pub fn build(self) -> Result<KnowledgeGraph> {
        if self.raw.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if self.label_names.len() > MAX_LABELS {
            return Err(Error::TooManyLabels(self.label_names.len()));
        }
        let edges: Vec<Edge> = self
            .raw
            .iter()
            .map(|&(s, l, o)| Edge {
                source: VertexId(s),
                label: LabelId(l as u8),
                target: VertexId(o),
            })
            .collect();
        let n = self.vertex_names.len();
        let out_adj = Adjacency::build(n, &edges, true);
        let in_adj = Adjacency::build(n, &edges, false);

        let type_label = self.label_ids.get(&self.options.type_predicate).copied();
        let sub_label = self
            .label_ids
            .get(&self.options.subclass_predicate)
            .copied();
        let mut schema = SchemaInfo::default();
        for e in &edges {
            let l = Some(e.label.index());
            if l == type_label {
                schema.classes.insert(e.target);
                schema
                    .instance_of
                    .entry(e.source)
                    .or_default()
                    .insert(e.target);
            } else if l == sub_label {
                schema.classes.insert(e.source);
                schema.classes.insert(e.target);
                schema
                    .subclass_of
                    .entry(e.source)
                    .or_default()
                    .insert(e.target);
            }
        }
        for (&inst, classes) in &schema.instance_of {
            for &c in classes {
                schema.instances.entry(c).or_default().push(inst);
            }
        }
        // instance_of iterates in id order, so every list is already sorted.

        let label_ids = self
            .label_ids
            .into_iter()
            .map(|(k, v)| (k, LabelId(v as u8)))
            .collect();
        Ok(KnowledgeGraph {
            vertex_names: self.vertex_names,
            vertex_ids: self.vertex_ids,
            label_names: self.label_names,
            label_ids,
            edges,
            out_adj,
            in_adj,
            schema,
            fingerprint: OnceLock::new(),
        })
    }
}

/// Reads triples from any buffered reader.
pub fn read_graph<R: BufRead>(reader: R, options: &IngestOptions) -> Result<KnowledgeGraph> {
    let mut builder = GraphBuilder::new(options.clone());
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(s), Some(p), Some(o), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::MalformedLine(i + 1));
        };
        if s.is_empty() || p.is_empty() || o.is_empty() {
            return Err(Error::MalformedLine(i + 1));
        }
        builder.add_triple(s, p, o);
    }
    builder.build()
}

pub fn load_graph(path: impl AsRef<Path>, options: &IngestOptions) -> Result<KnowledgeGraph> {
    let file = File::open(path)?;
    read_graph(BufReader::new(file), options)
}

pub fn parse_graph(text: &str) -> Result<KnowledgeGraph> {
    read_graph(text.as_bytes(), &IngestOptions::default())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const FIXTURE_A: &str = "v0\tfriendOf\tv1
v1\tfriendOf\tv3
v2\tfriendOf\tv3
v0\tlikes\tv2
v0\tadvisorOf\tv2
v2\tfollows\tv4
v3\tlikes\tv4
v4\thates\tv1
";

    pub(crate) fn fixture_a() -> KnowledgeGraph {
        parse_graph(FIXTURE_A).unwrap()
    }

    fn v(g: &KnowledgeGraph, name: &str) -> VertexId {
        g.vertex_by_name(name).unwrap()
    }

    fn labels(g: &KnowledgeGraph, list: &str) -> LabelSet {
        g.parse_label_list(list).unwrap()
    }

    #[test]
    fn fixture_a_counts() {
        let g = fixture_a();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 8);
        // friendOf, likes, advisorOf, follows, hates
        assert_eq!(g.label_count(), 5);
    }

    #[test]
    fn ids_follow_first_appearance() {
        let g = fixture_a();
        let order: Vec<&str> = g.vertices().map(|x| g.vertex_name(x)).collect();
        assert_eq!(order, ["v0", "v1", "v3", "v2", "v4"]);
        assert_eq!(g.label_name(LabelId(0)), "friendOf");
        assert_eq!(g.label_name(LabelId(4)), "hates");
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(parse_graph(""), Err(Error::EmptyGraph)));
        assert!(matches!(parse_graph("# only a comment\n"), Err(Error::EmptyGraph)));
    }

    #[test]
    fn too_many_labels() {
        let text: String = (0..65).map(|i| format!("a\tp{i}\tb\n")).collect();
        assert!(matches!(parse_graph(&text), Err(Error::TooManyLabels(65))));
        let text: String = (0..64).map(|i| format!("a\tp{i}\tb\n")).collect();
        assert_eq!(parse_graph(&text).unwrap().label_count(), 64);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let text = "a\tp\tb\n# c\nbad line\n";
        assert!(matches!(parse_graph(text), Err(Error::MalformedLine(3))));
        assert!(matches!(parse_graph("a\tp\tb\tc\n"), Err(Error::MalformedLine(1))));
        assert!(matches!(parse_graph("a\t\tb\n"), Err(Error::MalformedLine(1))));
    }

    #[test]
    fn duplicates_are_dropped() {
        let g = parse_graph("a\tp\tb\na\tp\tb\na\tq\tb\n").unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn masked_out_edges() {
        let g = fixture_a();
        let got: Vec<_> = g
            .out_edges(v(&g, "v0"), labels(&g, "likes,advisorOf"))
            .map(|(l, w)| (g.label_name(l).to_owned(), g.vertex_name(w).to_owned()))
            .collect();
        assert_eq!(
            got,
            [("likes".to_owned(), "v2".to_owned()), ("advisorOf".to_owned(), "v2".to_owned())]
        );
        assert_eq!(g.out_edges(v(&g, "v0"), LabelSet::EMPTY).count(), 0);
        let all: Vec<_> = g.out_edges(v(&g, "v4"), g.full_label_set()).collect();
        assert_eq!(all, [(g.label_by_name("hates").unwrap(), v(&g, "v1"))]);
    }

    #[test]
    fn schema_extraction() {
        let g = parse_graph(
            "a\trdf:type\tC\nb\trdf:type\tC\nC\trdfs:subClassOf\tD\nE\trdfs:subClassOf\tD\na\tknows\tb\n",
        )
        .unwrap();
        let c = v(&g, "C");
        assert_eq!(g.instances_of_class(c).unwrap(), [v(&g, "a"), v(&g, "b")]);
        assert!(g.instances_of_class(v(&g, "E")).unwrap().is_empty());
        assert!(matches!(
            g.instances_of_class(v(&g, "a")),
            Err(Error::UnknownClass(_))
        ));
        // schema triples remain ordinary edges
        assert!(g.has_edge(v(&g, "a"), g.label_by_name("rdf:type").unwrap(), c));
        for classes in g.schema().instance_of.values() {
            assert!(classes.is_subset(&g.schema().classes));
        }
    }

    #[test]
    fn fixture_has_no_schema() {
        let g = fixture_a();
        assert!(g.schema().is_empty());
        for x in g.vertices() {
            assert!(matches!(g.instances_of_class(x), Err(Error::UnknownClass(_))));
        }
    }

    #[test]
    fn custom_schema_predicates() {
        let opts = IngestOptions {
            type_predicate: "a".into(),
            subclass_predicate: "sub".into(),
        };
        let g = read_graph("x\ta\tK\n".as_bytes(), &opts).unwrap();
        assert_eq!(g.instances_of_class(v(&g, "K")).unwrap(), [v(&g, "x")]);
    }

    #[test]
    fn adjacency_directions_agree() {
        let g = fixture_a();
        let mut total = 0;
        for e in g.edges() {
            assert!(g.out_edges(e.source, LabelSet::singleton(e.label)).any(|(_, w)| w == e.target));
            assert!(g.in_adjacency(e.target).contains(&(e.label, e.source)));
        }
        for x in g.vertices() {
            total += g.out_edges(x, g.full_label_set()).count();
        }
        assert_eq!(total, g.edge_count());
    }
}
