//! Query-set files: one query per line,
//! `source<TAB>target<TAB>label,label,...<TAB>constraint-file<TAB>T|F`.
//! Constraint files are resolved relative to the query-set file.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;
use crate::online::LscrQuery;
use crate::pattern::{parse_constraint, SubstructureConstraint};

use super::GeneratedQuerySet;

#[derive(Clone, Debug)]
pub struct QueryRecord {
    pub query: LscrQuery,
    pub expected: bool,
    pub constraint_ref: String,
}

/// Writes `(query, expected)` rows that all refer to `constraint_ref`.
pub fn write_query_set<'a, W: Write>(
    mut out: W,
    g: &KnowledgeGraph,
    rows: impl IntoIterator<Item = (&'a LscrQuery, bool)>,
    constraint_ref: &str,
) -> Result<()> {
    for (q, expected) in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            g.vertex_name(q.source),
            g.vertex_name(q.target),
            g.label_list(q.labels),
            constraint_ref,
            if expected { 'T' } else { 'F' }
        )?;
    }
    Ok(())
}

/// Saves a generated set to `path` and its constraint next to it, as
/// `<stem>.q`.
pub fn save_query_set(path: impl AsRef<Path>, g: &KnowledgeGraph, set: &GeneratedQuerySet) -> Result<()> {
    let path = path.as_ref();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("queries");
    let cref = format!("{stem}.q");
    fs::write(path.with_file_name(&cref), set.constraint.to_text(g) + "\n")?;
    let mut buf = Vec::new();
    write_query_set(&mut buf, g, set.iter().map(|q| (&q.query, q.expected)), &cref)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Parses query-set text; `resolve` maps a constraint reference to its
/// constraint and is called once per distinct reference.
pub fn parse_query_set(
    text: &str,
    g: &KnowledgeGraph,
    mut resolve: impl FnMut(&str) -> Result<SubstructureConstraint>,
) -> Result<Vec<QueryRecord>> {
    let mut cache: HashMap<String, SubstructureConstraint> = HashMap::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: &str| Error::MalformedQuery(lineno, m.to_owned());
        let fields: Vec<&str> = line.split('\t').collect();
        let [s, t, labels, cref, expected] = fields[..] else {
            return Err(bad("expected five tab-separated fields"));
        };
        let vertex = |name: &str| {
            g.vertex_by_name(name)
                .ok_or_else(|| Error::UnknownVertexName(name.to_owned()))
        };
        let expected = match expected.trim() {
            "T" => true,
            "F" => false,
            _ => return Err(bad("expected answer must be T or F")),
        };
        let constraint = match cache.get(cref) {
            Some(c) => c.clone(),
            None => {
                let c = resolve(cref)?;
                cache.insert(cref.to_owned(), c.clone());
                c
            }
        };
        out.push(QueryRecord {
            query: LscrQuery {
                source: vertex(s)?,
                target: vertex(t)?,
                labels: g.parse_label_list(labels)?,
                constraint,
            },
            expected,
            constraint_ref: cref.to_owned(),
        });
    }
    Ok(out)
}

pub fn load_query_set(path: impl AsRef<Path>, g: &KnowledgeGraph) -> Result<Vec<QueryRecord>> {
    let path = path.as_ref();
    let dir = path.parent().unwrap_or(Path::new("."));
    let text = fs::read_to_string(path)?;
    parse_query_set(&text, g, |cref| parse_constraint(&fs::read_to_string(dir.join(cref))?, g))
}
