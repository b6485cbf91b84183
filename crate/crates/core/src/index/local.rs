use std::collections::{BTreeMap, HashMap, VecDeque};

use super::landmarks::LandmarkAssignment;
use super::LandmarkEntry;
use crate::graph::{KnowledgeGraph, VertexId};
use crate::labels::{LabelSet, LabelSetFamily};

/// Builds the index entry of landmark `u`: minimal label sets to every vertex
/// of its subgraph (`II`), the boundary vertices reachable per label set
/// (`EI^T`), and how many boundary vertices fall into each other landmark's
/// subgraph (`D`).
///
/// The landmark itself has no `II` key; its family is implicitly `{∅}`.
pub fn local_full_index(g: &KnowledgeGraph, u: VertexId, assignment: &LandmarkAssignment) -> LandmarkEntry {
    let mut internal: HashMap<VertexId, LabelSetFamily> = HashMap::new();
    let mut external: HashMap<VertexId, LabelSetFamily> = HashMap::new();
    let mut queue: VecDeque<(VertexId, LabelSet)> = VecDeque::from([(u, LabelSet::EMPTY)]);

    while let Some((v, set)) = queue.pop_front() {
        if v != u && !internal.entry(v).or_default().insert(set) {
            continue;
        }
        for &(l, w) in g.out_adjacency(v) {
            let next = set.with(l);
            if assignment.owner(w) == Some(u) {
                if w == u || internal.get(&w).is_some_and(|f| f.admits(next)) {
                    continue;
                }
                queue.push_back((w, next));
            } else {
                external.entry(w).or_default().insert(next);
            }
        }
    }

    let mut internal: Vec<(VertexId, LabelSetFamily)> = internal.into_iter().collect();
    internal.sort_unstable_by_key(|(v, _)| *v);
    for (_, fam) in &mut internal {
        *fam = LabelSetFamily::from_sets(fam.sorted());
    }

    let mut transposed: BTreeMap<LabelSet, Vec<VertexId>> = BTreeMap::new();
    let mut correlation: BTreeMap<VertexId, u64> = BTreeMap::new();
    for (&w, fam) in &external {
        for &set in fam.sets() {
            transposed.entry(set).or_default().push(w);
        }
        if let Some(o) = assignment.owner(w) {
            *correlation.entry(o).or_default() += 1;
        }
    }
    let external_t = transposed
        .into_iter()
        .map(|(set, mut vs)| {
            vs.sort_unstable();
            (set, vs)
        })
        .collect();

    LandmarkEntry {
        internal,
        external_t,
        correlation: correlation.into_iter().collect(),
    }
}
