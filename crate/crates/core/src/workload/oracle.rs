use std::collections::VecDeque;

use crate::graph::{KnowledgeGraph, VertexId};
use crate::labels::LabelSet;
use crate::online::LscrQuery;
use crate::pattern::satisfies;

/// Vertices reachable from `from` over `labels`-edges, following edges
/// forwards or (with `reverse`) backwards.
pub fn label_bfs(g: &KnowledgeGraph, from: VertexId, labels: LabelSet, reverse: bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::from([from]);
    seen[from.index()] = true;
    while let Some(u) = queue.pop_front() {
        let adj = if reverse { g.in_adjacency(u) } else { g.out_adjacency(u) };
        for &(l, w) in adj {
            if labels.contains(l) && !seen[w.index()] {
                seen[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Reference answer for an LSCR query, computed the slow, obvious way: test
/// every vertex against the constraint, then ask whether some satisfying
/// vertex lies on an `L`-path from `s` to `t`.
pub fn oracle_lscr(g: &KnowledgeGraph, q: &LscrQuery) -> bool {
    if q.source == q.target {
        return satisfies(g, q.source, &q.constraint);
    }
    let from_s = label_bfs(g, q.source, q.labels, false);
    let to_t = label_bfs(g, q.target, q.labels, true);
    g.vertices()
        .any(|v| from_s[v.index()] && to_t[v.index()] && satisfies(g, v, &q.constraint))
}
