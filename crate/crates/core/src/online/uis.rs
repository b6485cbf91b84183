use std::time::Instant;

use super::{CloseMap, CloseState, LscrQuery, Parents, PopCounter, QueryAnswer, SearchOptions, SearchStats};
use crate::graph::{KnowledgeGraph, VertexId};
use crate::pattern::satisfies;

/// Answers `q` with a single stack search that evaluates the constraint on
/// each newly reached vertex.
pub fn uis_query(g: &KnowledgeGraph, q: &LscrQuery) -> QueryAnswer {
    uis_query_with(g, q, SearchOptions::default())
}

pub fn uis_query_with(g: &KnowledgeGraph, q: &LscrQuery, opts: SearchOptions) -> QueryAnswer {
    let start = Instant::now();
    let n = g.vertex_count();
    let mut stats = SearchStats::default();
    let mut close = CloseMap::new(n);
    let mut parents = Parents::new(opts.witness, n);
    let mut pops = PopCounter::new(n);
    let (s, t, labels) = (q.source, q.target, q.labels);

    let check = |v: VertexId, stats: &mut SearchStats| {
        stats.scck_calls += 1;
        CloseState::from_bool(satisfies(g, v, &q.constraint))
    };

    let s_state = check(s, &mut stats);
    close.set(s, s_state);
    let mut value = s == t && s_state == CloseState::T;
    let mut end = (s, s_state);

    // Entries remember the state they were pushed with; an entry whose vertex
    // has since been upgraded is superseded by the later T entry.
    let mut stack = vec![(s, s_state)];
    if s == t {
        stack.clear();
    }
    'search: while let Some((u, pushed)) = stack.pop() {
        let cu = close.get(u);
        if cu != pushed {
            continue;
        }
        pops.record(u);
        for (l, v) in g.out_edges(u, labels) {
            stats.edges_scanned += 1;
            let cv = close.get(v);
            let new = if cu == CloseState::T && cv != CloseState::T {
                CloseState::T
            } else if cu != CloseState::T && cv == CloseState::N {
                check(v, &mut stats)
            } else {
                continue;
            };
            close.set(v, new);
            parents.edge(u, cu, l, v, new);
            stack.push((v, new));
            if v == t && new == CloseState::T {
                value = true;
                end = (v, new);
                break 'search;
            }
        }
    }

    stats.passed_vertices = close.passed();
    pops.write_to(&mut stats);
    debug_assert!(stats.max_vertex_pops <= 2);
    debug_assert!(stats.scck_calls <= n as u64);
    let witness = if value { parents.path_to(end.0, end.1) } else { None };
    stats.wall_time = start.elapsed();
    QueryAnswer {
        value,
        stats,
        witness,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::tests::fixture_a;
    use crate::pattern::parse_constraint;

    pub(crate) fn fixture_query(from: &str, to: &str, labels: &str) -> (KnowledgeGraph, LscrQuery) {
        let g = fixture_a();
        let q = LscrQuery {
            source: g.vertex_by_name(from).unwrap(),
            target: g.vertex_by_name(to).unwrap(),
            labels: g.parse_label_list(labels).unwrap(),
            constraint: parse_constraint("SELECT ?x WHERE { ?x friendOf v3 . v3 likes ?y }", &g)
                .unwrap(),
        };
        (g, q)
    }

    #[test]
    fn fixture_verdicts() {
        let (g, q) = fixture_query("v0", "v4", "likes,follows");
        let a = uis_query_with(&g, &q, SearchOptions { witness: true });
        assert!(a.value);
        let path = a.witness.unwrap();
        let names: Vec<_> = path.iter().map(|e| g.vertex_name(e.target)).collect();
        assert_eq!(names, ["v2", "v4"]);

        let (g, q) = fixture_query("v0", "v3", "likes,follows");
        assert!(!uis_query(&g, &q).value);
    }

    #[test]
    fn revisits_after_upgrade() {
        // v3 -likes-> v4 -hates-> v1 -friendOf-> v3 -likes-> v4: v4 is first
        // reached as F and must be expanded again once reached through v1.
        let (g, q) = fixture_query("v3", "v4", "likes,hates,friendOf");
        let a = uis_query_with(&g, &q, SearchOptions { witness: true });
        assert!(a.value);
        assert_eq!(a.stats.max_vertex_pops, 2);
        let path = a.witness.unwrap();
        assert_eq!(path.len(), 4);
        assert_eq!(path.last().unwrap().target, q.target);
    }

    #[test]
    fn source_equals_target() {
        let (g, q) = fixture_query("v1", "v1", "likes");
        assert!(uis_query(&g, &q).value);
        let (g, q) = fixture_query("v0", "v0", "likes,follows,friendOf");
        assert!(!uis_query(&g, &q).value);
    }

    #[test]
    fn empty_label_set() {
        let (g, mut q) = fixture_query("v0", "v4", "likes");
        q.labels = crate::labels::LabelSet::EMPTY;
        let a = uis_query(&g, &q);
        assert!(!a.value);
        assert_eq!(a.stats.edges_scanned, 0);
    }
}
