use std::time::Instant;

use super::{CloseMap, CloseState, LscrQuery, Parents, PopCounter, QueryAnswer, SearchOptions, SearchStats};
use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, VertexId};
use crate::labels::LabelSet;
use crate::pattern::{satisfies, VertexSetResult};

#[derive(Clone, Copy, Debug)]
struct Entry {
    vertex: VertexId,
    /// Next adjacency slot to scan; nonzero only for an expansion that was
    /// interrupted by a successful `F` search.
    cursor: u32,
    /// State at push time. An entry whose vertex has since been upgraded to
    /// `T` is superseded by the `T` entry pushed with the upgrade.
    pushed: CloseState,
}

/// The shared state of one UIS* run: close map plus the global stack that
/// successive label-constrained searches resume from.
pub struct StackSearch<'g> {
    g: &'g KnowledgeGraph,
    labels: LabelSet,
    close: CloseMap,
    stack: Vec<Entry>,
    stats: SearchStats,
    parents: Parents,
    pops: PopCounter,
    f_exhausted: bool,
}

impl<'g> StackSearch<'g> {
    /// Seeds the stack with `source` in state `F`.
    pub fn new(g: &'g KnowledgeGraph, source: VertexId, labels: LabelSet, opts: SearchOptions) -> Self {
        let n = g.vertex_count();
        let mut close = CloseMap::new(n);
        close.set(source, CloseState::F);
        StackSearch {
            g,
            labels,
            close,
            stack: vec![Entry {
                vertex: source,
                cursor: 0,
                pushed: CloseState::F,
            }],
            stats: SearchStats::default(),
            parents: Parents::new(opts.witness, n),
            pops: PopCounter::new(n),
            f_exhausted: false,
        }
    }

    pub fn close(&self) -> &CloseMap {
        &self.close
    }

    pub fn stack_len(&self) -> usize {
        self.stack.len()
    }

    pub fn stats(&self) -> SearchStats {
        let mut s = self.stats.clone();
        s.passed_vertices = self.close.passed();
        self.pops.write_to(&mut s);
        s
    }

    /// Label-constrained search from `s_star` towards `t_star` in phase `b`.
    ///
    /// With `b = F` the search resumes the global stack and marks newly
    /// reached vertices `F`. With `b = T` it pushes `s_star` as `T` and runs
    /// only while the top of the stack is `T`, upgrading everything it
    /// reaches.
    pub fn lcs_stack(&mut self, s_star: VertexId, t_star: VertexId, b: CloseState) -> bool {
        assert_ne!(b, CloseState::N, "LCS phase must be T or F");
        self.stats.lcs_invocations += 1;
        if b == CloseState::T {
            if self.close.set(s_star, CloseState::T) {
                self.parents.upgrade(s_star);
            }
            if s_star == t_star {
                return true;
            }
            self.stack.push(Entry {
                vertex: s_star,
                cursor: 0,
                pushed: CloseState::T,
            });
        }
        let late = b == CloseState::F && self.f_exhausted;

        while let Some(&top) = self.stack.last() {
            let u = top.vertex;
            let cu = self.close.get(u);
            if b == CloseState::T && cu != CloseState::T {
                break;
            }
            self.stack.pop();
            if cu != top.pushed {
                continue;
            }
            if top.cursor == 0 {
                self.pops.record(u);
            }
            let adj = self.g.out_adjacency(u);
            for i in top.cursor as usize..adj.len() {
                let (l, w) = adj[i];
                if !self.labels.contains(l) {
                    continue;
                }
                self.stats.edges_scanned += 1;
                let cw = self.close.get(w);
                let explore = match b {
                    CloseState::T => cw != CloseState::T,
                    _ => cw == CloseState::N,
                };
                if !explore {
                    continue;
                }
                self.close.set(w, b);
                self.parents.edge(u, cu, l, w, b);
                if late {
                    self.stats.late_f_changes += 1;
                }
                if w == t_star {
                    if i + 1 < adj.len() {
                        self.stack.push(Entry {
                            vertex: u,
                            cursor: (i + 1) as u32,
                            pushed: cu,
                        });
                    }
                    self.stack.push(Entry {
                        vertex: w,
                        cursor: 0,
                        pushed: b,
                    });
                    return true;
                }
                self.stack.push(Entry {
                    vertex: w,
                    cursor: 0,
                    pushed: b,
                });
            }
        }
        while self
            .stack
            .last()
            .is_some_and(|e| self.close.get(e.vertex) == CloseState::T)
        {
            self.stack.pop();
        }
        if b == CloseState::F {
            self.f_exhausted = true;
        }
        false
    }
}

/// Answers `q` by iterating `vsg` (which must equal `V(S,G)`) and chaining
/// label-constrained searches from the source to each member and from the
/// member to the target.
pub fn uis_star_query(g: &KnowledgeGraph, q: &LscrQuery, vsg: &VertexSetResult) -> Result<QueryAnswer> {
    uis_star_query_with(g, q, vsg, SearchOptions::default())
}

pub fn uis_star_query_with(
    g: &KnowledgeGraph,
    q: &LscrQuery,
    vsg: &VertexSetResult,
    opts: SearchOptions,
) -> Result<QueryAnswer> {
    let start = Instant::now();
    if cfg!(debug_assertions) {
        check_vsg_sample(g, q, vsg)?;
    }
    let (s, t) = (q.source, q.target);
    if s == t {
        let value = vsg.contains(s);
        let stats = SearchStats {
            passed_vertices: 1,
            wall_time: start.elapsed(),
            ..Default::default()
        };
        return Ok(QueryAnswer {
            value,
            stats,
            witness: (value && opts.witness).then(Vec::new),
        });
    }

    let mut search = StackSearch::new(g, s, q.labels, opts);
    let mut end = None;
    for &v in vsg.members() {
        match search.close().get(v) {
            CloseState::N if v == s || v == t => {
                if search.lcs_stack(s, t, CloseState::F) {
                    end = Some((t, CloseState::F));
                }
                break;
            }
            CloseState::N => {
                if search.lcs_stack(s, v, CloseState::F) && search.lcs_stack(v, t, CloseState::T) {
                    end = Some((t, CloseState::T));
                    break;
                }
            }
            CloseState::F => {
                if search.lcs_stack(v, t, CloseState::T) {
                    end = Some((t, CloseState::T));
                    break;
                }
            }
            CloseState::T => {}
        }
    }

    let mut stats = search.stats();
    debug_assert!(stats.pops <= 2 * g.vertex_count() as u64);
    let witness = end.and_then(|(v, st)| search.parents.path_to(v, st));
    stats.wall_time = start.elapsed();
    Ok(QueryAnswer {
        value: end.is_some(),
        stats,
        witness,
    })
}

/// Spot-checks that every sampled member of `vsg` satisfies the constraint.
fn check_vsg_sample(g: &KnowledgeGraph, q: &LscrQuery, vsg: &VertexSetResult) -> Result<()> {
    let m = vsg.members();
    let step = (m.len() / 16).max(1);
    for &v in m.iter().step_by(step) {
        if v.index() >= g.vertex_count() || !satisfies(g, v, &q.constraint) {
            return Err(Error::InconsistentVsg(v.to_string()));
        }
    }
    Ok(())
}
