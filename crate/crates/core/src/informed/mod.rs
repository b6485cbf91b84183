//! Informed LSCR search (INS).
//!
//! Same outer structure as UIS*, but constraint vertices are consumed from a
//! priority heap and the label-constrained searches run on a priority queue
//! that favours vertices close to the target's subgraph. On reaching a
//! landmark the search consults the landmark's index entry instead of walking
//! its subgraph: `Check` answers directly when the target lies inside, `Cut`
//! marks every internal vertex reachable under `L` without queueing it, and
//! `Push` queues the boundary vertices reachable under `L`.

mod frontier;
mod heap;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, VertexId};
use crate::index::{LandmarkEntry, LocalIndex};
use crate::labels::LabelSet;
use crate::online::{CloseMap, CloseState, LscrQuery, QueryAnswer, SearchStats};
use crate::pattern::{satisfies, VertexSetResult};

pub use frontier::{frontier_compare, FrontierContext, FrontierQueue};
pub use heap::CandidateHeap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InsOptions {
    /// Prefer larger subgraph correlation counts when ordering.
    pub rho_invert: bool,
}

/// Marks every vertex of the landmark's subgraph that the landmark reaches
/// under `labels` with `b`, unless already `T`. Returns the number of state
/// changes; `changed` sees each changed vertex.
pub fn cut_internal(
    entry: &LandmarkEntry,
    labels: LabelSet,
    b: CloseState,
    close: &mut CloseMap,
    mut changed: impl FnMut(VertexId),
) -> usize {
    let mut n = 0;
    for (x, fam) in &entry.internal {
        if close.get(*x) != CloseState::T && fam.admits(labels) && close.set(*x, b) {
            n += 1;
            changed(*x);
        }
    }
    n
}

/// Marks and hands to `enqueue` every boundary vertex reachable under
/// `labels` that phase `b` would explore. Returns the number enqueued.
pub fn push_external(
    entry: &LandmarkEntry,
    labels: LabelSet,
    b: CloseState,
    close: &mut CloseMap,
    mut enqueue: impl FnMut(VertexId),
) -> usize {
    let mut n = 0;
    for (set, vs) in &entry.external_t {
        if !set.is_subset(labels) {
            continue;
        }
        for &v in vs {
            if explores(b, close.get(v)) {
                close.set(v, b);
                enqueue(v);
                n += 1;
            }
        }
    }
    n
}

#[inline]
fn explores(b: CloseState, current: CloseState) -> bool {
    match b {
        CloseState::T => current != CloseState::T,
        _ => current == CloseState::N,
    }
}

/// Per-query state of an INS run: close map, global frontier queue, and the
/// resume points of expansions cut short by a successful search.
pub struct InformedSearch<'a> {
    g: &'a KnowledgeGraph,
    ix: &'a LocalIndex,
    labels: LabelSet,
    rho_invert: bool,
    close: CloseMap,
    queue: FrontierQueue,
    /// `(next adjacency slot, state it applies to)`.
    resume: Vec<(u32, CloseState)>,
    target: VertexId,
    stats: SearchStats,
    pops: Vec<u32>,
    f_exhausted: bool,
}

impl<'a> InformedSearch<'a> {
    pub fn new(
        g: &'a KnowledgeGraph,
        ix: &'a LocalIndex,
        source: VertexId,
        labels: LabelSet,
        opts: InsOptions,
    ) -> Self {
        let n = g.vertex_count();
        let mut s = InformedSearch {
            g,
            ix,
            labels,
            rho_invert: opts.rho_invert,
            close: CloseMap::new(n),
            queue: FrontierQueue::new(n),
            resume: vec![(0, CloseState::N); n],
            target: source,
            stats: SearchStats::default(),
            pops: vec![0; n],
            f_exhausted: false,
        };
        s.close.set(source, CloseState::F);
        s.enqueue(source);
        s
    }

    pub fn close(&self) -> &CloseMap {
        &self.close
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn stats(&self) -> SearchStats {
        let mut s = self.stats.clone();
        s.passed_vertices = self.close.passed();
        s.pops = self.pops.iter().map(|&p| p as u64).sum();
        s.max_vertex_pops = self.pops.iter().copied().max().unwrap_or(0);
        s
    }

    fn enqueue(&mut self, v: VertexId) {
        let ctx = FrontierContext {
            index: self.ix,
            close: &self.close,
            target: self.target,
            rho_invert: self.rho_invert,
        };
        self.queue.push(v, &ctx);
    }

    fn rekey(&mut self, v: VertexId) {
        let ctx = FrontierContext {
            index: self.ix,
            close: &self.close,
            target: self.target,
            rho_invert: self.rho_invert,
        };
        self.queue.rekey(v, &ctx);
    }

    fn reached(&self, t_star: VertexId, b: CloseState) -> bool {
        match b {
            CloseState::T => self.close.get(t_star) == CloseState::T,
            _ => self.close.get(t_star) != CloseState::N,
        }
    }

    /// Records that `u`'s expansion in state `state` stopped before slot
    /// `next` and puts `u` back in the queue.
    fn suspend(&mut self, u: VertexId, state: CloseState, next: usize) {
        if next < self.g.out_adjacency(u).len() {
            self.resume[u.index()] = (next as u32, state);
            self.enqueue(u);
        }
    }

    /// Label-constrained search from `s_star` towards `t_star` in phase `b`,
    /// resuming the shared queue.
    pub fn lcs_informed(&mut self, s_star: VertexId, t_star: VertexId, b: CloseState) -> bool {
        assert_ne!(b, CloseState::N, "LCS phase must be T or F");
        self.stats.lcs_invocations += 1;
        if self.target != t_star {
            self.target = t_star;
            let ctx = FrontierContext {
                index: self.ix,
                close: &self.close,
                target: self.target,
                rho_invert: self.rho_invert,
            };
            self.queue.retarget(&ctx);
        }
        if b == CloseState::T {
            self.close.set(s_star, CloseState::T);
            if s_star == t_star {
                return true;
            }
            self.enqueue(s_star);
        }
        let late = b == CloseState::F && self.f_exhausted;
        let g = self.g;
        let ix = self.ix;
        let labels = self.labels;

        loop {
            let ctx = FrontierContext {
                index: ix,
                close: &self.close,
                target: t_star,
                rho_invert: self.rho_invert,
            };
            let Some(u) = self.queue.peek(&ctx) else {
                break;
            };
            let cu = self.close.get(u);
            if b == CloseState::T && cu != CloseState::T {
                break;
            }
            self.queue.pop(&ctx);
            if b == CloseState::F && cu == CloseState::T {
                continue;
            }
            let start = match std::mem::replace(&mut self.resume[u.index()], (0, CloseState::N)) {
                (next, st) if st == cu => next as usize,
                _ => 0,
            };
            if start == 0 {
                self.pops[u.index()] += 1;
            }
            let adj = g.out_adjacency(u);
            for (i, &(l, w)) in adj.iter().enumerate().skip(start) {
                if !labels.contains(l) {
                    continue;
                }
                self.stats.edges_scanned += 1;
                if !explores(b, self.close.get(w)) {
                    continue;
                }
                if w == t_star {
                    self.close.set(w, b);
                    self.suspend(u, cu, i + 1);
                    self.enqueue(w);
                    return true;
                }
                if ix.is_landmark(w) {
                    if ix.owner(t_star) == Some(w) && ix.check(w, t_star, labels) {
                        // w stays unmarked; rescan this edge if the search resumes
                        self.suspend(u, cu, i);
                        return true;
                    }
                    let before = self.close.passed();
                    self.close.set(w, b);
                    self.rekey(w);
                    let entry = ix.entry(w).expect("landmark has an entry");
                    let mut touched = Vec::new();
                    cut_internal(entry, labels, b, &mut self.close, |x| touched.push(x));
                    for x in touched {
                        self.rekey(x);
                    }
                    let mut pushed = Vec::new();
                    push_external(entry, labels, b, &mut self.close, |x| pushed.push(x));
                    for x in pushed {
                        self.enqueue(x);
                    }
                    if late {
                        self.stats.late_f_changes += (self.close.passed() - before) as u64;
                    }
                    if self.reached(t_star, b) {
                        self.suspend(u, cu, i + 1);
                        return true;
                    }
                    continue;
                }
                self.close.set(w, b);
                if late {
                    self.stats.late_f_changes += 1;
                }
                self.enqueue(w);
            }
        }
        if b == CloseState::F {
            self.f_exhausted = true;
        }
        false
    }
}

/// Answers `q` with the informed strategy. `vsg` must equal `V(S,G)` and
/// `ix` must have been built over `g`.
pub fn ins_query(g: &KnowledgeGraph, ix: &LocalIndex, q: &LscrQuery, vsg: &VertexSetResult) -> Result<QueryAnswer> {
    ins_query_with(g, ix, q, vsg, InsOptions::default())
}

pub fn ins_query_with(
    g: &KnowledgeGraph,
    ix: &LocalIndex,
    q: &LscrQuery,
    vsg: &VertexSetResult,
    opts: InsOptions,
) -> Result<QueryAnswer> {
    let start = Instant::now();
    ix.ensure_matches(g)?;
    if cfg!(debug_assertions) {
        let m = vsg.members();
        for &v in m.iter().step_by((m.len() / 16).max(1)) {
            if v.index() >= g.vertex_count() || !satisfies(g, v, &q.constraint) {
                return Err(Error::InconsistentVsg(v.to_string()));
            }
        }
    }
    let (s, t) = (q.source, q.target);
    if s == t {
        return Ok(QueryAnswer {
            value: vsg.contains(s),
            stats: SearchStats {
                passed_vertices: 1,
                wall_time: start.elapsed(),
                ..Default::default()
            },
            witness: None,
        });
    }

    let mut search = InformedSearch::new(g, ix, s, q.labels, opts);
    let mut heap = CandidateHeap::new(vsg.members());
    let mut value = false;
    while let Some(v) = heap.pop(ix, search.close(), s, t, opts.rho_invert) {
        match search.close().get(v) {
            CloseState::N if v == s || v == t => {
                value = search.lcs_informed(s, t, CloseState::F);
                break;
            }
            CloseState::N => {
                if search.lcs_informed(s, v, CloseState::F) && search.lcs_informed(v, t, CloseState::T) {
                    value = true;
                    break;
                }
            }
            CloseState::F => {
                if search.lcs_informed(v, t, CloseState::T) {
                    value = true;
                    break;
                }
            }
            CloseState::T => {}
        }
    }
    let mut stats = search.stats();
    debug_assert!(stats.pops <= 2 * g.vertex_count() as u64);
    stats.wall_time = start.elapsed();
    Ok(QueryAnswer {
        value,
        stats,
        witness: None,
    })
}
