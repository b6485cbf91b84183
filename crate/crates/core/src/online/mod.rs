//! Uninformed LSCR search: UIS and UIS*.
//!
//! Both strategies maintain a per-query [`CloseMap`] assigning every vertex
//! one of three states: `N` (not reached), `F` (reached, but no constraint
//! vertex on the path known yet) and `T` (reached through a vertex satisfying
//! the constraint). States only move forward (`N→F→T` or `N→T`), which bounds
//! each vertex to two expansions.

pub(crate) mod uis;
mod uis_star;

use std::fmt;
use std::time::Duration;

use crate::graph::{Edge, LabelId, VertexId};
use crate::labels::LabelSet;
use crate::pattern::SubstructureConstraint;

pub use uis::{uis_query, uis_query_with};
pub use uis_star::{uis_star_query, uis_star_query_with, StackSearch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CloseState {
    N,
    T,
    F,
}

impl CloseState {
    fn from_bool(b: bool) -> Self {
        if b {
            CloseState::T
        } else {
            CloseState::F
        }
    }
}

/// The close surjection `V → {N, T, F}` with a running count of non-`N`
/// vertices.
#[derive(Clone, Debug)]
pub struct CloseMap {
    states: Vec<CloseState>,
    passed: usize,
}

impl CloseMap {
    pub fn new(vertex_count: usize) -> Self {
        CloseMap {
            states: vec![CloseState::N; vertex_count],
            passed: 0,
        }
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> CloseState {
        self.states[v.index()]
    }

    /// Moves `v` to `state`; returns whether anything changed.
    ///
    /// # Panics
    /// On a demotion (`T→F`, `T→N`, `F→N`).
    #[inline]
    pub fn set(&mut self, v: VertexId, state: CloseState) -> bool {
        let slot = &mut self.states[v.index()];
        let old = *slot;
        if old == state {
            return false;
        }
        assert!(
            matches!(
                (old, state),
                (CloseState::N, _) | (CloseState::F, CloseState::T)
            ),
            "close state of {v} demoted from {old:?} to {state:?}"
        );
        if old == CloseState::N {
            self.passed += 1;
        }
        *slot = state;
        true
    }

    /// Number of vertices whose state is not `N`.
    pub fn passed(&self) -> usize {
        self.passed
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Vertices whose close state is not `N` when the search ends.
    pub passed_vertices: usize,
    pub scck_calls: u64,
    pub edges_scanned: u64,
    pub lcs_invocations: u64,
    /// Vertex expansions (nodes of the search tree).
    pub pops: u64,
    pub max_vertex_pops: u32,
    /// Close-state changes made by an `F`-phase search that ran after an
    /// earlier `F`-phase search had already returned false. Always zero for a
    /// correct UIS* run.
    pub late_f_changes: u64,
    pub wall_time: Duration,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "passed_vertices={}", self.passed_vertices)?;
        writeln!(f, "scck_calls={}", self.scck_calls)?;
        writeln!(f, "edges_scanned={}", self.edges_scanned)?;
        writeln!(f, "lcs_invocations={}", self.lcs_invocations)?;
        writeln!(f, "pops={}", self.pops)?;
        writeln!(f, "max_vertex_pops={}", self.max_vertex_pops)?;
        writeln!(f, "late_f_changes={}", self.late_f_changes)?;
        write!(f, "wall_time_us={}", self.wall_time.as_micros())
    }
}

/// `(s, t, L, S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LscrQuery {
    pub source: VertexId,
    pub target: VertexId,
    pub labels: LabelSet,
    pub constraint: SubstructureConstraint,
}

#[derive(Clone, Debug)]
pub struct QueryAnswer {
    pub value: bool,
    pub stats: SearchStats,
    /// A satisfying path from source to target, when requested and the
    /// strategy supports it.
    pub witness: Option<Vec<Edge>>,
}

impl fmt::Display for QueryAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.value)?;
        write!(f, "{}", self.stats)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Record parent pointers and return a witness path for true answers.
    pub witness: bool,
}

/// How a `(vertex, state)` node of the search tree was first reached.
#[derive(Clone, Copy, Debug)]
struct Link {
    from: VertexId,
    from_state: CloseState,
    /// `None` for an in-place state upgrade of the same vertex.
    label: Option<LabelId>,
}

/// Parent pointers per `(vertex, F|T)`; empty when witnesses are disabled.
#[derive(Debug, Default)]
pub(crate) struct Parents {
    f: Vec<Option<Link>>,
    t: Vec<Option<Link>>,
}

impl Parents {
    pub(crate) fn new(enabled: bool, n: usize) -> Self {
        if enabled {
            Parents {
                f: vec![None; n],
                t: vec![None; n],
            }
        } else {
            Parents::default()
        }
    }

    fn enabled(&self) -> bool {
        !self.f.is_empty()
    }

    fn slot(&mut self, v: VertexId, state: CloseState) -> &mut Option<Link> {
        match state {
            CloseState::F => &mut self.f[v.index()],
            CloseState::T => &mut self.t[v.index()],
            CloseState::N => unreachable!("no parent for state N"),
        }
    }

    pub(crate) fn edge(&mut self, u: VertexId, us: CloseState, l: LabelId, v: VertexId, vs: CloseState) {
        if self.enabled() {
            *self.slot(v, vs) = Some(Link {
                from: u,
                from_state: us,
                label: Some(l),
            });
        }
    }

    pub(crate) fn upgrade(&mut self, v: VertexId) {
        if self.enabled() {
            *self.slot(v, CloseState::T) = Some(Link {
                from: v,
                from_state: CloseState::F,
                label: None,
            });
        }
    }

    /// Walks back from `(v, state)` to the root and returns the edges in path
    /// order.
    pub(crate) fn path_to(&mut self, mut v: VertexId, mut state: CloseState) -> Option<Vec<Edge>> {
        if !self.enabled() {
            return None;
        }
        let mut edges = Vec::new();
        while let Some(link) = *self.slot(v, state) {
            if let Some(label) = link.label {
                edges.push(Edge {
                    source: link.from,
                    label,
                    target: v,
                });
            }
            v = link.from;
            state = link.from_state;
        }
        edges.reverse();
        Some(edges)
    }
}

/// Per-vertex expansion counter feeding `pops` / `max_vertex_pops`.
#[derive(Debug)]
pub(crate) struct PopCounter {
    per_vertex: Vec<u32>,
    total: u64,
    max: u32,
}

impl PopCounter {
    pub(crate) fn new(n: usize) -> Self {
        PopCounter {
            per_vertex: vec![0; n],
            total: 0,
            max: 0,
        }
    }

    #[inline]
    pub(crate) fn record(&mut self, v: VertexId) {
        let c = &mut self.per_vertex[v.index()];
        *c += 1;
        self.total += 1;
        self.max = self.max.max(*c);
    }

    pub(crate) fn write_to(&self, stats: &mut SearchStats) {
        stats.pops = self.total;
        stats.max_vertex_pops = self.max;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn close_map_monotone() {
        let mut c = CloseMap::new(3);
        let v = VertexId(1);
        assert!(c.set(v, CloseState::F));
        assert!(c.set(v, CloseState::T));
        assert!(!c.set(v, CloseState::T));
        assert!(c.set(VertexId(2), CloseState::T));
        assert_eq!(c.passed(), 2);
    }

    #[test]
    #[should_panic(expected = "demoted")]
    fn close_map_rejects_demotion() {
        let mut c = CloseMap::new(1);
        c.set(VertexId(0), CloseState::T);
        c.set(VertexId(0), CloseState::F);
    }

    #[test]
    fn stats_render_as_key_value_lines() {
        let s = SearchStats {
            passed_vertices: 3,
            ..Default::default()
        };
        let text = s.to_string();
        assert!(text.lines().all(|l| l.contains('=')));
        assert!(text.starts_with("passed_vertices=3\n"));
    }
}
