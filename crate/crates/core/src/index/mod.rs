//! Local landmark index.
//!
//! The graph is partitioned into subgraphs grown from landmark vertices. For
//! each landmark `u` the index keeps
//!
//! * `II[u]`: for every vertex `v` of `u`'s subgraph, the minimal label sets
//!   of paths `u ⇝ v` that stay inside the subgraph;
//! * `EI^T[u]`: for every minimal label set, the vertices outside the
//!   subgraph that are first reached with it;
//! * `D[u]`: per other landmark, how many of those outside vertices belong
//!   to its subgraph.

mod io;
mod landmarks;
mod local;

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, VertexId};
use crate::labels::{LabelSet, LabelSetFamily};

pub use io::{load_index, save_index, IndexStats, LandmarkStats};
pub use landmarks::{bfs_partition, default_k, select_landmarks, LandmarkAssignment};
pub use local::local_full_index;

const NO_SLOT: u32 = u32::MAX;

/// `II[u] ∪ EI^T[u] ∪ D[u]` for one landmark.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LandmarkEntry {
    /// Sorted by vertex.
    pub internal: Vec<(VertexId, LabelSetFamily)>,
    /// Sorted by label set; vertex lists sorted.
    pub external_t: Vec<(LabelSet, Vec<VertexId>)>,
    /// Sorted by landmark; zero counts omitted.
    pub correlation: Vec<(VertexId, u64)>,
}

impl LandmarkEntry {
    pub fn internal_family(&self, v: VertexId) -> Option<&LabelSetFamily> {
        self.internal
            .binary_search_by_key(&v, |(x, _)| *x)
            .ok()
            .map(|i| &self.internal[i].1)
    }

    pub fn correlation_with(&self, landmark: VertexId) -> u64 {
        self.correlation
            .binary_search_by_key(&landmark, |(x, _)| *x)
            .map_or(0, |i| self.correlation[i].1)
    }
}

/// True iff `II` has an entry for `target` admitting `labels`.
pub fn index_check(entry: &LandmarkEntry, target: VertexId, labels: LabelSet) -> bool {
    entry.internal_family(target).is_some_and(|f| f.admits(labels))
}

#[derive(Clone, Debug)]
pub struct LocalIndex {
    fingerprint: u64,
    k: usize,
    seed: u64,
    assignment: LandmarkAssignment,
    /// Vertex → position in `landmarks`, or `NO_SLOT`.
    slot: Vec<u32>,
    entries: Vec<LandmarkEntry>,
    build_time: Duration,
}

impl PartialEq for LocalIndex {
    /// Structural equality; build time is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.k == other.k
            && self.seed == other.seed
            && self.assignment == other.assignment
            && self.entries == other.entries
    }
}

impl LocalIndex {
    fn assemble(
        fingerprint: u64,
        k: usize,
        seed: u64,
        assignment: LandmarkAssignment,
        entries: Vec<LandmarkEntry>,
        build_time: Duration,
    ) -> Self {
        let mut slot = vec![NO_SLOT; assignment.vertex_count()];
        for (i, u) in assignment.landmarks().iter().enumerate() {
            slot[u.index()] = i as u32;
        }
        LocalIndex {
            fingerprint,
            k,
            seed,
            assignment,
            slot,
            entries,
            build_time,
        }
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn build_time(&self) -> Duration {
        self.build_time
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.vertex_count()
    }

    pub fn assignment(&self) -> &LandmarkAssignment {
        &self.assignment
    }

    pub fn landmarks(&self) -> &[VertexId] {
        self.assignment.landmarks()
    }

    #[inline]
    pub fn owner(&self, v: VertexId) -> Option<VertexId> {
        self.assignment.owner(v)
    }

    #[inline]
    pub fn is_landmark(&self, v: VertexId) -> bool {
        self.slot[v.index()] != NO_SLOT
    }

    pub fn entry(&self, landmark: VertexId) -> Option<&LandmarkEntry> {
        match self.slot[landmark.index()] {
            NO_SLOT => None,
            i => Some(&self.entries[i as usize]),
        }
    }

    /// Entries in landmark order.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, &LandmarkEntry)> {
        self.landmarks().iter().copied().zip(&self.entries)
    }

    /// `D[owner(a)][owner(b)]`, or `None` when either vertex is unowned.
    #[inline]
    pub fn rho(&self, a: VertexId, b: VertexId) -> Option<u64> {
        let (oa, ob) = (self.owner(a)?, self.owner(b)?);
        Some(self.entry(oa).map_or(0, |e| e.correlation_with(ob)))
    }

    /// Whether `landmark ⇝ target` under `labels` inside the landmark's
    /// subgraph, per `II` (the landmark reaches itself with `∅`).
    pub fn check(&self, landmark: VertexId, target: VertexId, labels: LabelSet) -> bool {
        landmark == target || self.entry(landmark).is_some_and(|e| index_check(e, target, labels))
    }

    /// Fails unless the index was built over `g`.
    pub fn ensure_matches(&self, g: &KnowledgeGraph) -> Result<()> {
        if self.fingerprint != g.fingerprint() || self.vertex_count() != g.vertex_count() {
            return Err(Error::IndexGraphMismatch);
        }
        Ok(())
    }
}

/// Index construction settings.
#[derive(Clone, Debug, Default)]
pub struct IndexBuilder {
    /// Landmark count; `None` uses [`default_k`].
    pub k: Option<usize>,
    pub seed: u64,
    /// Build per-landmark entries on the rayon pool.
    pub parallel: bool,
    /// Use these landmarks instead of selecting them.
    pub landmarks: Option<Vec<VertexId>>,
}

impl IndexBuilder {
    pub fn new(k: Option<usize>, seed: u64) -> Self {
        IndexBuilder {
            k,
            seed,
            ..Default::default()
        }
    }

    pub fn parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn with_landmarks(mut self, landmarks: Vec<VertexId>) -> Self {
        self.landmarks = Some(landmarks);
        self
    }

    pub fn build(&self, g: &KnowledgeGraph) -> Result<LocalIndex> {
        let start = Instant::now();
        let landmarks = match &self.landmarks {
            Some(l) => {
                if l.len() > g.vertex_count() {
                    return Err(Error::KTooLarge {
                        k: l.len(),
                        vertices: g.vertex_count(),
                    });
                }
                l.clone()
            }
            None => {
                let k = self.k.unwrap_or_else(|| default_k(g.vertex_count()));
                select_landmarks(g, k, self.seed)?
            }
        };
        let assignment = bfs_partition(g, &landmarks);
        let entries: Vec<LandmarkEntry> = if self.parallel {
            landmarks
                .par_iter()
                .map(|&u| local_full_index(g, u, &assignment))
                .collect()
        } else {
            landmarks
                .iter()
                .map(|&u| local_full_index(g, u, &assignment))
                .collect()
        };
        Ok(LocalIndex::assemble(
            g.fingerprint(),
            landmarks.len(),
            self.seed,
            assignment,
            entries,
            start.elapsed(),
        ))
    }
}

/// Builds an index with `k` landmarks (default `⌈log₂|V|·√|V|⌉`) on the
/// rayon pool.
pub fn build_index(g: &KnowledgeGraph, k: Option<usize>, seed: u64) -> Result<LocalIndex> {
    IndexBuilder::new(k, seed).parallel(true).build(g)
}
