use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, VertexId};

const NONE: u32 = u32::MAX;

/// `⌈log₂|V| · √|V|⌉`, capped at `|V|`.
pub fn default_k(vertex_count: usize) -> usize {
    if vertex_count < 2 {
        return 0;
    }
    let n = vertex_count as f64;
    ((n.log2() * n.sqrt()).ceil() as usize).min(vertex_count)
}

/// Picks `k` distinct landmarks.
///
/// `⌈√#classes⌉` schema classes are drawn at random and their instances are
/// taken round-robin; if the schema is empty or runs out of instances, the
/// remainder is filled with random unmarked vertices. The result is in
/// selection order.
pub fn select_landmarks(g: &KnowledgeGraph, k: usize, seed: u64) -> Result<Vec<VertexId>> {
    let n = g.vertex_count();
    if k > n {
        return Err(Error::KTooLarge { k, vertices: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut marked = vec![false; n];
    let mut out = Vec::with_capacity(k);

    let mut classes: Vec<VertexId> = g.schema().classes.iter().copied().collect();
    classes.shuffle(&mut rng);
    classes.truncate((classes.len() as f64).sqrt().ceil() as usize);
    let mut pools: Vec<std::vec::IntoIter<VertexId>> = classes
        .iter()
        .map(|&c| g.instances_of_class(c).map(Vec::into_iter))
        .collect::<Result<_>>()?;
    while out.len() < k && !pools.is_empty() {
        pools.retain_mut(|pool| {
            if out.len() == k {
                return true;
            }
            for v in pool.by_ref() {
                if !marked[v.index()] {
                    marked[v.index()] = true;
                    out.push(v);
                    return true;
                }
            }
            false
        });
    }

    if out.len() < k {
        let mut rest: Vec<VertexId> = g.vertices().filter(|v| !marked[v.index()]).collect();
        rest.shuffle(&mut rng);
        out.extend(rest.into_iter().take(k - out.len()));
    }
    Ok(out)
}

/// Landmarks and the subgraph owner of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandmarkAssignment {
    landmarks: Vec<VertexId>,
    owner: Vec<u32>,
}

impl LandmarkAssignment {
    pub(crate) fn from_parts(landmarks: Vec<VertexId>, owner: Vec<u32>) -> Self {
        LandmarkAssignment { landmarks, owner }
    }

    pub fn landmarks(&self) -> &[VertexId] {
        &self.landmarks
    }

    #[inline]
    pub fn owner(&self, v: VertexId) -> Option<VertexId> {
        match self.owner[v.index()] {
            NONE => None,
            o => Some(VertexId(o)),
        }
    }

    pub(crate) fn raw_owners(&self) -> &[u32] {
        &self.owner
    }

    pub fn vertex_count(&self) -> usize {
        self.owner.len()
    }

    /// Vertices owned by `u`, in id order.
    pub fn owned_by(&self, u: VertexId) -> Vec<VertexId> {
        (0..self.owner.len() as u32)
            .filter(|&v| self.owner[v as usize] == u.0)
            .map(VertexId)
            .collect()
    }
}

/// Grows one subgraph per landmark by a simultaneous BFS over out-edges,
/// ignoring labels.
///
/// The frontiers take turns popping one vertex each, in landmark order; a
/// vertex belongs to whichever frontier reaches it first. Landmarks are
/// claimed by themselves up front, so no landmark is absorbed by another.
pub fn bfs_partition(g: &KnowledgeGraph, landmarks: &[VertexId]) -> LandmarkAssignment {
    let mut owner = vec![NONE; g.vertex_count()];
    let mut frontiers: Vec<VecDeque<VertexId>> = Vec::with_capacity(landmarks.len());
    for &u in landmarks {
        debug_assert_eq!(owner[u.index()], NONE, "duplicate landmark {u}");
        owner[u.index()] = u.0;
        frontiers.push(VecDeque::from([u]));
    }
    let mut rotation: VecDeque<usize> = (0..landmarks.len()).collect();
    while let Some(i) = rotation.pop_front() {
        let Some(v) = frontiers[i].pop_front() else {
            continue;
        };
        let u = landmarks[i];
        for &(_, w) in g.out_adjacency(v) {
            if owner[w.index()] == NONE {
                owner[w.index()] = u.0;
                frontiers[i].push_back(w);
            }
        }
        if !frontiers[i].is_empty() {
            rotation.push_back(i);
        }
    }
    LandmarkAssignment {
        landmarks: landmarks.to_vec(),
        owner,
    }
}
