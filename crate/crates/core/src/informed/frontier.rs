use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::graph::VertexId;
use crate::index::LocalIndex;
use crate::online::{CloseMap, CloseState};

/// What the queue order depends on besides the vertices themselves.
#[derive(Clone, Copy)]
pub struct FrontierContext<'a> {
    pub index: &'a LocalIndex,
    pub close: &'a CloseMap,
    pub target: VertexId,
    /// Prefer larger correlation counts instead of smaller ones.
    pub rho_invert: bool,
}

/// Lexicographic priority, smaller first:
/// 1. `T` before `F`;
/// 2. same subgraph as the target;
/// 3. landmarks;
/// 4. smaller `ρ(·, t*)` (unowned vertices last);
/// 5. non-landmarks whose owning landmark is still unexplored;
/// 6. insertion order.
///
/// Packed into one word, most significant field first: tier (2 bits),
/// subgraph (1), landmark (1), unowned (1), ρ saturated to 20 bits, owner
/// (1), sequence number (38).
type Key = u64;

const RHO_BITS: u32 = 20;
const RHO_MAX: u64 = (1 << RHO_BITS) - 1;
const SEQ_BITS: u32 = 38;

fn key(v: VertexId, seq: u64, ctx: &FrontierContext<'_>) -> Key {
    let ix = ctx.index;
    let tier = match ctx.close.get(v) {
        CloseState::T => 0,
        CloseState::F => 1,
        CloseState::N => 2,
    };
    let owner = ix.owner(v);
    let same_subgraph = owner.is_some() && owner == ix.owner(ctx.target);
    let landmark = ix.is_landmark(v);
    let (unowned, rho) = match ix.rho(v, ctx.target) {
        None => (1, 0),
        Some(r) if ctx.rho_invert => (0, RHO_MAX - r.min(RHO_MAX)),
        Some(r) => (0, r.min(RHO_MAX)),
    };
    let fresh_owner = landmark || owner.is_some_and(|o| ctx.close.get(o) == CloseState::N);
    debug_assert!(seq < 1 << SEQ_BITS);
    let mut k = tier;
    k = k << 1 | !same_subgraph as u64;
    k = k << 1 | !landmark as u64;
    k = k << 1 | unowned;
    k = k << RHO_BITS | rho;
    k = k << 1 | !fresh_owner as u64;
    k << SEQ_BITS | seq
}

/// Orders two queued vertices by the rules above; `Less` means `u` is served
/// first.
pub fn frontier_compare(u: VertexId, seq_u: u64, v: VertexId, seq_v: u64, ctx: &FrontierContext<'_>) -> Ordering {
    key(u, seq_u, ctx).cmp(&key(v, seq_v, ctx))
}

/// The global priority queue `ℚ`.
///
/// Holds each vertex at most once; re-inserting a queued vertex discards the
/// earlier entry. Priorities depend on mutable search state, so entries are
/// re-validated when they reach the front: a key that has only become worse
/// since insertion is re-filed. Improvements (a queued vertex upgraded to
/// `T`) must be announced with [`FrontierQueue::rekey`].
#[derive(Debug)]
pub struct FrontierQueue {
    heap: BinaryHeap<Reverse<(Key, VertexId, u32)>>,
    version: Vec<u32>,
    seq: Vec<u64>,
    queued: Vec<bool>,
    len: usize,
    next_seq: u64,
}

impl FrontierQueue {
    pub fn new(vertex_count: usize) -> Self {
        FrontierQueue {
            heap: BinaryHeap::new(),
            version: vec![0; vertex_count],
            seq: vec![0; vertex_count],
            queued: vec![false; vertex_count],
            len: 0,
            next_seq: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.queued[v.index()]
    }

    /// Inserts `v` as the newest element, replacing any earlier entry.
    pub fn push(&mut self, v: VertexId, ctx: &FrontierContext<'_>) {
        let i = v.index();
        if !self.queued[i] {
            self.queued[i] = true;
            self.len += 1;
        }
        self.next_seq += 1;
        self.seq[i] = self.next_seq;
        self.file(v, ctx);
    }

    /// Recomputes the priority of a queued `v` after its state changed.
    pub fn rekey(&mut self, v: VertexId, ctx: &FrontierContext<'_>) {
        if self.queued[v.index()] {
            self.file(v, ctx);
        }
    }

    fn file(&mut self, v: VertexId, ctx: &FrontierContext<'_>) {
        let i = v.index();
        self.version[i] = self.version[i].wrapping_add(1);
        self.heap
            .push(Reverse((key(v, self.seq[i], ctx), v, self.version[i])));
    }

    /// Re-files everything, for when the search target changes.
    pub fn retarget(&mut self, ctx: &FrontierContext<'_>) {
        let live: Vec<VertexId> = std::mem::take(&mut self.heap)
            .into_iter()
            .filter(|Reverse((_, v, ver))| self.queued[v.index()] && self.version[v.index()] == *ver)
            .map(|Reverse((_, v, _))| v)
            .collect();
        for v in live {
            self.file(v, ctx);
        }
    }

    /// The first vertex under the current state, without removing it.
    pub fn peek(&mut self, ctx: &FrontierContext<'_>) -> Option<VertexId> {
        while let Some(&Reverse((k, v, ver))) = self.heap.peek() {
            let i = v.index();
            if !self.queued[i] || self.version[i] != ver {
                self.heap.pop();
                continue;
            }
            let now = key(v, self.seq[i], ctx);
            if now != k {
                self.heap.pop();
                self.heap.push(Reverse((now, v, ver)));
                continue;
            }
            return Some(v);
        }
        None
    }

    pub fn pop(&mut self, ctx: &FrontierContext<'_>) -> Option<VertexId> {
        let v = self.peek(ctx)?;
        self.heap.pop();
        self.queued[v.index()] = false;
        self.len -= 1;
        Some(v)
    }
}
