use crate::graph::VertexId;
use crate::index::LocalIndex;
use crate::online::{CloseMap, CloseState};

/// The candidate heap `ℍ` over the unconsumed members of `V(S,G)`.
///
/// Members' states change while the search runs, so the best member is found
/// by a linear scan at each pop. Order: `F` members by `ρ(·, t)`, then `N`
/// members by `ρ(s, ·)`, landmarks first on equal `ρ`, then vertex id; `T`
/// members (nothing left to do) last.
#[derive(Clone, Debug)]
pub struct CandidateHeap {
    members: Vec<VertexId>,
}

impl CandidateHeap {
    pub fn new(members: &[VertexId]) -> Self {
        CandidateHeap {
            members: members.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn pop(
        &mut self,
        ix: &LocalIndex,
        close: &CloseMap,
        source: VertexId,
        target: VertexId,
        rho_invert: bool,
    ) -> Option<VertexId> {
        let rho = |r: Option<u64>| match r {
            None => (true, 0),
            Some(r) if rho_invert => (false, u64::MAX - r),
            Some(r) => (false, r),
        };
        let (i, _) = self.members.iter().enumerate().min_by_key(|&(_, &v)| {
            let (tier, r) = match close.get(v) {
                CloseState::F => (0, rho(ix.rho(v, target))),
                CloseState::N => (1, rho(ix.rho(source, v))),
                CloseState::T => (2, (false, 0)),
            };
            (tier, r, !ix.is_landmark(v), v)
        })?;
        Some(self.members.swap_remove(i))
    }
}
