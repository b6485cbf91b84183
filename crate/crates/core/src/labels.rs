//! Label sets as 64-bit vectors, and antichains of minimal label sets.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph, LabelId, VertexId};

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(pub u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    /// The first `count` labels.
    pub fn full(count: usize) -> Self {
        if count >= 64 {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << count) - 1)
        }
    }

    pub fn singleton(l: LabelId) -> Self {
        LabelSet(1u64 << l.0)
    }

    pub fn from_labels<I: IntoIterator<Item = LabelId>>(labels: I) -> Self {
        labels.into_iter().fold(Self::EMPTY, |s, l| s.with(l))
    }

    #[inline]
    pub fn contains(self, l: LabelId) -> bool {
        self.0 & (1u64 << l.0) != 0
    }

    #[inline]
    pub fn insert(&mut self, l: LabelId) {
        self.0 |= 1u64 << l.0;
    }

    #[inline]
    pub fn with(self, l: LabelId) -> Self {
        LabelSet(self.0 | (1u64 << l.0))
    }

    #[inline]
    pub fn union(self, other: LabelSet) -> Self {
        LabelSet(self.0 | other.0)
    }

    #[inline]
    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = LabelId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(LabelId(i as u8))
        })
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}

#[inline]
pub fn is_subset(a: LabelSet, b: LabelSet) -> bool {
    a.is_subset(b)
}

/// Antichain under set inclusion. Small in practice, so kept as a flat list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelSetFamily {
    sets: Vec<LabelSet>,
}

impl LabelSetFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sets<I: IntoIterator<Item = LabelSet>>(sets: I) -> Self {
        let mut fam = Self::new();
        for s in sets {
            fam.insert(s);
        }
        fam
    }

    /// Adds `set` unless some member is a subset of it; drops strict supersets.
    pub fn insert(&mut self, set: LabelSet) -> bool {
        if self.admits(set) {
            return false;
        }
        self.sets.retain(|m| !set.is_subset(*m));
        self.sets.push(set);
        true
    }

    /// True iff some member is a subset of `set`.
    #[inline]
    pub fn admits(&self, set: LabelSet) -> bool {
        self.sets.iter().any(|m| m.is_subset(set))
    }

    pub fn sets(&self) -> &[LabelSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: LabelSet) -> bool {
        self.sets.contains(&set)
    }

    /// Members in ascending bit order, for order-insensitive comparison.
    pub fn sorted(&self) -> Vec<LabelSet> {
        let mut v = self.sets.clone();
        v.sort_unstable();
        v
    }

    pub fn is_antichain(&self) -> bool {
        self.sets.iter().enumerate().all(|(i, a)| {
            self.sets
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.is_subset(*b))
        })
    }
}

pub fn family_insert(fam: &mut LabelSetFamily, set: LabelSet) -> bool {
    fam.insert(set)
}

pub fn family_admits(fam: &LabelSetFamily, set: LabelSet) -> bool {
    fam.admits(set)
}

/// Upper bound on `|V| * 2^labels` accepted by [`cms_oracle`].
pub const ORACLE_STATE_BUDGET: u64 = 1 << 24;

/// Minimal label set together with one path realising it.
#[derive(Clone, Debug)]
pub struct CmsWitness {
    pub labels: LabelSet,
    pub path: Vec<Edge>,
}

/// Brute-force minimal sufficient path label sets from `s` to `t`.
///
/// Explores every `(vertex, exact label set)` state reachable from `(s, {})`.
/// With `scope`, only edges whose endpoints both lie in the scope are used
/// (and `s` must be in the scope for anything but the empty path to count).
pub fn cms_oracle(
    g: &KnowledgeGraph,
    s: VertexId,
    t: VertexId,
    scope: Option<&HashSet<VertexId>>,
) -> Result<LabelSetFamily> {
    Ok(LabelSetFamily::from_sets(
        cms_oracle_with_witnesses(g, s, t, scope)?
            .into_iter()
            .map(|w| w.labels),
    ))
}

pub fn cms_oracle_with_witnesses(
    g: &KnowledgeGraph,
    s: VertexId,
    t: VertexId,
    scope: Option<&HashSet<VertexId>>,
) -> Result<Vec<CmsWitness>> {
    let states = (g.vertex_count() as u64).saturating_mul(1u64 << g.label_count().min(63));
    if states > ORACLE_STATE_BUDGET {
        return Err(Error::BudgetExceeded(states));
    }
    let in_scope = |v: VertexId| scope.is_none_or(|sc| sc.contains(&v));

    // parent[(v, L)] = (previous state, edge taken)
    let mut parent: HashMap<(VertexId, LabelSet), Option<((VertexId, LabelSet), Edge)>> =
        HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert((s, LabelSet::EMPTY), None);
    queue.push_back((s, LabelSet::EMPTY));
    let mut reached_t = Vec::new();
    while let Some((v, set)) = queue.pop_front() {
        if v == t {
            reached_t.push(set);
        }
        if !in_scope(v) {
            continue;
        }
        for &(l, w) in g.out_adjacency(v) {
            if !in_scope(w) {
                continue;
            }
            let next = (w, set.with(l));
            if let std::collections::hash_map::Entry::Vacant(slot) = parent.entry(next) {
                slot.insert(Some((
                    (v, set),
                    Edge {
                        source: v,
                        label: l,
                        target: w,
                    },
                )));
                queue.push_back(next);
            }
        }
    }

    let minimal = LabelSetFamily::from_sets(reached_t.iter().copied());
    let mut out = Vec::with_capacity(minimal.len());
    for &labels in minimal.sets() {
        let mut path = Vec::new();
        let mut cur = (t, labels);
        while let Some(Some((prev, edge))) = parent.get(&cur) {
            path.push(*edge);
            cur = *prev;
        }
        path.reverse();
        out.push(CmsWitness { labels, path });
    }
    Ok(out)
}
