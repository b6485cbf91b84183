use std::collections::VecDeque;
use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, LabelId, VertexId};
use crate::labels::LabelSet;
use crate::online::{uis_query, LscrQuery};
use crate::pattern::{match_all, SubstructureConstraint, VertexSetResult};

use super::gen_constraint_with_magnitude;
use super::oracle::label_bfs;

/// Where the query set's substructure constraint comes from.
#[derive(Clone, Debug)]
pub enum ConstraintSource {
    Given(SubstructureConstraint),
    /// Generate one matched by about this many vertices.
    Magnitude(u64),
}

#[derive(Clone, Debug)]
pub struct QueryGenSpec {
    pub count_true: usize,
    pub count_false: usize,
    pub constraint: ConstraintSource,
    pub seed: u64,
}

/// Why a false query is false.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FalseType {
    /// No `L`-path from `s` to `t`, but an unrestricted path through a
    /// constraint vertex exists.
    Label,
    /// An `L`-path exists, but no path of any labels passes a constraint
    /// vertex.
    Constraint,
    /// Neither.
    Both,
}

impl FalseType {
    pub const ALL: [FalseType; 3] = [FalseType::Label, FalseType::Constraint, FalseType::Both];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn tag(self) -> &'static str {
        match self {
            FalseType::Label => "label",
            FalseType::Constraint => "constraint",
            FalseType::Both => "both",
        }
    }
}

impl fmt::Display for FalseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Generation-time facts about one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Label-set size band: 0, 1 or 2 for `[0.2,0.4)`, `[0.4,0.6)`, `[0.6,0.8]`
    /// of the label universe.
    pub band: usize,
    /// Search-tree size of the classifying UIS run.
    pub tree_size: u64,
    /// The drawn minimum tree size the query had to reach.
    pub min_threshold: u64,
    pub false_type: Option<FalseType>,
}

#[derive(Clone, Debug)]
pub struct GeneratedQuery {
    pub query: LscrQuery,
    pub expected: bool,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct GeneratedQuerySet {
    pub constraint: SubstructureConstraint,
    pub true_queries: Vec<GeneratedQuery>,
    pub false_queries: Vec<GeneratedQuery>,
}

impl GeneratedQuerySet {
    pub fn len(&self) -> usize {
        self.true_queries.len() + self.false_queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True queries first, then false ones.
    pub fn iter(&self) -> impl Iterator<Item = &GeneratedQuery> {
        self.true_queries.iter().chain(&self.false_queries)
    }

    pub fn band_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for q in self.iter() {
            c[q.provenance.band] += 1;
        }
        c
    }

    pub fn false_type_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for q in &self.false_queries {
            if let Some(t) = q.provenance.false_type {
                c[t.slot()] += 1;
            }
        }
        c
    }

    /// Checks that band counts (overall and within each group) and false-type
    /// counts each differ by at most one, and that every label set lies in
    /// its recorded band.
    pub fn check_distribution(&self, label_universe: usize) -> std::result::Result<(), String> {
        let spread = |c: [usize; 3]| c.iter().max().unwrap() - c.iter().min().unwrap();
        let group = |qs: &[GeneratedQuery]| {
            let mut c = [0; 3];
            for q in qs {
                c[q.provenance.band] += 1;
            }
            c
        };
        for (what, c) in [
            ("bands", self.band_counts()),
            ("true bands", group(&self.true_queries)),
            ("false bands", group(&self.false_queries)),
            ("false types", self.false_type_counts()),
        ] {
            if spread(c) > 1 {
                return Err(format!("{what} unbalanced: {c:?}"));
            }
        }
        for q in self.iter() {
            let size = q.query.labels.len();
            if size_band(label_universe, size) != Some(q.provenance.band) {
                return Err(format!("label set of size {size} outside band {}", q.provenance.band));
            }
        }
        if self.false_queries.iter().any(|q| q.provenance.false_type.is_none()) {
            return Err("false query without a type".into());
        }
        Ok(())
    }
}

/// Band of a label set of `size` labels out of `universe`: `[0.2,0.4)`,
/// `[0.4,0.6)` or `[0.6,0.8]` of the universe.
pub fn size_band(universe: usize, size: usize) -> Option<usize> {
    let (k, t) = (10 * size, universe);
    if k < 2 * t || k > 8 * t {
        None
    } else if k < 4 * t {
        Some(0)
    } else if k < 6 * t {
        Some(1)
    } else {
        Some(2)
    }
}

/// Spreads `n` over three slots, extras going to slots `start, start+1, ..`.
fn quotas(n: usize, start: usize) -> [usize; 3] {
    let mut q = [n / 3; 3];
    for i in 0..n % 3 {
        q[(start + i) % 3] += 1;
    }
    q
}

/// Label sets tried per `(s, t)` pair before drawing a new pair.
const LABEL_RETRIES: usize = 8;

fn log2_len(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

/// Label-free BFS from `s`, stopped after `steps` expansions; returns the
/// discovered vertices.
fn truncated_bfs(g: &KnowledgeGraph, s: VertexId, steps: usize) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[s.index()] = true;
    let mut queue = VecDeque::from([s]);
    for _ in 0..steps {
        let Some(u) = queue.pop_front() else { break };
        for &(_, w) in g.out_adjacency(u) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Whether some path from `s` to `t`, labels ignored, passes `V(S,G)`.
fn passes_constraint(g: &KnowledgeGraph, s: VertexId, t: VertexId, vsg: &VertexSetResult) -> bool {
    let all = g.full_label_set();
    let from_s = label_bfs(g, s, all, false);
    let to_t = label_bfs(g, t, all, true);
    vsg.members()
        .iter()
        .any(|v| from_s[v.index()] && to_t[v.index()])
}

fn false_type_of(label_path: bool, through: bool) -> Option<FalseType> {
    match (label_path, through) {
        (false, true) => Some(FalseType::Label),
        (true, false) => Some(FalseType::Constraint),
        (false, false) => Some(FalseType::Both),
        // each half holds alone but not together
        (true, true) => None,
    }
}

/// Generates a labelled set of true and false LSCR queries.
///
/// Each candidate draws a source uniformly, a label set whose size keeps the
/// three size bands level, and a target among the vertices a short label-free
/// BFS from the source (`log₂|V|` expansions) did not discover. UIS decides
/// the answer; candidates whose search tree is smaller than a threshold drawn
/// from `[10·log₂|V|, |V|/(10·log₂|V|)]` are dropped, as are candidates whose
/// bucket (or false type) is already full; a dropped candidate first gets
/// fresh label sets for the same endpoints.
pub fn gen_queries(g: &KnowledgeGraph, spec: &QueryGenSpec) -> Result<GeneratedQuerySet> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let constraint = match &spec.constraint {
        ConstraintSource::Given(c) => c.clone(),
        ConstraintSource::Magnitude(m) => gen_constraint_with_magnitude(g, *m, rng.random())?,
    };
    let mut set = GeneratedQuerySet {
        constraint: constraint.clone(),
        true_queries: Vec::with_capacity(spec.count_true),
        false_queries: Vec::with_capacity(spec.count_false),
    };
    if spec.count_true + spec.count_false == 0 {
        return Ok(set);
    }
    let vsg = match_all(g, &constraint);
    if spec.count_true > 0 && vsg.is_empty() {
        return Err(Error::Timeout(0));
    }

    let n = g.vertex_count();
    let universe = g.label_count();
    let sizes: Vec<Vec<usize>> = (0..3)
        .map(|b| (1..=universe).filter(|&k| size_band(universe, k) == Some(b)).collect())
        .collect();
    if sizes.iter().any(Vec::is_empty) {
        return Err(Error::SpecInvalid(format!(
            "{universe} labels are too few for three label-set size bands"
        )));
    }
    let labels: Vec<LabelId> = (0..universe).map(|i| LabelId(i as u8)).collect();
    let vertices: Vec<VertexId> = g.vertices().collect();

    let true_band = quotas(spec.count_true, 0);
    let false_band = quotas(spec.count_false, spec.count_true % 3);
    let false_type = quotas(spec.count_false, 0);
    let mut have_true = [0; 3];
    let mut have_false = [0; 3];
    let mut have_type = [0; 3];

    let log_n = log2_len(n);
    let steps = log_n.ceil() as usize;
    let (a, b) = ((10.0 * log_n) as u64, (n as f64 / (10.0 * log_n)) as u64);
    let (min_lo, min_hi) = (a.min(b), a.max(b));

    let budget = 1000 * (spec.count_true + spec.count_false);
    let mut tried = 0;
    while tried < budget {
        tried += 1;
        let source = *vertices.choose(&mut rng).unwrap();
        let discovered = truncated_bfs(g, source, steps);
        let undiscovered: Vec<VertexId> =
            vertices.iter().copied().filter(|v| !discovered[v.index()]).collect();
        let Some(&target) = undiscovered.choose(&mut rng) else {
            continue;
        };
        // whether an unrestricted path from s to t passes V(S,G); L-independent
        let mut through = None;
        for retry in 0..LABEL_RETRIES {
            if retry > 0 {
                tried += 1;
            }
            let open: Vec<usize> = (0..3)
                .filter(|&b| have_true[b] < true_band[b] || have_false[b] < false_band[b])
                .collect();
            let Some(&band) = open.choose(&mut rng) else {
                return Ok(set);
            };
            let size = *sizes[band].choose(&mut rng).unwrap();
            let query = LscrQuery {
                source,
                target,
                labels: LabelSet::from_labels(labels.choose_multiple(&mut rng, size).copied()),
                constraint: constraint.clone(),
            };
            let min_threshold = rng.random_range(min_lo..=min_hi);
            let answer = uis_query(g, &query);
            let tree_size = answer.stats.pops;
            if tree_size < min_threshold {
                continue;
            }
            let mut provenance = Provenance {
                band,
                tree_size,
                min_threshold,
                false_type: None,
            };
            if answer.value {
                if have_true[band] < true_band[band] {
                    have_true[band] += 1;
                    set.true_queries.push(GeneratedQuery { query, expected: true, provenance });
                    break;
                }
            } else if have_false[band] < false_band[band] {
                let through = *through.get_or_insert_with(|| passes_constraint(g, source, target, &vsg));
                let label_path = label_bfs(g, source, query.labels, false)[target.index()];
                let Some(kind) = false_type_of(label_path, through) else {
                    continue;
                };
                if have_type[kind.slot()] < false_type[kind.slot()] {
                    have_type[kind.slot()] += 1;
                    have_false[band] += 1;
                    provenance.false_type = Some(kind);
                    set.false_queries.push(GeneratedQuery { query, expected: false, provenance });
                    break;
                }
            }
        }
    }
    if set.true_queries.len() == spec.count_true && set.false_queries.len() == spec.count_false {
        return Ok(set);
    }
    Err(Error::Timeout(budget))
}
