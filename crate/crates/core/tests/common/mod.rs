#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lscr::graph::{GraphBuilder, IngestOptions};
use lscr::pattern::{Term, TriplePattern};
use lscr::{KnowledgeGraph, LabelId, LabelSet, LscrQuery, SubstructureConstraint, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random multigraph on `n` vertices with `labels` labels and about
/// `n·density` edges. Every label is used at least once; vertices that drew
/// no edge do not exist, so the graph may have fewer than `n` vertices.
pub fn random_graph(rng: &mut impl Rng, n: usize, labels: usize, density: f64) -> KnowledgeGraph {
    let mut b = GraphBuilder::new(IngestOptions::default());
    let v = |i: usize| format!("v{i}");
    let l = |j: usize| format!("l{j}");
    for j in 0..labels {
        let s = rng.random_range(0..n);
        b.add_triple(&v(s), &l(j), &v((s + 1 + rng.random_range(0..n - 1)) % n));
    }
    let m = (n as f64 * density) as usize;
    while b.triple_count() < m.max(labels) {
        let s = rng.random_range(0..n);
        let t = rng.random_range(0..n);
        if s != t {
            b.add_triple(&v(s), &l(rng.random_range(0..labels)), &v(t));
        }
    }
    b.build().unwrap()
}

/// Random graph with the sizes of the differential suites.
pub fn random_instance(seed: u64) -> KnowledgeGraph {
    let mut r = rng(seed);
    let n = r.random_range(20..=300);
    let labels = r.random_range(3..=8);
    let density = r.random_range(1.0..3.0);
    random_graph(&mut r, n, labels, density)
}

/// A connected pattern anchored on a random edge, so most constraints match
/// something; a few are built from random labels and may match nothing.
pub fn random_constraint(rng: &mut impl Rng, g: &KnowledgeGraph) -> SubstructureConstraint {
    let mut vars = vec!["?x".to_owned()];
    let mut patterns = Vec::new();
    let nl = g.label_count();
    if rng.random_bool(0.15) {
        vars.push("?y".into());
        patterns.push(TriplePattern {
            subject: Term::Var(0),
            predicate: LabelId(rng.random_range(0..nl) as u8),
            object: Term::Var(1),
        });
        if rng.random_bool(0.5) {
            patterns.push(TriplePattern {
                subject: Term::Var(1),
                predicate: LabelId(rng.random_range(0..nl) as u8),
                object: Term::Var(0),
            });
        }
        return SubstructureConstraint::new(vars, patterns).unwrap();
    }
    let e = *g.edges().choose(rng).unwrap();
    let outgoing = rng.random_bool(0.5);
    let (focus, other) = if outgoing { (e.source, e.target) } else { (e.target, e.source) };
    let other = if rng.random_bool(0.5) {
        Term::Vertex(other)
    } else {
        vars.push("?y".into());
        Term::Var(1)
    };
    let (subject, object) = if outgoing { (Term::Var(0), other) } else { (other, Term::Var(0)) };
    patterns.push(TriplePattern {
        subject,
        predicate: e.label,
        object,
    });
    // a second edge at the same focus vertex narrows the match set
    if rng.random_bool(0.4) {
        let adj = g.out_adjacency(focus);
        if let Some(&(l, w)) = adj.choose(rng) {
            let z = if rng.random_bool(0.5) {
                Term::Vertex(w)
            } else {
                vars.push("?z".into());
                Term::Var(vars.len() - 1)
            };
            patterns.push(TriplePattern {
                subject: Term::Var(0),
                predicate: l,
                object: z,
            });
        }
    }
    SubstructureConstraint::new(vars, patterns).unwrap()
}

pub fn random_labels(rng: &mut impl Rng, g: &KnowledgeGraph) -> LabelSet {
    let mut s = LabelSet::EMPTY;
    for l in 0..g.label_count() {
        if rng.random_bool(0.75) {
            s.insert(LabelId(l as u8));
        }
    }
    s
}

pub fn random_query(rng: &mut impl Rng, g: &KnowledgeGraph, constraint: &SubstructureConstraint) -> LscrQuery {
    let n = g.vertex_count() as u32;
    LscrQuery {
        source: VertexId(rng.random_range(0..n)),
        target: VertexId(rng.random_range(0..n)),
        labels: random_labels(rng, g),
        constraint: constraint.clone(),
    }
}

/// Outcome counts of [`differential_instance`].
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub queries: usize,
    pub true_answers: usize,
    pub uis_star_late_f_changes: u64,
    pub ins_late_f_changes: u64,
}

impl Tally {
    pub fn add(&mut self, other: &Tally) {
        self.queries += other.queries;
        self.true_answers += other.true_answers;
        self.uis_star_late_f_changes += other.uis_star_late_f_changes;
        self.ins_late_f_changes += other.ins_late_f_changes;
    }
}

/// Runs every strategy against the oracle on one seeded random instance:
/// two constraints, `queries` queries each, INS with 0, 1 and `⌈√|V|⌉`
/// landmarks. Also checks the per-run pop and constraint-check bounds.
pub fn differential_instance(seed: u64, queries: usize) -> Result<Tally, String> {
    use lscr::index::build_index;
    use lscr::informed::ins_query;
    use lscr::online::{uis_query, uis_star_query};
    use lscr::pattern::match_all;
    use lscr::workload::oracle_lscr;

    let g = random_instance(seed);
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = g.vertex_count();
    let ks = [0, 1, (n as f64).sqrt().ceil() as usize];
    let indexes: Vec<_> = ks.iter().map(|&k| build_index(&g, Some(k), seed).unwrap()).collect();
    let mut tally = Tally::default();
    for _ in 0..2 {
        let c = random_constraint(&mut r, &g);
        let vsg = match_all(&g, &c);
        for _ in 0..queries {
            let q = random_query(&mut r, &g, &c);
            let ctx = || format!("seed {seed}, {}→{} L={:#x} S={}", q.source.0, q.target.0, q.labels.0, c.to_text(&g));
            let want = oracle_lscr(&g, &q);
            let a = uis_query(&g, &q);
            if a.value != want {
                return Err(format!("uis says {} ({})", a.value, ctx()));
            }
            if a.stats.max_vertex_pops > 2 || a.stats.scck_calls > n as u64 {
                return Err(format!("uis bounds: {:?} ({})", a.stats, ctx()));
            }
            let a = uis_star_query(&g, &q, &vsg).map_err(|e| e.to_string())?;
            if a.value != want {
                return Err(format!("uis* says {} ({})", a.value, ctx()));
            }
            if a.stats.pops > 2 * n as u64 {
                return Err(format!("uis* pops {} > 2|V| ({})", a.stats.pops, ctx()));
            }
            tally.uis_star_late_f_changes += a.stats.late_f_changes;
            for (k, ix) in ks.iter().zip(&indexes) {
                let a = ins_query(&g, ix, &q, &vsg).map_err(|e| e.to_string())?;
                if a.value != want {
                    return Err(format!("ins k={k} says {} ({})", a.value, ctx()));
                }
                if a.stats.pops > 2 * n as u64 {
                    return Err(format!("ins k={k} pops {} > 2|V| ({})", a.stats.pops, ctx()));
                }
                tally.ins_late_f_changes += a.stats.late_f_changes;
            }
            tally.queries += 1;
            tally.true_answers += want as usize;
        }
    }
    Ok(tally)
}

/// Compares every `II` row of a random graph's index with the scoped
/// brute-force CMS, and samples `ei_samples` boundary entries with a random
/// superset of their label set, confirming each by label-constrained BFS.
/// Returns the number of boundary samples confirmed.
pub fn index_consistency_instance(seed: u64, ei_samples: usize) -> Result<usize, String> {
    use std::collections::HashSet;

    use lscr::index::build_index;
    use lscr::labels::cms_oracle;
    use lscr::workload::label_bfs;

    let mut r = rng(seed);
    let n = r.random_range(10..=150);
    let labels = r.random_range(3..=6);
    let density = r.random_range(1.0..2.5);
    let g = random_graph(&mut r, n, labels, density);
    let k = r.random_range(1..=g.vertex_count().min(12));
    let ix = build_index(&g, Some(k), seed).unwrap();
    let mut boundary = Vec::new();
    for (u, e) in ix.entries() {
        let scope: HashSet<VertexId> = ix.assignment().owned_by(u).into_iter().collect();
        for &w in &scope {
            let want = cms_oracle(&g, u, w, Some(&scope)).map_err(|e| e.to_string())?.sorted();
            let got = if w == u {
                vec![LabelSet::EMPTY]
            } else {
                e.internal_family(w).map(|f| f.sorted()).unwrap_or_default()
            };
            if got != want {
                return Err(format!("seed {seed}: II[{u}][{w}] = {got:?}, oracle {want:?}"));
            }
        }
        for (set, vs) in &e.external_t {
            for &w in vs {
                if scope.contains(&w) {
                    return Err(format!("seed {seed}: boundary vertex {w} of {u} is owned by it"));
                }
                boundary.push((u, *set, w));
            }
        }
    }
    if boundary.is_empty() {
        return Ok(0);
    }
    let full = g.full_label_set();
    for _ in 0..ei_samples {
        let &(u, set, w) = boundary.choose(&mut r).unwrap();
        let labels = LabelSet(set.0 | (r.random::<u64>() & full.0));
        if !label_bfs(&g, u, labels, false)[w.index()] {
            return Err(format!("seed {seed}: {w} in EI[{u}][{:#x}] not reachable under {:#x}", set.0, labels.0));
        }
    }
    Ok(ei_samples)
}

/// Re-derives everything a generated query set claims: the distribution
/// invariants, each expected answer (by the oracle), each false type, and the
/// search-tree threshold.
pub fn audit_query_set(g: &KnowledgeGraph, set: &lscr::workload::GeneratedQuerySet) -> Result<(), String> {
    use lscr::pattern::match_all;
    use lscr::workload::{label_bfs, oracle_lscr, FalseType};

    set.check_distribution(g.label_count())?;
    let vsg = match_all(g, &set.constraint);
    let all = g.full_label_set();
    for (i, gq) in set.iter().enumerate() {
        let q = &gq.query;
        if oracle_lscr(g, q) != gq.expected {
            return Err(format!("query {i}: oracle disagrees with expected {}", gq.expected));
        }
        if gq.provenance.tree_size < gq.provenance.min_threshold {
            return Err(format!("query {i}: tree below threshold"));
        }
        if gq.expected {
            continue;
        }
        let label_path = label_bfs(g, q.source, q.labels, false)[q.target.index()];
        let from_s = label_bfs(g, q.source, all, false);
        let to_t = label_bfs(g, q.target, all, true);
        let through = vsg.members().iter().any(|v| from_s[v.index()] && to_t[v.index()]);
        let want = match (label_path, through) {
            (false, true) => FalseType::Label,
            (true, false) => FalseType::Constraint,
            (false, false) => FalseType::Both,
            (true, true) => return Err(format!("query {i}: false query of no type")),
        };
        if gq.provenance.false_type != Some(want) {
            return Err(format!("query {i}: type {:?}, expected {want:?}", gq.provenance.false_type));
        }
    }
    Ok(())
}
