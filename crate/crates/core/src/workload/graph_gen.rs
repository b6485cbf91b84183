use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, IngestOptions, KnowledgeGraph, MAX_LABELS};

/// Share of intra-domain edges pointing from an older to a newer instance.
const BACK_EDGES: f64 = 0.1;
/// Share of non-schema edges leaving their domain.
const CROSS_EDGES: f64 = 0.02;

/// Parameters of a synthetic knowledge graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphGenSpec {
    pub vertex_count: usize,
    /// Target `|E| / |V|`.
    pub density: f64,
    /// Label universe size, including the `rdf:type` label.
    pub label_count: usize,
    /// Schema classes; the remaining vertices are instances, spread evenly
    /// over the classes.
    pub class_count: usize,
    /// Instances are split into this many domains (think universities) that
    /// are densely linked inside and sparsely between.
    pub domain_count: usize,
    pub seed: u64,
}

impl GraphGenSpec {
    /// Classes and domains scale with `√|V|`.
    pub fn new(vertex_count: usize, density: f64, label_count: usize, seed: u64) -> Self {
        let root = (vertex_count as f64).sqrt();
        GraphGenSpec {
            vertex_count,
            density,
            label_count,
            class_count: root.ceil() as usize / 2 + 1,
            domain_count: (root / 4.0).ceil().max(1.0) as usize,
            seed,
        }
    }

    pub fn instance_count(&self) -> usize {
        self.vertex_count.saturating_sub(self.class_count)
    }

    pub fn instances_per_class(&self) -> f64 {
        self.instance_count() as f64 / self.class_count.max(1) as f64
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::SpecInvalid(m.to_owned()));
        if self.density.is_nan() || self.density <= 0.0 {
            return bad("density must be positive");
        }
        if !(2..=MAX_LABELS).contains(&self.label_count) {
            return bad("label count must be in 2..=64");
        }
        if self.class_count == 0 || self.domain_count == 0 {
            return bad("class and domain counts must be positive");
        }
        if self.instance_count() < self.class_count.max(self.domain_count) {
            return bad("need at least one instance per class and per domain");
        }
        if self.edge_target() < self.instance_count() {
            return bad("density too low to type every instance");
        }
        Ok(())
    }

    fn edge_target(&self) -> usize {
        (self.vertex_count as f64 * self.density).round() as usize
    }
}

/// Generates a schema-bearing scale-free graph.
///
/// Every instance gets one `rdf:type` edge (classes assigned round-robin).
/// Instances are split into contiguous domains; budget permitting, each is
/// linked to an earlier instance of its domain so domains are weakly
/// connected. The remaining edges join uniformly drawn instances to instances
/// chosen by preferential attachment on in-degree. Inside a domain edges
/// mostly point from the newer to the older instance, with a minority of back
/// edges forming cycles; the few edges between domains always point to a
/// lower-numbered domain. Non-schema labels follow a Zipf(1.1) distribution.
/// The edge count hits `|V|·density` exactly.
pub fn gen_graph(spec: &GraphGenSpec) -> Result<KnowledgeGraph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let opts = IngestOptions::default();
    let type_label = opts.type_predicate.clone();
    let mut builder = GraphBuilder::new(opts);

    let classes = spec.class_count;
    let instances = spec.instance_count();
    let domains = spec.domain_count;
    let target = spec.edge_target();
    let labels: Vec<String> = (0..spec.label_count - 1).map(|i| format!("p{i}")).collect();
    let zipf = Zipf::new(labels.len() as f64, 1.1).expect("valid zipf parameters");
    let label = |rng: &mut ChaCha8Rng| zipf.sample(rng) as usize - 1;
    let inst = |i: usize| format!("e{i}");
    let domain_of = |i: usize| i * domains / instances;

    for i in 0..instances {
        builder.add_triple(&inst(i), &type_label, &format!("C{}", i % classes));
    }
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut add = |builder: &mut GraphBuilder, s: usize, l: usize, t: usize| {
        if s == t || !seen.insert((s, l, t)) {
            return false;
        }
        builder.add_triple(&inst(s), &labels[l], &inst(t));
        true
    };
    let mut count = instances;
    // per domain: each instance once, plus once per incoming edge
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); domains];
    for i in 0..instances {
        let pool = &mut pools[domain_of(i)];
        if count < target && !pool.is_empty() {
            let j = pool[rng.random_range(0..pool.len())];
            let (s, t) = if rng.random_bool(BACK_EDGES) { (j, i) } else { (i, j) };
            add(&mut builder, s, label(&mut rng), t);
            pool.push(t);
            count += 1;
        }
        pool.push(i);
    }
    while count < target {
        let a = rng.random_range(0..instances);
        let da = domain_of(a);
        let (s, t) = if da > 0 && rng.random_bool(CROSS_EDGES) {
            let pool = &pools[rng.random_range(0..da)];
            (a, pool[rng.random_range(0..pool.len())])
        } else {
            let pool = &pools[da];
            let b = pool[rng.random_range(0..pool.len())];
            let (new, old) = if a > b { (a, b) } else { (b, a) };
            if rng.random_bool(BACK_EDGES) {
                (old, new)
            } else {
                (new, old)
            }
        };
        if add(&mut builder, s, label(&mut rng), t) {
            pools[domain_of(t)].push(t);
            count += 1;
        }
    }
    builder.build()
}
