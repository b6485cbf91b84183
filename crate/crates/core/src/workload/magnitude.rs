use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, VertexId};
use crate::pattern::{match_all, SubstructureConstraint, Term, TriplePattern};

const RESTARTS: usize = 200;
const STEPS: usize = 40;

/// One edge of the seed vertex, generalised or not.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Seed {
    /// Keep the neighbour as a concrete vertex.
    Concrete(TriplePattern),
    /// Replace the neighbour by a fresh existential variable.
    Open { outgoing: bool, label: crate::graph::LabelId },
}

fn seeds(g: &KnowledgeGraph, v: VertexId) -> Vec<Seed> {
    let focus = Term::Var(0);
    let mut out = Vec::new();
    for &(label, w) in g.out_adjacency(v) {
        if w != v {
            out.push(Seed::Concrete(TriplePattern { subject: focus, predicate: label, object: Term::Vertex(w) }));
        }
        out.push(Seed::Open { outgoing: true, label });
    }
    for &(label, u) in g.in_adjacency(v) {
        if u != v {
            out.push(Seed::Concrete(TriplePattern { subject: Term::Vertex(u), predicate: label, object: focus }));
        }
        out.push(Seed::Open { outgoing: false, label });
    }
    let mut uniq = Vec::with_capacity(out.len());
    for s in out {
        if !uniq.contains(&s) {
            uniq.push(s);
        }
    }
    uniq
}

fn assemble(chosen: &[Seed]) -> SubstructureConstraint {
    let mut vars = vec!["x".to_owned()];
    let patterns = chosen
        .iter()
        .map(|s| match *s {
            Seed::Concrete(p) => p,
            Seed::Open { outgoing, label } => {
                vars.push(format!("y{}", vars.len()));
                let y = Term::Var(vars.len() - 1);
                let (subject, object) = if outgoing { (Term::Var(0), y) } else { (y, Term::Var(0)) };
                TriplePattern { subject, predicate: label, object }
            }
        })
        .collect();
    SubstructureConstraint::new(vars, patterns).expect("star patterns around the focus are connected")
}

/// Builds a constraint matched by roughly `m` vertices (within ±20%).
///
/// Starts from the edges around a random instance vertex, so the seed vertex
/// always satisfies the result, and then adds patterns while too many
/// vertices match and drops them while too few do.
pub fn gen_constraint_with_magnitude(g: &KnowledgeGraph, m: u64, seed: u64) -> Result<SubstructureConstraint> {
    if m == 0 || m >= g.vertex_count() as u64 {
        return Err(Error::Unachievable(m));
    }
    let lo = (m as f64 * 0.8).ceil() as usize;
    let hi = (m as f64 * 1.2).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances: Vec<VertexId> = g.schema().instance_of.keys().copied().collect();
    if instances.is_empty() {
        instances = g
            .vertices()
            .filter(|&v| !g.out_adjacency(v).is_empty() || !g.in_adjacency(v).is_empty())
            .collect();
    }
    for _ in 0..RESTARTS {
        let Some(&v) = instances.choose(&mut rng) else { break };
        let mut pool = seeds(g, v);
        if pool.is_empty() {
            continue;
        }
        pool.shuffle(&mut rng);
        let mut chosen = vec![pool.pop().unwrap()];
        for _ in 0..STEPS {
            let c = assemble(&chosen);
            let n = match_all(g, &c).len();
            if (lo..=hi).contains(&n) {
                return Ok(c);
            }
            if n > hi {
                let Some(p) = pool.pop() else { break };
                chosen.push(p);
            } else {
                let i = rng.random_range(0..chosen.len());
                let dropped = chosen.swap_remove(i);
                if chosen.is_empty() {
                    let Some(p) = pool.pop() else { break };
                    chosen.push(p);
                }
                pool.insert(0, dropped);
            }
        }
    }
    Err(Error::Unachievable(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{gen_graph, GraphGenSpec};

    #[test]
    fn hits_the_band() {
        let g = gen_graph(&GraphGenSpec::new(5000, 3.6, 16, 7)).unwrap();
        for m in [10, 100] {
            let c = gen_constraint_with_magnitude(&g, m, 1).unwrap();
            let n = match_all(&g, &c).len() as u64;
            assert!(n * 10 >= m * 8 && n * 10 <= m * 12, "m={m} n={n}");
        }
    }

    #[test]
    fn deterministic() {
        let g = gen_graph(&GraphGenSpec::new(2000, 3.0, 8, 2)).unwrap();
        let a = gen_constraint_with_magnitude(&g, 10, 5).unwrap();
        let b = gen_constraint_with_magnitude(&g, 10, 5).unwrap();
        assert_eq!(a.to_text(&g), b.to_text(&g));
    }

    #[test]
    fn too_large_is_unachievable() {
        let g = gen_graph(&GraphGenSpec::new(200, 2.0, 4, 0)).unwrap();
        assert!(matches!(gen_constraint_with_magnitude(&g, 200, 0), Err(Error::Unachievable(200))));
        assert!(matches!(gen_constraint_with_magnitude(&g, 1000, 0), Err(Error::Unachievable(_))));
    }
}
