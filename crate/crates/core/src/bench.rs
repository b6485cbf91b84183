//! Batch benchmarks over a query set.
//!
//! A report renders as a human table and as machine-readable lines:
//!
//! ```text
//! ENV fingerprint=<hex> vertices=<n> edges=<n> k=<k|-> seed=<seed|-> queries=<n>
//! RESULT algo=<a> q=<i> answer=<T|F> time_us=<n> passed=<n>
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;
use crate::index::LocalIndex;
use crate::informed::{ins_query_with, InsOptions};
use crate::online::{uis_query, uis_star_query, LscrQuery, QueryAnswer};
use crate::pattern::{match_all, VertexSetResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Uis,
    UisStar,
    Ins,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Uis, Algo::UisStar, Algo::Ins];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Uis => "uis",
            Algo::UisStar => "uis-star",
            Algo::Ins => "ins",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::FormatError(format!("unknown algorithm {s:?} (uis, uis-star, ins)")))
    }
}

/// Runs one query with the chosen algorithm. `vsg` must be `V(S,G)` for the
/// query's constraint; UIS ignores it.
pub fn run_query(
    g: &KnowledgeGraph,
    ix: Option<&LocalIndex>,
    algo: Algo,
    q: &LscrQuery,
    vsg: &VertexSetResult,
    rho_invert: bool,
) -> Result<QueryAnswer> {
    match algo {
        Algo::Uis => Ok(uis_query(g, q)),
        Algo::UisStar => uis_star_query(g, q, vsg),
        Algo::Ins => {
            let ix = ix.ok_or_else(|| Error::FormatError("ins needs a local index".into()))?;
            ins_query_with(g, ix, q, vsg, InsOptions { rho_invert })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub algo: Algo,
    pub query: usize,
    pub answer: bool,
    pub time_us: u64,
    pub passed: usize,
}

impl fmt::Display for BenchRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RESULT algo={} q={} answer={} time_us={} passed={}",
            self.algo,
            self.query,
            if self.answer { 'T' } else { 'F' },
            self.time_us,
            self.passed
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchEnv {
    pub fingerprint: u64,
    pub vertices: usize,
    pub edges: usize,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub queries: usize,
}

impl fmt::Display for BenchEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "-".into());
        write!(
            f,
            "ENV fingerprint={:016x} vertices={} edges={} k={} seed={} queries={}",
            self.fingerprint,
            self.vertices,
            self.edges,
            opt(self.k.map(|k| k.to_string())),
            opt(self.seed.map(|s| s.to_string())),
            self.queries
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoSummary {
    pub algo: Algo,
    pub queries: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub mean_passed: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchReport {
    pub env: BenchEnv,
    pub rows: Vec<BenchRow>,
}

fn median(sorted: &[u64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2] as f64,
        n => (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0,
    }
}

impl BenchReport {
    /// Algorithms in the order they first appear in the rows.
    pub fn algos(&self) -> Vec<Algo> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.algo) {
                out.push(r.algo);
            }
        }
        out
    }

    pub fn summary(&self, algo: Algo) -> AlgoSummary {
        let rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.algo == algo).collect();
        let n = rows.len().max(1) as f64;
        let mut times: Vec<u64> = rows.iter().map(|r| r.time_us).collect();
        times.sort_unstable();
        AlgoSummary {
            algo,
            queries: rows.len(),
            mean_us: times.iter().sum::<u64>() as f64 / n,
            median_us: median(&times),
            mean_passed: rows.iter().map(|r| r.passed).sum::<usize>() as f64 / n,
        }
    }

    /// Queries on which two algorithms gave different answers.
    pub fn disagreements(&self) -> Vec<usize> {
        let mut first: HashMap<usize, bool> = HashMap::new();
        let mut out = Vec::new();
        for r in &self.rows {
            match first.get(&r.query) {
                None => {
                    first.insert(r.query, r.answer);
                }
                Some(&a) if a != r.answer && !out.contains(&r.query) => out.push(r.query),
                Some(_) => {}
            }
        }
        out.sort_unstable();
        out
    }

    pub fn machine_lines(&self) -> String {
        let mut s = format!("{}\n", self.env);
        for r in &self.rows {
            s.push_str(&format!("{r}\n"));
        }
        s
    }

    /// Parses [`BenchReport::machine_lines`] output; other lines are ignored.
    pub fn parse_machine(text: &str) -> Result<BenchReport> {
        let mut env = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            let mut words = line.split_whitespace();
            let kind = words.next();
            if kind != Some("ENV") && kind != Some("RESULT") {
                continue;
            }
            let fields: HashMap<&str, &str> = words.filter_map(|w| w.split_once('=')).collect();
            let bad = || Error::FormatError(format!("bad bench line: {line}"));
            let get = |k: &str| fields.get(k).copied().ok_or_else(bad);
            let num = |k: &str| get(k)?.parse::<u64>().map_err(|_| bad());
            let opt = |k: &str| -> Result<Option<u64>> {
                match get(k)? {
                    "-" => Ok(None),
                    v => v.parse().map(Some).map_err(|_| bad()),
                }
            };
            if kind == Some("ENV") {
                env = Some(BenchEnv {
                    fingerprint: u64::from_str_radix(get("fingerprint")?, 16).map_err(|_| bad())?,
                    vertices: num("vertices")? as usize,
                    edges: num("edges")? as usize,
                    k: opt("k")?.map(|k| k as usize),
                    seed: opt("seed")?,
                    queries: num("queries")? as usize,
                });
            } else {
                rows.push(BenchRow {
                    algo: get("algo")?.parse()?,
                    query: num("q")? as usize,
                    answer: match get("answer")? {
                        "T" => true,
                        "F" => false,
                        _ => return Err(bad()),
                    },
                    time_us: num("time_us")?,
                    passed: num("passed")? as usize,
                });
            }
        }
        let env = env.ok_or_else(|| Error::FormatError("missing ENV line".into()))?;
        Ok(BenchReport { env, rows })
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "graph {:016x}: {} vertices, {} edges; {} queries",
            self.env.fingerprint, self.env.vertices, self.env.edges, self.env.queries
        )?;
        writeln!(
            f,
            "{:<10} {:>8} {:>14} {:>14} {:>14}",
            "algo", "queries", "mean_us", "median_us", "mean_passed"
        )?;
        for algo in self.algos() {
            let s = self.summary(algo);
            writeln!(
                f,
                "{:<10} {:>8} {:>14.1} {:>14.1} {:>14.1}",
                algo.name(), s.queries, s.mean_us, s.median_us, s.mean_passed
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BenchOptions {
    pub rho_invert: bool,
    /// Run queries on the rayon pool; times stay per query.
    pub parallel: bool,
}

/// Touches every adjacency list once so the first measured query does not
/// pay for cold caches.
fn warm_up(g: &KnowledgeGraph) -> usize {
    g.vertices()
        .map(|v| g.out_adjacency(v).len() + g.in_adjacency(v).len())
        .sum()
}

/// Runs every query under every algorithm, once each, after a warm-up pass.
///
/// `V(S,G)` is computed once per distinct constraint up front and is not part
/// of the measured times (UIS checks the constraint online, so its times
/// include that work).
pub fn run_bench(
    g: &KnowledgeGraph,
    ix: Option<&LocalIndex>,
    queries: &[LscrQuery],
    algos: &[Algo],
    opts: BenchOptions,
) -> Result<BenchReport> {
    if algos.contains(&Algo::Ins) && ix.is_none() {
        return Err(Error::FormatError("ins needs a local index".into()));
    }
    if let Some(ix) = ix {
        ix.ensure_matches(g)?;
    }
    std::hint::black_box(warm_up(g));
    let mut sets: Vec<(&crate::pattern::SubstructureConstraint, VertexSetResult)> = Vec::new();
    let mut which = Vec::with_capacity(queries.len());
    for q in queries {
        let i = match sets.iter().position(|(c, _)| **c == q.constraint) {
            Some(i) => i,
            None => {
                sets.push((&q.constraint, match_all(g, &q.constraint)));
                sets.len() - 1
            }
        };
        which.push(i);
    }
    let jobs: Vec<(Algo, usize)> = algos
        .iter()
        .flat_map(|&a| (0..queries.len()).map(move |i| (a, i)))
        .collect();
    let run = |&(algo, i): &(Algo, usize)| -> Result<BenchRow> {
        let a = run_query(g, ix, algo, &queries[i], &sets[which[i]].1, opts.rho_invert)?;
        Ok(BenchRow {
            algo,
            query: i,
            answer: a.value,
            time_us: micros(a.stats.wall_time),
            passed: a.stats.passed_vertices,
        })
    };
    let rows = if opts.parallel {
        jobs.par_iter().map(run).collect::<Result<Vec<_>>>()?
    } else {
        jobs.iter().map(run).collect::<Result<Vec<_>>>()?
    };
    Ok(BenchReport {
        env: BenchEnv {
            fingerprint: g.fingerprint(),
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            k: ix.map(LocalIndex::k),
            seed: ix.map(LocalIndex::seed),
            queries: queries.len(),
        },
        rows,
    })
}

fn micros(d: Duration) -> u64 {
    d.as_micros().try_into().unwrap_or(u64::MAX)
}
