//! Acceptance checks, one `PASS`/`FAIL` line each.
//!
//! Correctness criteria make the run fail. The two performance trends (index
//! build scaling and the informed-search advantage) depend on the machine and
//! the workload, so they report their verdict and measurements without
//! failing the run.

mod common;

use std::time::{Duration, Instant};

use lscr::bench::{run_bench, Algo, BenchOptions};
use lscr::graph::parse_graph;
use lscr::index::IndexBuilder;
use lscr::informed::ins_query;
use lscr::labels::cms_oracle;
use lscr::online::{uis_query, uis_star_query};
use lscr::pattern::{match_all, parse_constraint, satisfies};
use lscr::workload::{gen_graph, gen_queries, ConstraintSource, GraphGenSpec, QueryGenSpec};
use lscr::LscrQuery;

use common::{audit_query_set, differential_instance, index_consistency_instance, Tally};

const FIXTURE_A: &str = "v0\tfriendOf\tv1
v1\tfriendOf\tv3
v2\tfriendOf\tv3
v0\tlikes\tv2
v0\tadvisorOf\tv2
v2\tfollows\tv4
v3\tlikes\tv4
v4\thates\tv1
";

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn report(id: u32, name: &str, gating: bool, took: Duration, o: &Outcome) {
    println!(
        "{} criterion {id} ({name}{}): {} [{:.1}s]",
        if o.pass { "PASS" } else { "FAIL" },
        if gating { "" } else { ", trend" },
        o.detail,
        took.as_secs_f64()
    );
}

fn oracle_equivalence() -> (Outcome, Tally) {
    let mut total = Tally::default();
    for seed in 0..1000 {
        match differential_instance(seed, 2) {
            Ok(t) => total.add(&t),
            Err(e) => return (Outcome::new(false, e), total),
        }
    }
    let detail = format!(
        "1000 instances, {} queries ({} true), uis = uis* = ins(k∈{{0,1,⌈√|V|⌉}}) = oracle",
        total.queries, total.true_answers
    );
    (Outcome::new(true, detail), total)
}

fn fixture_facts() -> Outcome {
    let g = parse_graph(FIXTURE_A).unwrap();
    let v = |n: &str| g.vertex_by_name(n).unwrap();
    let p = |s: &str| g.parse_label_list(s).unwrap();
    let mut failures = Vec::new();

    if cms_oracle(&g, v("v0"), v("v3"), None).unwrap().sorted() != [p("friendOf")] {
        failures.push("M(v0,v3)".to_owned());
    }
    let mut m04 = vec![p("friendOf,likes"), p("advisorOf,follows"), p("likes,follows")];
    m04.sort_unstable();
    if cms_oracle(&g, v("v0"), v("v4"), None).unwrap().sorted() != m04 {
        failures.push("M(v0,v4)".to_owned());
    }
    let s0 = parse_constraint("SELECT ?x WHERE { ?x friendOf v3 . v3 likes ?y }", &g).unwrap();
    let vsg = match_all(&g, &s0);
    if vsg.members() != [v("v1"), v("v2")] || !satisfies(&g, v("v1"), &s0) {
        failures.push("V(S0)".to_owned());
    }
    let ix = IndexBuilder::new(None, 0).with_landmarks(vec![v("v0")]).build(&g).unwrap();
    let ii = |t: &str| ix.entry(v("v0")).unwrap().internal_family(v(t)).map(|f| f.sorted());
    if ii("v3") != Some(vec![p("friendOf")]) || ii("v4") != Some(m04) {
        failures.push("II[v0]".to_owned());
    }
    let verdicts = [
        ("v0", "v4", "likes,follows", true),
        ("v0", "v3", "likes,follows", false),
        ("v3", "v4", "likes,hates,friendOf", true),
    ];
    for (s, t, labels, want) in verdicts {
        let q = LscrQuery {
            source: v(s),
            target: v(t),
            labels: p(labels),
            constraint: s0.clone(),
        };
        let got = [
            uis_query(&g, &q).value,
            uis_star_query(&g, &q, &vsg).unwrap().value,
            ins_query(&g, &ix, &q, &vsg).unwrap().value,
        ];
        if got != [want; 3] {
            failures.push(format!("{s}→{t} {{{labels}}}: {got:?}"));
        }
    }
    if failures.is_empty() {
        Outcome::new(true, "CMS values, V(S0), II[v0] and all verdicts under every strategy")
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

fn index_consistency() -> Outcome {
    let mut confirmed = 0;
    for seed in 0..200 {
        // graphs without a boundary draw no samples; the rest share 1000
        let want = (1000 - confirmed).min(8);
        match index_consistency_instance(seed, want) {
            Ok(n) => confirmed += n,
            Err(e) => return Outcome::new(false, e),
        }
    }
    Outcome::new(
        confirmed >= 1000,
        format!("200 graphs: every II row equals the scoped oracle; {confirmed} boundary samples confirmed by BFS"),
    )
}

fn index_scaling() -> Outcome {
    let mut times = Vec::new();
    for n in [50_000, 100_000, 200_000] {
        let g = gen_graph(&GraphGenSpec::new(n, 3.6, 16, 1)).unwrap();
        let builder = IndexBuilder::new(None, 0);
        // best of three single-threaded builds
        let best = (0..3)
            .map(|_| {
                let start = Instant::now();
                let ix = builder.build(&g).unwrap();
                let took = start.elapsed();
                drop(ix);
                took
            })
            .min()
            .unwrap();
        times.push((n, best));
    }
    let ratios: Vec<f64> = times
        .windows(2)
        .map(|w| w[1].1.as_secs_f64() / w[0].1.as_secs_f64())
        .collect();
    let pass = ratios.iter().all(|r| (1.3..=3.0).contains(r));
    let shown: Vec<String> = times
        .iter()
        .map(|(n, t)| format!("{}k: {:.0} ms", n / 1000, t.as_secs_f64() * 1e3))
        .collect();
    Outcome::new(
        pass,
        format!("{}; doubling ratios {:.2}, {:.2} (want 1.3–3.0)", shown.join(", "), ratios[0], ratios[1]),
    )
}

fn ins_advantage_and_distribution() -> (Outcome, Outcome) {
    let g = gen_graph(&GraphGenSpec::new(100_000, 3.6, 16, 1)).unwrap();
    let spec = QueryGenSpec {
        count_true: 40,
        count_false: 40,
        constraint: ConstraintSource::Magnitude(10),
        seed: 0,
    };
    let set = match gen_queries(&g, &spec) {
        Ok(set) => set,
        Err(e) => {
            let o = Outcome::new(false, format!("no workload: {e}"));
            return (Outcome::new(false, o.detail.clone()), o);
        }
    };
    let mut distribution = match audit_query_set(&g, &set) {
        Ok(()) => Outcome::new(
            true,
            format!(
                "100k workload: bands {:?}, false types {:?}",
                set.band_counts(),
                set.false_type_counts()
            ),
        ),
        Err(e) => Outcome::new(false, e),
    };
    // a smaller, odd-sized set exercises the quota rotation
    let small = gen_graph(&GraphGenSpec::new(2000, 3.6, 16, 5)).unwrap();
    let odd = QueryGenSpec {
        count_true: 7,
        count_false: 11,
        constraint: ConstraintSource::Magnitude(10),
        seed: 0,
    };
    match gen_queries(&small, &odd).map_err(|e| e.to_string()).and_then(|s| audit_query_set(&small, &s)) {
        Ok(()) => distribution.detail += "; 7+11 set on 2k vertices also balanced",
        Err(e) => distribution = Outcome::new(false, format!("7+11 set: {e}")),
    }

    let ix = IndexBuilder::new(None, 0).build(&g).unwrap();
    let queries: Vec<LscrQuery> = set.iter().map(|q| q.query.clone()).collect();
    let rep = run_bench(&g, Some(&ix), &queries, &[Algo::UisStar, Algo::Ins], BenchOptions::default()).unwrap();
    let star = rep.summary(Algo::UisStar);
    let ins = rep.summary(Algo::Ins);
    let wrong = rep
        .rows
        .iter()
        .filter(|r| r.answer != set.iter().nth(r.query).unwrap().expected)
        .count();
    let pass = wrong == 0 && ins.mean_passed <= 0.5 * star.mean_passed && ins.mean_us < star.mean_us;
    let advantage = Outcome::new(
        pass,
        format!(
            "k={}: mean passed ins {:.0} vs uis* {:.0} (want ≤ {:.0}); mean time ins {:.0} µs vs uis* {:.0} µs; {wrong} wrong answers",
            ix.k(),
            ins.mean_passed,
            star.mean_passed,
            0.5 * star.mean_passed,
            ins.mean_us,
            star.mean_us
        ),
    );
    (advantage, distribution)
}

fn main() {
    let mut gating_failed = false;
    let mut run = |id: u32, name: &str, gating: bool, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        report(id, name, gating, start.elapsed(), &o);
        gating_failed |= gating && !o.pass;
    };

    let start = Instant::now();
    let (equiv, tally) = oracle_equivalence();
    report(1, "oracle equivalence", true, start.elapsed(), &equiv);
    run(2, "fixture facts", true, &mut fixture_facts);
    run(3, "index consistency", true, &mut index_consistency);
    // the pop and constraint-check bounds are asserted on every run of suite 1
    run(4, "complexity witnesses", true, &mut || {
        Outcome::new(equiv.pass, "uis ≤2 pops/vertex and ≤|V| checks; uis*/ins ≤2|V| pops, on every suite-1 run")
    });
    run(5, "index build scaling", false, &mut index_scaling);
    let start = Instant::now();
    let (advantage, distribution) = ins_advantage_and_distribution();
    let took = start.elapsed();
    report(6, "informed search advantage", false, took, &advantage);
    run(7, "workload distribution", true, &mut || Outcome::new(distribution.pass, distribution.detail.clone()));
    run(8, "no late F-phase changes", true, &mut || {
        Outcome::new(
            equiv.pass && tally.uis_star_late_f_changes == 0,
            format!(
                "{} uis* runs with {} late changes (ins: {})",
                tally.queries, tally.uis_star_late_f_changes, tally.ins_late_f_changes
            ),
        )
    });
    gating_failed |= !equiv.pass;

    if gating_failed {
        println!("acceptance: correctness criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all correctness criteria passed");
}
