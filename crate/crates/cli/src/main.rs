use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand};

use lscr::bench::{run_bench, run_query, Algo, BenchOptions};
use lscr::graph::load_graph;
use lscr::index::{load_index, save_index, IndexBuilder};
use lscr::pattern::{match_all, parse_constraint};
use lscr::workload::{
    gen_graph, gen_queries, load_query_set, save_query_set, ConstraintSource, GraphGenSpec, QueryGenSpec,
};
use lscr::{IngestOptions, KnowledgeGraph, LocalIndex, LscrQuery};

/// Reachability queries with label and substructure constraints over
/// knowledge graphs.
#[derive(Parser)]
#[command(name = "lscr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a triple file and print a summary.
    Ingest {
        #[arg(long)]
        graph: PathBuf,
        /// Also write the graph back out in canonical form.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a local index and save it.
    Index {
        #[arg(long)]
        graph: PathBuf,
        /// Number of landmarks (default ⌈log₂|V|·√|V|⌉).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print per-landmark statistics of a saved index.
    Inspect {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        index: PathBuf,
    },
    /// Answer one query. Exits 0 when true, 1 when false, 2 on error.
    Query {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Comma-separated label names.
        #[arg(long, default_value = "")]
        labels: String,
        /// File holding the substructure constraint.
        #[arg(long)]
        constraint: PathBuf,
        /// uis, uis-star or ins.
        #[arg(long, default_value = "uis")]
        algo: Algo,
        #[arg(long)]
        rho_invert: bool,
    },
    /// Run a query set under one or more algorithms.
    Bench {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        index: Option<PathBuf>,
        /// Query-set file.
        #[arg(long)]
        queries: PathBuf,
        /// Algorithms to run; defaults to all that are possible.
        #[arg(long, value_delimiter = ',')]
        algo: Vec<Algo>,
        #[arg(long)]
        rho_invert: bool,
        /// Run queries on all cores (times stay per query).
        #[arg(long)]
        parallel: bool,
        /// Write the machine-readable lines here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic graphs and query sets.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Write a synthetic schema-bearing graph as triples.
    Graph {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 3.6)]
        density: f64,
        /// Label universe size, including rdf:type.
        #[arg(long = "label-count", default_value_t = 16)]
        label_count: usize,
        #[arg(long)]
        classes: Option<usize>,
        #[arg(long)]
        domains: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a balanced set of true and false queries.
    Queries {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "true", default_value_t = 20)]
        count_true: usize,
        #[arg(long = "false", default_value_t = 20)]
        count_false: usize,
        /// Constraint file; otherwise one is generated (see --magnitude).
        #[arg(long)]
        constraint: Option<PathBuf>,
        /// Target number of vertices matching the generated constraint.
        #[arg(long, default_value_t = 10)]
        magnitude: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Query-set file; the constraint is written next to it as <stem>.q.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: &Path) -> Result<KnowledgeGraph> {
    load_graph(path, &IngestOptions::default()).with_context(|| format!("loading {}", path.display()))
}

fn load_ix(path: &Path, g: &KnowledgeGraph) -> Result<LocalIndex> {
    load_index(path, g).with_context(|| format!("loading index {}", path.display()))
}

fn usage_error(msg: &str) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::MissingRequiredArgument, msg)
        .exit()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ingest { graph, out } => {
            let start = Instant::now();
            let g = load(&graph)?;
            println!("vertices={}", g.vertex_count());
            println!("edges={}", g.edge_count());
            println!("labels={}", g.label_count());
            println!("classes={}", g.schema().classes.len());
            println!("fingerprint={:016x}", g.fingerprint());
            println!("load_time_ms={}", start.elapsed().as_millis());
            if let Some(out) = out {
                fs::write(&out, g.to_triples_string())?;
            }
        }
        Command::Index { graph, k, seed, out } => {
            let g = load(&graph)?;
            let ix = IndexBuilder::new(k, seed).build(&g)?;
            save_index(&ix, &out)?;
            let stats = ix.stats();
            println!("landmarks={}", ix.k());
            println!("build_time_ms={}", ix.build_time().as_millis());
            println!("index_bytes={}", stats.total_bytes);
        }
        Command::Inspect { graph, index } => {
            let g = load(&graph)?;
            let ix = load_ix(&index, &g)?;
            print!("{}", ix.stats().render(|v| g.vertex_name(v).to_owned()));
        }
        Command::Query {
            graph,
            index,
            from,
            to,
            labels,
            constraint,
            algo,
            rho_invert,
        } => {
            if algo == Algo::Ins && index.is_none() {
                usage_error("--algo ins requires --index <FILE>");
            }
            let g = load(&graph)?;
            let vertex = |name: &str| {
                g.vertex_by_name(name)
                    .with_context(|| format!("unknown vertex {name:?}"))
            };
            let text = fs::read_to_string(&constraint)
                .with_context(|| format!("reading {}", constraint.display()))?;
            let q = LscrQuery {
                source: vertex(&from)?,
                target: vertex(&to)?,
                labels: g.parse_label_list(&labels)?,
                constraint: parse_constraint(&text, &g)?,
            };
            let ix = index.map(|p| load_ix(&p, &g)).transpose()?;
            let vsg = match algo {
                Algo::Uis => Default::default(),
                _ => match_all(&g, &q.constraint),
            };
            let answer = run_query(&g, ix.as_ref(), algo, &q, &vsg, rho_invert)?;
            println!("{answer}");
            return Ok(ExitCode::from(if answer.value { 0 } else { 1 }));
        }
        Command::Bench {
            graph,
            index,
            queries,
            mut algo,
            rho_invert,
            parallel,
            out,
        } => {
            if algo.contains(&Algo::Ins) && index.is_none() {
                usage_error("--algo ins requires --index <FILE>");
            }
            let g = load(&graph)?;
            let ix = index.map(|p| load_ix(&p, &g)).transpose()?;
            if algo.is_empty() {
                algo = Algo::ALL
                    .into_iter()
                    .filter(|&a| a != Algo::Ins || ix.is_some())
                    .collect();
            }
            let records = load_query_set(&queries, &g)?;
            let qs: Vec<LscrQuery> = records.iter().map(|r| r.query.clone()).collect();
            let report = run_bench(&g, ix.as_ref(), &qs, &algo, BenchOptions { rho_invert, parallel })?;
            print!("{report}");
            match out {
                Some(path) => fs::write(path, report.machine_lines())?,
                None => print!("{}", report.machine_lines()),
            }
            let wrong: Vec<usize> = report
                .rows
                .iter()
                .filter(|r| r.answer != records[r.query].expected)
                .map(|r| r.query)
                .collect();
            if !wrong.is_empty() {
                bail!("answers differ from the expected column on queries {wrong:?}");
            }
            let split = report.disagreements();
            if !split.is_empty() {
                bail!("algorithms disagree on queries {split:?}");
            }
        }
        Command::Gen(GenCommand::Graph {
            vertices,
            density,
            label_count,
            classes,
            domains,
            seed,
            out,
        }) => {
            let mut spec = GraphGenSpec::new(vertices, density, label_count, seed);
            if let Some(c) = classes {
                spec.class_count = c;
            }
            if let Some(d) = domains {
                spec.domain_count = d;
            }
            let g = gen_graph(&spec)?;
            let mut file = std::io::BufWriter::new(fs::File::create(&out)?);
            g.write_triples(&mut file)?;
            println!("vertices={} edges={} fingerprint={:016x}", g.vertex_count(), g.edge_count(), g.fingerprint());
        }
        Command::Gen(GenCommand::Queries {
            graph,
            count_true,
            count_false,
            constraint,
            magnitude,
            seed,
            out,
        }) => {
            let g = load(&graph)?;
            let constraint = match constraint {
                Some(path) => ConstraintSource::Given(parse_constraint(&fs::read_to_string(path)?, &g)?),
                None => ConstraintSource::Magnitude(magnitude),
            };
            let spec = QueryGenSpec {
                count_true,
                count_false,
                constraint,
                seed,
            };
            let set = gen_queries(&g, &spec)?;
            save_query_set(&out, &g, &set)?;
            let bands = set.band_counts();
            let types = set.false_type_counts();
            println!(
                "true={} false={} bands={:?} false_types={:?} vsg={}",
                set.true_queries.len(),
                set.false_queries.len(),
                bands,
                types,
                match_all(&g, &set.constraint).len()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
