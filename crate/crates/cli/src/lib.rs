//! Commands behind the `dynsub` binary. Each command works on file contents
//! and writes its report to a sink, so tests can drive it without a process.

use std::fmt::Write as _;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynsub::index::IndexStats;
use dynsub::oracle::{isub_bf_unbounded, query_bf};
use dynsub::pattern::{enumerate_supergraphs, CompileOptions, Compiler, ComponentKind, PlanKind};
use dynsub::text::{parse_graph, parse_ops, parse_patterns, Op, ParseError, PatternSet};
use dynsub::workload::{apply_to_graph, degenerate_edges};
use dynsub::{Color, ColoredGraph, ISubIndex, IndexConfig, Pattern};
use num_bigint::BigInt;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("{0}")]
    Guard(dynsub::Error),
    #[error("op {index}: {name} counted {dynamic} by the index but {oracle} by the oracle")]
    Mismatch {
        index: usize,
        name: String,
        dynamic: BigInt,
        oracle: BigInt,
    },
    #[error("{0}")]
    Class(dynsub::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("op {index}: {source}")]
    Op { index: usize, source: dynsub::Error },
    #[error("{0}")]
    Other(dynsub::Error),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } => 3,
            CliError::Guard(_) => 4,
            CliError::Mismatch { .. } => 5,
            CliError::Class(_) => 6,
            CliError::Io { .. } | CliError::Output(_) => 7,
            CliError::Op { source, .. } => classify(source),
            CliError::Other(_) => 1,
        }
    }
}

fn classify(e: &dynsub::Error) -> u8 {
    use dynsub::Error::*;
    match e {
        PatternTooLarge { .. } | TooManyMembers { .. } | OracleLimit { .. } => 4,
        CapInfeasible { .. } => 6,
        _ => 1,
    }
}

impl From<dynsub::Error> for CliError {
    fn from(e: dynsub::Error) -> Self {
        match classify(&e) {
            4 => CliError::Guard(e),
            6 => CliError::Class(e),
            _ => CliError::Other(e),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(name = "dynsub", version, about = "Exact pattern counts in a dynamic sparse colored graph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply an operation script and print one TSV line per query.
    Run(RunArgs),
    /// Print the compiled plan of every pattern.
    Compile(CompileArgs),
    /// Time index updates against oracle recounts on a generated stream.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Dynamic,
    Oracle,
    Both,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub patterns: PathBuf,
    #[arg(long)]
    pub ops: PathBuf,
    #[arg(long, value_enum, default_value = "dynamic")]
    pub mode: Mode,
    /// Seed for orientation tie-breaking.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub max_pattern_size: usize,
    /// Fail when the graph leaves its sparsity class instead of raising caps.
    #[arg(long)]
    pub strict_class: bool,
    /// Print cascade statistics to stderr at the end.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub patterns: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub max_pattern_size: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Host vertices.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Degeneracy bound of the generated stream.
    #[arg(long, default_value_t = 3)]
    pub degeneracy: usize,
    /// Edge colors.
    #[arg(long, default_value_t = 1)]
    pub colors: Color,
    /// Oracle recounts to sample along the stream.
    #[arg(long, default_value_t = 5)]
    pub recounts: usize,
    /// Patterns to maintain; the triangle when absent.
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub max_pattern_size: usize,
    #[arg(long)]
    pub stats: bool,
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T>(file: &Path, r: Result<T, ParseError>) -> Result<T> {
    r.map_err(|source| CliError::Parse {
        file: file.display().to_string(),
        source,
    })
}

/// Parsed inputs of a run.
#[derive(Debug, Clone)]
pub struct RunInput {
    pub graph: ColoredGraph,
    pub patterns: PatternSet,
    pub ops: Vec<Op>,
}

impl RunInput {
    pub fn load(args: &RunArgs) -> Result<Self> {
        Ok(Self {
            graph: parse(&args.graph, parse_graph(&read(&args.graph)?))?,
            patterns: parse(&args.patterns, parse_patterns(&read(&args.patterns)?))?,
            ops: parse(&args.ops, parse_ops(&read(&args.ops)?))?,
        })
    }

    /// The palette covers both headers and every pattern color.
    pub fn colors(&self) -> Color {
        let pk = self.patterns.patterns.iter().map(|(_, p)| p.max_color()).max().unwrap_or(1);
        self.graph.k().max(self.patterns.k.unwrap_or(1)).max(pk)
    }
}

/// `g` over the palette `1..=k`, `k >= g.k()`.
fn widen(g: &ColoredGraph, k: Color) -> ColoredGraph {
    if g.k() == k {
        return g.clone();
    }
    let mut w = ColoredGraph::new(k);
    for v in g.vertices() {
        w.insert_vertex(v).expect("fresh vertex");
    }
    for (u, v, c) in g.edges() {
        w.add_edge(u, v, c).expect("fresh edge");
    }
    w
}

pub struct RunOptions {
    pub mode: Mode,
    pub seed: u64,
    pub max_pattern_size: usize,
    pub strict_class: bool,
}

impl From<&RunArgs> for RunOptions {
    fn from(a: &RunArgs) -> Self {
        Self {
            mode: a.mode,
            seed: a.seed,
            max_pattern_size: a.max_pattern_size,
            strict_class: a.strict_class,
        }
    }
}

/// Executes the script, writing `op_index \t name \t count` per query.
/// Returns the final index statistics in the modes that build an index.
pub fn cmd_run(input: RunInput, opts: &RunOptions, out: &mut impl Write) -> Result<Option<IndexStats>> {
    let k = input.colors();
    let host = widen(&input.graph, k);
    let patterns = input.patterns.patterns;
    for (_, p) in &patterns {
        if p.n() > opts.max_pattern_size {
            return Err(CliError::Guard(dynsub::Error::PatternTooLarge {
                size: p.n(),
                limit: opts.max_pattern_size,
            }));
        }
    }
    let mut index = match opts.mode {
        Mode::Oracle => None,
        Mode::Dynamic | Mode::Both => {
            let mut cfg = IndexConfig::new(k);
            cfg.seed = opts.seed;
            cfg.max_pattern_size = opts.max_pattern_size;
            cfg.strict_class = opts.strict_class;
            Some(ISubIndex::build(host.clone(), patterns.clone(), cfg)?)
        }
    };
    let mut g = (opts.mode != Mode::Dynamic).then_some(host);
    for (i, op) in input.ops.iter().enumerate() {
        let at = |source| CliError::Op { index: i, source };
        let dynamic = match index.as_mut() {
            Some(ix) => ix.apply(op).map_err(at)?,
            None => None,
        };
        let oracle = match (g.as_mut(), op) {
            (Some(g), Op::Query(name)) => Some(BigInt::from(query_bf(&patterns, name, g).map_err(at)?)),
            (Some(g), _) => {
                apply_to_graph(g, op).map_err(at)?;
                None
            }
            (None, _) => None,
        };
        let Op::Query(name) = op else { continue };
        let count = match (dynamic, oracle) {
            (Some(d), Some(o)) if d != o => {
                return Err(CliError::Mismatch {
                    index: i,
                    name: name.clone(),
                    dynamic: d,
                    oracle: o,
                })
            }
            (Some(c), _) | (None, Some(c)) => c,
            (None, None) => unreachable!("every mode answers queries"),
        };
        writeln!(out, "{i}\t{name}\t{count}")?;
    }
    Ok(index.map(|ix| ix.stats()))
}

/// Human-readable cascade statistics; each level line ends in `ok` when its
/// maximum in-degree is within its cap.
pub fn format_stats(s: &IndexStats) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "vertices\t{}\nedges\t{}", s.vertices, s.edges);
    let _ = writeln!(t, "level\tcap\tarcs\tmax_in_degree\tstatus");
    for i in 0..s.levels {
        let (cap, max) = (s.caps[i], s.level_max_in_degree[i]);
        let status = if max <= cap { "ok" } else { "over" };
        let _ = writeln!(t, "{i}\t{cap}\t{}\t{max}\t{status}", s.level_edges[i]);
    }
    let _ = writeln!(
        t,
        "engines\t{}\ncomponents\t{}\ntable_entries\t{}\nflips\t{}\nrebuilds\t{}\nfork_deltas\t{}\nchanges\t{}\nengine_nodes\t{}",
        s.engines, s.components, s.table_entries, s.flips, s.rebuilds, s.fork_deltas, s.changes, s.engine_nodes
    );
    t
}

fn set_colors(set: &PatternSet) -> Color {
    let pk = set.patterns.iter().map(|(_, p)| p.max_color()).max().unwrap_or(1);
    set.k.unwrap_or(1).max(pk)
}

/// Summarizes the compiled plans: supergraph and plan term counts, the
/// augmented set of every component, and the clans each engine maintains.
pub fn cmd_compile(set: &PatternSet, max_pattern_size: usize, out: &mut impl Write) -> Result<()> {
    let k = set_colors(set);
    let mut opts = CompileOptions::new(k);
    opts.max_pattern_size = max_pattern_size;
    let mut c = Compiler::new(opts);
    writeln!(out, "colors\t{k}")?;
    for (name, p) in &set.patterns {
        let plan = c.compile(p, PlanKind::Induced)?;
        let sup = enumerate_supergraphs(p, k, max_pattern_size)?;
        let pos = sup.iter().filter(|(s, _)| *s > 0).count();
        writeln!(out, "pattern\t{name}\tvertices {}\tedges {}", p.n(), p.edge_count())?;
        writeln!(
            out,
            "  supergraph terms\t{}\t(+{pos} -{})",
            sup.len(),
            sup.len() - pos
        )?;
        writeln!(out, "  terms\t{}", plan.terms.len())?;
        for id in plan.components() {
            let comp = &c.components()[id];
            match &comp.kind {
                ComponentKind::Vertex => writeln!(out, "  component {id}\tvertex")?,
                ComponentKind::Sum(engines) => {
                    writeln!(
                        out,
                        "  component {id}\tvertices {}\tlabeled {}\tclasses {}",
                        comp.pattern.n(),
                        comp.labeled_members,
                        engines.len()
                    )?;
                    for &(e, mult) in engines {
                        let ep = &c.engines()[e];
                        writeln!(
                            out,
                            "    engine {e}\tmultiplicity {mult}\tarcs {}\tclans {}",
                            ep.graph().arc_count(),
                            ep.clans.len()
                        )?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn triangle() -> Pattern {
    Pattern::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).expect("triangle")
}

pub struct BenchOptions {
    pub n: usize,
    pub degeneracy: usize,
    pub colors: Color,
    pub recounts: usize,
    pub seed: u64,
    pub max_pattern_size: usize,
}

impl From<&BenchArgs> for BenchOptions {
    fn from(a: &BenchArgs) -> Self {
        Self {
            n: a.n,
            degeneracy: a.degeneracy,
            colors: a.colors,
            recounts: a.recounts,
            seed: a.seed,
            max_pattern_size: a.max_pattern_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Hash of the generated stream; equal seeds give equal fingerprints.
    pub fingerprint: u64,
    pub edges: usize,
    pub insert_ns: Vec<u64>,
    pub delete_ns: Vec<u64>,
    pub query_ns: Vec<u64>,
    pub recount_ns: Vec<u64>,
    pub stats: IndexStats,
}

fn percentile(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    sorted[((sorted.len() - 1) as f64 * p).round() as usize]
}

fn elapsed_ns(t: Instant) -> u64 {
    t.elapsed().as_nanos() as u64
}

/// Streams a generated graph of bounded degeneracy into an index, then
/// deletes a tenth of it again, timing every update and query. Oracle
/// recounts of the first pattern are sampled evenly along the stream.
pub fn cmd_bench(patterns: Vec<(String, Pattern)>, o: &BenchOptions) -> Result<BenchReport> {
    let patterns = if patterns.is_empty() {
        vec![("tri".to_string(), triangle())]
    } else {
        patterns
    };
    let k = patterns.iter().map(|(_, p)| p.max_color()).max().unwrap_or(1).max(o.colors);
    let stream = degenerate_edges(o.n, o.degeneracy, o.colors, o.seed);
    let mut h = DefaultHasher::new();
    stream.hash(&mut h);
    let mut cfg = IndexConfig::new(k);
    cfg.seed = o.seed;
    cfg.max_pattern_size = o.max_pattern_size;
    let host = ColoredGraph::with_vertices(k, o.n);
    let mut ix = ISubIndex::build(host.clone(), patterns.clone(), cfg)?;
    let (name, first) = &patterns[0];
    let every = (stream.len() / o.recounts.max(1)).max(1);
    let mut r = BenchReport {
        fingerprint: h.finish(),
        edges: stream.len(),
        insert_ns: Vec::with_capacity(stream.len()),
        delete_ns: Vec::new(),
        query_ns: Vec::with_capacity(stream.len()),
        recount_ns: Vec::new(),
        stats: IndexStats::default(),
    };
    for (i, &(u, v, c)) in stream.iter().enumerate() {
        let t = Instant::now();
        ix.add_edge(u, v, c)?;
        r.insert_ns.push(elapsed_ns(t));
        let t = Instant::now();
        std::hint::black_box(ix.query(name)?);
        r.query_ns.push(elapsed_ns(t));
        if o.recounts > 0 && (i + 1) % every == 0 && r.recount_ns.len() < o.recounts {
            let t = Instant::now();
            std::hint::black_box(isub_bf_unbounded(first, ix.host()));
            r.recount_ns.push(elapsed_ns(t));
        }
    }
    for &(u, v, _) in stream.iter().take(stream.len() / 10) {
        let t = Instant::now();
        ix.remove_edge(u, v)?;
        r.delete_ns.push(elapsed_ns(t));
    }
    for s in [&mut r.insert_ns, &mut r.delete_ns, &mut r.query_ns, &mut r.recount_ns] {
        s.sort_unstable();
    }
    r.stats = ix.stats();
    Ok(r)
}

pub fn format_bench(r: &BenchReport) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "stream\t{} edges\tfingerprint {:016x}", r.edges, r.fingerprint);
    let _ = writeln!(t, "op\tcount\tp50_ns\tp90_ns\tp99_ns\tmax_ns");
    for (op, s) in [
        ("insert", &r.insert_ns),
        ("delete", &r.delete_ns),
        ("query", &r.query_ns),
        ("recount", &r.recount_ns),
    ] {
        let _ = writeln!(
            t,
            "{op}\t{}\t{}\t{}\t{}\t{}",
            s.len(),
            percentile(s, 0.5),
            percentile(s, 0.9),
            percentile(s, 0.99),
            s.last().copied().unwrap_or(0)
        );
    }
    t
}

/// Dispatches a parsed command line.
pub fn execute(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Run(a) => {
            let input = RunInput::load(&a)?;
            let stats = cmd_run(input, &RunOptions::from(&a), out)?;
            if a.stats {
                match stats {
                    Some(s) => write!(err, "{}", format_stats(&s))?,
                    None => writeln!(err, "no index statistics in oracle mode")?,
                }
            }
        }
        Command::Compile(a) => {
            let set = parse(&a.patterns, parse_patterns(&read(&a.patterns)?))?;
            cmd_compile(&set, a.max_pattern_size, out)?;
        }
        Command::Bench(a) => {
            let patterns = match &a.patterns {
                Some(p) => parse(p, parse_patterns(&read(p)?))?.patterns,
                None => Vec::new(),
            };
            let r = cmd_bench(patterns, &BenchOptions::from(&a))?;
            write!(out, "{}", format_bench(&r))?;
            if a.stats {
                write!(err, "{}", format_stats(&r.stats))?;
            }
        }
    }
    Ok(())
}
