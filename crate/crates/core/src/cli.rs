//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 when a test rejects or a check fails, 2 on configuration
//! errors.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::adversary::{distinguishing_experiment, run_game, Game, GameSpec, Strategy};
use crate::advice::{AdviceMap, AdviceSource, CorruptAdvice, Corruption};
use crate::analysis::{bipartite_distance, raw_census, DistanceMode, ReducedGraph};
use crate::generators::{sample_instance, AdviceConvention, InstanceSpec, RoleCensus, Variant};
use crate::graph::{self, EdgeKind, MultiGraph, OracleHandle, VertexRole};
use crate::quantum::{Marker, QuantumAdvice};
use crate::seed;
use crate::stats;
use crate::suite;
use crate::tester::{TestContext, TesterConfig};

/// Labeling seed of graph files, so that advice files written next to a
/// graph refer to the same labels in every later run.
pub const FILE_LABEL_SEED: u64 = 0x6c61_6265_6c73;

#[derive(Debug, Parser)]
#[command(name = "weldlab", version, about = "Welded-tree property testing laboratory")]
struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, env = "WELDLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// JSON object whose keys override the subcommand's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample an instance and write it with its ground-truth advice.
    Gen(GenArgs),
    /// Run the final test on a graph file.
    Test(TestArgs),
    /// Compute advice with the quantum marker.
    Mark(MarkArgs),
    /// Entrance and exit probabilities of the column walk.
    Walk(WalkArgs),
    /// Win rates of a search game on bare trees.
    Games(GamesArgs),
    /// G1 versus G2 distinguishing experiment.
    Distinguish(DistinguishArgs),
    /// Structural census of a graph file.
    Census(CensusArgs),
    /// Distance to bipartiteness of a graph file's single-edge graph.
    Distance(DistanceArgs),
    /// Run a named acceptance bundle.
    Suite(SuiteArgs),
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenArgs {
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value = "g1")]
    variant: String,
    /// Blocks of pairs (yes variant only).
    #[arg(long, default_value_t = 1)]
    j: u64,
    #[arg(long, default_value = "odd")]
    advice_convention: String,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    /// A file, or one of quantum, zero, one, random, parity.
    #[arg(long, default_value = "quantum")]
    advice: String,
    /// Defaults to the k in the graph header.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 10.0)]
    c1: f64,
    #[arg(long, default_value_t = 10.0)]
    c2: f64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value = "odd")]
    advice_convention: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value = "odd")]
    advice_convention: String,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Compare against the `.advice` file next to the graph.
    #[arg(long)]
    audit: bool,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WalkArgs {
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 20.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GamesArgs {
    #[arg(long, default_value = "A")]
    game: String,
    #[arg(long, default_value_t = 8)]
    k: u32,
    #[arg(long, default_value_t = 4)]
    t: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value = "random-walk")]
    strategy: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistinguishArgs {
    #[arg(long, default_value_t = 8)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    t: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value = "random-walk")]
    strategy: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CensusArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "odd")]
    advice_convention: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistanceArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "lb")]
    mode: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteArgs {
    /// completeness, soundness, walk, hardness, distance or all.
    #[arg(default_value = "all")]
    name: String,
    /// Summary JSON path; stdout when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    /// Exit code 2.
    Config(String),
    /// Exit code 1.
    Failed(String),
}

type Res<T> = Result<T, CliError>;

fn config(module: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{module}: {e}"))
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Failed(m)) => {
            eprintln!("{m}");
            1
        }
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}

/// Config keys replace the flag values; `seed` is shared by every
/// subcommand.
fn merge<A: Serialize + DeserializeOwned>(args: A, overrides: &serde_json::Map<String, serde_json::Value>) -> Res<A> {
    let mut v = serde_json::to_value(args).map_err(|e| config("config", e))?;
    let obj = v.as_object_mut().expect("argument structs serialize to objects");
    for (key, value) in overrides {
        if key != "seed" {
            obj.insert(key.replace('-', "_"), value.clone());
        }
    }
    serde_json::from_value(v).map_err(|e| config("config", e))
}

fn dispatch(cli: Cli) -> Res<()> {
    let overrides = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| config("config", format!("{}: {e}", path.display())))?;
            match serde_json::from_str(&text).map_err(|e| config("config", format!("{}: {e}", path.display())))? {
                serde_json::Value::Object(m) => m,
                _ => return Err(config("config", "top level must be a JSON object")),
            }
        }
        None => serde_json::Map::new(),
    };
    let seed = match overrides.get("seed") {
        Some(v) => v.as_u64().ok_or_else(|| config("config", "`seed` must be a non-negative integer"))?,
        None => cli.seed,
    };
    match cli.command {
        Command::Gen(a) => gen(merge(a, &overrides)?, seed),
        Command::Test(a) => test(merge(a, &overrides)?, seed),
        Command::Mark(a) => mark(merge(a, &overrides)?, seed),
        Command::Walk(a) => walk(merge(a, &overrides)?),
        Command::Games(a) => games(merge(a, &overrides)?, seed),
        Command::Distinguish(a) => distinguish(merge(a, &overrides)?, seed),
        Command::Census(a) => census(merge(a, &overrides)?),
        Command::Distance(a) => distance(merge(a, &overrides)?, seed),
        Command::Suite(a) => run_suite(merge(a, &overrides)?, seed),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(module: &str, s: &str) -> Res<T> {
    s.parse().map_err(|e| config(module, e))
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12}")
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".advice");
    PathBuf::from(s)
}

fn read_graph(module: &str, path: Option<&PathBuf>) -> Res<graph::GraphFile> {
    let path = path.ok_or_else(|| config(module, "--graph is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| config(module, format!("{}: {e}", path.display())))?;
    graph::deserialize(&text).map_err(|e| config("graph", format!("{}: {e}", path.display())))
}

fn write_out(module: &str, path: Option<&PathBuf>, text: &str) -> Res<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| config(module, format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| config(module, e)),
    }
}

fn write_csv(module: &str, path: Option<&PathBuf>, header: &[&str], rows: &[Vec<String>]) -> Res<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| config(module, e);
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| config(module, e))?;
    write_out(module, path, &String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn gen(a: GenArgs, seed: u64) -> Res<()> {
    let variant: Variant = parse("gen", &a.variant)?;
    let convention: AdviceConvention = parse("gen", &a.advice_convention)?;
    let out = a.output.ok_or_else(|| config("gen", "-o/--output is required"))?;
    let inst = sample_instance(InstanceSpec::new(a.k, variant, seed).with_j(a.j).with_convention(convention)).map_err(|e| config("generators", e))?;
    let text = graph::serialize(inst.graph(), inst.meta());
    std::fs::write(&out, text).map_err(|e| config("gen", format!("{}: {e}", out.display())))?;
    let oracle = OracleHandle::new(inst.graph_arc(), FILE_LABEL_SEED);
    let advice = AdviceMap::from_vertex_flags(&oracle, &inst.weld_flags());
    let side = sidecar(&out);
    std::fs::write(&side, advice.to_text()).map_err(|e| config("gen", format!("{}: {e}", side.display())))?;
    println!("wrote {} (n={}) and {}", out.display(), inst.graph().vertex_count(), side.display());
    Ok(())
}

/// Per-vertex bits read off the loops: a body vertex is marked when the
/// single-edge component across its advice edge has the weld parity.
pub fn parity_advice_flags(g: &MultiGraph, convention: AdviceConvention) -> Vec<bool> {
    let n = g.vertex_count();
    let mut comp = vec![u32::MAX; n];
    let mut loops = Vec::new();
    for s in 0..n {
        if comp[s] != u32::MAX {
            continue;
        }
        let id = loops.len() as u32;
        comp[s] = id;
        let mut count = 0u32;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            count += u32::from(g.has_loop(v));
            for w in g.single_neighbors(v) {
                if comp[w] == u32::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        loops.push(count);
    }
    (0..n)
        .map(|v| {
            g.role(v) == VertexRole::Body
                && g.neighbors(v).find(|&(_, kind)| kind == EdgeKind::Double).is_some_and(|(w, _)| convention.marking_for_parity(loops[comp[w] as usize]))
        })
        .collect()
}

fn test(a: TestArgs, seed: u64) -> Res<()> {
    let file = read_graph("test", a.graph.as_ref())?;
    let k = a.k.unwrap_or(file.meta.k);
    let convention: AdviceConvention = parse("test", &a.advice_convention)?;
    if !(a.eps > 0.0 && a.eps <= 1.0) {
        return Err(config("test", format!("--eps must lie in (0, 1], got {}", a.eps)));
    }
    let g = Arc::new(file.graph);
    let from_file = match a.advice.as_str() {
        "quantum" | "zero" | "one" | "random" | "parity" => None,
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| config("test", format!("{path}: {e}")))?;
            Some(AdviceMap::from_text(&text).map_err(|e| config("advice", format!("{path}: {e}")))?)
        }
    };
    let cfg = TesterConfig { c1: a.c1, c2: a.c2, convention, ..TesterConfig::new(k, a.eps) };
    let mut rows = Vec::new();
    let mut rejected = 0;
    for trial in 0..a.trials {
        let s = seed::derive(seed, "cli/test", trial);
        let label_seed = if from_file.is_some() { FILE_LABEL_SEED } else { seed::derive(s, "labels", 0) };
        let oracle = OracleHandle::new(Arc::clone(&g), label_seed);
        let marker_oracle = oracle.fork();
        let quantum;
        let corrupt;
        let parity;
        let advice: &dyn AdviceSource = match (&from_file, a.advice.as_str()) {
            (Some(m), _) => m,
            (None, "quantum") => {
                quantum = QuantumAdvice::new(Marker::new(&marker_oracle, k, convention, seed::derive(s, "marker", 0)));
                &quantum
            }
            (None, "parity") => {
                parity = AdviceMap::from_vertex_flags(&oracle, &parity_advice_flags(&g, convention));
                &parity
            }
            (None, name) => {
                corrupt = CorruptAdvice::new(match name {
                    "zero" => Corruption::AllZero,
                    "one" => Corruption::AllOne,
                    _ => Corruption::Random(seed::derive(s, "advice", 0)),
                });
                &corrupt
            }
        };
        let mut ctx = TestContext::new(&oracle, advice, cfg, seed::stream(s, "tester", 0));
        let v = ctx.final_test();
        let reason = v.reason.map(|r| r.name()).unwrap_or("");
        if !v.accept {
            rejected += 1;
            eprintln!("trial {trial}: reject ({reason})");
        }
        rows.push(vec![
            s.to_string(),
            (if v.accept { "accept" } else { "reject" }).to_string(),
            reason.to_string(),
            v.queries_used.to_string(),
            v.advice_queries.to_string(),
        ]);
    }
    if let Some(p) = a.csv.as_ref() {
        write_csv("test", Some(p), &["seed", "verdict", "reason", "oracle_queries", "advice_queries"], &rows)?;
    }
    println!("{} of {} trials accepted", a.trials - rejected, a.trials);
    if rejected > 0 {
        return Err(CliError::Failed(format!("tester: rejected {rejected} of {} trials", a.trials)));
    }
    Ok(())
}

fn mark(a: MarkArgs, seed: u64) -> Res<()> {
    let file = read_graph("mark", a.graph.as_ref())?;
    let k = a.k.unwrap_or(file.meta.k);
    let convention: AdviceConvention = parse("mark", &a.advice_convention)?;
    let oracle = OracleHandle::new(Arc::new(file.graph), FILE_LABEL_SEED);
    let mut marker = Marker::new(&oracle, k, convention, seed::derive(seed, "cli/mark", 0));
    let (map, malformed) = marker.mark_all();
    write_out("mark", a.output.as_ref(), &map.to_text())?;
    eprintln!("marked {} labels, {} malformed, {} modeled quantum queries", map.len(), malformed, marker.modeled_quantum_queries);
    if a.audit {
        let path = sidecar(a.graph.as_ref().expect("checked by read_graph"));
        let text = std::fs::read_to_string(&path).map_err(|e| config("mark", format!("audit needs {}: {e}", path.display())))?;
        let truth = AdviceMap::from_text(&text).map_err(|e| config("advice", format!("{}: {e}", path.display())))?;
        let mismatches = truth.sorted().iter().filter(|&&(l, b)| map.get(l) != Some(b)).count();
        println!("audit: {mismatches} mismatches over {} labels", truth.len());
        if mismatches > 0 {
            return Err(CliError::Failed(format!("quantum marker: {mismatches} labels disagree with ground truth")));
        }
    }
    Ok(())
}

fn walk(a: WalkArgs) -> Res<()> {
    if !(a.dt > 0.0 && a.t_max >= 0.0) || a.k == 0 {
        return Err(config("walk", "need k >= 1, dt > 0 and t-max >= 0"));
    }
    let rows: Vec<Vec<String>> = suite::walk_sweep(a.k, a.t_max, a.dt).into_iter().map(|(t, pe, px)| vec![fmt_f(t), fmt_f(pe), fmt_f(px)]).collect();
    write_csv("walk", a.csv.as_ref(), &["t", "p_entrance", "p_exit"], &rows)
}

fn games(a: GamesArgs, seed: u64) -> Res<()> {
    let game: Game = parse("games", &a.game)?;
    let strategy: Strategy = parse("games", &a.strategy)?;
    let spec = GameSpec { game, k: a.k, t: a.t, trials: a.trials };
    let r = run_game(spec, strategy, seed).map_err(|e| config("adversary", e))?;
    let row = vec![a.k.to_string(), a.t.to_string(), a.trials.to_string(), r.wins.to_string(), fmt_f(r.win_prob), fmt_f(r.stderr)];
    write_csv("games", a.csv.as_ref(), &["k", "t", "trials", "wins", "win_prob", "stderr"], &[row])
}

fn distinguish(a: DistinguishArgs, seed: u64) -> Res<()> {
    let strategy: Strategy = parse("distinguish", &a.strategy)?;
    let d = distinguishing_experiment(a.k, a.t, strategy, a.trials, seed).map_err(|e| config("adversary", e))?;
    // a win is a correct guess; each trial runs once on G1 and once on G2
    let wins = d.g1_on_g1 + (d.trials - d.g1_on_g2);
    let total = 2 * d.trials;
    let row = vec![
        a.k.to_string(),
        a.t.to_string(),
        a.trials.to_string(),
        wins.to_string(),
        fmt_f(wins as f64 / total.max(1) as f64),
        fmt_f(stats::binomial_stderr(wins, total)),
        fmt_f(d.advantage),
        fmt_f(d.advantage_upper),
    ];
    write_csv("distinguish", a.csv.as_ref(), &["k", "t", "trials", "wins", "win_prob", "stderr", "advantage", "advantage_upper"], &[row])
}

fn census(a: CensusArgs) -> Res<()> {
    let file = read_graph("census", a.graph.as_ref())?;
    let convention: AdviceConvention = parse("census", &a.advice_convention)?;
    let k = file.meta.k;
    let c = raw_census(&file.graph, k, convention);
    let per_block = 2 * ((1u64 << k) - 1) * RoleCensus::candy_size(k);
    let blocks = c.vertices / per_block;
    let check = c.check(blocks, convention);
    let opt = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
    let row = vec![
        k.to_string(),
        c.vertices.to_string(),
        c.roots.to_string(),
        c.weld.to_string(),
        c.interior.to_string(),
        c.antenna.to_string(),
        c.loops.to_string(),
        opt(c.classes.map(|x| x.zero)),
        opt(c.classes.map(|x| x.one)),
        opt(c.classes.map(|x| x.two)),
        opt(c.antenna_one_loop),
        opt(c.antenna_even),
        (if check.is_ok() { "ok" } else { "mismatch" }).to_string(),
    ];
    let header = [
        "k",
        "vertices",
        "roots",
        "weld",
        "interior",
        "antenna",
        "loops",
        "zero_loop_pairs",
        "one_loop_pairs",
        "two_loop_pairs",
        "antenna_one_loop",
        "antenna_even",
        "check",
    ];
    write_csv("census", a.csv.as_ref(), &header, &[row])?;
    check.map_err(|e| CliError::Failed(format!("analysis: {e}")))
}

fn distance(a: DistanceArgs, seed: u64) -> Res<()> {
    let file = read_graph("distance", a.graph.as_ref())?;
    let mode: DistanceMode = parse("distance", &a.mode)?;
    let g = ReducedGraph::from_multigraph(&file.graph);
    let r = bipartite_distance(&g, mode, seed).map_err(|e| config("analysis", e))?;
    let row = vec![
        g.vertex_count().to_string(),
        g.edge_count().to_string(),
        r.is_bipartite.to_string(),
        r.odd_cycle_witness.as_ref().map(|w| w.len().to_string()).unwrap_or_default(),
        r.lower_bound.to_string(),
        r.upper_bound.to_string(),
        r.exact.map(|x| x.to_string()).unwrap_or_default(),
    ];
    write_csv("distance", a.csv.as_ref(), &["vertices", "edges", "bipartite", "witness_length", "lower_bound", "upper_bound", "exact"], &[row])
}

fn run_suite(a: SuiteArgs, seed: u64) -> Res<()> {
    let report = suite::run_suite(&a.name, seed).map_err(|e| match e {
        suite::SuiteError::UnknownSuite(_) => config("suite", e),
        other => CliError::Failed(format!("suite: {other}")),
    })?;
    for c in &report.criteria {
        eprintln!("[{}] {} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.title, c.summary);
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_out("suite", a.output.as_ref(), &(json + "\n"))?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!("suite {}: failing criteria {}", report.suite, report.failing().join(", "))))
    }
}
