use std::collections::HashSet;
use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use multicut::branching::{solve_decision_parallel, solve_decision_traced, solve_max_parallel};
use multicut::enum_cluster::enumerate_cluster_with;
use multicut::enum_kernels::{compress_cocluster, compress_vc, enumerate_via_kernel, CoclusterOutcome};
use multicut::generators::{self, Variant};
use multicut::io::{detect_format, parse_graph, parse_set_packing, write_graph, write_set_packing, GraphFormat};
use multicut::modulator::{approx_cluster_modulator, approx_cocluster_modulator, approx_vertex_cover};
use multicut::oracle::Oracle;
use multicut::subcubic::{kernelize_subcubic, KernelOutcome};
use multicut::treewidth::{heuristic_decomposition, max_parts_tw_witness, nicify, parse_td};
use multicut::{random, Graph, Modulator, ModulatorKind, Multicut};

/// Seed used by `generate random` when none is given.
const DEFAULT_SEED: u64 = 20240917;

#[derive(Parser)]
#[command(name = "multicut", version, about = "Matching multicut solvers, kernels, enumeration and reductions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a matching multicut with at least ELL parts exists.
    Solve(SolveArgs),
    /// Largest part count and a witness.
    Maxparts(MaxpartsArgs),
    /// Stream every matching multicut with at least ELL parts as JSON lines.
    Enumerate(EnumerateArgs),
    /// Solve by construction or shrink to a kernel.
    Kernelize(KernelizeArgs),
    /// Build instances from the hardness reductions or random families.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Cross-check every engine and enumerator on one graph.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Oracle,
    Branching,
    Treewidth,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Param {
    Vc,
    Cocluster,
    Cluster,
}

#[derive(Args)]
struct GraphInput {
    /// Graph file (PACE `p tw`, DIMACS `p edge` or a bare edge list); `-` reads stdin.
    input: PathBuf,
    /// Input format; detected from the header when omitted.
    #[arg(long, value_parser = parse_format)]
    format: Option<GraphFormat>,
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "branching")]
    engine: Engine,
    /// Tree decomposition in PACE `.td` format for the treewidth engine.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Worker threads for the branching engine.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Print the witness as JSON instead of `part i:` lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Minimum number of parts.
    #[arg(long)]
    ell: usize,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write the branching rule trace of the witness as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct MaxpartsArgs {
    #[command(flatten)]
    graph: GraphInput,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct ModulatorArgs {
    /// Structural parameter to enumerate or kernelize by.
    #[arg(long, value_enum)]
    param: Option<Param>,
    /// Modulator vertices (1-based ids, whitespace separated); approximated when omitted.
    #[arg(long)]
    modulator: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Minimum number of parts.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Enumerate through a kernel (`vc`, `cocluster`) or the cluster pipeline; the oracle when omitted.
    #[command(flatten)]
    modulator: ModulatorArgs,
    /// Add the nanoseconds since the start to every line.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct KernelizeArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Minimum number of parts.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Subcubic kernel: a witness by construction or the instance with its size bound.
    #[arg(long, conflicts_with = "param")]
    subcubic: bool,
    #[command(flatten)]
    modulator: ModulatorArgs,
    /// Kernel graph file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Independent set on a cubic graph to matching multicut.
    Is2mmc {
        #[command(flatten)]
        graph: GraphInput,
        /// Independent set size to encode.
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "subcubic")]
        variant: VariantArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// OR-composition of set-packing instances sharing ground set and target.
    Xcompose {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Set packing to matching multicut.
    Sp2mmc {
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Seeded random graph.
    Random {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Edge probability for `gnp`, `cluster` and `cocluster`.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        /// Width for `ktree`, modulator size for `cluster`, `cocluster` and `vc`.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Graph file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Subcubic,
    Cubic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gnp,
    Cubic,
    Subcubic,
    Ktree,
    Cluster,
    Cocluster,
    Vc,
}

#[derive(Args)]
struct OutputArgs {
    /// Instance file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Certificate bookkeeping as JSON.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphInput,
    /// Targets to check; every target from 1 to n when omitted.
    #[arg(long)]
    ell: Option<usize>,
}

fn parse_format(s: &str) -> Result<GraphFormat, String> {
    s.parse()
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_graph(input: &GraphInput) -> Result<Graph> {
    let text = read_text(&input.input)?;
    let format = input.format.unwrap_or_else(|| detect_format(&text));
    parse_graph(&text, format).with_context(|| format!("parsing {}", input.input.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn render(mc: &Multicut, json: bool) -> String {
    if json {
        format!("{}\n", mc.to_json())
    } else {
        mc.to_text()
    }
}

fn check_engine(g: &Graph, args: &EngineArgs) -> Result<()> {
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    if args.jobs > 1 && args.engine != Engine::Branching {
        bail!("--jobs only applies to the branching engine");
    }
    if args.td.is_some() && args.engine != Engine::Treewidth {
        bail!("--td only applies to the treewidth engine");
    }
    let oracle = Oracle::default();
    if args.engine == Engine::Oracle && g.n() > oracle.multicut_limit {
        bail!(
            "the oracle refuses graphs with more than {} vertices (this one has {}); set {} to override",
            oracle.multicut_limit,
            g.n(),
            multicut::oracle::LIMIT_VAR
        );
    }
    Ok(())
}

/// Best multicut from the chosen engine; `None` only for the empty graph.
fn best_multicut(g: &Graph, args: &EngineArgs) -> Result<Option<Multicut>> {
    Ok(match args.engine {
        Engine::Oracle => {
            let all = Oracle::default().enumerate_all_multicuts(g, 1)?;
            all.into_iter().max_by_key(|m| (m.parts(), std::cmp::Reverse(m.part_of().to_vec())))
        }
        Engine::Branching => Some(solve_max_parallel(g, args.jobs).1).filter(|_| g.n() > 0),
        Engine::Treewidth => {
            let td = match &args.td {
                Some(path) => parse_td(&read_text(path)?, g).with_context(|| format!("parsing {}", path.display()))?,
                None => heuristic_decomposition(g),
            };
            max_parts_tw_witness(g, &nicify(&td))
        }
    })
}

fn solve(args: &SolveArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    check_engine(&g, &args.engine)?;
    if args.trace.is_some() && (args.engine.engine != Engine::Branching || args.engine.jobs > 1) {
        bail!("--trace needs the single-threaded branching engine");
    }
    let witness = match args.engine.engine {
        Engine::Branching if args.engine.jobs > 1 => solve_decision_parallel(&g, args.ell, args.engine.jobs),
        Engine::Branching => {
            let outcome = solve_decision_traced(&g, args.ell);
            if let Some(path) = &args.trace {
                write_out(Some(path), &outcome.trace.to_json_lines())?;
            }
            outcome.witness
        }
        _ => best_multicut(&g, &args.engine)?.filter(|m| m.parts() >= args.ell),
    };
    match witness {
        Some(mc) => {
            write_out(None, &render(&mc, args.engine.json))?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            write_out(None, "NO\n")?;
            Ok(ExitCode::from(1))
        }
    }
}

fn maxparts(args: &MaxpartsArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    check_engine(&g, &args.engine)?;
    match best_multicut(&g, &args.engine)? {
        Some(mc) => write_out(None, &format!("{}\n{}", mc.parts(), render(&mc, args.engine.json)))?,
        None => write_out(None, "0\n")?,
    }
    Ok(ExitCode::SUCCESS)
}

fn read_modulator(g: &Graph, args: &ModulatorArgs, kind: ModulatorKind) -> Result<Modulator> {
    let Some(path) = &args.modulator else {
        return Ok(match kind {
            ModulatorKind::VertexCover => approx_vertex_cover(g),
            ModulatorKind::Cluster => approx_cluster_modulator(g),
            ModulatorKind::CoCluster => approx_cocluster_modulator(g),
        });
    };
    let text = read_text(path)?;
    let mut vertices = Vec::new();
    for token in text.lines().filter(|l| !l.trim_start().starts_with('#')).flat_map(str::split_whitespace) {
        let id: usize = token.parse().with_context(|| format!("bad vertex id `{token}` in {}", path.display()))?;
        if id == 0 || id > g.n() {
            bail!("vertex {id} in {} is outside 1..={}", path.display(), g.n());
        }
        vertices.push(id - 1);
    }
    let m = Modulator::new(kind, vertices);
    if !m.is_valid_for(g) {
        bail!("{} is not a {kind:?} modulator of the graph", path.display());
    }
    Ok(m)
}

fn kind_of(param: Param) -> ModulatorKind {
    match param {
        Param::Vc => ModulatorKind::VertexCover,
        Param::Cocluster => ModulatorKind::CoCluster,
        Param::Cluster => ModulatorKind::Cluster,
    }
}

fn enumerate(args: &EnumerateArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let start = Instant::now();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut count = 0usize;
    let mut emit = |mc: &Multicut, out: &mut BufWriter<io::StdoutLock>| -> io::Result<()> {
        count += 1;
        let line = mc.to_json();
        if args.stats {
            let ns = start.elapsed().as_nanos();
            writeln!(out, "{},\"elapsed_ns\":{ns}}}", &line[..line.len() - 1])
        } else {
            writeln!(out, "{line}")
        }
    };
    let oracle = Oracle::default();
    match args.modulator.param {
        None => {
            if g.n() > oracle.multicut_limit {
                bail!("the oracle refuses graphs with more than {} vertices; pick a --param", oracle.multicut_limit);
            }
            for mc in oracle.enumerate_all_multicuts(&g, args.ell)? {
                emit(&mc, &mut out)?;
            }
        }
        Some(Param::Cluster) => {
            let m = read_modulator(&g, &args.modulator, ModulatorKind::Cluster)?;
            let mut failure = None;
            enumerate_cluster_with(&g, &m, args.ell, &mut |mc| match emit(&mc, &mut out) {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            })?;
            if let Some(e) = failure {
                return Err(e.into());
            }
        }
        Some(param) => {
            let m = read_modulator(&g, &args.modulator, kind_of(param))?;
            for mc in enumerate_via_kernel(&g, &m, args.ell, &oracle)? {
                emit(&mc, &mut out)?;
            }
        }
    }
    out.flush()?;
    Ok(if count == 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn kernelize(args: &KernelizeArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let out = args.out.as_deref();
    if args.subcubic {
        return match kernelize_subcubic(&g, args.ell)? {
            KernelOutcome::Solved(mc) => {
                write_out(None, &format!("SOLVED\n{}", mc.to_text()))?;
                Ok(ExitCode::SUCCESS)
            }
            KernelOutcome::Kernel { graph, ell, bound } => {
                write_out(out, &write_graph(&graph, GraphFormat::PaceGr))?;
                eprintln!("KERNEL n<{bound:.0} (n={}, ell={ell})", graph.n());
                if out.is_some() {
                    println!("KERNEL n<{bound:.0}");
                }
                Ok(ExitCode::SUCCESS)
            }
        };
    }
    let Some(param) = args.modulator.param else {
        bail!("kernelize needs --subcubic or --param vc|cocluster");
    };
    let m = read_modulator(&g, &args.modulator, kind_of(param))?;
    let (kernel, note) = match param {
        Param::Vc => {
            let k = compress_vc(&g, &m)?;
            let note =
                format!("KERNEL n={} cover={} bound={}", k.graph.n(), m.len(), multicut::enum_kernels::VcKernel::size_bound(m.len()));
            (k.graph, note)
        }
        Param::Cocluster => match compress_cocluster(&g, &m, args.ell)? {
            CoclusterOutcome::Reduced(k) => {
                let note = format!("KERNEL n={} modulator={} ell={}", k.graph.n(), k.modulator.len(), k.ell);
                (k.graph, note)
            }
            CoclusterOutcome::DelegateToVc(cover) => {
                let k = compress_vc(&g, &cover)?;
                let note = format!("KERNEL n={} cover={} (vertex cover fallback)", k.graph.n(), cover.len());
                (k.graph, note)
            }
        },
        Param::Cluster => bail!("the cluster parameter has no polynomial kernel; use `enumerate --param cluster`"),
    };
    write_out(out, &write_graph(&kernel, GraphFormat::PaceGr))?;
    eprintln!("{note}");
    Ok(ExitCode::SUCCESS)
}

fn write_cert<T: serde::Serialize>(path: Option<&Path>, cert: &T) -> Result<()> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(cert)?;
        fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn generate(kind: &GenerateKind) -> Result<ExitCode> {
    match kind {
        GenerateKind::Is2mmc { graph, k, variant, out } => {
            let g = read_graph(graph)?;
            let variant = match variant {
                VariantArg::Subcubic => Variant::Subcubic,
                VariantArg::Cubic => Variant::Cubic,
            };
            let red = generators::reduce_is_to_mmc(&g, *k, variant)?;
            let text = format!("c ell {}\n{}", red.ell, write_graph(&red.graph, GraphFormat::PaceGr));
            write_out(out.out.as_deref(), &text)?;
            write_cert(out.cert.as_deref(), &red)?;
        }
        GenerateKind::Xcompose { inputs, out } => {
            let instances = inputs
                .iter()
                .map(|p| parse_set_packing(&read_text(p)?).with_context(|| format!("parsing {}", p.display())))
                .collect::<Result<Vec<_>>>()?;
            let comp = generators::cross_compose_set_packing(&instances)?;
            write_out(out.out.as_deref(), &write_set_packing(&comp.instance))?;
            write_cert(out.cert.as_deref(), &comp)?;
        }
        GenerateKind::Sp2mmc { input, out } => {
            let inst = parse_set_packing(&read_text(input)?).with_context(|| format!("parsing {}", input.display()))?;
            let red = generators::reduce_set_packing_to_mmc(&inst)?;
            let text = format!("c ell {}\n{}", red.ell, write_graph(&red.graph, GraphFormat::PaceGr));
            write_out(out.out.as_deref(), &text)?;
            write_cert(out.cert.as_deref(), &red)?;
        }
        GenerateKind::Random { family, n, seed, p, k, out } => {
            let mut rng = random::rng(*seed);
            let (n, p, k) = (*n, *p, *k);
            if !(0.0..=1.0).contains(&p) {
                bail!("--p must lie in [0, 1]");
            }
            let g = match family {
                Family::Gnp => random::gnp(n, p, &mut rng),
                Family::Cubic => {
                    if n < 4 || n % 2 == 1 {
                        bail!("cubic graphs need an even n of at least 4");
                    }
                    random::cubic(n, &mut rng)
                }
                Family::Subcubic => random::subcubic(n, n / 4, &mut rng),
                Family::Ktree => {
                    if n <= k {
                        bail!("a k-tree needs n > k");
                    }
                    random::k_tree(n, k, &mut rng)
                }
                Family::Cluster | Family::Cocluster => {
                    let body = n.saturating_sub(k);
                    let sizes: Vec<usize> = split_sizes(body, &mut rng);
                    if matches!(family, Family::Cluster) {
                        random::cluster_with_modulator(&sizes, k.min(n), p, &mut rng)
                    } else {
                        random::cocluster_with_modulator(&sizes, k.min(n), p, &mut rng)
                    }
                }
                Family::Vc => random::with_vertex_cover(n, k.min(n), p, &mut rng),
            };
            write_out(out.as_deref(), &write_graph(&g, GraphFormat::PaceGr))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Random composition of `total` into parts of size 1 to 4.
fn split_sizes(mut total: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
    let mut sizes = Vec::new();
    while total > 0 {
        let s = rng.gen_range(1..=total.min(4));
        sizes.push(s);
        total -= s;
    }
    sizes
}

fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let oracle = Oracle::default();
    let small = g.n() <= oracle.multicut_limit;
    let mut failures = 0;
    let mut report = |ok: bool, line: String| {
        println!("{} {line}", if ok { "PASS" } else { "FAIL" });
        failures += usize::from(!ok);
    };
    let branching = solve_max_parallel(&g, 1).0;
    let tw = max_parts_tw_witness(&g, &nicify(&heuristic_decomposition(&g))).map_or(0, |m| m.parts());
    let exact = if small { Some(oracle.max_parts(&g)?) } else { None };
    report(
        branching == tw && exact.map_or(true, |e| e == branching),
        format!("max parts: branching {branching}, treewidth {tw}, oracle {}", exact.map_or("skipped".into(), |e| e.to_string())),
    );
    let targets: Vec<usize> = match args.ell {
        Some(ell) => vec![ell],
        None => (1..=g.n()).collect(),
    };
    for &ell in &targets {
        let decided = solve_decision_traced(&g, ell).witness;
        let valid = decided.as_ref().map_or(true, |m| m.parts() >= ell);
        report(
            valid && decided.is_some() == (ell <= branching),
            format!("decision ell={ell}: {}", if decided.is_some() { "yes" } else { "no" }),
        );
        if !small {
            continue;
        }
        let expected: HashSet<Multicut> = oracle.enumerate_all_multicuts(&g, ell)?.into_iter().collect();
        let mut streams: Vec<(&str, Vec<Multicut>)> = Vec::new();
        streams.push(("vc", enumerate_via_kernel(&g, &approx_vertex_cover(&g), ell, &oracle)?));
        streams.push(("cocluster", enumerate_via_kernel(&g, &approx_cocluster_modulator(&g), ell, &oracle)?));
        let mut cluster = Vec::new();
        enumerate_cluster_with(&g, &approx_cluster_modulator(&g), ell, &mut |m| {
            cluster.push(m);
            ControlFlow::Continue(())
        })?;
        streams.push(("cluster", cluster));
        for (name, sols) in streams {
            let set: HashSet<Multicut> = sols.iter().cloned().collect();
            let dup = sols.len() - set.len();
            report(
                set == expected && dup == 0,
                format!("enumerate {name} ell={ell}: {} solutions, oracle {}, duplicates {dup}", sols.len(), expected.len()),
            );
        }
    }
    if !small {
        println!("SKIP enumeration: {} vertices exceed the oracle limit {}", g.n(), oracle.multicut_limit);
    }
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Maxparts(args) => maxparts(args),
        Command::Enumerate(args) => enumerate(args),
        Command::Kernelize(args) => kernelize(args),
        Command::Generate { kind } => generate(kind),
        Command::Verify(args) => verify(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
