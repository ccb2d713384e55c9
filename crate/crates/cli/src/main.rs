mod bench;
mod input;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use clique_interdict::bounds::{disjoint_clique_cover, estimate_lb, estimate_ub};
use clique_interdict::reduce::preprocess;
use clique_interdict::rlcm::EbcpStatus;
use clique_interdict::{
    generate, max_clique, solve_ebcp, solve_eicp, write_dimacs, EbcpOptions, Graph,
    SolveOptions, SolveStatus,
};

use input::{k_from_fraction, labeled_edges, load_graph, parse_witness, Format};

const EXIT_TIMEOUT: u8 = 2;

#[derive(Parser)]
#[command(name = "clique-interdict", version, about = "Edge interdiction of maximum cliques")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Delete at most k edges to minimize the clique number.
    Solve(SolveArgs),
    /// Fewest deletions that bring the clique number down to p.
    Ebcp(EbcpArgs),
    /// Maximum clique.
    Maxclique(GraphArgs),
    /// Run the reduction rules and report what they remove.
    Reduce(ReduceArgs),
    /// Lower and upper bounds on the optimum.
    Bounds(BoundsArgs),
    /// Check a claimed optimum value and deletion set.
    Verify(VerifyArgs),
    /// Write a random graph with independent edge probability.
    Gen(GenArgs),
    /// Run a manifest of instances and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Args)]
struct GraphArgs {
    /// Input graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Edge-list labels start at 0.
    #[arg(long)]
    zero_indexed: bool,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
}

impl GraphArgs {
    fn load(&self) -> Result<Graph> {
        load_graph(&self.graph, self.format, self.zero_indexed)
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Deletion budget.
    #[arg(long, conflicts_with = "k_frac", required_unless_present = "k_frac")]
    k: Option<u64>,
    /// Budget as a fraction c of the edge count, k = ceil(c * m).
    #[arg(long)]
    k_frac: Option<String>,
}

impl BudgetArgs {
    fn resolve(&self, g: &Graph) -> Result<u64> {
        match (&self.k, &self.k_frac) {
            (Some(k), _) => Ok(*k),
            (None, Some(c)) => k_from_fraction(c, g.m()),
            (None, None) => bail!("one of --k and --k-frac is required"),
        }
    }
}

#[derive(Args)]
struct TimeArgs {
    /// Time limit in seconds.
    #[arg(long, env = "CLIQUE_INTERDICT_TIME_LIMIT")]
    time_limit: Option<f64>,
}

impl TimeArgs {
    fn limit(&self) -> Result<Option<Duration>> {
        match self.time_limit {
            None => Ok(None),
            Some(t) if t >= 0.0 && t.is_finite() => Ok(Some(Duration::from_secs_f64(t))),
            Some(t) => bail!("invalid time limit {t}"),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    time: TimeArgs,
    /// Skip the reduction rules.
    #[arg(long)]
    no_reduce: bool,
    /// Skip the heuristic upper bound.
    #[arg(long)]
    no_ub: bool,
    /// Use cover constraints only.
    #[arg(long)]
    no_perm_cuts: bool,
}

#[derive(Args)]
struct EbcpArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Target clique number.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    p: u64,
    /// Stop once more than this many deletions are provably needed.
    #[arg(long)]
    cutoff: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    time: TimeArgs,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Write the reduced graph here as DIMACS.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    claimed_eta: usize,
    /// Deleted edges as `u-v` pairs, inline (comma separated) or in a file.
    #[arg(long, default_value = "")]
    witness: String,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Independent probability of each edge.
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// TOML manifest of runs.
    #[arg(long)]
    manifest: PathBuf,
    /// CSV output file.
    #[arg(long)]
    out: PathBuf,
    /// Parallel workers; overrides the manifest.
    #[arg(long)]
    workers: Option<usize>,
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn edges_text(pairs: &[[u64; 2]]) -> String {
    pairs
        .iter()
        .map(|[u, v]| format!("{u}-{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let g = args.graph.load()?;
    let k = args.budget.resolve(&g)?;
    let r = solve_eicp(
        &g,
        k,
        &SolveOptions {
            seed: args.seed,
            time_limit: args.time.limit()?,
            disable_reduce: args.no_reduce,
            disable_ub: args.no_ub,
            disable_ordering_cuts: args.no_perm_cuts,
        },
    );
    let witness = labeled_edges(&g, &r.witness);
    let status = match r.status {
        SolveStatus::Solved => "solved",
        SolveStatus::Timeout => "timeout",
    };
    match args.graph.output {
        Output::Json => print_json(&json!({
            "eta": r.eta,
            "k": k,
            "witness": witness,
            "lb": r.lb,
            "ub": r.ub,
            "status": status,
            "time_ms": r.wall_time.as_millis() as u64,
            "reduction": {
                "vertices_removed": r.reduction.vertices_removed,
                "edges_removed": r.reduction.edges_removed,
            },
            "nodes": r.nodes,
            "cuts": r.cuts,
            "seed": r.seed,
        }))?,
        Output::Text => {
            println!("status {status}");
            println!("eta {}", r.eta);
            println!("k {k}");
            println!("bounds {} {}", r.lb, r.ub);
            println!("witness {}", edges_text(&witness));
            println!(
                "reduction {} vertices {} edges",
                r.reduction.vertices_removed, r.reduction.edges_removed
            );
            println!("nodes {} cuts {}", r.nodes, r.cuts);
            println!("time_ms {}", r.wall_time.as_millis());
        }
    }
    Ok(match r.status {
        SolveStatus::Solved => 0,
        SolveStatus::Timeout => EXIT_TIMEOUT,
    })
}

fn cmd_ebcp(args: &EbcpArgs) -> Result<u8> {
    let g = args.graph.load()?;
    let r = solve_ebcp(
        &g,
        args.p as usize,
        &EbcpOptions {
            seed: args.seed,
            cutoff: args.cutoff,
            time_limit: args.time.limit()?,
        },
    );
    let witness = labeled_edges(&g, &r.witness);
    let status = match r.status {
        EbcpStatus::Solved => "solved",
        EbcpStatus::ExceedsCutoff => "exceeds_cutoff",
        EbcpStatus::Timeout => "timeout",
    };
    match args.graph.output {
        Output::Json => print_json(&json!({
            "gamma": r.gamma,
            "p": args.p,
            "witness": witness,
            "status": status,
            "time_ms": r.wall_time.as_millis() as u64,
            "nodes": r.nodes,
            "cuts": r.cuts,
            "seed": args.seed,
        }))?,
        Output::Text => {
            println!("status {status}");
            match r.gamma {
                Some(gamma) => println!("gamma {gamma}"),
                None => println!("gamma -"),
            }
            println!("witness {}", edges_text(&witness));
        }
    }
    Ok(if r.status == EbcpStatus::Timeout { EXIT_TIMEOUT } else { 0 })
}

fn cmd_maxclique(args: &GraphArgs) -> Result<u8> {
    let g = args.load()?;
    let start = Instant::now();
    let r = max_clique(&g, None);
    let labels: Vec<u64> = r.clique.iter().map(|&v| g.label(v)).collect();
    match args.output {
        Output::Json => print_json(&json!({
            "size": r.size,
            "clique": labels,
            "nodes": r.search_nodes,
            "time_ms": start.elapsed().as_millis() as u64,
        }))?,
        Output::Text => {
            println!("size {}", r.size);
            let list: Vec<String> = labels.iter().map(u64::to_string).collect();
            println!("clique {}", list.join(" "));
        }
    }
    Ok(0)
}

fn write_graph(g: &Graph, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write_dimacs(g, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_reduce(args: &ReduceArgs) -> Result<u8> {
    let g = args.graph.load()?;
    let k = args.budget.resolve(&g)?;
    let start = Instant::now();
    let rep = preprocess(&g, k);
    if let Some(path) = &args.out {
        write_graph(&rep.reduced_graph, path)?;
    }
    let value = json!({
        "k": k,
        "lb": rep.lb_used,
        "n": g.n(),
        "m": g.m(),
        "reduced_n": rep.reduced_graph.n(),
        "reduced_m": rep.reduced_graph.m(),
        "vertices_removed": rep.removed_vertices,
        "edges_removed": rep.removed_edges,
        "pool": rep.pool.len(),
        "stages": rep.stage_counters,
        "time_ms": start.elapsed().as_millis() as u64,
    });
    match args.graph.output {
        Output::Json => print_json(&value)?,
        Output::Text => {
            println!("lb {}", rep.lb_used);
            println!("vertices {} -> {}", g.n(), rep.reduced_graph.n());
            println!("edges {} -> {}", g.m(), rep.reduced_graph.m());
            println!("pool {}", rep.pool.len());
        }
    }
    Ok(0)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<u8> {
    let g = args.graph.load()?;
    let k = args.budget.resolve(&g)?;
    let lb = estimate_lb(&g, k);
    let (ub, trace) = estimate_ub(&g, k, args.seed);
    let witness = labeled_edges(&g, &trace.removed);
    match args.graph.output {
        Output::Json => print_json(&json!({
            "k": k,
            "lb": lb,
            "ub": ub,
            "cover_delta": disjoint_clique_cover(&g).delta,
            "ub_witness": witness,
            "ub_steps": trace.iterations,
            "seed": args.seed,
        }))?,
        Output::Text => {
            println!("lb {lb}");
            println!("ub {ub}");
            println!("witness {}", edges_text(&witness));
        }
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let g = args.graph.load()?;
    let witness = parse_witness(&g, &args.witness)?;
    let residual = g.remove_edges(&witness).context("witness edge not in the graph")?;
    let omega = max_clique(&residual, None).size;
    let mut problems = Vec::new();
    if witness.len() as u64 > args.k {
        problems.push(format!("witness has {} edges, budget is {}", witness.len(), args.k));
    }
    if omega != args.claimed_eta {
        problems.push(format!(
            "residual clique number is {omega}, claimed {}",
            args.claimed_eta
        ));
    }
    let valid = problems.is_empty();
    match args.graph.output {
        Output::Json => print_json(&json!({
            "valid": valid,
            "residual_omega": omega,
            "witness_size": witness.len(),
            "problems": problems,
        }))?,
        Output::Text if valid => println!("valid"),
        Output::Text => println!("invalid: {}", problems.join("; ")),
    }
    Ok(if valid { 0 } else { 1 })
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    if !(0.0..=1.0).contains(&args.density) {
        bail!("density must lie in [0, 1]");
    }
    let g = generate::gnp(args.n as usize, args.density, args.seed);
    match &args.out {
        Some(path) => write_graph(&g, path)?,
        None => {
            let mut out = BufWriter::new(std::io::stdout().lock());
            write_dimacs(&g, &mut out)?;
            out.flush()?;
        }
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let manifest = bench::read_manifest(&args.manifest)?;
    let base = args
        .manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let workers = args.workers.or(manifest.workers).unwrap_or(1);
    let file =
        File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let rows = bench::run_manifest(&manifest, &base, workers, file)?;
    eprintln!("{rows} rows written to {}", args.out.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Ebcp(a) => cmd_ebcp(a),
        Command::Maxclique(a) => cmd_maxclique(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
