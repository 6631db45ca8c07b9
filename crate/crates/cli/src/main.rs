//! `anysyn`: batch front end for cost-generic XAG optimization.
//!
//! Exit codes: 0 success, 1 networks not equivalent (`check`), 2 usage or
//! parse error, 3 verification failure.

mod bench;
mod stats;

use anyhow::{bail, Context, Result};
use anysyn::cost::{evaluate_by_name, registered_costs, with_cost, UnknownCost};
use anysyn::io::{read_any, write_aiger, write_xag, ReadOptions};
use anysyn::opt::{optimize, OptError, PassConfig};
use anysyn::verify::{cec_exhaustive, cec_random, po_tables, RandomCheck, EXHAUSTIVE_LIMIT};
use anysyn::xag::Network;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use stats::{PassStats, StatsSchema};

/// Widest network whose PO tables are built directly for counterexamples.
const TABLE_LIMIT: usize = 16;

#[derive(Parser)]
#[command(name = "anysyn", version, about = "Cost-generic resubstitution for XOR-AND-Inverter Graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize one network under a cost function.
    Optimize(OptimizeArgs),
    /// Evaluate one or all cost functions on a network.
    Eval(EvalArgs),
    /// Check two networks for equivalence.
    Check(CheckArgs),
    /// Print structural statistics of a network.
    Stats(StatsArgs),
    /// Optimize every network in a directory and emit a CSV table.
    Bench(bench::BenchArgs),
}

/// Engine parameters shared by `optimize` and `bench`.
#[derive(Args, Clone, Debug)]
pub struct EngineArgs {
    /// Maximum cut size (window inputs).
    #[arg(long, env = "ANYSYN_LEAVES", default_value_t = 8)]
    leaves: usize,
    /// Maximum number of divisors per window.
    #[arg(long, env = "ANYSYN_DIVISORS", default_value_t = 150)]
    divisors: usize,
    /// Maximum number of new gates per replacement.
    #[arg(long, env = "ANYSYN_GATES", default_value_t = 3)]
    gates: usize,
    /// Maximum number of passes.
    #[arg(long, env = "ANYSYN_ITERS", default_value_t = 1)]
    iters: usize,
    /// Recognize 3-AND XOR patterns when reading AIGER.
    #[arg(long, env = "ANYSYN_XOR_EXTRACT")]
    xor_extract: bool,
    /// Check every substitution and the final network.
    #[arg(long, env = "ANYSYN_VERIFY")]
    verify: bool,
    /// Seed for random simulation on networks too wide for exhaustive checks.
    #[arg(long, env = "ANYSYN_SEED", default_value_t = 0)]
    seed: u64,
}

impl EngineArgs {
    pub fn config(&self, cost: &str) -> PassConfig {
        PassConfig {
            cost_name: cost.to_string(),
            max_leaves: self.leaves,
            max_divisors: self.divisors,
            max_gates: self.gates,
            iterations: self.iters,
            seed: self.seed,
            verify_each: self.verify,
            ..PassConfig::default()
        }
    }

    pub fn read_options(&self) -> ReadOptions {
        ReadOptions {
            xor_extract: self.xor_extract,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    /// Input network (.aag, .aig or .xag).
    input: PathBuf,
    /// Cost function to minimize.
    #[arg(long, env = "ANYSYN_COST")]
    cost: String,
    /// Output path; `.aag` writes ASCII AIGER, anything else the native format.
    /// Defaults to the native format on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write machine-readable statistics to this path.
    #[arg(long)]
    stats_json: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct EvalArgs {
    input: PathBuf,
    /// Cost name, or `all` for every registered cost.
    #[arg(long, default_value = "all")]
    cost: String,
    /// Print a JSON object instead of a table.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    xor_extract: bool,
}

#[derive(Args)]
struct CheckArgs {
    a: PathBuf,
    b: PathBuf,
    /// Widest network checked exhaustively; wider ones use random simulation.
    #[arg(long, env = "ANYSYN_EXHAUSTIVE_LIMIT", default_value_t = EXHAUSTIVE_LIMIT)]
    exhaustive_limit: usize,
    /// Number of random vectors above the exhaustive limit.
    #[arg(long, env = "ANYSYN_VECTORS", default_value_t = 1 << 16)]
    vectors: usize,
    #[arg(long, env = "ANYSYN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    xor_extract: bool,
}

#[derive(Args)]
struct StatsArgs {
    input: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    xor_extract: bool,
}

/// Errors mapped to exit codes other than 2.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("networks are not equivalent")]
    NotEquivalent,
    #[error("{0}")]
    Verification(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Optimize(a) => cmd_optimize(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Stats(a) => cmd_stats(a),
        Cmd::Bench(a) => bench::cmd_bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Failure>() {
                Some(Failure::NotEquivalent) => ExitCode::from(1),
                Some(Failure::Verification(_)) => ExitCode::from(3),
                None => ExitCode::from(2),
            }
        }
    }
}

pub fn read_network(path: &Path, opts: ReadOptions) -> Result<Network> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_any(&bytes, opts).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn check_cost(name: &str) -> Result<()> {
    struct Nop;
    impl anysyn::cost::CostVisitor for Nop {
        type Output = ();
        fn visit<C: anysyn::cost::CostFunction>(self, _: &C) {}
    }
    with_cost(name, Nop)?;
    Ok(())
}

fn serialize(net: &Network, path: Option<&Path>) -> String {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("aag") => write_aiger(net),
        _ => write_xag(net),
    }
}

fn cmd_optimize(a: OptimizeArgs) -> Result<()> {
    check_cost(&a.cost)?;
    if a.out.as_deref().and_then(Path::extension).is_some_and(|e| e == "aig") {
        bail!("binary AIGER output is not supported; use .aag or .xag");
    }
    let original = read_network(&a.input, a.engine.read_options())?;
    let mut net = original.clone();
    let cfg = a.engine.config(&a.cost);
    let report = match optimize(&mut net, &cfg) {
        Ok(r) => r,
        Err(e @ OptError::Verification { .. }) => return Err(Failure::Verification(e.to_string()).into()),
        Err(e) => return Err(e.into()),
    };
    if a.engine.verify {
        match equivalent(&original, &net, a.engine.seed, 1 << 16)? {
            Verdict::Refuted(_) => {
                return Err(Failure::Verification("optimized network differs from the input".into()).into())
            }
            v => eprintln!("verify: {}", v.describe()),
        }
    }
    let stats = PassStats::new(&a.cost, &report);
    eprintln!(
        "{}: {} -> {} ({} accepted of {} attempted, {} passes, {:.1} ms)",
        a.cost,
        report.initial_cost,
        report.final_cost,
        report.accepted,
        report.attempted,
        report.passes,
        stats.cpu_ms.total
    );
    if let Some(p) = &a.stats_json {
        let text = serde_json::to_string_pretty(&stats)?;
        std::fs::write(p, text + "\n").with_context(|| format!("cannot write {}", p.display()))?;
    }
    let text = serialize(&net, a.out.as_deref());
    match &a.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cost_names(arg: &str) -> Result<Vec<String>> {
    if arg == "all" {
        return Ok(registered_costs().into_iter().map(String::from).collect());
    }
    let names: Vec<String> = arg.split(',').map(|s| s.trim().to_string()).collect();
    for n in &names {
        check_cost(n)?;
    }
    Ok(names)
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let names = cost_names(&a.cost)?;
    let net = read_network(&a.input, ReadOptions { xor_extract: a.xor_extract })?;
    let values: Vec<(String, u64)> = names
        .into_iter()
        .map(|n| {
            let v = evaluate_by_name(&net, &n)?;
            Ok::<_, UnknownCost>((n, v))
        })
        .collect::<Result<_, _>>()?;
    if a.json {
        let map: serde_json::Map<String, serde_json::Value> =
            values.into_iter().map(|(n, v)| (n, v.into())).collect();
        println!("{}", serde_json::to_string_pretty(&map)?);
    } else {
        let w = values.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for (n, v) in values {
            println!("{n:<w$}  {v}");
        }
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let net = read_network(&a.input, ReadOptions { xor_extract: a.xor_extract })?;
    let s = StatsSchema::of(&net);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s)?);
    } else {
        println!(
            "pis {}  pos {}  gates {}  and {}  xor {}  depth {}",
            s.pis, s.pos, s.gates, s.and, s.xor, s.depth
        );
    }
    Ok(())
}

enum Verdict {
    Proven,
    Consistent,
    Refuted(Option<Vec<bool>>),
}

impl Verdict {
    fn describe(&self) -> &'static str {
        match self {
            Verdict::Proven => "equivalent",
            Verdict::Consistent => "consistent (not proven)",
            Verdict::Refuted(_) => "not equivalent",
        }
    }
}

fn equivalent(a: &Network, b: &Network, seed: u64, vectors: usize) -> Result<Verdict> {
    equivalent_with_limit(a, b, EXHAUSTIVE_LIMIT, seed, vectors)
}

fn equivalent_with_limit(a: &Network, b: &Network, limit: usize, seed: u64, vectors: usize) -> Result<Verdict> {
    let n = a.num_pis();
    if n <= limit.min(TABLE_LIMIT) {
        let (ta, tb) = (po_tables(a)?, po_tables(b)?);
        if ta.len() != tb.len() {
            return Ok(Verdict::Refuted(None));
        }
        for (x, y) in ta.iter().zip(&tb) {
            if let Some(row) = (0..x.num_rows()).find(|&r| x.bit(r) != y.bit(r)) {
                return Ok(Verdict::Refuted(Some((0..n).map(|i| row >> i & 1 == 1).collect())));
            }
        }
        return Ok(Verdict::Proven);
    }
    if n <= limit.min(EXHAUSTIVE_LIMIT) {
        if cec_exhaustive(a, b)? {
            return Ok(Verdict::Proven);
        }
        // Proven different; look for a witness by simulation.
        return Ok(match cec_random(a, b, vectors.max(1 << 16), seed)? {
            RandomCheck::Refuted(cex) => Verdict::Refuted(Some(cex)),
            RandomCheck::Consistent => Verdict::Refuted(None),
        });
    }
    Ok(match cec_random(a, b, vectors, seed)? {
        RandomCheck::Refuted(cex) => Verdict::Refuted(Some(cex)),
        RandomCheck::Consistent => Verdict::Consistent,
    })
}

fn cmd_check(a: CheckArgs) -> Result<()> {
    let opts = ReadOptions { xor_extract: a.xor_extract };
    let (na, nb) = (read_network(&a.a, opts)?, read_network(&a.b, opts)?);
    if na.num_pis() != nb.num_pis() || na.num_pos() != nb.num_pos() {
        println!(
            "not equivalent: interface differs ({} PIs/{} POs vs {} PIs/{} POs)",
            na.num_pis(),
            na.num_pos(),
            nb.num_pis(),
            nb.num_pos()
        );
        return Err(Failure::NotEquivalent.into());
    }
    let v = equivalent_with_limit(&na, &nb, a.exhaustive_limit, a.seed, a.vectors)?;
    println!("{}", v.describe());
    if let Verdict::Refuted(cex) = v {
        if let Some(cex) = cex {
            let bits: String = cex.iter().map(|&b| if b { '1' } else { '0' }).collect();
            println!("counterexample: {bits}");
        }
        return Err(Failure::NotEquivalent.into());
    }
    Ok(())
}
