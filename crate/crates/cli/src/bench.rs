//! `bench`: optimize a directory of networks under one or more costs.

use crate::{check_cost, read_network, EngineArgs};
use anyhow::{bail, Context, Result};
use anysyn::cost::BUILTIN_COSTS;
use anysyn::opt::optimize;
use clap::Args;
use std::io::Write;
use std::path::PathBuf;

#[derive(Args)]
pub struct BenchArgs {
    /// Directory holding .aag, .aig or .xag files (not searched recursively).
    dir: PathBuf,
    /// Cost name, comma-separated list, or `all` for the ten built-ins.
    #[arg(long, env = "ANYSYN_COST", default_value = "all")]
    cost: String,
    /// CSV output path; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub file: String,
    pub nodes: usize,
    pub cost: String,
    pub initial: u64,
    pub final_: u64,
    pub accepted: usize,
    pub cpu_ms: f64,
}

pub const HEADER: [&str; 7] = ["file", "nodes", "cost_name", "initial", "final", "accepted", "cpu_ms"];

/// Geometric mean; the flag is set when some value was raised from 0 to 1.
pub fn geomean(values: impl IntoIterator<Item = f64>) -> (f64, bool) {
    let (mut sum, mut n, mut zero) = (0.0, 0usize, false);
    for v in values {
        let v = if v <= 0.0 {
            zero = true;
            1.0
        } else {
            v
        };
        sum += v.ln();
        n += 1;
    }
    if n == 0 {
        return (0.0, false);
    }
    ((sum / n as f64).exp(), zero)
}

fn bench_costs(arg: &str) -> Result<Vec<String>> {
    if arg == "all" {
        return Ok(BUILTIN_COSTS.iter().map(|s| s.to_string()).collect());
    }
    let names: Vec<String> = arg.split(',').map(|s| s.trim().to_string()).collect();
    for n in &names {
        check_cost(n)?;
    }
    Ok(names)
}

fn is_network(p: &std::path::Path) -> bool {
    matches!(p.extension().and_then(|e| e.to_str()), Some("aag" | "aig" | "xag"))
}

pub fn cmd_bench(a: BenchArgs) -> Result<()> {
    let costs = bench_costs(&a.cost)?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.dir)
        .with_context(|| format!("cannot list {}", a.dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_network(p))
        .collect();
    files.sort();

    let mut rows = Vec::new();
    let mut processed = 0;
    for path in &files {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let net = match read_network(path, a.engine.read_options()) {
            Ok(n) => n,
            Err(e) => {
                eprintln!("skipping {name}: {e:#}");
                continue;
            }
        };
        processed += 1;
        for cost in &costs {
            let mut work = net.clone();
            match optimize(&mut work, &a.engine.config(cost)) {
                Ok(r) => rows.push(Row {
                    file: name.clone(),
                    nodes: net.num_gates(),
                    cost: cost.clone(),
                    initial: r.initial_cost,
                    final_: r.final_cost,
                    accepted: r.accepted,
                    cpu_ms: r.times.total().as_secs_f64() * 1e3,
                }),
                Err(e) => eprintln!("skipping {name} under {cost}: {e}"),
            }
        }
    }
    if processed == 0 {
        bail!("no readable networks in {}", a.dir.display());
    }

    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let footnote = write_csv(sink, &costs, &rows)?;
    if footnote {
        eprintln!("* geomean rows marked with * replace zero values by 1");
    }
    Ok(())
}

/// Writes data rows followed by one geomean row per cost. Returns whether
/// any geomean needed the zero substitution.
pub fn write_csv(sink: impl Write, costs: &[String], rows: &[Row]) -> Result<bool> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.file.clone(),
            r.nodes.to_string(),
            r.cost.clone(),
            r.initial.to_string(),
            r.final_.to_string(),
            r.accepted.to_string(),
            format!("{:.3}", r.cpu_ms),
        ])?;
    }
    let mut any_zero = false;
    for cost in costs {
        let sel: Vec<&Row> = rows.iter().filter(|r| &r.cost == cost).collect();
        if sel.is_empty() {
            continue;
        }
        let cols = [
            geomean(sel.iter().map(|r| r.nodes as f64)),
            geomean(sel.iter().map(|r| r.initial as f64)),
            geomean(sel.iter().map(|r| r.final_ as f64)),
            geomean(sel.iter().map(|r| r.accepted as f64)),
            geomean(sel.iter().map(|r| r.cpu_ms)),
        ];
        let zero = cols.iter().any(|c| c.1);
        any_zero |= zero;
        w.write_record([
            if zero { "geomean*".to_string() } else { "geomean".to_string() },
            format!("{:.3}", cols[0].0),
            cost.clone(),
            format!("{:.3}", cols[1].0),
            format!("{:.3}", cols[2].0),
            format!("{:.3}", cols[3].0),
            format!("{:.3}", cols[4].0),
        ])?;
    }
    w.flush()?;
    Ok(any_zero)
}
