use anysyn::gen::{self, RandomSpec};
use anysyn::io::{write_aiger, write_xag};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn anysyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anysyn"))
        .args(args)
        .env_remove("ANYSYN_COST")
        .output()
        .expect("run anysyn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn eval_json(path: &Path) -> HashMap<String, u64> {
    let o = anysyn(&["eval", s(path), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn random_net(gates: usize, seed: u64) -> anysyn::xag::Network {
    let mut spec = RandomSpec::new(8, gates, 4, seed);
    spec.xor_ratio = 0.3;
    gen::random_xag(&spec)
}

#[test]
fn optimize_motivating_example_under_mc() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "na.aag", &write_aiger(&gen::motivating_a()));
    let out = dir.path().join("out.aag");
    let stats = dir.path().join("stats.json");
    let o = anysyn(&[
        "optimize", "--cost", "mc", s(&input), "--out", s(&out), "--verify", "--xor-extract", "--stats-json", s(&stats),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = anysyn(&["eval", s(&out), "--cost", "mc", "--xor-extract", "--json"]);
    let v: HashMap<String, u64> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mc"], 3);

    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(j["initial_cost"], 4);
    assert_eq!(j["final_cost"], 3);
    assert!(j["accepted"].as_u64().unwrap() >= 1);
    assert!(j["attempted"].as_u64().unwrap() >= j["accepted"].as_u64().unwrap());
    for phase in ["traversal", "windowing", "resynthesis", "evaluation", "total"] {
        assert!(j["cpu_ms"][phase].as_f64().unwrap() >= 0.0, "{phase}");
    }
    let o = anysyn(&["check", s(&input), s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn unknown_cost_lists_registered_costs() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "na.xag", &write_xag(&gen::motivating_a()));
    let o = anysyn(&["optimize", "--cost", "area", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in anysyn::cost::registered_costs() {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn parse_error_exits_2() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "bad.aag", "aag 3 2 0 1 1\n2\n4\n6\n7 2 4\n");
    let o = anysyn(&["optimize", "--cost", "mc", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
    let o = anysyn(&["eval", s(&dir.path().join("missing.xag"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zero_iterations_leave_network_unchanged() {
    let dir = TempDir::new().unwrap();
    let text = write_xag(&random_net(120, 7));
    let input = put(&dir, "r.xag", &text);
    let stats = dir.path().join("s.json");
    let o = anysyn(&["optimize", "--cost", "xag_size", "--iters", "0", s(&input), "--stats-json", s(&stats)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), text);
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(j["initial_cost"], j["final_cost"]);
}

#[test]
fn eval_motivating_example() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "na.xag", &write_xag(&gen::motivating_a()));
    let v = eval_json(&input);
    assert_eq!(v["xag_size"], 4);
    assert_eq!(v["xag_depth"], 2);
    assert_eq!(v["max_skew"], 0);
    assert_eq!(v["mc"], 4);
    assert_eq!(v.len(), anysyn::cost::registered_costs().len());

    let o = anysyn(&["eval", s(&input), "--cost", "mc"]);
    assert_eq!(stdout(&o).split_whitespace().collect::<Vec<_>>(), ["mc", "4"]);
}

#[test]
fn eval_empty_network_is_zero() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "empty.xag", "");
    let v = eval_json(&input);
    assert!(v.values().all(|&x| x == 0), "{v:?}");
}

/// Recounts fanouts from the native text: gate fanins plus PO references.
fn fflc_from_text(text: &str) -> u64 {
    let mut fanout: HashMap<u32, u32> = HashMap::new();
    let mut gates = Vec::new();
    for line in text.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.as_slice() {
            ["and" | "xor", id, a, b] => {
                gates.push(id.parse::<u32>().unwrap());
                for l in [a, b] {
                    *fanout.entry(l.parse::<u32>().unwrap() / 2).or_default() += 1;
                }
            }
            ["po", l] => *fanout.entry(l.parse::<u32>().unwrap() / 2).or_default() += 1,
            _ => {}
        }
    }
    let multi = gates.iter().filter(|g| fanout.get(g).copied().unwrap_or(0) > 1).count();
    (2 * gates.len() - multi) as u64
}

#[test]
fn eval_fflc_matches_recount() {
    let dir = TempDir::new().unwrap();
    for seed in 0..8 {
        let text = write_xag(&random_net(60 + 20 * seed as usize, seed));
        let input = put(&dir, &format!("r{seed}.xag"), &text);
        assert_eq!(eval_json(&input)["fflc"], fflc_from_text(&text), "seed {seed}");
    }
}

#[test]
fn check_verdicts() {
    let dir = TempDir::new().unwrap();
    let net = random_net(150, 3);
    let a = put(&dir, "a.xag", &write_xag(&net));
    let o = anysyn(&["check", s(&a), s(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "equivalent");

    let b = dir.path().join("b.aag");
    let o = anysyn(&["optimize", "--cost", "fflc", s(&a), "--out", s(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = anysyn(&["check", s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // Complement the first PO.
    let text = write_xag(&net);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let k = lines.iter().position(|l| l.starts_with("po ")).unwrap();
    let lit: u32 = lines[k][3..].parse().unwrap();
    lines[k] = format!("po {}", lit ^ 1);
    let m = put(&dir, "m.xag", &(lines.join("\n") + "\n"));
    let o = anysyn(&["check", s(&a), s(&m)]);
    assert_eq!(o.status.code(), Some(1));
    let cex = stdout(&o);
    let line = cex.lines().find(|l| l.starts_with("counterexample: ")).expect("counterexample line");
    let bits = line.trim_start_matches("counterexample: ");
    assert_eq!(bits.len(), net.num_pis());

    // Random simulation also finds the flipped output.
    let o = anysyn(&["check", s(&a), s(&m), "--exhaustive-limit", "0", "--vectors", "256"]);
    assert_eq!(o.status.code(), Some(1));
    let o = anysyn(&["check", s(&a), s(&a), "--exhaustive-limit", "0", "--vectors", "256"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "consistent (not proven)");
}

#[test]
fn optimize_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "r.xag", &write_xag(&random_net(300, 11)));
    let first = anysyn(&["optimize", "--cost", "t_depth", "--iters", "2", s(&input)]);
    let second = anysyn(&["optimize", "--cost", "t_depth", "--iters", "2", s(&input)]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn env_overrides_defaults() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "na.xag", &write_xag(&gen::motivating_a()));
    let o = Command::new(env!("CARGO_BIN_EXE_anysyn"))
        .args(["optimize", s(&input)])
        .env("ANYSYN_COST", "mc")
        .env("ANYSYN_ITERS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), write_xag(&gen::motivating_a()));
}

#[test]
fn stats_reports_structure() {
    let dir = TempDir::new().unwrap();
    let input = put(&dir, "nc.xag", &write_xag(&gen::motivating_c()));
    let o = anysyn(&["stats", s(&input), "--json"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let net = gen::motivating_c();
    assert_eq!(j["pis"], net.num_pis());
    assert_eq!(j["gates"], net.num_gates());
    assert_eq!(j["and"].as_u64().unwrap() + j["xor"].as_u64().unwrap(), net.num_gates() as u64);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        ["file", "nodes", "cost_name", "initial", "final", "accepted", "cpu_ms"]
    );
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn bench_two_files() {
    let dir = TempDir::new().unwrap();
    put(&dir, "a.xag", &write_xag(&random_net(80, 1)));
    put(&dir, "b.aag", &write_aiger(&random_net(90, 2)));
    put(&dir, "broken.aag", "aag 1\n");
    put(&dir, "notes.txt", "ignored");
    let o = anysyn(&["bench", s(dir.path()), "--cost", "xag_size"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("broken.aag"));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "a.xag");
    assert_eq!(rows[1][0], "b.aag");
    assert!(rows[2][0].starts_with("geomean"));
    for r in &rows[..2] {
        let (init, fin): (u64, u64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(fin <= init);
    }

    let o = anysyn(&["bench", s(dir.path()), "--cost", "mc,xag_depth"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 6);
}

#[test]
fn bench_output_is_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    put(&dir, "a.xag", &write_xag(&random_net(200, 5)));
    put(&dir, "b.xag", &write_xag(&random_net(100, 6)));
    let strip = |o: &Output| -> Vec<Vec<String>> {
        csv_rows(&stdout(o)).into_iter().map(|mut r| { r.pop(); r }).collect()
    };
    let a = anysyn(&["bench", s(dir.path()), "--cost", "all"]);
    let b = anysyn(&["bench", s(dir.path()), "--cost", "all"]);
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(strip(&a).len(), 2 * 10 + 10);
}

#[test]
fn bench_empty_directory_fails() {
    let dir = TempDir::new().unwrap();
    let o = anysyn(&["bench", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

/// Runtime column against size on nets doubling in size.
#[test]
fn bench_runtime_grows_linearly() {
    let dir = TempDir::new().unwrap();
    for k in 0..4 {
        let n = 4000 << k;
        let mut spec = RandomSpec::new(n / 50, n, n / 50, 900 + k as u64);
        spec.xor_ratio = 0.25;
        spec.locality = 24;
        put(&dir, &format!("n{k}.xag"), &write_xag(&gen::random_xag(&spec)));
    }
    let o = anysyn(&["bench", s(dir.path()), "--cost", "xag_size"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let pts: Vec<(f64, f64)> = csv_rows(&stdout(&o))
        .iter()
        .filter(|r| !r[0].starts_with("geomean"))
        .map(|r| (r[1].parse::<f64>().unwrap().ln(), r[6].parse::<f64>().unwrap().ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    assert!((slope - 1.0).abs() <= 0.3, "slope {slope:.3} from {pts:?}");
}
