//! Browser bindings for the anysyn demo page.
//!
//! Every export takes and returns plain strings (network text in, JSON out)
//! so the functions are callable natively in tests.

use anysyn::cost::{evaluate_by_name, registered_costs};
use anysyn::gen::{motivating_a, motivating_b, motivating_c};
use anysyn::io::{read_any, write_xag, ReadOptions};
use anysyn::opt::{optimize as run_optimize, PassConfig};
use anysyn::verify::cec_exhaustive;
use anysyn::xag::Network;
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::*;

fn parse(text: &str) -> Result<Network, String> {
    read_any(text.as_bytes(), ReadOptions { xor_extract: true }).map_err(|e| e.to_string())
}

fn cost_table(net: &Network) -> Value {
    let m: Map<String, Value> = registered_costs()
        .into_iter()
        .map(|n| (n.to_string(), evaluate_by_name(net, n).expect("registered").into()))
        .collect();
    Value::Object(m)
}

/// Every registered cost of a network given as `.xag` or ASCII AIGER text.
#[wasm_bindgen]
pub fn eval_costs(text: &str) -> Result<String, String> {
    let net = parse(text)?;
    Ok(cost_table(&net).to_string())
}

/// Optimizes under `cost` for at most `iters` passes. Returns the new
/// network, both cost tables and the pass counters.
#[wasm_bindgen]
pub fn optimize(text: &str, cost: &str, iters: u32) -> Result<String, String> {
    let before = parse(text)?;
    let mut after = before.clone();
    let cfg = PassConfig {
        iterations: iters as usize,
        ..PassConfig::with_cost(cost)
    };
    let r = run_optimize(&mut after, &cfg).map_err(|e| e.to_string())?;
    let equivalent = cec_exhaustive(&before, &after).ok();
    Ok(json!({
        "network": write_xag(&after),
        "initial_cost": r.initial_cost,
        "final_cost": r.final_cost,
        "accepted": r.accepted,
        "attempted": r.attempted,
        "before": cost_table(&before),
        "after": cost_table(&after),
        "equivalent": equivalent,
    })
    .to_string())
}

/// The three hand-built networks of the motivating example with their costs.
#[wasm_bindgen]
pub fn motivating_example() -> String {
    let nets = [("N_A", motivating_a()), ("N_B", motivating_b()), ("N_C", motivating_c())];
    let v: Vec<Value> = nets
        .iter()
        .map(|(name, n)| json!({ "name": name, "network": write_xag(n), "costs": cost_table(n) }))
        .collect();
    Value::Array(v).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn costs(v: &Value) -> (u64, u64, u64, u64) {
        let g = |k: &str| v[k].as_u64().unwrap();
        (g("xag_size"), g("xag_depth"), g("max_skew"), g("mc"))
    }

    #[test]
    fn motivating_costs() {
        let v: Value = serde_json::from_str(&motivating_example()).unwrap();
        assert_eq!(v[0]["name"], "N_A");
        assert_eq!(costs(&v[0]["costs"]), (4, 2, 0, 4));
        assert_eq!(v[1]["costs"]["max_skew"], 1);
        assert_eq!(v[2]["costs"]["mc"], 3);
    }

    #[test]
    fn eval_round_trips_network_text() {
        let text = write_xag(&motivating_a());
        let v: Value = serde_json::from_str(&eval_costs(&text).unwrap()).unwrap();
        assert_eq!(costs(&v), (4, 2, 0, 4));
        assert!(eval_costs("and 1 2").is_err());
    }

    #[test]
    fn optimize_reaches_mc_three() {
        let text = write_xag(&motivating_a());
        let v: Value = serde_json::from_str(&optimize(&text, "mc", 2).unwrap()).unwrap();
        assert_eq!(v["initial_cost"], 4);
        assert_eq!(v["final_cost"], 3);
        assert_eq!(v["equivalent"], true);
        let again: Value = serde_json::from_str(&eval_costs(v["network"].as_str().unwrap()).unwrap()).unwrap();
        assert_eq!(again["mc"], 3);
        assert!(optimize(&text, "nope", 1).unwrap_err().contains("xag_size"));
    }
}
