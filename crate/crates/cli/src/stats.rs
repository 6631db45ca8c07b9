//! JSON shapes written by `optimize --stats-json` and `stats --json`.

use anysyn::cost::evaluate_by_name;
use anysyn::opt::PassReport;
use anysyn::xag::{Network, NodeKind};
use serde::Serialize;
use std::time::Duration;

#[derive(Debug, Serialize)]
pub struct PhaseMs {
    pub traversal: f64,
    pub windowing: f64,
    pub resynthesis: f64,
    pub evaluation: f64,
    pub total: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Debug, Serialize)]
pub struct PassStats {
    pub cost: String,
    pub initial_cost: u64,
    pub final_cost: u64,
    pub accepted: usize,
    pub attempted: usize,
    pub passes: usize,
    pub rolled_back: bool,
    pub cpu_ms: PhaseMs,
}

impl PassStats {
    pub fn new(cost: &str, r: &PassReport) -> Self {
        PassStats {
            cost: cost.to_string(),
            initial_cost: r.initial_cost,
            final_cost: r.final_cost,
            accepted: r.accepted,
            attempted: r.attempted,
            passes: r.passes,
            rolled_back: r.rolled_back,
            cpu_ms: PhaseMs {
                traversal: ms(r.times.traversal),
                windowing: ms(r.times.windowing),
                resynthesis: ms(r.times.resynthesis),
                evaluation: ms(r.times.evaluation),
                total: ms(r.times.total()),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsSchema {
    pub pis: usize,
    pub pos: usize,
    pub gates: usize,
    pub and: usize,
    pub xor: usize,
    pub depth: u64,
}

impl StatsSchema {
    pub fn of(net: &Network) -> Self {
        StatsSchema {
            pis: net.num_pis(),
            pos: net.num_pos(),
            gates: net.num_gates(),
            and: net.count_kind(NodeKind::And),
            xor: net.count_kind(NodeKind::Xor),
            depth: evaluate_by_name(net, "xag_depth").expect("built-in cost"),
        }
    }
}
