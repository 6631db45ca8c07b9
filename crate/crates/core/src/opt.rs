//! The greedy resubstitution pass.
//!
//! Nodes are visited in topological order. For each gate a window is built,
//! a solution forest is enumerated over its divisors, and the cheapest
//! candidate under the active cost function replaces the root when its local
//! fold is strictly below the fold of the root's MFFC.

use crate::cost::{
    compare_candidates, evaluate, local_fold, node_info, with_cost, CandidateContext, CostFunction, CostVisitor,
    Global, UnknownCost,
};
use crate::resyn::{resynthesize_with, Divisor, ForestRef, Reuse, ResynLimits, ResynProblem, SolutionForest};
use crate::tt::{TruthTable, MAX_VARS};
use crate::verify;
use crate::window::{build_window, reconv_cut, Window};
use crate::xag::{Network, NodeId, NodeKind, Signal};
use rustc_hash::FxHashSet;
use std::time::Duration;
use web_time::Instant;
use thiserror::Error;

/// Widest network checked exhaustively by `verify_each`; wider ones are
/// checked with random simulation.
const PASS_CHECK_EXHAUSTIVE: usize = 16;

/// Largest network on which debug builds walk the full TFI of every
/// replacement looking for a cycle.
const DEBUG_CYCLE_CHECK_NODES: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassConfig {
    pub cost_name: String,
    pub max_leaves: usize,
    pub max_divisors: usize,
    pub max_gates: usize,
    pub iterations: usize,
    /// Seed for the random simulation used by `verify_each` on networks too
    /// wide for exhaustive checking. The pass itself is deterministic.
    pub seed: u64,
    /// Check every substitution locally and the whole network at pass end.
    pub verify_each: bool,
    /// Stop a pass after this many accepted substitutions.
    pub max_accepted: Option<usize>,
    pub limits: ResynLimits,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            cost_name: "xag_size".into(),
            max_leaves: 8,
            max_divisors: 150,
            max_gates: 3,
            iterations: 1,
            seed: 0,
            verify_each: false,
            max_accepted: None,
            limits: ResynLimits::default(),
        }
    }
}

impl PassConfig {
    pub fn with_cost(cost: &str) -> Self {
        PassConfig {
            cost_name: cost.into(),
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), OptError> {
        if self.max_leaves < 2 || self.max_leaves > MAX_VARS {
            return Err(OptError::InvalidConfig(format!(
                "max_leaves must be in 2..={MAX_VARS}, got {}",
                self.max_leaves
            )));
        }
        if self.max_divisors == 0 {
            return Err(OptError::InvalidConfig("max_divisors must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PhaseTimes {
    pub traversal: Duration,
    pub windowing: Duration,
    pub resynthesis: Duration,
    pub evaluation: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.traversal + self.windowing + self.resynthesis + self.evaluation
    }

    fn add(&mut self, o: &PhaseTimes) {
        self.traversal += o.traversal;
        self.windowing += o.windowing;
        self.resynthesis += o.resynthesis;
        self.evaluation += o.evaluation;
    }
}

/// One accepted substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub root: NodeId,
    pub mffc_fold: Global,
    pub candidate_fold: Global,
    pub new_gates: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PassReport {
    pub initial_cost: Global,
    pub final_cost: Global,
    pub attempted: usize,
    pub accepted: usize,
    pub passes: usize,
    /// Set when a pass ended above its initial cost and was undone.
    pub rolled_back: bool,
    pub times: PhaseTimes,
    pub steps: Vec<Step>,
}

#[derive(Debug, Error)]
pub enum OptError {
    #[error(transparent)]
    UnknownCost(#[from] UnknownCost),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("verification failed at node {root}: {detail}")]
    Verification { root: NodeId, detail: String },
}

/// One pass under the cost named in `cfg`.
pub fn optimize_pass(net: &mut Network, cfg: &PassConfig) -> Result<PassReport, OptError> {
    struct V<'a>(&'a mut Network, &'a PassConfig);
    impl CostVisitor for V<'_> {
        type Output = Result<PassReport, OptError>;
        fn visit<C: CostFunction>(self, cf: &C) -> Self::Output {
            optimize_pass_with(self.0, cf, self.1)
        }
    }
    with_cost(&cfg.cost_name, V(net, cfg))?
}

/// Up to `cfg.iterations` passes under the cost named in `cfg`.
pub fn optimize(net: &mut Network, cfg: &PassConfig) -> Result<PassReport, OptError> {
    struct V<'a>(&'a mut Network, &'a PassConfig);
    impl CostVisitor for V<'_> {
        type Output = Result<PassReport, OptError>;
        fn visit<C: CostFunction>(self, cf: &C) -> Self::Output {
            optimize_with(self.0, cf, self.1)
        }
    }
    with_cost(&cfg.cost_name, V(net, cfg))?
}

/// Runs passes until `cfg.iterations` is reached or a pass accepts nothing.
/// The network is compacted before the first pass and after each pass.
pub fn optimize_with<C: CostFunction>(net: &mut Network, cf: &C, cfg: &PassConfig) -> Result<PassReport, OptError> {
    cfg.validate()?;
    if cfg.iterations == 0 {
        let g = evaluate(net, cf).global;
        return Ok(PassReport {
            initial_cost: g,
            final_cost: g,
            ..Default::default()
        });
    }
    *net = net.compact();
    let mut total = PassReport::default();
    for i in 0..cfg.iterations {
        let r = optimize_pass_with(net, cf, cfg)?;
        *net = net.compact();
        if i == 0 {
            total.initial_cost = r.initial_cost;
        }
        total.final_cost = r.final_cost;
        total.attempted += r.attempted;
        total.accepted += r.accepted;
        total.passes += 1;
        total.rolled_back |= r.rolled_back;
        total.times.add(&r.times);
        total.steps.extend(r.steps);
        if r.accepted == 0 {
            break;
        }
    }
    Ok(total)
}

/// Keeps per-node contexts in step with a network that grows during the
/// pass.
struct Contexts<'c, C: CostFunction> {
    cf: &'c C,
    ctx: Vec<Option<C::Context>>,
    pi_index: Vec<usize>,
}

impl<'c, C: CostFunction> Contexts<'c, C> {
    fn get(&mut self, net: &Network, id: NodeId) -> C::Context {
        if self.ctx.len() < net.size() {
            self.ctx.resize(net.size(), None);
        }
        if let Some(c) = &self.ctx[id as usize] {
            return c.clone();
        }
        // Missing contexts belong to nodes created by substitution; their
        // fanins are computed first.
        let mut stack = vec![id];
        while let Some(&n) = stack.last() {
            if self.ctx[n as usize].is_some() {
                stack.pop();
                continue;
            }
            let pending: Vec<NodeId> = net
                .fanins(n)
                .iter()
                .map(|f| f.node())
                .filter(|&f| self.ctx[f as usize].is_none())
                .collect();
            if pending.is_empty() {
                stack.pop();
                let c = self.compute(net, n);
                self.ctx[n as usize] = Some(c);
            } else {
                stack.extend(pending);
            }
        }
        self.ctx[id as usize].clone().unwrap()
    }

    fn compute(&self, net: &Network, n: NodeId) -> C::Context {
        match net.kind(n) {
            NodeKind::Constant => self.cf.constant_context(),
            NodeKind::Pi => self.cf.pi_context(self.pi_index[n as usize], n),
            _ => {
                let f = net.fanins(n);
                let a = self.ctx[f[0].node() as usize].as_ref().expect("fanin context");
                let b = self.ctx[f[1].node() as usize].as_ref().expect("fanin context");
                self.cf.propagate(&node_info(net, n), [a, b])
            }
        }
    }

    /// Recomputes the context of gate `n` from its fanins' stored contexts.
    fn refresh(&mut self, net: &Network, n: NodeId) -> C::Context {
        for f in net.fanins(n) {
            self.get(net, f.node());
        }
        let c = self.compute(net, n);
        self.ctx[n as usize] = Some(c.clone());
        c
    }
}

/// One resubstitution pass under `cf`.
pub fn optimize_pass_with<C: CostFunction>(
    net: &mut Network,
    cf: &C,
    cfg: &PassConfig,
) -> Result<PassReport, OptError> {
    cfg.validate()?;
    let pass_start = Instant::now();
    let mut times = PhaseTimes::default();
    let snapshot = net.clone();

    let t = Instant::now();
    let eval = evaluate(net, cf);
    times.evaluation += t.elapsed();
    let initial = eval.global;
    let mut pi_index = vec![usize::MAX; net.size()];
    for (i, &pi) in net.pis().iter().enumerate() {
        pi_index[pi as usize] = i;
    }
    let mut ctx = Contexts {
        cf,
        ctx: eval.contexts,
        pi_index,
    };

    let mut report = PassReport {
        initial_cost: initial,
        ..Default::default()
    };
    for root in net.topo_order() {
        if cfg.max_accepted.is_some_and(|m| report.accepted >= m) {
            break;
        }
        if !net.is_live(root) || !net.is_gate(root) {
            continue;
        }
        let t = Instant::now();
        ctx.refresh(net, root);
        times.evaluation += t.elapsed();

        let t = Instant::now();
        let cut = reconv_cut(net, root, cfg.max_leaves);
        let window = build_window(net, &cut, cfg.max_divisors).expect("cut width is validated");
        times.windowing += t.elapsed();
        report.attempted += 1;

        let t = Instant::now();
        // Window contexts are recomputed from the leaves so that members
        // reflect the current structure.
        for &l in window.leaves() {
            ctx.get(net, l);
        }
        for &m in &window.members {
            ctx.refresh(net, m);
        }
        let mffc_ctx: Vec<(C::Context, NodeKind)> = window
            .mffc
            .iter()
            .map(|&m| (ctx.get(net, m), net.kind(m)))
            .collect();
        let mffc_fold = local_fold(cf, mffc_ctx.iter().map(|(c, k)| (c, *k)));
        let div_ctx: Vec<C::Context> = window.divisors.iter().map(|d| ctx.get(net, d.node())).collect();
        times.evaluation += t.elapsed();

        let t = Instant::now();
        let problem = make_problem(cf, &window, &div_ctx, cfg.max_gates);
        let forest = {
            let mffc: FxHashSet<NodeId> = window.mffc.iter().copied().collect();
            let divisor_nodes: FxHashSet<NodeId> = window.divisors.iter().map(|d| d.node()).collect();
            let net_ref: &Network = net;
            let mut filter = |kind, a: Signal, b: Signal| match net_ref.lookup_gate(kind, a, b) {
                None => Reuse::New,
                Some(s) => {
                    let n = s.node();
                    if n == root || mffc.contains(&n) || divisor_nodes.contains(&n) || !net_ref.is_gate(n) {
                        Reuse::Prune
                    } else {
                        Reuse::Existing(s)
                    }
                }
            };
            resynthesize_with(&problem, &cfg.limits, &mut filter)
        };
        times.resynthesis += t.elapsed();

        let t = Instant::now();
        let kinds: Vec<NodeKind> = window.divisors.iter().map(|d| net.kind(d.node())).collect();
        let cand = CandidateContext {
            divisor_contexts: &div_ctx,
            divisor_kinds: &kinds,
            constant: cf.constant_context(),
            root_fanout: net.fanout_count(root),
            next_id: net.size() as NodeId,
        };
        let choice = compare_candidates(cf, &forest, &cand, mffc_fold);
        times.evaluation += t.elapsed();
        let Some(choice) = choice else { continue };

        let before = net.size();
        let new_sig = materialize(net, &forest, &window.divisors, choice.output);
        if new_sig.node() == root {
            continue;
        }
        if cfg.verify_each {
            let got = signal_table(net, &window, new_sig);
            if got != window.target {
                return Err(OptError::Verification {
                    root,
                    detail: format!(
                        "candidate {} computes {:?}, expected {:?}",
                        forest.encode(choice.output),
                        got,
                        window.target
                    ),
                });
            }
        }
        debug_assert!(
            net.size() > DEBUG_CYCLE_CHECK_NODES || !net.in_tfi(new_sig.node(), root),
            "candidate depends on its root"
        );
        net.substitute_unchecked(root, new_sig);
        let t = Instant::now();
        for id in before..net.size() {
            if net.is_live(id as NodeId) {
                ctx.get(net, id as NodeId);
            }
        }
        times.evaluation += t.elapsed();
        report.accepted += 1;
        report.steps.push(Step {
            root,
            mffc_fold,
            candidate_fold: choice.fold,
            new_gates: choice.gates,
        });
    }

    let t = Instant::now();
    let mut final_cost = evaluate(net, cf).global;
    times.evaluation += t.elapsed();
    if cfg.verify_each {
        check_equivalent(&snapshot, net, cfg.seed)?;
    }
    if final_cost > initial {
        *net = snapshot;
        final_cost = initial;
        report.rolled_back = true;
        report.accepted = 0;
        report.steps.clear();
    }
    report.final_cost = final_cost;
    report.passes = 1;
    let measured = times.windowing + times.resynthesis + times.evaluation;
    times.traversal = pass_start.elapsed().saturating_sub(measured);
    report.times = times;
    Ok(report)
}

fn make_problem<C: CostFunction>(cf: &C, w: &Window, div_ctx: &[C::Context], max_gates: usize) -> ResynProblem {
    let n = w.divisors.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        cf.order(&div_ctx[a], &div_ctx[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(w.divisors[a].node().cmp(&w.divisors[b].node()))
    });
    let mut rank = vec![0u32; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u32;
    }
    ResynProblem {
        target: w.target.clone(),
        divisors: w
            .divisors
            .iter()
            .enumerate()
            .map(|(i, &s)| Divisor {
                signal: s,
                table: w.table(s).expect("divisor is simulated"),
                rank: rank[i],
            })
            .collect(),
        leaves: (0..w.leaves().len()).collect(),
        max_gates,
    }
}

/// Builds the circuit of `r` in the network; gates that exist are reused
/// through structural hashing.
pub fn materialize(net: &mut Network, forest: &SolutionForest, divisors: &[Signal], r: ForestRef) -> Signal {
    let s = if r.index() == 0 {
        Signal::FALSE
    } else if let Some(d) = forest.divisor_index(r) {
        divisors[d]
    } else {
        let g = forest.gates()[forest.gate_index(r).unwrap()].clone();
        let a = materialize(net, forest, divisors, g.fanins[0]);
        let b = materialize(net, forest, divisors, g.fanins[1]);
        net.create_gate(g.kind, a, b)
    };
    s.complement_if(r.is_complemented())
}

/// Function of `s` over the window leaves, simulating nodes outside the
/// window down to window nodes.
fn signal_table(net: &Network, w: &Window, s: Signal) -> TruthTable {
    fn rec(net: &Network, w: &Window, n: NodeId, memo: &mut rustc_hash::FxHashMap<NodeId, TruthTable>) -> TruthTable {
        if let Some(t) = w.tables.get(&n).or_else(|| memo.get(&n)) {
            return t.clone();
        }
        let f = net.fanins(n);
        assert!(net.is_gate(n), "node {n} is outside the window support");
        let a = rec(net, w, f[0].node(), memo).complement_if(f[0].is_complemented());
        let b = rec(net, w, f[1].node(), memo).complement_if(f[1].is_complemented());
        let t = match net.kind(n) {
            NodeKind::And => a.and(&b),
            _ => a.xor(&b),
        };
        memo.insert(n, t.clone());
        t
    }
    let mut memo = Default::default();
    rec(net, w, s.node(), &mut memo).complement_if(s.is_complemented())
}

fn check_equivalent(before: &Network, after: &Network, seed: u64) -> Result<(), OptError> {
    let detail = if before.num_pis() <= PASS_CHECK_EXHAUSTIVE {
        match verify::cec_exhaustive(before, after) {
            Ok(true) => return Ok(()),
            Ok(false) => "networks differ".to_string(),
            Err(e) => e.to_string(),
        }
    } else {
        match verify::cec_random(before, after, 4096, seed) {
            Ok(verify::RandomCheck::Consistent) => return Ok(()),
            Ok(verify::RandomCheck::Refuted(cex)) => format!("counterexample {cex:?}"),
            Err(e) => e.to_string(),
        }
    };
    Err(OptError::Verification { root: 0, detail })
}
