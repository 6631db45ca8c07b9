//! Customizable cost functions.
//!
//! A cost function is a pair of user functions: context propagation, which
//! derives a node's context from its fanins' contexts only, and node
//! contribution, which folds a node's context into the global cost. The
//! global cost of a network is the fold of every node's contribution in
//! topological order; the cost of a local rewrite is the fold over the nodes
//! it frees compared against the fold over the nodes it adds.
//!
//! # Writing a cost function
//!
//! ```
//! use anysyn::cost::{CostFunction, Global, NodeInfo};
//! use anysyn::xag::{NodeId, NodeKind};
//!
//! /// Number of XOR gates.
//! struct XorCount;
//!
//! impl CostFunction for XorCount {
//!     type Context = ();
//!     fn name(&self) -> &str { "xor_count" }
//!     fn pi_context(&self, _: usize, _: NodeId) {}
//!     fn constant_context(&self) {}
//!     fn propagate(&self, _: &NodeInfo, _: [&(); 2]) {}
//!     fn contribute(&self, g: Global, _: &(), kind: NodeKind) -> Global {
//!         g + (kind == NodeKind::Xor) as Global
//!     }
//! }
//! ```

use crate::resyn::{ForestGate, ForestRef, SolutionForest};
use crate::xag::{Network, NodeId, NodeKind};
use std::cmp::Ordering;
use std::fmt::Debug;
use std::sync::Arc;
use thiserror::Error;

pub type Global = u64;

/// Static attributes of the node whose context is being propagated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub id: NodeId,
    pub kind: NodeKind,
    pub fanout_count: u32,
}

pub trait CostFunction {
    type Context: Clone + PartialEq + Debug;

    /// Set when [`CostFunction::propagate`] reads `NodeInfo::fanout_count`.
    const USES_FANOUT: bool = false;

    fn name(&self) -> &str;

    fn pi_context(&self, pi_index: usize, node: NodeId) -> Self::Context;

    fn constant_context(&self) -> Self::Context;

    fn propagate(&self, node: &NodeInfo, fanins: [&Self::Context; 2]) -> Self::Context;

    fn contribute(&self, global: Global, ctx: &Self::Context, kind: NodeKind) -> Global;

    fn neutral(&self) -> Global {
        0
    }

    /// Optional total preorder on contexts, used to sort decomposition inputs
    /// and to pick among functionally equal divisors.
    fn order(&self, _a: &Self::Context, _b: &Self::Context) -> Option<Ordering> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation<T> {
    pub global: Global,
    /// Context per node id; `None` for dead slots.
    pub contexts: Vec<Option<T>>,
    /// Number of nodes visited, each exactly once.
    pub visited: usize,
}

pub(crate) fn node_info(net: &Network, id: NodeId) -> NodeInfo {
    NodeInfo {
        id,
        kind: net.kind(id),
        fanout_count: net.fanout_count(id),
    }
}

/// Context of gate `id` from the stored contexts of its fanins.
pub(crate) fn propagate_node<C: CostFunction>(
    cf: &C,
    net: &Network,
    id: NodeId,
    contexts: &[Option<C::Context>],
) -> C::Context {
    let f = net.fanins(id);
    let a = contexts[f[0].node() as usize].as_ref().expect("fanin context missing");
    let b = contexts[f[1].node() as usize].as_ref().expect("fanin context missing");
    cf.propagate(&node_info(net, id), [a, b])
}

/// Propagates contexts and folds contributions over all live nodes in
/// topological order.
pub fn evaluate<C: CostFunction>(net: &Network, cf: &C) -> Evaluation<C::Context> {
    let mut contexts: Vec<Option<C::Context>> = vec![None; net.size()];
    let mut pi_index = vec![usize::MAX; net.size()];
    for (i, &pi) in net.pis().iter().enumerate() {
        pi_index[pi as usize] = i;
    }
    let mut global = cf.neutral();
    let mut visited = 0;
    for id in net.topo_order() {
        visited += 1;
        let kind = net.kind(id);
        let ctx = match kind {
            NodeKind::Constant => cf.constant_context(),
            NodeKind::Pi => cf.pi_context(pi_index[id as usize], id),
            _ => propagate_node(cf, net, id, &contexts),
        };
        if kind != NodeKind::Constant {
            global = cf.contribute(global, &ctx, kind);
        }
        contexts[id as usize] = Some(ctx);
    }
    Evaluation {
        global,
        contexts,
        visited,
    }
}

/// Folds contributions of the listed nodes from the neutral element.
pub fn local_fold<'a, C: CostFunction + 'a>(
    cf: &C,
    nodes: impl IntoIterator<Item = (&'a C::Context, NodeKind)>,
) -> Global {
    nodes
        .into_iter()
        .fold(cf.neutral(), |g, (ctx, kind)| cf.contribute(g, ctx, kind))
}

/// Whether folding `ctx` twice equals folding it once (max-like folds). For
/// such folds, re-counting an existing node is free, so a candidate that
/// reuses a divisor is charged for the divisor's contribution.
fn contribution_is_idempotent<C: CostFunction>(cf: &C, ctx: &C::Context, kind: NodeKind) -> bool {
    let once = cf.contribute(cf.neutral(), ctx, kind);
    cf.contribute(once, ctx, kind) == once
}

/// Everything the candidate comparison needs to know about the window.
pub struct CandidateContext<'a, T> {
    /// Context of each problem divisor, indexed like the forest's divisors.
    pub divisor_contexts: &'a [T],
    pub divisor_kinds: &'a [NodeKind],
    pub constant: T,
    /// Fanout count the replacement will inherit from the root.
    pub root_fanout: u32,
    /// First id that is free in the network; used as placeholder ids.
    pub next_id: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub output: ForestRef,
    pub fold: Global,
    /// New gates the candidate adds to the network.
    pub gates: usize,
}

/// Picks the forest output with the lowest fold strictly below `mffc_fold`.
/// Ties prefer fewer gates, then the lexicographically smallest encoding.
pub fn compare_candidates<C: CostFunction>(
    cf: &C,
    forest: &SolutionForest,
    ctx: &CandidateContext<'_, C::Context>,
    mffc_fold: Global,
) -> Option<Choice> {
    let n_gates = forest.gates().len();
    // Shared per-gate contexts assuming single fanout.
    let mut shared: Vec<C::Context> = Vec::with_capacity(n_gates);
    for (i, g) in forest.gates().iter().enumerate() {
        let info = NodeInfo {
            id: ctx.next_id + i as NodeId,
            kind: g.kind.into(),
            fanout_count: 1,
        };
        let a = ref_context(forest, ctx, &shared, g.fanins[0]);
        let b = ref_context(forest, ctx, &shared, g.fanins[1]);
        let c = cf.propagate(&info, [a, b]);
        shared.push(c);
    }

    let mut best: Option<(Choice, Option<String>)> = None;
    let mut cone: Vec<usize> = Vec::new();
    let mut refs: Vec<u32> = vec![0; n_gates];
    let mut local: Vec<Option<C::Context>> = vec![None; n_gates];
    for &out in forest.outputs() {
        let fold = match forest.gate_index(out) {
            None => {
                let (c, kind) = match forest.divisor_index(out) {
                    Some(d) => (&ctx.divisor_contexts[d], ctx.divisor_kinds[d]),
                    None => (&ctx.constant, NodeKind::Constant),
                };
                if kind != NodeKind::Constant && contribution_is_idempotent(cf, c, kind) {
                    cf.contribute(cf.neutral(), c, kind)
                } else {
                    cf.neutral()
                }
            }
            Some(top) => {
                forest.cone(top, &mut cone);
                for &g in &cone {
                    for f in forest.gates()[g].fanins {
                        if let Some(i) = forest.gate_index(f) {
                            refs[i] += 1;
                        }
                    }
                }
                let shared_ok = cone.iter().all(|&g| g == top || refs[g] == 1);
                let fold = if shared_ok && (!C::USES_FANOUT || ctx.root_fanout == 1) {
                    local_fold(
                        cf,
                        cone.iter()
                            .map(|&g| (&shared[g], &forest.gates()[g]))
                            .filter(|(c, g)| charged(cf, c, g))
                            .map(|(c, g)| (c, g.kind.into())),
                    )
                } else {
                    // Recompute the cone with its actual fanout counts.
                    let mut g_fold = cf.neutral();
                    for &g in &cone {
                        let gate = &forest.gates()[g];
                        let pick = |r: ForestRef| -> &C::Context {
                            match forest.gate_index(r) {
                                Some(i) => local[i].as_ref().unwrap(),
                                None => ref_context(forest, ctx, &shared, r),
                            }
                        };
                        let info = NodeInfo {
                            id: ctx.next_id + g as NodeId,
                            kind: gate.kind.into(),
                            fanout_count: if g == top { ctx.root_fanout } else { refs[g] },
                        };
                        let c = cf.propagate(&info, [pick(gate.fanins[0]), pick(gate.fanins[1])]);
                        if charged(cf, &c, gate) {
                            g_fold = cf.contribute(g_fold, &c, gate.kind.into());
                        }
                        local[g] = Some(c);
                    }
                    g_fold
                };
                for &g in &cone {
                    refs[g] = 0;
                    local[g] = None;
                }
                fold
            }
        };
        if fold >= mffc_fold {
            continue;
        }
        let gates = forest.new_gate_count(out);
        let better = match &mut best {
            None => true,
            Some((b, enc)) => {
                if (fold, gates) != (b.fold, b.gates) {
                    (fold, gates) < (b.fold, b.gates)
                } else {
                    let mine = forest.encode(out);
                    let theirs = enc.get_or_insert_with(|| forest.encode(b.output));
                    mine < *theirs
                }
            }
        };
        if better {
            best = Some((
                Choice {
                    output: out,
                    fold,
                    gates,
                },
                None,
            ));
        }
    }
    best.map(|(c, _)| c)
}

/// New gates are always charged; reused ones only when re-counting them is
/// free of double counting.
fn charged<C: CostFunction>(cf: &C, ctx: &C::Context, gate: &ForestGate) -> bool {
    gate.existing.is_none() || contribution_is_idempotent(cf, ctx, gate.kind.into())
}

fn ref_context<'a, T>(
    forest: &SolutionForest,
    ctx: &'a CandidateContext<'_, T>,
    shared: &'a [T],
    r: ForestRef,
) -> &'a T {
    if let Some(i) = forest.gate_index(r) {
        &shared[i]
    } else if let Some(d) = forest.divisor_index(r) {
        &ctx.divisor_contexts[d]
    } else {
        &ctx.constant
    }
}

// ---- node sets ---------------------------------------------------------

/// Immutable bit set over node ids, cheap to clone.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct NodeSet(Arc<Vec<u64>>);

impl NodeSet {
    pub fn singleton(id: NodeId) -> Self {
        let mut v = vec![0u64; id as usize / 64 + 1];
        v[id as usize / 64] |= 1 << (id % 64);
        NodeSet(Arc::new(v))
    }

    /// `a ∪ b`, optionally with one extra element.
    pub fn union(a: &NodeSet, b: &NodeSet, extra: Option<NodeId>) -> Self {
        let (long, short) = if a.0.len() >= b.0.len() { (&a.0, &b.0) } else { (&b.0, &a.0) };
        let mut len = long.len();
        if let Some(e) = extra {
            len = len.max(e as usize / 64 + 1);
        }
        let mut v = Vec::with_capacity(len);
        v.extend(long.iter().zip(short.iter().chain(std::iter::repeat(&0))).map(|(x, y)| x | y));
        v.resize(len, 0);
        if let Some(e) = extra {
            v[e as usize / 64] |= 1 << (e % 64);
        }
        NodeSet(Arc::new(v))
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.0
            .get(id as usize / 64)
            .is_some_and(|w| (w >> (id % 64)) & 1 == 1)
    }

    pub fn intersection_len(a: &NodeSet, b: &NodeSet) -> usize {
        a.0.iter().zip(b.0.iter()).map(|(x, y)| (x & y).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| (w >> b) & 1 == 1).map(move |b| (i * 64 + b) as NodeId)
        })
    }
}

impl Debug for NodeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

// ---- built-in costs ----------------------------------------------------

/// Gate count, XOR counted as one gate.
pub struct XagSize;
/// Multiplicative complexity: number of AND gates.
pub struct Mc;
/// Logic depth, XOR counted as one level.
pub struct XagDepth;
/// AND depth with free XORs.
pub struct TDepth;
/// Sum over gates of the level difference between the two fanins.
pub struct TotalSkew;
/// Maximum over gates of the level difference between the two fanins.
pub struct MaxSkew;
/// Number of reconvergences: for each gate, the nodes found in both fanin
/// cones.
pub struct Reconv;
/// Factored-form literal cost without the constant PO term: single-fanout
/// gates count 2, multi-fanout gates count 1.
pub struct Fflc;
/// Length of the longest chain of consecutive AND gates.
pub struct AndChain;
/// Sum of structural support sizes over all gates.
pub struct SupportSum;
/// Gate count with XOR priced as three ANDs (non-specialized size baseline).
pub struct AigSize;
/// Depth with XOR priced as two AND levels (non-specialized depth baseline).
pub struct AigDepth;

macro_rules! unit_context {
    () => {
        type Context = ();
        fn pi_context(&self, _: usize, _: NodeId) {}
        fn constant_context(&self) {}
        fn propagate(&self, _: &NodeInfo, _: [&(); 2]) {}
    };
}

impl CostFunction for XagSize {
    unit_context!();
    fn name(&self) -> &str {
        "xag_size"
    }
    fn contribute(&self, g: Global, _: &(), kind: NodeKind) -> Global {
        g + kind.is_gate() as Global
    }
}

impl CostFunction for Mc {
    unit_context!();
    fn name(&self) -> &str {
        "mc"
    }
    fn contribute(&self, g: Global, _: &(), kind: NodeKind) -> Global {
        g + (kind == NodeKind::And) as Global
    }
}

impl CostFunction for AigSize {
    unit_context!();
    fn name(&self) -> &str {
        "aig_size"
    }
    fn contribute(&self, g: Global, _: &(), kind: NodeKind) -> Global {
        g + match kind {
            NodeKind::And => 1,
            NodeKind::Xor => 3,
            _ => 0,
        }
    }
}

macro_rules! level_cost {
    ($ty:ty, $name:literal, |$kind:ident| $step:expr) => {
        impl CostFunction for $ty {
            type Context = u32;
            fn name(&self) -> &str {
                $name
            }
            fn pi_context(&self, _: usize, _: NodeId) -> u32 {
                0
            }
            fn constant_context(&self) -> u32 {
                0
            }
            fn propagate(&self, node: &NodeInfo, f: [&u32; 2]) -> u32 {
                let $kind = node.kind;
                (*f[0]).max(*f[1]) + $step
            }
            fn contribute(&self, g: Global, ctx: &u32, _: NodeKind) -> Global {
                g.max(*ctx as Global)
            }
            fn order(&self, a: &u32, b: &u32) -> Option<Ordering> {
                Some(a.cmp(b))
            }
        }
    };
}

level_cost!(XagDepth, "xag_depth", |_k| 1);
level_cost!(TDepth, "t_depth", |k| (k == NodeKind::And) as u32);
level_cost!(AigDepth, "aig_depth", |k| if k == NodeKind::Xor { 2 } else { 1 });

impl CostFunction for AndChain {
    type Context = u32;
    fn name(&self) -> &str {
        "and_chain"
    }
    fn pi_context(&self, _: usize, _: NodeId) -> u32 {
        0
    }
    fn constant_context(&self) -> u32 {
        0
    }
    fn propagate(&self, node: &NodeInfo, f: [&u32; 2]) -> u32 {
        if node.kind == NodeKind::And {
            (*f[0]).max(*f[1]) + 1
        } else {
            0
        }
    }
    fn contribute(&self, g: Global, ctx: &u32, _: NodeKind) -> Global {
        g.max(*ctx as Global)
    }
    fn order(&self, a: &u32, b: &u32) -> Option<Ordering> {
        Some(a.cmp(b))
    }
}

/// Level plus the fanin level difference at the node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SkewContext {
    pub level: u32,
    pub skew: u32,
}

macro_rules! skew_cost {
    ($ty:ty, $name:literal, |$g:ident, $s:ident| $fold:expr) => {
        impl CostFunction for $ty {
            type Context = SkewContext;
            fn name(&self) -> &str {
                $name
            }
            fn pi_context(&self, _: usize, _: NodeId) -> SkewContext {
                SkewContext::default()
            }
            fn constant_context(&self) -> SkewContext {
                SkewContext::default()
            }
            fn propagate(&self, _: &NodeInfo, f: [&SkewContext; 2]) -> SkewContext {
                SkewContext {
                    level: f[0].level.max(f[1].level) + 1,
                    skew: f[0].level.abs_diff(f[1].level),
                }
            }
            fn contribute(&self, $g: Global, ctx: &SkewContext, _: NodeKind) -> Global {
                let $s = ctx.skew as Global;
                $fold
            }
            fn order(&self, a: &SkewContext, b: &SkewContext) -> Option<Ordering> {
                Some(a.level.cmp(&b.level))
            }
        }
    };
}

skew_cost!(TotalSkew, "total_skew", |g, s| g + s);
skew_cost!(MaxSkew, "max_skew", |g, s| g.max(s));

/// Transitive-fanin set (node included) plus the reconvergence count local
/// to the node.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ReconvContext {
    pub tfi: NodeSet,
    pub local: u32,
}

impl CostFunction for Reconv {
    type Context = ReconvContext;
    fn name(&self) -> &str {
        "reconv"
    }
    fn pi_context(&self, _: usize, node: NodeId) -> ReconvContext {
        ReconvContext {
            tfi: NodeSet::singleton(node),
            local: 0,
        }
    }
    fn constant_context(&self) -> ReconvContext {
        ReconvContext::default()
    }
    fn propagate(&self, node: &NodeInfo, f: [&ReconvContext; 2]) -> ReconvContext {
        ReconvContext {
            local: NodeSet::intersection_len(&f[0].tfi, &f[1].tfi) as u32,
            tfi: NodeSet::union(&f[0].tfi, &f[1].tfi, Some(node.id)),
        }
    }
    fn contribute(&self, g: Global, ctx: &ReconvContext, _: NodeKind) -> Global {
        g + ctx.local as Global
    }
}

impl CostFunction for Fflc {
    type Context = u32;
    const USES_FANOUT: bool = true;
    fn name(&self) -> &str {
        "fflc"
    }
    fn pi_context(&self, _: usize, _: NodeId) -> u32 {
        0
    }
    fn constant_context(&self) -> u32 {
        0
    }
    fn propagate(&self, node: &NodeInfo, _: [&u32; 2]) -> u32 {
        if node.fanout_count > 1 {
            1
        } else {
            2
        }
    }
    fn contribute(&self, g: Global, ctx: &u32, kind: NodeKind) -> Global {
        if kind.is_gate() {
            g + *ctx as Global
        } else {
            g
        }
    }
}

impl CostFunction for SupportSum {
    type Context = NodeSet;
    fn name(&self) -> &str {
        "support_sum"
    }
    fn pi_context(&self, _: usize, node: NodeId) -> NodeSet {
        NodeSet::singleton(node)
    }
    fn constant_context(&self) -> NodeSet {
        NodeSet::default()
    }
    fn propagate(&self, _: &NodeInfo, f: [&NodeSet; 2]) -> NodeSet {
        NodeSet::union(f[0], f[1], None)
    }
    fn contribute(&self, g: Global, ctx: &NodeSet, kind: NodeKind) -> Global {
        if kind.is_gate() {
            g + ctx.len() as Global
        } else {
            g
        }
    }
    fn order(&self, a: &NodeSet, b: &NodeSet) -> Option<Ordering> {
        Some(a.len().cmp(&b.len()))
    }
}

// ---- registry ----------------------------------------------------------

/// The ten built-in cost functions selectable by name.
pub const BUILTIN_COSTS: [&str; 10] = [
    "xag_size",
    "mc",
    "xag_depth",
    "t_depth",
    "total_skew",
    "max_skew",
    "reconv",
    "fflc",
    "and_chain",
    "support_sum",
];

/// Non-specialized baselines used for comparisons.
pub const BASELINE_COSTS: [&str; 2] = ["aig_size", "aig_depth"];

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown cost function `{name}` (registered: {})", registered_costs().join(", "))]
pub struct UnknownCost {
    pub name: String,
}

pub fn registered_costs() -> Vec<&'static str> {
    BUILTIN_COSTS.iter().chain(BASELINE_COSTS.iter()).copied().collect()
}

/// Generic callback for name-based dispatch.
pub trait CostVisitor {
    type Output;
    fn visit<C: CostFunction>(self, cf: &C) -> Self::Output;
}

pub fn with_cost<V: CostVisitor>(name: &str, v: V) -> Result<V::Output, UnknownCost> {
    Ok(match name {
        "xag_size" => v.visit(&XagSize),
        "mc" => v.visit(&Mc),
        "xag_depth" => v.visit(&XagDepth),
        "t_depth" => v.visit(&TDepth),
        "total_skew" => v.visit(&TotalSkew),
        "max_skew" => v.visit(&MaxSkew),
        "reconv" => v.visit(&Reconv),
        "fflc" => v.visit(&Fflc),
        "and_chain" => v.visit(&AndChain),
        "support_sum" => v.visit(&SupportSum),
        "aig_size" => v.visit(&AigSize),
        "aig_depth" => v.visit(&AigDepth),
        _ => return Err(UnknownCost { name: name.to_string() }),
    })
}

pub fn evaluate_by_name(net: &Network, name: &str) -> Result<Global, UnknownCost> {
    struct Eval<'a>(&'a Network);
    impl CostVisitor for Eval<'_> {
        type Output = Global;
        fn visit<C: CostFunction>(self, cf: &C) -> Global {
            evaluate(self.0, cf).global
        }
    }
    with_cost(name, Eval(net))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xag::Signal;

    #[test]
    fn empty_network_is_neutral() {
        let net = Network::new();
        for name in registered_costs() {
            assert_eq!(evaluate_by_name(&net, name).unwrap(), 0, "{name}");
        }
    }

    #[test]
    fn unknown_cost_lists_registry() {
        let err = evaluate_by_name(&Network::new(), "area").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("area") && msg.contains("support_sum"));
    }

    #[test]
    fn local_fold_examples() {
        let ctx = [(), (), ()];
        assert_eq!(local_fold(&Mc, ctx.iter().map(|c| (c, NodeKind::And))), 3);
        let levels = [3u32, 7, 5];
        assert_eq!(local_fold(&XagDepth, levels.iter().map(|c| (c, NodeKind::And))), 7);
        assert_eq!(local_fold(&XagDepth, std::iter::empty()), 0);
    }

    #[test]
    fn visits_every_live_node_once() {
        let mut net = Network::new();
        let a = net.create_pi();
        let b = net.create_pi();
        let x = net.create_xor(a, b);
        let y = net.create_and(x, a);
        net.create_po(y);
        let e = evaluate(&net, &XagSize);
        assert_eq!(e.visited, 5);
        assert_eq!(e.global, 2);
        assert_eq!(evaluate(&net, &Mc).global, 1);
        assert_eq!(evaluate(&net, &AigSize).global, 4);
        assert_eq!(evaluate(&net, &AigDepth).global, 3);
        assert_eq!(evaluate(&net, &TDepth).global, 1);
        assert_eq!(evaluate(&net, &TotalSkew).global, 1);
        assert_eq!(evaluate(&net, &SupportSum).global, 4);
        assert_eq!(evaluate(&net, &Reconv).global, 1);
        // y has a single PO fanout, x a single gate fanout
        assert_eq!(evaluate(&net, &Fflc).global, 4);
        net.create_po(x);
        assert_eq!(evaluate(&net, &Fflc).global, 3);
        let _ = Signal::FALSE;
    }

    #[test]
    fn node_set_ops() {
        let a = NodeSet::singleton(3);
        let b = NodeSet::singleton(130);
        let u = NodeSet::union(&a, &b, Some(64));
        assert_eq!(u.iter().collect::<Vec<_>>(), vec![3, 64, 130]);
        assert_eq!(NodeSet::intersection_len(&u, &b), 1);
        assert!(u.contains(64) && !u.contains(65));
        assert!(NodeSet::default().is_empty());
    }
}
