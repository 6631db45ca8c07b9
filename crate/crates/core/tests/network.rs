mod common;

use anysyn::gen::{random_xag, RandomSpec};
use anysyn::opt::{optimize, PassConfig};
use anysyn::verify::{cec_exhaustive, po_tables};
use anysyn::window::reconv_cut;
use anysyn::xag::{Network, NodeId, NodeKind, Signal};
use proptest::prelude::*;
use std::collections::HashSet;

fn random_net(pis: usize, gates: usize, seed: u64) -> Network {
    let mut spec = RandomSpec::new(pis, gates, 4, seed);
    spec.xor_ratio = 0.35;
    spec.locality = 12;
    random_xag(&spec)
}

/// Fanout counts, dangling references and PO liveness, recounted from
/// scratch.
fn assert_consistent(net: &Network) {
    let fo = common::raw_fanouts(net);
    for id in 0..net.size() as NodeId {
        if !net.is_live(id) {
            continue;
        }
        assert_eq!(net.fanout_count(id), fo[id as usize], "fanout count of {id}");
        for f in net.fanins(id) {
            assert!(net.is_live(f.node()), "{id} references dead {}", f.node());
        }
    }
    for po in net.pos() {
        assert!(net.is_live(po.node()));
    }
}

/// A different structure for the function of gate `g` over its fanins.
fn rebuild(net: &mut Network, g: NodeId) -> Signal {
    let [x, y] = [net.fanins(g)[0], net.fanins(g)[1]];
    match net.kind(g) {
        // x ∧ y = x ∧ ¬(x ⊕ y)
        NodeKind::And => {
            let t = net.create_xor(x, y);
            net.create_and(x, !t)
        }
        // x ⊕ y = (x ∧ ¬y) ∨ (¬x ∧ y)
        _ => {
            let p = net.create_and(x, !y);
            let q = net.create_and(!x, y);
            net.create_or(p, q)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitution_preserves_functions(seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
        let mut net = random_net(8, 120, seed);
        let before = po_tables(&net).unwrap();
        for pick in picks {
            let gates: Vec<NodeId> = net.gates().collect();
            if gates.is_empty() {
                break;
            }
            let g = *pick.get(&gates);
            let s = rebuild(&mut net, g);
            if s.node() == g {
                continue;
            }
            net.substitute(g, s).unwrap();
            prop_assert!(!net.is_live(g));
            assert_consistent(&net);
        }
        prop_assert_eq!(po_tables(&net).unwrap(), before);
        let c = net.compact();
        prop_assert!(c.is_id_topological());
        prop_assert_eq!(po_tables(&c).unwrap(), po_tables(&net).unwrap());
    }

    #[test]
    fn mffc_matches_reachability(seed in any::<u64>()) {
        let net = random_net(6, 60, seed);
        for root in net.gates() {
            prop_assert_eq!(mffc_oracle(&net, root), net.mffc(root).into_iter().collect::<HashSet<_>>(), "root {}", root);
        }
    }

    #[test]
    fn reconvergent_cuts_are_cuts(seed in any::<u64>(), k in 2usize..=10) {
        let net = random_net(10, 150, seed);
        for root in net.gates() {
            let cut = reconv_cut(&net, root, k);
            prop_assert!(cut.leaves.len() <= k.max(2));
            let leaves: HashSet<NodeId> = cut.leaves.iter().copied().collect();
            // every path from the root down to a PI or constant stops at a leaf
            let mut stack = vec![root];
            let mut seen = HashSet::new();
            while let Some(n) = stack.pop() {
                if !seen.insert(n) || (n != root && leaves.contains(&n)) {
                    continue;
                }
                prop_assert!(net.is_gate(n), "path from {} escapes the cut at {}", root, n);
                stack.extend(net.fanins(n).iter().map(|f| f.node()));
            }
        }
    }
}

/// Gates in the fanin cone of `root` from which every path to a sink (PO
/// or dangling gate) passes through `root`.
fn mffc_oracle(net: &Network, root: NodeId) -> HashSet<NodeId> {
    let mut reached = HashSet::new();
    let mut stack: Vec<NodeId> = net.pos().iter().map(|s| s.node()).collect();
    stack.extend(net.gates().filter(|&g| net.fanout_count(g) == 0));
    while let Some(n) = stack.pop() {
        if n == root || !reached.insert(n) {
            continue;
        }
        stack.extend(net.fanins(n).iter().map(|f| f.node()));
    }
    let mut cone = HashSet::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        if !net.is_gate(n) || reached.contains(&n) || !cone.insert(n) {
            continue;
        }
        stack.extend(net.fanins(n).iter().map(|f| f.node()));
    }
    cone
}

/// A 5-PI network on which a queued cascade replacement once merged gates
/// with the wrong polarity.
#[test]
fn cascade_regression_net() {
    let net = common::small_corpus(5, 3).swap_remove(4);
    for cost in anysyn::cost::BUILTIN_COSTS {
        let mut n = net.clone();
        optimize(&mut n, &PassConfig::with_cost(cost)).unwrap();
        assert_eq!(cec_exhaustive(&net, &n), Ok(true), "{cost}");
        assert_consistent(&n);
    }
}
