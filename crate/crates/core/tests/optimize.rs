mod common;

use anysyn::cost::{evaluate_by_name, BUILTIN_COSTS};
use anysyn::io::write_xag;
use anysyn::opt::{optimize, optimize_pass, PassConfig};
use anysyn::verify::{cec_random, simulate_words, RandomCheck};
use anysyn::xag::{Network, NodeId, NodeKind};

/// Longest PI-to-PO path counted in gates, by memoized recursion.
fn depth_oracle(net: &Network) -> u64 {
    fn go(net: &Network, n: NodeId, memo: &mut Vec<Option<u64>>) -> u64 {
        if let Some(d) = memo[n as usize] {
            return d;
        }
        let d = if net.is_gate(n) {
            1 + net.fanins(n).iter().map(|f| go(net, f.node(), memo)).max().unwrap()
        } else {
            0
        };
        memo[n as usize] = Some(d);
        d
    }
    let mut memo = vec![None; net.size()];
    net.pos().iter().map(|p| go(net, p.node(), &mut memo)).max().unwrap_or(0)
}

#[test]
fn reported_cost_matches_recomputation() {
    for (k, net) in common::small_corpus(12, 21).into_iter().enumerate() {
        for cost in BUILTIN_COSTS {
            let mut n = net.clone();
            let r = optimize(&mut n, &PassConfig::with_cost(cost)).unwrap();
            assert_eq!(r.final_cost, evaluate_by_name(&n, cost).unwrap(), "net {k} {cost}");
            assert!(r.final_cost <= r.initial_cost);
        }
        let mut n = net.clone();
        optimize(&mut n, &PassConfig::with_cost("xag_depth")).unwrap();
        assert_eq!(evaluate_by_name(&n, "xag_size").unwrap(), n.num_gates() as u64);
        assert_eq!(evaluate_by_name(&n, "mc").unwrap(), n.count_kind(NodeKind::And) as u64);
        assert_eq!(evaluate_by_name(&n, "xag_depth").unwrap(), depth_oracle(&n), "net {k}");
    }
}

/// One accepted step removes at least the bounded MFFC and adds at most the
/// candidate's new gates.
#[test]
fn single_step_delta_is_bounded() {
    let mut steps = 0;
    for net in common::small_corpus(30, 5) {
        let net = net.compact();
        for cost in ["xag_size", "mc"] {
            let mut n = net.clone();
            let cfg = PassConfig {
                max_accepted: Some(1),
                ..PassConfig::with_cost(cost)
            };
            let r = optimize_pass(&mut n, &cfg).unwrap();
            if r.accepted == 0 {
                continue;
            }
            let s = &r.steps[0];
            assert!(s.candidate_fold < s.mffc_fold);
            assert!(r.final_cost + s.mffc_fold <= r.initial_cost + s.candidate_fold, "{cost} {s:?} {r:?}");
            if cost == "xag_size" {
                assert!(s.candidate_fold as usize <= s.new_gates);
            }
            steps += 1;
        }
    }
    assert!(steps > 20, "only {steps} nets improved");
}

#[test]
fn optimization_is_deterministic() {
    for net in common::small_corpus(6, 77) {
        for cost in ["fflc", "t_depth", "support_sum"] {
            let cfg = PassConfig {
                iterations: 3,
                ..PassConfig::with_cost(cost)
            };
            let (mut a, mut b) = (net.clone(), net.clone());
            let ra = optimize(&mut a, &cfg).unwrap();
            let rb = optimize(&mut b, &cfg).unwrap();
            assert_eq!(write_xag(&a), write_xag(&b));
            assert_eq!((ra.final_cost, ra.accepted, ra.steps), (rb.final_cost, rb.accepted, rb.steps));
        }
    }
}

#[test]
fn random_check_refutes_with_valid_counterexample() {
    let mut spec = anysyn::gen::RandomSpec::new(20, 400, 6, 12);
    spec.xor_ratio = 0.3;
    let a = anysyn::gen::random_xag(&spec);
    let mut b = Network::new();
    let pis: Vec<_> = (0..a.num_pis()).map(|_| b.create_pi()).collect();
    // copy `a` with the last PO complemented
    let mut map = vec![b.get_constant(false); a.size()];
    for (k, &p) in a.pis().iter().enumerate() {
        map[p as usize] = pis[k];
    }
    for g in a.topo_order() {
        if !a.is_gate(g) {
            continue;
        }
        let f = a.fanins(g);
        let x = map[f[0].node() as usize].complement_if(f[0].is_complemented());
        let y = map[f[1].node() as usize].complement_if(f[1].is_complemented());
        map[g as usize] = if a.kind(g) == NodeKind::And { b.create_and(x, y) } else { b.create_xor(x, y) };
    }
    let last = a.num_pos() - 1;
    for (k, po) in a.pos().iter().enumerate() {
        let s = map[po.node() as usize].complement_if(po.is_complemented());
        b.create_po(if k == last { !s } else { s });
    }

    assert_eq!(cec_random(&a, &a, 4096, 3), Ok(RandomCheck::Consistent));
    let cex = match cec_random(&a, &b, 4096, 3).unwrap() {
        RandomCheck::Refuted(c) => c,
        RandomCheck::Consistent => panic!("flipped output not detected"),
    };
    assert_eq!(cec_random(&a, &b, 4096, 3), Ok(RandomCheck::Refuted(cex.clone())));
    let words: Vec<Vec<u64>> = cex.iter().map(|&v| vec![if v { 1 } else { 0 }]).collect();
    let (oa, ob) = (simulate_words(&a, &words), simulate_words(&b, &words));
    assert_ne!(oa[last][0] & 1, ob[last][0] & 1);
}
