//! Network generators: random XAGs, arithmetic circuits, and the small
//! hand-built networks used as fixtures.

use crate::xag::{GateKind, Network, NodeKind, Signal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub pis: usize,
    pub gates: usize,
    pub pos: usize,
    /// Probability that a gate is an XOR.
    pub xor_ratio: f64,
    /// Fanins are drawn from the most recent `locality` nodes with
    /// probability 3/4, which keeps the graphs deep and reconvergent.
    pub locality: usize,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(pis: usize, gates: usize, pos: usize, seed: u64) -> Self {
        RandomSpec {
            pis,
            gates,
            pos,
            xor_ratio: 0.3,
            locality: 32,
            seed,
        }
    }
}

/// Random XAG. Gates that simplify or hash to existing nodes are retried, so
/// the result has `spec.gates` gates unless the input space is exhausted.
/// POs are the last gates plus random picks; dangling gates are removed.
pub fn random_xag(spec: &RandomSpec) -> Network {
    assert!(spec.pis >= 2, "need at least two PIs");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut net = Network::new();
    let mut nodes: Vec<Signal> = (0..spec.pis).map(|_| net.create_pi()).collect();
    let mut attempts = 0;
    while net.num_gates() < spec.gates && attempts < spec.gates * 20 {
        attempts += 1;
        let pick = |rng: &mut ChaCha8Rng, nodes: &[Signal]| -> Signal {
            let n = nodes.len();
            let i = if rng.gen_bool(0.75) && n > spec.locality {
                n - 1 - rng.gen_range(0..spec.locality)
            } else {
                rng.gen_range(0..n)
            };
            nodes[i].complement_if(rng.gen_bool(0.5))
        };
        let a = pick(&mut rng, &nodes);
        let b = pick(&mut rng, &nodes);
        let kind = if rng.gen_bool(spec.xor_ratio) {
            GateKind::Xor
        } else {
            GateKind::And
        };
        let before = net.size();
        let s = net.create_gate(kind, a, b);
        if net.size() > before {
            nodes.push(s.regular());
        }
    }
    let gates: Vec<Signal> = nodes[spec.pis..].to_vec();
    let mut used = vec![false; net.size()];
    for (k, g) in gates.iter().rev().enumerate() {
        if k >= spec.pos {
            break;
        }
        net.create_po(g.complement_if(rng.gen_bool(0.5)));
        used[g.node() as usize] = true;
    }
    // Gates nobody reads become outputs as well, keeping the size intact.
    for g in &gates {
        if net.fanout_count(g.node()) == 0 && !used[g.node() as usize] {
            net.create_po(*g);
        }
    }
    if gates.is_empty() {
        for k in 0..spec.pos {
            let s = nodes[k % nodes.len()];
            net.create_po(s);
        }
    }
    net
}

/// Replaces every XOR by three ANDs, `a ⊕ b = ¬(¬(a ∧ ¬b) ∧ ¬(¬a ∧ b))`.
pub fn lower_to_aig(net: &Network) -> Network {
    let mut out = Network::new();
    let mut map = vec![Signal::FALSE; net.size()];
    for (i, &pi) in net.pis().iter().enumerate() {
        map[pi as usize] = out.create_named_pi(net.pi_names()[i].clone());
    }
    for id in net.topo_order() {
        let kind = net.kind(id);
        if !kind.is_gate() {
            continue;
        }
        let f = net.fanins(id);
        let a = map[f[0].node() as usize].complement_if(f[0].is_complemented());
        let b = map[f[1].node() as usize].complement_if(f[1].is_complemented());
        map[id as usize] = if kind == NodeKind::And {
            out.create_and(a, b)
        } else {
            let p = out.create_and(a, !b);
            let q = out.create_and(!a, b);
            !out.create_and(!p, !q)
        };
    }
    for po in net.pos() {
        out.create_po(map[po.node() as usize].complement_if(po.is_complemented()));
    }
    out.sweep_dangling();
    out.compact()
}

/// `bits`-bit ripple-carry adder with carry out.
pub fn ripple_adder(bits: usize) -> Network {
    let mut net = Network::new();
    let a: Vec<Signal> = (0..bits).map(|i| net.create_named_pi(format!("a{i}"))).collect();
    let b: Vec<Signal> = (0..bits).map(|i| net.create_named_pi(format!("b{i}"))).collect();
    let mut carry = Signal::FALSE;
    for i in 0..bits {
        let (s, c) = full_adder(&mut net, a[i], b[i], carry);
        net.create_po(s);
        carry = c;
    }
    net.create_po(carry);
    net
}

fn full_adder(net: &mut Network, a: Signal, b: Signal, c: Signal) -> (Signal, Signal) {
    let p = net.create_xor(a, b);
    let s = net.create_xor(p, c);
    let g = net.create_and(a, b);
    let t = net.create_and(p, c);
    let carry = net.create_or(g, t);
    (s, carry)
}

/// `bits × bits` array multiplier built from AND partial products and
/// full adders; majority carries are written in sum-of-products form so the
/// network has room for XOR-aware optimization.
pub fn array_multiplier(bits: usize) -> Network {
    let mut net = Network::new();
    let a: Vec<Signal> = (0..bits).map(|i| net.create_named_pi(format!("a{i}"))).collect();
    let b: Vec<Signal> = (0..bits).map(|i| net.create_named_pi(format!("b{i}"))).collect();
    let mut columns: Vec<Vec<Signal>> = vec![Vec::new(); 2 * bits];
    for i in 0..bits {
        for j in 0..bits {
            let pp = net.create_and(a[i], b[j]);
            columns[i + j].push(pp);
        }
    }
    for k in 0..2 * bits {
        while columns[k].len() > 1 {
            let x = columns[k].pop().unwrap();
            let y = columns[k].pop().unwrap();
            let z = columns[k].pop().unwrap_or(Signal::FALSE);
            let s = {
                let t = net.create_xor(x, y);
                net.create_xor(t, z)
            };
            let xy = net.create_and(x, y);
            let xz = net.create_and(x, z);
            let yz = net.create_and(y, z);
            let o = net.create_or(xy, xz);
            let carry = net.create_or(o, yz);
            columns[k].insert(0, s);
            if k + 1 < 2 * bits {
                columns[k + 1].push(carry);
            }
        }
        let out = columns[k].first().copied().unwrap_or(Signal::FALSE);
        net.create_po(out);
    }
    net
}

/// Balanced parity tree written with ANDs and ORs only, plus an `n`-input
/// AND and OR; a classic target for XOR recovery.
pub fn parity_sop(n: usize) -> Network {
    let mut net = Network::new();
    let x: Vec<Signal> = (0..n).map(|_| net.create_pi()).collect();
    let mut layer = x.clone();
    while layer.len() > 1 {
        let mut next = Vec::new();
        for pair in layer.chunks(2) {
            if pair.len() == 2 {
                let p = net.create_and(pair[0], !pair[1]);
                let q = net.create_and(!pair[0], pair[1]);
                next.push(net.create_or(p, q));
            } else {
                next.push(pair[0]);
            }
        }
        layer = next;
    }
    net.create_po(layer[0]);
    let all = x.iter().skip(1).fold(x[0], |acc, &s| net.create_and(acc, s));
    net.create_po(all);
    let any = x.iter().skip(1).fold(x[0], |acc, &s| net.create_or(acc, s));
    net.create_po(any);
    net
}

/// `n`-bit equality and less-than comparator.
pub fn comparator(n: usize) -> Network {
    let mut net = Network::new();
    let a: Vec<Signal> = (0..n).map(|i| net.create_named_pi(format!("a{i}"))).collect();
    let b: Vec<Signal> = (0..n).map(|i| net.create_named_pi(format!("b{i}"))).collect();
    let mut eq = Signal::TRUE;
    let mut lt = Signal::FALSE;
    for i in (0..n).rev() {
        let e = !net.create_xor(a[i], b[i]);
        let l = net.create_and(!a[i], b[i]);
        let el = net.create_and(eq, l);
        lt = net.create_or(lt, el);
        eq = net.create_and(eq, e);
    }
    net.create_po(eq);
    net.create_po(lt);
    net
}

/// Network with `a`, `b`, `c` as PIs and `f = (a∧b) ∨ (b∧c)`,
/// `g = (a∧b) ∧ (b∧c)` as POs, built with four ANDs:
/// `n1 = a∧b`, `n2 = b∧c`, `n3 = n1∨n2`, `n4 = n1∧n2`.
pub fn motivating_a() -> Network {
    let mut net = Network::new();
    let a = net.create_named_pi("a");
    let b = net.create_named_pi("b");
    let c = net.create_named_pi("c");
    let n1 = net.create_and(a, b);
    let n2 = net.create_and(b, c);
    let n3 = net.create_or(n1, n2);
    let n4 = net.create_and(n1, n2);
    net.create_po(n3);
    net.create_po(n4);
    net
}

/// Same functions as [`motivating_a`] with skewed fanins:
/// `n2 = b∧c`, `n5 = a∨c`, `f = b∧n5`, `g = a∧n2`.
pub fn motivating_b() -> Network {
    let mut net = Network::new();
    let a = net.create_named_pi("a");
    let b = net.create_named_pi("b");
    let c = net.create_named_pi("c");
    let n2 = net.create_and(b, c);
    let n5 = net.create_or(a, c);
    let n6 = net.create_and(b, n5);
    let n7 = net.create_and(a, n2);
    net.create_po(n6);
    net.create_po(n7);
    net
}

/// Same functions with three ANDs and two XORs:
/// `n1 = a∧b`, `n2 = b∧c`, `x = n1⊕n2`, `g = n1∧n2`, `f = x⊕g`.
pub fn motivating_c() -> Network {
    let mut net = Network::new();
    let a = net.create_named_pi("a");
    let b = net.create_named_pi("b");
    let c = net.create_named_pi("c");
    let n1 = net.create_and(a, b);
    let n2 = net.create_and(b, c);
    let x = net.create_xor(n1, n2);
    let g = net.create_and(n1, n2);
    let f = net.create_xor(x, g);
    net.create_po(f);
    net.create_po(g);
    net
}
