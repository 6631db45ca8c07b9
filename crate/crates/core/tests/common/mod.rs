#![allow(dead_code)]

use anysyn::gen::{self, random_xag, RandomSpec};
use anysyn::resyn::{Divisor, ResynProblem};
use anysyn::tt::TruthTable;
use anysyn::xag::{Network, Signal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random XAGs: 4 to 12 PIs, up to 300 gates.
pub fn small_corpus(count: usize, seed: u64) -> Vec<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let pis = rng.gen_range(4..=12);
            let gates = rng.gen_range(10..=300);
            let pos = rng.gen_range(1..=8);
            let mut spec = RandomSpec::new(pis, gates, pos, seed.wrapping_mul(1000) + k as u64);
            spec.xor_ratio = rng.gen_range(0.0..0.5);
            spec.locality = rng.gen_range(4..=40);
            let net = random_xag(&spec);
            // some networks go through AIG lowering so XORs can be recovered
            if k % 3 == 0 {
                gen::lower_to_aig(&net)
            } else {
                net
            }
        })
        .collect()
}

/// Twenty networks between 1k and 20k nodes: AIG-lowered random XAGs and
/// arithmetic circuits.
pub fn medium_corpus() -> Vec<(String, Network)> {
    let mut out = Vec::new();
    let sizes = [600, 900, 1200, 1800, 2500, 3500, 5000, 7000, 9000, 12000];
    for (k, &g) in sizes.iter().enumerate() {
        let mut spec = RandomSpec::new(24 + 4 * k, g, 16 + 2 * k, 100 + k as u64);
        spec.xor_ratio = 0.25;
        spec.locality = 24;
        out.push((format!("rand{g}"), gen::lower_to_aig(&random_xag(&spec))));
    }
    for bits in [10, 14, 18, 24] {
        out.push((format!("mul{bits}"), gen::lower_to_aig(&gen::array_multiplier(bits))));
    }
    for bits in [256, 1024] {
        out.push((format!("add{bits}"), gen::lower_to_aig(&gen::ripple_adder(bits))));
    }
    out.push(("parity512".into(), gen::parity_sop(512)));
    out.push(("parity1024".into(), gen::parity_sop(1024)));
    for bits in [256, 1024] {
        out.push((format!("cmp{bits}"), gen::lower_to_aig(&gen::comparator(bits))));
    }
    out
}

/// Random resynthesis problem over `2..=6` leaf variables with up to 8
/// divisors. Most targets are built from one or two gates over divisors so
/// that solutions exist.
pub fn random_problem(rng: &mut ChaCha8Rng, max_gates: usize) -> ResynProblem {
    let vars = rng.gen_range(2..=6);
    let num_div = rng.gen_range(vars.min(8)..=8);
    let mut tables: Vec<TruthTable> = (0..vars).map(|v| TruthTable::var(vars, v).unwrap()).collect();
    let random_gate = |rng: &mut ChaCha8Rng, pool: &[TruthTable]| {
        let a = pool[rng.gen_range(0..pool.len())].complement_if(rng.gen_bool(0.5));
        let b = pool[rng.gen_range(0..pool.len())].complement_if(rng.gen_bool(0.5));
        if rng.gen_bool(0.5) {
            a.and(&b)
        } else {
            a.xor(&b)
        }
    };
    while tables.len() < num_div {
        let t = match rng.gen_range(0..10) {
            // occasional duplicates and constants exercise deduplication
            0 => tables[rng.gen_range(0..tables.len())].complement_if(rng.gen_bool(0.5)),
            1 => TruthTable::constant(vars, rng.gen_bool(0.5)).unwrap(),
            _ => random_gate(rng, &tables),
        };
        tables.push(t);
    }
    let target = match rng.gen_range(0..10) {
        0 => {
            let mut t = TruthTable::zero(vars);
            for r in 0..t.num_rows() {
                t.set_bit(r, rng.gen_bool(0.5));
            }
            t
        }
        1..=3 => random_gate(rng, &tables),
        _ => {
            let g = random_gate(rng, &tables);
            let x = tables[rng.gen_range(0..tables.len())].complement_if(rng.gen_bool(0.5));
            if rng.gen_bool(0.5) {
                x.and(&g.complement_if(rng.gen_bool(0.5)))
            } else {
                x.xor(&g)
            }
        }
    };
    let mut ranks: Vec<u32> = (0..tables.len() as u32).collect();
    for i in (1..ranks.len()).rev() {
        ranks.swap(i, rng.gen_range(0..=i));
    }
    ResynProblem {
        target,
        divisors: tables
            .into_iter()
            .enumerate()
            .map(|(i, table)| Divisor {
                signal: Signal::new(i as u32 + 1, false),
                table,
                rank: ranks[i],
            })
            .collect(),
        leaves: (0..vars).collect(),
        max_gates,
    }
}

/// Recomputes every gate's structural fanout (gate fanins plus PO
/// references) from scratch.
pub fn raw_fanouts(net: &Network) -> Vec<u32> {
    let mut f = vec![0u32; net.size()];
    for g in net.gates() {
        for s in net.fanins(g) {
            f[s.node() as usize] += 1;
        }
    }
    for po in net.pos() {
        f[po.node() as usize] += 1;
    }
    f
}

