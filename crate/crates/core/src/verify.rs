//! Simulation-based equivalence checking and a brute-force resynthesis
//! reference.

use crate::resyn::ResynProblem;
use crate::tt::{TruthTable, MAX_VARS};
use crate::xag::{Network, NodeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

/// Widest network [`cec_exhaustive`] accepts.
pub const EXHAUSTIVE_LIMIT: usize = 24;

/// Words simulated per chunk during exhaustive checking.
const CHUNK_WORDS: usize = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("interface mismatch: {0} vs {1} inputs, {2} vs {3} outputs")]
    Interface(usize, usize, usize, usize),
    #[error("{0} inputs exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}")]
    TooManyInputs(usize),
    #[error("oracle limited to {0}")]
    OracleLimit(&'static str),
}

/// Bit-parallel simulation: `pi_words[i]` holds the patterns of PI `i`.
/// Returns the patterns of every PO.
pub fn simulate_words(net: &Network, pi_words: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let w = pi_words.first().map_or(1, |v| v.len());
    let mut val: Vec<Vec<u64>> = vec![Vec::new(); net.size()];
    val[0] = vec![0; w];
    for (i, &pi) in net.pis().iter().enumerate() {
        val[pi as usize] = pi_words[i].clone();
    }
    for id in net.topo_order() {
        let kind = net.kind(id);
        if !kind.is_gate() {
            continue;
        }
        let f = net.fanins(id);
        let (a, b) = (&val[f[0].node() as usize], &val[f[1].node() as usize]);
        let (ca, cb) = (mask(f[0].is_complemented()), mask(f[1].is_complemented()));
        let out: Vec<u64> = match kind {
            NodeKind::And => a.iter().zip(b).map(|(&x, &y)| (x ^ ca) & (y ^ cb)).collect(),
            _ => a.iter().zip(b).map(|(&x, &y)| x ^ y ^ ca ^ cb).collect(),
        };
        val[id as usize] = out;
    }
    net.pos()
        .iter()
        .map(|po| {
            let c = mask(po.is_complemented());
            val[po.node() as usize].iter().map(|&x| x ^ c).collect()
        })
        .collect()
}

fn mask(c: bool) -> u64 {
    if c {
        u64::MAX
    } else {
        0
    }
}

/// Truth table of every PO over all PIs.
pub fn po_tables(net: &Network) -> Result<Vec<TruthTable>, VerifyError> {
    let n = net.num_pis();
    if n > MAX_VARS {
        return Err(VerifyError::TooManyInputs(n));
    }
    let pi_words: Vec<Vec<u64>> = (0..n)
        .map(|i| TruthTable::var(n, i).expect("width checked").words().to_vec())
        .collect();
    let pi_words = if n == 0 { Vec::new() } else { pi_words };
    let outs = if n == 0 {
        simulate_words(net, &[])
    } else {
        simulate_words(net, &pi_words)
    };
    Ok(outs
        .into_iter()
        .map(|w| TruthTable::from_words(n, &w).expect("width checked"))
        .collect())
}

fn check_interface(a: &Network, b: &Network) -> Result<(), VerifyError> {
    if a.num_pis() != b.num_pis() || a.num_pos() != b.num_pos() {
        return Err(VerifyError::Interface(a.num_pis(), b.num_pis(), a.num_pos(), b.num_pos()));
    }
    Ok(())
}

/// Exhaustive simulation over all `2^PI` patterns, in chunks.
pub fn cec_exhaustive(a: &Network, b: &Network) -> Result<bool, VerifyError> {
    check_interface(a, b)?;
    let n = a.num_pis();
    if n > EXHAUSTIVE_LIMIT {
        return Err(VerifyError::TooManyInputs(n));
    }
    let total_words = if n <= 6 { 1 } else { 1usize << (n - 6) };
    let valid = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let mut start = 0;
    while start < total_words {
        let w = CHUNK_WORDS.min(total_words - start);
        let pi_words: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                (0..w)
                    .map(|k| {
                        if i < 6 {
                            VAR_PATTERNS[i]
                        } else if ((start + k) >> (i - 6)) & 1 == 1 {
                            u64::MAX
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let (oa, ob) = (simulate_words(a, &pi_words), simulate_words(b, &pi_words));
        for (x, y) in oa.iter().zip(&ob) {
            if x.iter().zip(y).any(|(&p, &q)| (p ^ q) & valid != 0) {
                return Ok(false);
            }
        }
        start += w;
    }
    Ok(true)
}

const VAR_PATTERNS: [u64; 6] = [
    0xaaaa_aaaa_aaaa_aaaa,
    0xcccc_cccc_cccc_cccc,
    0xf0f0_f0f0_f0f0_f0f0,
    0xff00_ff00_ff00_ff00,
    0xffff_0000_ffff_0000,
    0xffff_ffff_0000_0000,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RandomCheck {
    /// No difference observed; not a proof.
    Consistent,
    /// Input assignment (one value per PI) on which some PO differs.
    Refuted(Vec<bool>),
}

/// Simulates `vectors` seeded random patterns. Zero vectors is vacuously
/// consistent.
pub fn cec_random(a: &Network, b: &Network, vectors: usize, seed: u64) -> Result<RandomCheck, VerifyError> {
    check_interface(a, b)?;
    let n = a.num_pis();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < vectors {
        let w = CHUNK_WORDS.min((vectors - done).div_ceil(64));
        let pi_words: Vec<Vec<u64>> = (0..n).map(|_| (0..w).map(|_| rng.gen()).collect()).collect();
        let (oa, ob) = (simulate_words(a, &pi_words), simulate_words(b, &pi_words));
        let valid_bits = (vectors - done).min(64 * w);
        for (x, y) in oa.iter().zip(&ob) {
            for k in 0..w {
                let mut diff = x[k] ^ y[k];
                let lo = 64 * k;
                if lo + 64 > valid_bits {
                    let keep = valid_bits.saturating_sub(lo);
                    diff &= if keep >= 64 { u64::MAX } else { (1u64 << keep) - 1 };
                }
                if diff != 0 {
                    let bit = diff.trailing_zeros() as usize;
                    let cex = (0..n).map(|i| pi_words[i][k] >> bit & 1 == 1).collect();
                    return Ok(RandomCheck::Refuted(cex));
                }
            }
        }
        done += valid_bits;
    }
    Ok(RandomCheck::Consistent)
}

/// Unpruned enumeration of every circuit with at most two gates over the
/// divisors of `p` that realizes the target, in the canonical encoding of
/// [`crate::resyn::SolutionForest::encode`].
///
/// Functionally equal divisors are reduced to one representative (lowest
/// rank, then index) and constant divisors are dropped. Two-gate circuits
/// have the shape `top(x, g(y, z))` with `x ∉ {y, z}`. A constant target
/// yields only the constant.
pub fn brute_resyn_oracle(p: &ResynProblem) -> Result<BTreeSet<String>, VerifyError> {
    if p.divisors.len() > 8 {
        return Err(VerifyError::OracleLimit("8 divisors"));
    }
    if p.max_gates > 2 {
        return Err(VerifyError::OracleLimit("2 gates"));
    }
    let f = &p.target;
    let mut out = BTreeSet::new();
    if f.is_const0() || f.is_const1() {
        out.insert(if f.is_const1() { "1" } else { "0" }.to_string());
        return Ok(out);
    }

    // Representatives.
    let mut idx: Vec<usize> = (0..p.divisors.len()).collect();
    idx.sort_by_key(|&i| (p.divisors[i].rank, i));
    let mut reps: Vec<usize> = Vec::new();
    for i in idx {
        let t = &p.divisors[i].table;
        if t.is_const0() || t.is_const1() {
            continue;
        }
        if reps.iter().all(|&r| {
            let u = &p.divisors[r].table;
            *u != *t && u.not() != *t
        }) {
            reps.push(i);
        }
    }
    reps.sort_unstable();

    // An expression is (table, encoding without outer complement, complement).
    #[derive(Clone)]
    struct E {
        t: TruthTable,
        s: String,
        c: bool,
    }
    let show = |e: &E| format!("{}{}", if e.c { "!" } else { "" }, e.s);
    let lit = |i: usize, c: bool| E {
        t: p.divisors[i].table.complement_if(c),
        s: format!("d{i}"),
        c,
    };
    let and = |a: &E, b: &E| {
        let (x, y) = (show(a), show(b));
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        E {
            t: a.t.and(&b.t),
            s: format!("A({x},{y})"),
            c: false,
        }
    };
    let xor = |a: &E, b: &E| {
        let (x, y) = (a.s.clone(), b.s.clone());
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        E {
            t: a.t.xor(&b.t),
            s: format!("X({x},{y})"),
            c: a.c ^ b.c,
        }
    };
    let neg = |e: &E| E {
        t: e.t.not(),
        s: e.s.clone(),
        c: !e.c,
    };

    // 0 and 1 gates, remembering the one-gate expressions with their inputs.
    let mut gates1: Vec<(E, usize, usize)> = Vec::new();
    for &i in &reps {
        for c in [false, true] {
            let e = lit(i, c);
            if e.t == *f {
                out.insert(show(&e));
            }
        }
    }
    for (a, &i) in reps.iter().enumerate() {
        for &j in &reps[a + 1..] {
            for (ci, cj) in [(false, false), (false, true), (true, false), (true, true)] {
                gates1.push((and(&lit(i, ci), &lit(j, cj)), i, j));
            }
            gates1.push((xor(&lit(i, false), &lit(j, false)), i, j));
        }
    }
    for (g, _, _) in &gates1 {
        for e in [g.clone(), neg(g)] {
            if e.t == *f {
                out.insert(show(&e));
            }
        }
    }
    if p.max_gates < 2 {
        return Ok(out);
    }
    for (g, i, j) in &gates1 {
        for &x in &reps {
            if x == *i || x == *j {
                continue;
            }
            for cx in [false, true] {
                for cg in [false, true] {
                    let e = and(&lit(x, cx), &if cg { neg(g) } else { g.clone() });
                    for e in [e.clone(), neg(&e)] {
                        if e.t == *f {
                            out.insert(show(&e));
                        }
                    }
                }
            }
            let e = xor(&lit(x, false), g);
            for e in [e.clone(), neg(&e)] {
                if e.t == *f {
                    out.insert(show(&e));
                }
            }
        }
    }
    Ok(out)
}
