//! Cost-generic resynthesis: enumerate small dependency circuits over a set
//! of divisors, collect every circuit that realizes the target into a
//! hash-consed solution forest, and add SOP/ESOP decompositions over the
//! window leaves.
//!
//! Enumeration covers
//! * 0 gates: a divisor equal to the target or its complement,
//! * 1 gate: `AND` with all four input polarities and `XOR`,
//! * 2 gates: `top(x, g(y, z))` with `x ∉ {y, z}`,
//! * 3 gates: the chain `top(x, g2(y, g1))` and the balanced
//!   `top(g1, g2)` shapes, over the first few divisors only.
//!
//! Two prunes keep this tractable. An `AND` fanin `x` is only tried when the
//! target implies it ([`prune_and`]); `XOR` partners are found by hashing
//! `f ⊕ y` ([`XorFilter`]). Gates that already exist in the network are
//! detected through a caller-supplied structural filter.

use crate::tt::{words_imply, TruthTable};
use crate::xag::{GateKind, Signal};
use rustc_hash::{FxHashMap, FxHashSet};
use std::fmt;

/// A reference into a [`SolutionForest`]: index 0 is the constant, indices
/// `1..=d` are the problem divisors, higher indices are forest gates. The low
/// bit is a complement flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForestRef(u32);

impl ForestRef {
    pub const FALSE: ForestRef = ForestRef(0);
    pub const TRUE: ForestRef = ForestRef(1);

    fn new(index: usize, complemented: bool) -> Self {
        ForestRef((index as u32) << 1 | complemented as u32)
    }

    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn regular(self) -> Self {
        ForestRef(self.0 & !1)
    }

    pub fn complement_if(self, c: bool) -> Self {
        ForestRef(self.0 ^ c as u32)
    }
}

impl std::ops::Not for ForestRef {
    type Output = ForestRef;
    fn not(self) -> ForestRef {
        ForestRef(self.0 ^ 1)
    }
}

impl fmt::Debug for ForestRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_complemented() { "!" } else { "" };
        write!(f, "{c}@{}", self.index())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestGate {
    pub kind: GateKind,
    /// Canonical fanins; `XOR` fanins are never complemented.
    pub fanins: [ForestRef; 2],
    /// Set when the gate already exists in the network.
    pub existing: Option<Signal>,
}

/// Verdict of the structural filter on a gate whose fanins both map to
/// network signals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reuse {
    /// No structurally equal node; the gate would be new.
    New,
    /// An equal node exists and may be reused for free.
    Existing(Signal),
    /// The gate duplicates a node that must not be reused.
    Prune,
}

/// A hash-consed set of candidate circuits, each output realizing the
/// target.
#[derive(Clone, Debug)]
pub struct SolutionForest {
    num_divisors: usize,
    divisor_signals: Vec<Signal>,
    gates: Vec<ForestGate>,
    outputs: Vec<ForestRef>,
    output_set: FxHashSet<ForestRef>,
    /// Canonical gate → forest index, or `None` when the filter pruned it.
    hash: FxHashMap<(GateKind, [ForestRef; 2]), Option<u32>>,
}

impl SolutionForest {
    fn new(divisor_signals: Vec<Signal>) -> Self {
        SolutionForest {
            num_divisors: divisor_signals.len(),
            divisor_signals,
            gates: Vec::new(),
            outputs: Vec::new(),
            output_set: FxHashSet::default(),
            hash: FxHashMap::default(),
        }
    }

    pub fn num_divisors(&self) -> usize {
        self.num_divisors
    }

    pub fn gates(&self) -> &[ForestGate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[ForestRef] {
        &self.outputs
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn divisor_ref(&self, divisor: usize, complemented: bool) -> ForestRef {
        ForestRef::new(divisor + 1, complemented)
    }

    pub fn divisor_index(&self, r: ForestRef) -> Option<usize> {
        let i = r.index();
        (1..=self.num_divisors).contains(&i).then(|| i - 1)
    }

    pub fn gate_index(&self, r: ForestRef) -> Option<usize> {
        r.index().checked_sub(self.num_divisors + 1)
    }

    fn gate_ref(&self, gate: usize, complemented: bool) -> ForestRef {
        ForestRef::new(gate + self.num_divisors + 1, complemented)
    }

    /// Gate indices in the cone of gate `top`, ascending, `top` included.
    pub fn cone(&self, top: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut stack = vec![top];
        while let Some(g) = stack.pop() {
            if out.contains(&g) {
                continue;
            }
            out.push(g);
            for f in self.gates[g].fanins {
                if let Some(i) = self.gate_index(f) {
                    stack.push(i);
                }
            }
        }
        out.sort_unstable();
    }

    /// Number of gates the output rooted at `r` adds to the network.
    pub fn new_gate_count(&self, r: ForestRef) -> usize {
        match self.gate_index(r) {
            None => 0,
            Some(top) => {
                let mut cone = Vec::new();
                self.cone(top, &mut cone);
                cone.iter().filter(|&&g| self.gates[g].existing.is_none()).count()
            }
        }
    }

    /// Canonical text encoding, e.g. `!X(A(d0,!d3),d5)`. Children are sorted
    /// so structurally equal circuits encode identically.
    pub fn encode(&self, r: ForestRef) -> String {
        let neg = if r.is_complemented() { "!" } else { "" };
        if r.index() == 0 {
            return if r.is_complemented() { "1".into() } else { "0".into() };
        }
        if let Some(d) = self.divisor_index(r) {
            return format!("{neg}d{d}");
        }
        let g = &self.gates[self.gate_index(r).unwrap()];
        let mut kids = [self.encode(g.fanins[0]), self.encode(g.fanins[1])];
        kids.sort();
        let k = match g.kind {
            GateKind::And => 'A',
            GateKind::Xor => 'X',
        };
        format!("{neg}{k}({},{})", kids[0], kids[1])
    }

    /// Evaluates `r` given the divisor tables.
    pub fn simulate(&self, r: ForestRef, divisors: &[TruthTable], num_vars: usize) -> TruthTable {
        let t = if r.index() == 0 {
            TruthTable::zero(num_vars)
        } else if let Some(d) = self.divisor_index(r) {
            divisors[d].clone()
        } else {
            let g = &self.gates[self.gate_index(r).unwrap()];
            let a = self.simulate(g.fanins[0], divisors, num_vars);
            let b = self.simulate(g.fanins[1], divisors, num_vars);
            match g.kind {
                GateKind::And => a.and(&b),
                GateKind::Xor => a.xor(&b),
            }
        };
        t.complement_if(r.is_complemented())
    }

    fn signal_of(&self, r: ForestRef) -> Option<Signal> {
        let s = if r.index() == 0 {
            Some(Signal::FALSE)
        } else if let Some(d) = self.divisor_index(r) {
            Some(self.divisor_signals[d])
        } else {
            self.gates[self.gate_index(r).unwrap()].existing
        };
        s.map(|s| s.complement_if(r.is_complemented()))
    }

    /// Hash-conses a gate. Returns `None` when the filter prunes it.
    fn add_gate(
        &mut self,
        kind: GateKind,
        a: ForestRef,
        b: ForestRef,
        filter: &mut dyn FnMut(GateKind, Signal, Signal) -> Reuse,
    ) -> Option<ForestRef> {
        let (fanins, out_c) = match kind {
            GateKind::And => {
                if a.index() == b.index() {
                    return Some(if a == b { a } else { ForestRef::FALSE });
                }
                (if a < b { [a, b] } else { [b, a] }, false)
            }
            GateKind::Xor => {
                let c = a.is_complemented() ^ b.is_complemented();
                let (a, b) = (a.regular(), b.regular());
                if a == b {
                    return Some(ForestRef::FALSE.complement_if(c));
                }
                (if a < b { [a, b] } else { [b, a] }, c)
            }
        };
        if let Some(&hit) = self.hash.get(&(kind, fanins)) {
            return hit.map(|i| self.gate_ref(i as usize, out_c));
        }
        let existing = match (self.signal_of(fanins[0]), self.signal_of(fanins[1])) {
            (Some(sa), Some(sb)) => match filter(kind, sa, sb) {
                Reuse::New => None,
                Reuse::Existing(s) => Some(s),
                Reuse::Prune => {
                    self.hash.insert((kind, fanins), None);
                    return None;
                }
            },
            _ => None,
        };
        let i = self.gates.len();
        self.gates.push(ForestGate {
            kind,
            fanins,
            existing,
        });
        self.hash.insert((kind, fanins), Some(i as u32));
        Some(self.gate_ref(i, out_c))
    }

    fn add_output(&mut self, r: ForestRef) {
        if self.output_set.insert(r) {
            self.outputs.push(r);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisor {
    pub signal: Signal,
    pub table: TruthTable,
    /// Preference among functionally equal divisors and the input order of
    /// decomposition trees; lower is preferred.
    pub rank: u32,
}

#[derive(Clone, Debug)]
pub struct ResynProblem {
    pub target: TruthTable,
    pub divisors: Vec<Divisor>,
    /// Divisor index of each window leaf, in variable order. Required for
    /// SOP/ESOP decomposition.
    pub leaves: Vec<usize>,
    pub max_gates: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResynLimits {
    /// Skip SOP/ESOP candidates above this gate count.
    pub max_gates_decomp: usize,
    pub decompose: bool,
    /// Divisors (after deduplication) considered for 3-gate circuits.
    pub max_divisors_3: usize,
    /// Work budget for the 3-gate stage, in table operations.
    pub max_steps: usize,
    /// Stop adding gates once the forest holds this many outputs.
    pub max_outputs: usize,
}

impl Default for ResynLimits {
    fn default() -> Self {
        ResynLimits {
            max_gates_decomp: 32,
            decompose: true,
            max_divisors_3: 12,
            max_steps: 50_000,
            max_outputs: 512,
        }
    }
}

/// True when `x` cannot be an `AND` fanin of any gate realizing `f`.
pub fn prune_and(f: &TruthTable, x: &TruthTable) -> bool {
    !words_imply(f.words(), x.words())
}

/// Hash set `S = {f ⊕ y}` over the divisors: `x` can be an `XOR` fanin of a
/// gate realizing `f` only if `f ⊕ x ∈ S`.
pub struct XorFilter {
    set: FxHashSet<TruthTable>,
}

impl XorFilter {
    pub fn new<'a>(f: &TruthTable, divisors: impl IntoIterator<Item = &'a TruthTable>) -> Self {
        XorFilter {
            set: divisors.into_iter().map(|y| f.xor(y)).collect(),
        }
    }

    pub fn feasible(&self, f: &TruthTable, x: &TruthTable) -> bool {
        self.set.contains(&f.xor(x))
    }
}

pub fn resynthesize(p: &ResynProblem, limits: &ResynLimits) -> SolutionForest {
    resynthesize_with(p, limits, &mut |_, _, _| Reuse::New)
}

/// Solves `p`, consulting `filter` for every gate whose fanins all exist in
/// the network.
pub fn resynthesize_with(
    p: &ResynProblem,
    limits: &ResynLimits,
    filter: &mut dyn FnMut(GateKind, Signal, Signal) -> Reuse,
) -> SolutionForest {
    let mut e = Engine::new(p, limits, filter);
    e.run();
    e.forest
}

/// SOP decompositions of the target and of its complement.
pub fn decompose_sop(p: &ResynProblem, limits: &ResynLimits) -> SolutionForest {
    let mut filter = |_, _, _| Reuse::New;
    let mut e = Engine::new(p, limits, &mut filter);
    e.sop();
    e.forest
}

/// Positive-polarity Reed-Muller decomposition of the target.
pub fn decompose_esop(p: &ResynProblem, limits: &ResynLimits) -> SolutionForest {
    let mut filter = |_, _, _| Reuse::New;
    let mut e = Engine::new(p, limits, &mut filter);
    e.esop();
    e.forest
}

/// Literal over deduplicated divisors: `2 * k + complemented`.
type Lit = usize;

/// A table padded to `N` words.
type Blk<const N: usize> = [u64; N];

fn blk<const N: usize>(t: &TruthTable) -> Blk<N> {
    let mut w = [0; N];
    w[..t.words().len()].copy_from_slice(t.words());
    w
}

#[inline]
fn and<const N: usize>(a: &Blk<N>, b: &Blk<N>) -> Blk<N> {
    std::array::from_fn(|i| a[i] & b[i])
}

#[inline]
fn or<const N: usize>(a: &Blk<N>, b: &Blk<N>) -> Blk<N> {
    std::array::from_fn(|i| a[i] | b[i])
}

#[inline]
fn xor<const N: usize>(a: &Blk<N>, b: &Blk<N>) -> Blk<N> {
    std::array::from_fn(|i| a[i] ^ b[i])
}

/// `a ⇒ b`.
#[inline]
fn imp<const N: usize>(a: &Blk<N>, b: &Blk<N>) -> bool {
    (0..N).all(|i| a[i] & !b[i] == 0)
}

/// Literal tables of a problem padded to `N` words.
struct Tabs<const N: usize> {
    lt: Vec<Blk<N>>,
    by_blk: FxHashMap<Blk<N>, Lit>,
    ones: Blk<N>,
}

impl<const N: usize> Tabs<N> {
    /// Number of kept divisors.
    fn d(&self) -> usize {
        self.lt.len() / 2
    }

    fn not(&self, a: &Blk<N>) -> Blk<N> {
        xor(a, &self.ones)
    }

    fn find(&self, t: &Blk<N>) -> Option<Lit> {
        self.by_blk.get(t).copied()
    }

    /// Literals over the first `k` divisors implied by `t`.
    fn implied(&self, t: &Blk<N>, k: usize) -> Vec<Lit> {
        (0..2 * k).filter(|&l| imp(t, &self.lt[l])).collect()
    }

    /// Unordered pairs `{y, z}` of implied literals, excluding divisor
    /// `skip`, whose conjunction equals `t`.
    fn and_pairs(&self, t: &Blk<N>, skip: usize) -> Vec<(Lit, Lit)> {
        let u: Vec<Lit> = (0..self.lt.len())
            .filter(|&l| l / 2 != skip && imp(t, &self.lt[l]))
            .collect();
        let mut out = Vec::new();
        for (i, &a) in u.iter().enumerate() {
            for &b in &u[i + 1..] {
                if a / 2 != b / 2 && and(&self.lt[a], &self.lt[b]) == *t {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Unordered divisor pairs `{y, z}`, excluding `skip`, with
    /// `y ⊕ z = t`.
    fn xor_pairs(&self, t: &Blk<N>, skip: usize) -> Vec<(Lit, Lit)> {
        let mut out = Vec::new();
        for y in 0..self.d() {
            if y == skip {
                continue;
            }
            if let Some(z) = self.find(&xor(t, &self.lt[2 * y])) {
                if z / 2 > y && z / 2 != skip {
                    out.push((2 * y, z));
                }
            }
        }
        out
    }
}

/// A one-gate function over the deduplicated divisors, with its table and
/// the complement.
struct Gate1<const N: usize> {
    kind: GateKind,
    a: Lit,
    b: Lit,
    t: Blk<N>,
    n: Blk<N>,
}

struct Engine<'a> {
    p: &'a ResynProblem,
    limits: &'a ResynLimits,
    filter: &'a mut dyn FnMut(GateKind, Signal, Signal) -> Reuse,
    forest: SolutionForest,
    f: TruthTable,
    /// Original index of each kept divisor.
    reps: Vec<usize>,
    /// Table of each literal.
    lit_tabs: Vec<TruthTable>,
    /// Table → literal of the kept divisor, both polarities.
    by_table: FxHashMap<TruthTable, Lit>,
    /// Tables of all problem divisors, for self-checks.
    div_tabs: Vec<TruthTable>,
    steps: usize,
    /// Set while AND-on-top shapes are matched against `¬f`; outputs are
    /// complemented on emission.
    neg: bool,
}

/// Complement `t` if needed so that row 0 is zero.
fn normal(t: &TruthTable) -> (TruthTable, bool) {
    if t.bit(0) {
        (t.not(), true)
    } else {
        (t.clone(), false)
    }
}

impl<'a> Engine<'a> {
    fn new(
        p: &'a ResynProblem,
        limits: &'a ResynLimits,
        filter: &'a mut dyn FnMut(GateKind, Signal, Signal) -> Reuse,
    ) -> Self {
        let mut order: Vec<usize> = (0..p.divisors.len()).collect();
        order.sort_by_key(|&i| (p.divisors[i].rank, i));
        let mut by_table: FxHashMap<TruthTable, Lit> = FxHashMap::default();
        let mut kept = Vec::new();
        for i in order {
            let t = &p.divisors[i].table;
            if t.is_const0() || t.is_const1() {
                continue;
            }
            let (n, _) = normal(t);
            if let std::collections::hash_map::Entry::Vacant(v) = by_table.entry(n) {
                v.insert(usize::MAX);
                kept.push(i);
            }
        }
        // Keep the given divisor order among the survivors.
        kept.sort_unstable();
        let mut lit_tabs = Vec::with_capacity(2 * kept.len());
        by_table.clear();
        for (k, &i) in kept.iter().enumerate() {
            let t = &p.divisors[i].table;
            by_table.insert(t.clone(), 2 * k);
            by_table.insert(t.not(), 2 * k + 1);
            lit_tabs.push(t.clone());
            lit_tabs.push(t.not());
        }
        let forest = SolutionForest::new(p.divisors.iter().map(|d| d.signal).collect());
        Engine {
            p,
            limits,
            filter,
            forest,
            f: p.target.clone(),
            reps: kept,
            lit_tabs,
            by_table,
            div_tabs: p.divisors.iter().map(|d| d.table.clone()).collect(),
            steps: 0,
            neg: false,
        }
    }

    fn d(&self) -> usize {
        self.reps.len()
    }

    fn fref(&self, l: Lit) -> ForestRef {
        self.forest.divisor_ref(self.reps[l / 2], l & 1 == 1)
    }

    fn tab(&self, l: Lit) -> &TruthTable {
        &self.lit_tabs[l]
    }

    /// Literal whose table equals `t`, if any divisor realizes it.
    fn find(&self, t: &TruthTable) -> Option<Lit> {
        self.by_table.get(t).copied()
    }

    /// Adds a gate to the forest; `None` when it is pruned or the forest is
    /// full.
    fn gate(&mut self, kind: GateKind, a: ForestRef, b: ForestRef) -> Option<ForestRef> {
        if self.full() {
            return None;
        }
        self.forest.add_gate(kind, a, b, self.filter)
    }

    fn emit(&mut self, r: Option<ForestRef>) {
        if let Some(r) = r {
            let r = r.complement_if(self.neg);
            debug_assert_eq!(
                self.forest.simulate(r, &self.div_tabs, self.f.num_vars()),
                self.f,
                "forest output {} does not realize the target",
                self.forest.encode(r)
            );
            self.forest.add_output(r);
        }
    }

    fn run(&mut self) {
        let f = self.f.clone();
        if f.is_const0() || f.is_const1() {
            self.emit(Some(ForestRef::FALSE.complement_if(f.is_const1())));
            return;
        }
        if let Some(l) = self.find(&f) {
            let r = self.fref(l);
            self.emit(Some(r));
        }
        // decompositions go first so the output cap never starves them
        if self.limits.decompose {
            self.sop();
            self.esop();
        }
        self.enumerate();
        self.neg = false;
    }

    /// Runs the 1-, 2- and 3-gate enumeration with tables padded to a fixed
    /// number of words.
    fn enumerate(&mut self) {
        match self.f.words().len() {
            1 => self.enumerate_n::<1>(),
            2..=4 => self.enumerate_n::<4>(),
            5..=16 => self.enumerate_n::<16>(),
            17..=64 => self.enumerate_n::<64>(),
            _ => self.enumerate_n::<1024>(),
        }
    }

    fn enumerate_n<const N: usize>(&mut self) {
        let lt: Vec<Blk<N>> = (0..2 * self.d()).map(|l| blk(self.tab(l))).collect();
        let tb = Tabs {
            by_blk: lt.iter().enumerate().map(|(l, t)| (*t, l)).collect(),
            lt,
            ones: blk(&TruthTable::constant(self.f.num_vars(), true).expect("valid width")),
        };
        if self.p.max_gates >= 1 {
            self.one_gate(&tb);
        }
        if self.p.max_gates >= 2 {
            self.two_gates(&tb);
        }
        if self.p.max_gates >= 3 {
            self.three_gates(&tb);
        }
    }

    fn one_gate<const N: usize>(&mut self, tb: &Tabs<N>) {
        let f0: Blk<N> = blk(&self.f);
        for neg in [false, true] {
            self.neg = neg;
            let t = if neg { tb.not(&f0) } else { f0 };
            for (a, b) in tb.and_pairs(&t, usize::MAX) {
                let (ra, rb) = (self.fref(a), self.fref(b));
                let r = self.gate(GateKind::And, ra, rb);
                self.emit(r);
            }
        }
        self.neg = false;
        for y in 0..tb.d() {
            if let Some(z) = tb.find(&xor(&f0, &tb.lt[2 * y])) {
                if z / 2 > y {
                    let (ry, rz) = (self.fref(2 * y), self.fref(z));
                    let r = self.gate(GateKind::Xor, ry, rz);
                    self.emit(r);
                }
            }
        }
    }

    fn two_gates<const N: usize>(&mut self, tb: &Tabs<N>) {
        let f0: Blk<N> = blk(&self.f);
        for neg in [false, true] {
            self.neg = neg;
            self.and_top_2(tb, &if neg { tb.not(&f0) } else { f0 });
        }
        self.neg = false;
        self.xor_top_2(tb, &f0);
    }

    /// `f = x' ∧ G` with `G` a single gate.
    fn and_top_2<const N: usize>(&mut self, tb: &Tabs<N>, f: &Blk<N>) {
        let d = tb.d();
        let uf = tb.implied(f, d);
        let mut masked: FxHashMap<Blk<N>, usize> = FxHashMap::default();
        let mut next = vec![usize::MAX; d];
        for &x in &uf {
            if self.full() {
                return;
            }
            let xt = tb.lt[x];
            let rx = self.fref(x);
            // G = AND(y', z')
            let u: Vec<Lit> = uf.iter().copied().filter(|&l| l / 2 != x / 2).collect();
            let mut pairs = Vec::new();
            for (i, &a) in u.iter().enumerate() {
                let ax = and(&tb.lt[a], &xt);
                for &b in &u[i + 1..] {
                    if a / 2 != b / 2 && and(&ax, &tb.lt[b]) == *f {
                        pairs.push((a, b));
                    }
                }
            }
            for (y, z) in pairs {
                let (ry, rz) = (self.fref(y), self.fref(z));
                if let Some(g) = self.gate(GateKind::And, ry, rz) {
                    let r = self.gate(GateKind::And, rx, g);
                    self.emit(r);
                }
            }
            // G = ¬AND(¬a, ¬b) with a ∧ x' ⇒ f and b ∧ x' ⇒ f.
            let v: Vec<Lit> = (0..2 * d)
                .filter(|&l| l / 2 != x / 2 && imp(&and(&tb.lt[l], &xt), f))
                .collect();
            for (i, &a) in v.iter().enumerate() {
                for &b in &v[i + 1..] {
                    if a / 2 != b / 2 && and(&or(&tb.lt[a], &tb.lt[b]), &xt) == *f {
                        let (ra, rb) = (self.fref(a ^ 1), self.fref(b ^ 1));
                        if let Some(g) = self.gate(GateKind::And, ra, rb) {
                            let r = self.gate(GateKind::And, rx, !g);
                            self.emit(r);
                        }
                    }
                }
            }
            // G = XOR(y, z) ⊕ c: (y ⊕ z) ∧ x' = f ⊕ (c ∧ x'). Divisors are
            // keyed by their masked tables and chained in increasing order.
            masked.clear();
            for y in (0..d).rev() {
                if y != x / 2 {
                    let head = masked.entry(and(&tb.lt[2 * y], &xt)).or_insert(usize::MAX);
                    next[y] = *head;
                    *head = y;
                }
            }
            let targets = [*f, xor(f, &xt)];
            for z in 0..d {
                if z == x / 2 {
                    continue;
                }
                let zm = and(&tb.lt[2 * z], &xt);
                for (c, t) in targets.iter().enumerate() {
                    let mut y = masked.get(&xor(t, &zm)).copied().unwrap_or(usize::MAX);
                    while y < z {
                        let (ry, rz) = (self.fref(2 * y), self.fref(2 * z));
                        if let Some(g) = self.gate(GateKind::Xor, ry, rz) {
                            let r = self.gate(GateKind::And, rx, g.complement_if(c == 1));
                            self.emit(r);
                        }
                        y = next[y];
                    }
                }
            }
        }
    }

    /// `f = x ⊕ G` with `G` a single gate.
    fn xor_top_2<const N: usize>(&mut self, tb: &Tabs<N>, f: &Blk<N>) {
        for x in 0..tb.d() {
            if self.full() {
                return;
            }
            let rx = self.fref(2 * x);
            let h = xor(f, &tb.lt[2 * x]);
            for c in [false, true] {
                let t = if c { tb.not(&h) } else { h };
                for (y, z) in tb.and_pairs(&t, x) {
                    let (ry, rz) = (self.fref(y), self.fref(z));
                    if let Some(g) = self.gate(GateKind::And, ry, rz) {
                        let r = self.gate(GateKind::Xor, rx, g).map(|r| r.complement_if(c));
                        self.emit(r);
                    }
                }
            }
            for (y, z) in tb.xor_pairs(&h, x) {
                let (ry, rz) = (self.fref(y), self.fref(z));
                if let Some(g) = self.gate(GateKind::Xor, ry, rz) {
                    let r = self.gate(GateKind::Xor, rx, g);
                    self.emit(r);
                }
            }
        }
    }

    /// The forest holds `max_outputs` candidates; enumeration stops.
    fn full(&self) -> bool {
        self.forest.outputs.len() >= self.limits.max_outputs
    }

    fn budget_left(&mut self, cost: usize) -> bool {
        self.steps += cost;
        self.steps <= self.limits.max_steps && !self.full()
    }

    /// Three-gate enumeration over the first `max_divisors_3` divisors.
    fn three_gates<const N: usize>(&mut self, tb: &Tabs<N>) {
        let k = self.d().min(self.limits.max_divisors_3);
        if k < 2 {
            return;
        }
        let not = |a: &Blk<N>| tb.not(a);
        let lt = &tb.lt;
        let f0: Blk<N> = blk(&self.f);
        let implied_upto = |t: &Blk<N>| tb.implied(t, k);

        // One-gate functions over the first k divisors.
        let mut l1: Vec<Gate1<N>> = Vec::with_capacity(5 * k * (k - 1) / 2);
        for a in 0..k {
            for b in a + 1..k {
                for (pa, pb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let (la, lb) = (2 * a + pa, 2 * b + pb);
                    let t = and(&lt[la], &lt[lb]);
                    l1.push(Gate1 { kind: GateKind::And, a: la, b: lb, t, n: not(&t) });
                }
                let t = xor(&lt[2 * a], &lt[2 * b]);
                l1.push(Gate1 { kind: GateKind::Xor, a: 2 * a, b: 2 * b, t, n: not(&t) });
            }
        }
        if !self.budget_left(l1.len()) {
            return;
        }
        let normal = |t: &Blk<N>| if t[0] & 1 == 1 { (not(t), true) } else { (*t, false) };
        // One-gate functions by normalized table, for exact lookup. Gates
        // sharing a table are chained through `l1_next` in increasing order.
        let mut l1_head: FxHashMap<Blk<N>, usize> = FxHashMap::default();
        l1_head.reserve(l1.len());
        let mut l1_next = vec![usize::MAX; l1.len()];
        let mut l1_comp = vec![false; l1.len()];
        for (i, g) in l1.iter().enumerate().rev() {
            let (n, c) = normal(&g.t);
            l1_comp[i] = c;
            let head = l1_head.entry(n).or_insert(usize::MAX);
            l1_next[i] = *head;
            *head = i;
        }
        let (l1_next, l1_comp) = (&l1_next, &l1_comp);
        let lookup = |t: &Blk<N>| {
            let (n, c) = normal(t);
            let mut e = l1_head.get(&n).copied().unwrap_or(usize::MAX);
            std::iter::from_fn(move || {
                (e != usize::MAX).then(|| {
                    let i = e;
                    e = l1_next[i];
                    (i, l1_comp[i] ^ c)
                })
            })
        };
        let l1_tab = |(i, c): (usize, bool)| if c { &l1[i].n } else { &l1[i].t };
        // Signed one-gate functions implied by a table.
        let implied_l1 = |t: &Blk<N>| -> Vec<(usize, bool)> {
            let mut out = Vec::with_capacity(64);
            for (i, g) in l1.iter().enumerate() {
                if imp(t, &g.t) {
                    out.push((i, false));
                }
                if imp(t, &g.n) {
                    out.push((i, true));
                }
            }
            out
        };
        let mut built: Vec<Option<Option<ForestRef>>> = vec![None; l1.len()];
        // Materialize a one-gate function in the forest on first use.
        macro_rules! g1 {
            ($i:expr, $c:expr) => {{
                let i = $i;
                if built[i].is_none() {
                    let (ra, rb) = (self.fref(l1[i].a), self.fref(l1[i].b));
                    built[i] = Some(self.gate(l1[i].kind, ra, rb));
                }
                built[i].unwrap().map(|r| r.complement_if($c))
            }};
        }

        // Balanced, XOR on top: g1 ⊕ g2 = f.
        for i in 0..l1.len() {
            if !self.budget_left(1) {
                return;
            }
            for (j, c) in lookup(&xor(&f0, &l1[i].t)) {
                if j > i {
                    if let (Some(a), Some(b)) = (g1!(i, false), g1!(j, c)) {
                        let r = self.gate(GateKind::Xor, a, b);
                        self.emit(r);
                    }
                }
            }
        }
        // Chain, XOR on top: f = x ⊕ H.
        for x in 0..k {
            let h = xor(&f0, &lt[2 * x]);
            let rx = self.fref(2 * x);
            // H = y ⊕ G1
            for y in 0..k {
                if y == x || !self.budget_left(1) {
                    continue;
                }
                for (j, c) in lookup(&xor(&h, &lt[2 * y])) {
                    let ry = self.fref(2 * y);
                    if let Some(g) = g1!(j, c) {
                        if let Some(m) = self.gate(GateKind::Xor, ry, g) {
                            let r = self.gate(GateKind::Xor, rx, m);
                            self.emit(r);
                        }
                    }
                }
            }
            // H = y' ∧ G1 (or its complement)
            for c in [false, true] {
                let t = if c { not(&h) } else { h };
                let ut = implied_upto(&t);
                let gt = implied_l1(&t);
                if !self.budget_left(2 * l1.len() + ut.len() * gt.len()) {
                    return;
                }
                for &y in &ut {
                    for &g in &gt {
                        if and(&lt[y], l1_tab(g)) != t {
                            continue;
                        }
                        let ry = self.fref(y);
                        if let Some(rg) = g1!(g.0, g.1) {
                            if let Some(m) = self.gate(GateKind::And, ry, rg) {
                                let r = self.gate(GateKind::Xor, rx, m).map(|r| r.complement_if(c));
                                self.emit(r);
                            }
                        }
                    }
                }
            }
        }

        let mut masked: FxHashMap<Blk<N>, usize> = FxHashMap::default();
        masked.reserve(2 * l1.len());
        let mut next: Vec<usize> = Vec::with_capacity(2 * l1.len());
        for neg in [false, true] {
            self.neg = neg;
            let f = if neg { not(&f0) } else { f0 };
            // Balanced, AND on top: G1 ∧ G2 = f.
            let gf = implied_l1(&f);
            if !self.budget_left(2 * l1.len() + gf.len() * gf.len()) {
                return;
            }
            for (s, &a) in gf.iter().enumerate() {
                for &b in &gf[s + 1..] {
                    if a.0 != b.0 && and(l1_tab(a), l1_tab(b)) == f {
                        if let (Some(ra), Some(rb)) = (g1!(a.0, a.1), g1!(b.0, b.1)) {
                            let r = self.gate(GateKind::And, ra, rb);
                            self.emit(r);
                        }
                    }
                }
            }

            // Chain, AND on top: f = x' ∧ H.
            let uf = implied_upto(&f);
            for &x in &uf {
                let xt = lt[x];
                let rx = self.fref(x);
                // H = (y ⊕ G1) ⊕ c: G1 ∧ x' = (f ⊕ c·x' ⊕ y) ∧ x'.
                if !self.budget_left(l1.len()) {
                    return;
                }
                // one-gate functions keyed by their masked tables, chained
                // through `next` so no per-key vectors are needed; entries
                // 2i and 2i + 1 both belong to gate i
                masked.clear();
                next.clear();
                for g in &l1 {
                    for t in [and(&g.t, &xt), and(&g.n, &xt)] {
                        let head = masked.entry(t).or_insert(usize::MAX);
                        next.push(*head);
                        *head = next.len() - 1;
                    }
                }
                for y in 0..k {
                    let fy = xor(&f, &lt[2 * y]);
                    for c in [false, true] {
                        let t = and(&if c { not(&fy) } else { fy }, &xt);
                        let mut e = masked.get(&t).copied().unwrap_or(usize::MAX);
                        while e != usize::MAX {
                            let i = e / 2;
                            e = next[e];
                            let gc = and(&l1[i].t, &xt) != t;
                            let ry = self.fref(2 * y);
                            if let Some(rg) = g1!(i, gc) {
                                if let Some(m) = self.gate(GateKind::Xor, ry, rg) {
                                    let r = self.gate(GateKind::And, rx, m.complement_if(c));
                                    self.emit(r);
                                }
                            }
                        }
                    }
                }
                // H = y' ∧ G1
                if !self.budget_left(uf.len() * gf.len()) {
                    return;
                }
                for &y in &uf {
                    if y / 2 == x / 2 {
                        continue;
                    }
                    let xy = and(&xt, &lt[y]);
                    for &g in &gf {
                        if and(&xy, l1_tab(g)) != f {
                            continue;
                        }
                        let ry = self.fref(y);
                        if let Some(rg) = g1!(g.0, g.1) {
                            if let Some(m) = self.gate(GateKind::And, ry, rg) {
                                let r = self.gate(GateKind::And, rx, m);
                                self.emit(r);
                            }
                        }
                    }
                }
                // H = ¬(y' ∧ G1) = a ∨ B with a ∧ x' ⇒ f and B ∧ x' ⇒ f.
                let va: Vec<Lit> = (0..2 * k)
                    .filter(|&l| l / 2 != x / 2 && imp(&and(&lt[l], &xt), &f))
                    .collect();
                let mut vb = Vec::new();
                for (i, g) in l1.iter().enumerate() {
                    if imp(&and(&g.t, &xt), &f) {
                        vb.push((i, false));
                    }
                    if imp(&and(&g.n, &xt), &f) {
                        vb.push((i, true));
                    }
                }
                if !self.budget_left(2 * l1.len() + va.len() * vb.len()) {
                    return;
                }
                for &a in &va {
                    for &b in &vb {
                        if and(&or(&lt[a], l1_tab(b)), &xt) != f {
                            continue;
                        }
                        let ra = self.fref(a ^ 1);
                        if let Some(rb) = g1!(b.0, !b.1) {
                            if let Some(m) = self.gate(GateKind::And, ra, rb) {
                                let r = self.gate(GateKind::And, rx, !m);
                                self.emit(r);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Literal of leaf variable `v`, mapped to the kept divisor.
    fn leaf_lit(&self, v: usize) -> Option<Lit> {
        let i = *self.p.leaves.get(v)?;
        self.find(&self.p.divisors[i].table)
    }

    fn rank_of(&self, l: Lit) -> (u32, usize) {
        let i = self.reps[l / 2];
        (self.p.divisors[i].rank, i)
    }

    /// Balanced tree over `inputs`, pairing neighbours level by level.
    fn tree(&mut self, kind: GateKind, mut inputs: Vec<ForestRef>) -> Option<ForestRef> {
        if inputs.is_empty() {
            return Some(match kind {
                GateKind::And => ForestRef::TRUE,
                GateKind::Xor => ForestRef::FALSE,
            });
        }
        while inputs.len() > 1 {
            let mut next = Vec::with_capacity(inputs.len().div_ceil(2));
            for pair in inputs.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.gate(kind, pair[0], pair[1])?
                } else {
                    pair[0]
                });
            }
            inputs = next;
        }
        Some(inputs[0])
    }

    /// AND tree over the literals of a cube, inputs sorted by rank.
    fn cube(&mut self, lits: &[(usize, bool)]) -> Option<ForestRef> {
        let mut ls: Vec<Lit> = Vec::with_capacity(lits.len());
        for &(v, c) in lits {
            ls.push(self.leaf_lit(v)? ^ c as usize);
        }
        ls.sort_by_key(|&l| self.rank_of(l));
        let refs = ls.iter().map(|&l| self.fref(l)).collect();
        self.tree(GateKind::And, refs)
    }

    fn sop(&mut self) {
        let n = self.f.num_vars();
        if self.p.leaves.len() != n {
            return;
        }
        for c in [false, true] {
            let on = self.f.complement_if(c);
            let Some(cubes) = isop(&on, self.limits.max_gates_decomp + 1) else { continue };
            let gates: usize = cubes.iter().map(|q| q.len().saturating_sub(1)).sum::<usize>() + cubes.len().saturating_sub(1);
            if gates > self.limits.max_gates_decomp || cubes.is_empty() {
                continue;
            }
            let mut terms = Vec::with_capacity(cubes.len());
            for q in &cubes {
                match self.cube(q) {
                    Some(r) => terms.push(!r),
                    None => break,
                }
            }
            if terms.len() != cubes.len() {
                continue;
            }
            // OR of cubes = ¬AND of complemented cubes.
            let r = self.tree(GateKind::And, terms).map(|r| !r.complement_if(c));
            self.emit(r);
        }
    }

    fn esop(&mut self) {
        let n = self.f.num_vars();
        if self.p.leaves.len() != n {
            return;
        }
        let anf = self.f.mobius();
        let monomials: Vec<usize> = (0..anf.num_rows()).filter(|&m| anf.bit(m)).collect();
        let has_one = monomials.first() == Some(&0);
        let terms: Vec<usize> = monomials.into_iter().filter(|&m| m != 0).collect();
        let gates: usize = terms.iter().map(|m| m.count_ones() as usize - 1).sum::<usize>() + terms.len().saturating_sub(1);
        if gates > self.limits.max_gates_decomp || terms.is_empty() {
            return;
        }
        let mut refs = Vec::with_capacity(terms.len());
        for &m in &terms {
            let lits: Vec<(usize, bool)> = (0..n).filter(|v| m >> v & 1 == 1).map(|v| (v, false)).collect();
            match self.cube(&lits) {
                Some(r) => refs.push(r),
                None => return,
            }
        }
        let r = self.tree(GateKind::Xor, refs).map(|r| r.complement_if(has_one));
        self.emit(r);
    }
}

/// A product term: `(variable, complemented)` literals.
pub type Cube = Vec<(usize, bool)>;

/// Irredundant sum-of-products cover of `f` (Minato–Morreale). Returns
/// `None` once more than `max_cubes` cubes are produced.
pub fn isop(f: &TruthTable, max_cubes: usize) -> Option<Vec<Cube>> {
    let mut cubes = Vec::new();
    let mut prefix = Vec::new();
    isop_rec(f, f, f.num_vars(), &mut prefix, &mut cubes, max_cubes)?;
    Some(cubes)
}

fn isop_rec(
    lower: &TruthTable,
    upper: &TruthTable,
    top: usize,
    prefix: &mut Cube,
    cubes: &mut Vec<Cube>,
    max_cubes: usize,
) -> Option<TruthTable> {
    if lower.is_const0() {
        return Some(TruthTable::zero(lower.num_vars()));
    }
    if upper.is_const1() {
        if cubes.len() >= max_cubes {
            return None;
        }
        cubes.push(prefix.clone());
        return Some(upper.clone());
    }
    let mut v = top;
    loop {
        v -= 1;
        if lower.depends_on(v) || upper.depends_on(v) {
            break;
        }
    }
    let (l0, l1) = (lower.cofactor(v, false), lower.cofactor(v, true));
    let (u0, u1) = (upper.cofactor(v, false), upper.cofactor(v, true));

    prefix.push((v, true));
    let r0 = isop_rec(&l0.and(&u1.not()), &u0, v, prefix, cubes, max_cubes)?;
    prefix.pop();
    prefix.push((v, false));
    let r1 = isop_rec(&l1.and(&u0.not()), &u1, v, prefix, cubes, max_cubes)?;
    prefix.pop();
    let l_star = l0.and(&r0.not()).or(&l1.and(&r1.not()));
    let rs = isop_rec(&l_star, &u0.and(&u1), v, prefix, cubes, max_cubes)?;

    let xv = TruthTable::var(lower.num_vars(), v).expect("variable in range");
    Some(r0.and(&xv.not()).or(&r1.and(&xv)).or(&rs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(target: &str, divs: &[&str], max_gates: usize) -> ResynProblem {
        ResynProblem {
            target: TruthTable::from_rows(target).unwrap(),
            divisors: divs
                .iter()
                .enumerate()
                .map(|(i, t)| Divisor {
                    signal: Signal::new(i as u32 + 1, false),
                    table: TruthTable::from_rows(t).unwrap(),
                    rank: 0,
                })
                .collect(),
            leaves: Vec::new(),
            max_gates,
        }
    }

    fn encodings(f: &SolutionForest) -> Vec<String> {
        f.outputs().iter().map(|&r| f.encode(r)).collect()
    }

    #[test]
    fn zero_gate_divisor() {
        let p = problem("0110", &["0101", "1001", "0011"], 0);
        let f = resynthesize(&p, &ResynLimits::default());
        assert_eq!(encodings(&f), vec!["!d1"]);
    }

    #[test]
    fn one_gate_and_xor() {
        let p = problem("0110", &["0101", "0011"], 1);
        assert_eq!(encodings(&resynthesize(&p, &ResynLimits::default())), vec!["X(d0,d1)"]);
        let p = problem("0100", &["0101", "0011"], 1);
        assert_eq!(encodings(&resynthesize(&p, &ResynLimits::default())), vec!["A(!d1,d0)"]);
    }

    #[test]
    fn unreachable_target_is_empty() {
        let p = problem("0110100110010110", &["0101010101010101", "0011001100110011", "0000111100001111"], 1);
        let limits = ResynLimits {
            decompose: false,
            ..Default::default()
        };
        assert!(resynthesize(&p, &limits).is_empty());
    }

    #[test]
    fn prune_and_examples() {
        let t = |s| TruthTable::from_rows(s).unwrap();
        assert!(!prune_and(&t("0001"), &t("0101")));
        assert!(prune_and(&t("0111"), &t("0001")));
        assert!(!prune_and(&t("0111"), &t("0111")));
    }

    #[test]
    fn xor_filter_examples() {
        let t = |s| TruthTable::from_rows(s).unwrap();
        let (a, b) = (t("0101"), t("0011"));
        let f = a.xor(&b);
        let s = XorFilter::new(&f, [&a, &b]);
        assert!(s.feasible(&f, &a));
        assert!(s.feasible(&f, &b));
        assert!(!s.feasible(&f, &t("0001")));
    }

    #[test]
    fn isop_covers_exactly() {
        for bits in 0u32..256 {
            let rows: String = (0..8).map(|r| if bits >> r & 1 == 1 { '1' } else { '0' }).collect();
            let f = TruthTable::from_rows(&rows).unwrap();
            let cubes = isop(&f, 64).unwrap();
            let mut cover = TruthTable::zero(3);
            for q in &cubes {
                let mut t = TruthTable::constant(3, true).unwrap();
                for &(v, c) in q {
                    t = t.and(&TruthTable::var(3, v).unwrap().complement_if(c));
                }
                // each cube is an implicant
                assert!(t.implies(&f).unwrap());
                cover = cover.or(&t);
            }
            assert_eq!(cover, f, "{rows}");
        }
    }

    #[test]
    fn forest_hash_conses() {
        let p = problem("00000001", &["01010101", "00110011", "00001111"], 2);
        let limits = ResynLimits {
            decompose: false,
            ..Default::default()
        };
        let f = resynthesize(&p, &limits);
        let mut seen = FxHashSet::default();
        for g in f.gates() {
            assert!(seen.insert((g.kind, g.fanins)));
        }
        let enc = encodings(&f);
        assert!(enc.contains(&"A(A(d0,d1),d2)".to_string()));
        assert!(enc.contains(&"A(A(d1,d2),d0)".to_string()));
    }
}
