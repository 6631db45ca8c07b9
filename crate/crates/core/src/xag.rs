//! XOR-AND-Inverter graph with structural hashing, fanout tracking and
//! in-place substitution.
//!
//! Node 0 is the constant-false node. Every other node is either a primary
//! input or a two-input AND/XOR gate. Inverters live on edges as complement
//! flags on [`Signal`]s.
//!
//! Nodes are never reindexed while a network is being rewritten: a node that
//! loses all of its fanouts is tombstoned. [`Network::compact`] rebuilds a
//! dense, creation-ordered copy between passes.

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;
use std::collections::VecDeque;
use std::fmt;
use std::ops::Not;
use thiserror::Error;

pub type NodeId = u32;

/// An edge: a node reference plus a complement flag, packed as an AIGER-style
/// literal (`2 * node + complemented`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signal(u32);

impl Signal {
    pub const FALSE: Signal = Signal(0);
    pub const TRUE: Signal = Signal(1);

    #[inline]
    pub fn new(node: NodeId, complemented: bool) -> Self {
        debug_assert!(node < (1 << 31));
        Signal(node << 1 | complemented as u32)
    }

    #[inline]
    pub fn from_literal(lit: u32) -> Self {
        Signal(lit)
    }

    #[inline]
    pub fn literal(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn node(self) -> NodeId {
        self.0 >> 1
    }

    #[inline]
    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    /// The same node without the complement flag.
    #[inline]
    pub fn regular(self) -> Signal {
        Signal(self.0 & !1)
    }

    #[inline]
    pub fn complement_if(self, c: bool) -> Signal {
        Signal(self.0 ^ c as u32)
    }

    #[inline]
    pub fn is_constant(self) -> bool {
        self.node() == 0
    }
}

impl Not for Signal {
    type Output = Signal;
    #[inline]
    fn not(self) -> Signal {
        Signal(self.0 ^ 1)
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!{}", self.node())
        } else {
            write!(f, "{}", self.node())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Xor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Constant,
    Pi,
    And,
    Xor,
}

impl NodeKind {
    pub fn gate_kind(self) -> Option<GateKind> {
        match self {
            NodeKind::And => Some(GateKind::And),
            NodeKind::Xor => Some(GateKind::Xor),
            _ => None,
        }
    }

    pub fn is_gate(self) -> bool {
        matches!(self, NodeKind::And | NodeKind::Xor)
    }
}

impl From<GateKind> for NodeKind {
    fn from(k: GateKind) -> Self {
        match k {
            GateKind::And => NodeKind::And,
            GateKind::Xor => NodeKind::Xor,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    kind: NodeKind,
    dead: bool,
    fanins: [Signal; 2],
    fanout_count: u32,
    po_refs: u32,
    level: u32,
}

impl Node {
    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    /// Fanins of a gate. Empty for constants and PIs.
    pub fn fanins(&self) -> &[Signal] {
        if self.kind.is_gate() {
            &self.fanins
        } else {
            &[]
        }
    }

    /// Number of gate-fanin plus PO references to this node.
    pub fn fanout_count(&self) -> u32 {
        self.fanout_count
    }

    pub fn po_refs(&self) -> u32 {
        self.po_refs
    }

    /// Level assigned when the node was created or last re-hashed.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_dead(&self) -> bool {
        self.dead
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XagError {
    #[error("substituting node {old} with {new:?} would create a cycle")]
    Cycle { old: NodeId, new: Signal },
    #[error("node {0} is not a live gate")]
    NotAGate(NodeId),
    #[error("node {0} does not exist or is dead")]
    NotLive(NodeId),
}

/// Outcome of gate normalization prior to hashing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalized {
    /// The gate simplifies to an existing signal.
    Trivial(Signal),
    /// Canonical fanins; `complement` is the output inversion absorbed from
    /// complemented XOR fanins.
    Gate {
        kind: GateKind,
        fanins: [Signal; 2],
        complement: bool,
    },
}

/// Constant propagation, idempotence, self-cancellation and canonical fanin
/// ordering. XOR fanins are returned uncomplemented.
pub fn normalize(kind: GateKind, a: Signal, b: Signal) -> Normalized {
    match kind {
        GateKind::And => {
            if a.node() == b.node() {
                return Normalized::Trivial(if a == b { a } else { Signal::FALSE });
            }
            if a == Signal::FALSE || b == Signal::FALSE {
                return Normalized::Trivial(Signal::FALSE);
            }
            if a == Signal::TRUE {
                return Normalized::Trivial(b);
            }
            if b == Signal::TRUE {
                return Normalized::Trivial(a);
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            Normalized::Gate {
                kind,
                fanins: [lo, hi],
                complement: false,
            }
        }
        GateKind::Xor => {
            if a.node() == b.node() {
                return Normalized::Trivial(if a == b { Signal::FALSE } else { Signal::TRUE });
            }
            let c = a.is_complemented() ^ b.is_complemented();
            let (a, b) = (a.regular(), b.regular());
            if a.is_constant() {
                return Normalized::Trivial(b.complement_if(c));
            }
            if b.is_constant() {
                return Normalized::Trivial(a.complement_if(c));
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            Normalized::Gate {
                kind,
                fanins: [lo, hi],
                complement: c,
            }
        }
    }
}

#[inline]
fn strash_key(kind: GateKind, fanins: [Signal; 2]) -> u64 {
    ((kind == GateKind::Xor) as u64) << 63 | (fanins[0].literal() as u64) << 32 | fanins[1].literal() as u64
}

/// A hash-consed XAG.
#[derive(Clone, Debug)]
pub struct Network {
    nodes: Vec<Node>,
    fanouts: Vec<SmallVec<[NodeId; 2]>>,
    pis: Vec<NodeId>,
    pi_names: Vec<String>,
    pos: Vec<Signal>,
    strash: FxHashMap<u64, NodeId>,
    num_dead: usize,
}

impl Default for Network {
    fn default() -> Self {
        Self::new()
    }
}

impl Network {
    pub fn new() -> Self {
        Network {
            nodes: vec![Node {
                kind: NodeKind::Constant,
                dead: false,
                fanins: [Signal::FALSE; 2],
                fanout_count: 0,
                po_refs: 0,
                level: 0,
            }],
            fanouts: vec![SmallVec::new()],
            pis: Vec::new(),
            pi_names: Vec::new(),
            pos: Vec::new(),
            strash: FxHashMap::default(),
            num_dead: 0,
        }
    }

    pub fn get_constant(&self, value: bool) -> Signal {
        Signal::FALSE.complement_if(value)
    }

    pub fn create_pi(&mut self) -> Signal {
        let name = format!("x{}", self.pis.len());
        self.create_named_pi(name)
    }

    pub fn create_named_pi(&mut self, name: impl Into<String>) -> Signal {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            kind: NodeKind::Pi,
            dead: false,
            fanins: [Signal::FALSE; 2],
            fanout_count: 0,
            po_refs: 0,
            level: 0,
        });
        self.fanouts.push(SmallVec::new());
        self.pis.push(id);
        self.pi_names.push(name.into());
        Signal::new(id, false)
    }

    /// Registers `s` as a primary output and returns its index.
    pub fn create_po(&mut self, s: Signal) -> usize {
        assert!(self.is_live(s.node()), "PO references dead node {}", s.node());
        let n = &mut self.nodes[s.node() as usize];
        n.po_refs += 1;
        n.fanout_count += 1;
        self.pos.push(s);
        self.pos.len() - 1
    }

    pub fn create_and(&mut self, a: Signal, b: Signal) -> Signal {
        self.create_gate(GateKind::And, a, b)
    }

    pub fn create_xor(&mut self, a: Signal, b: Signal) -> Signal {
        self.create_gate(GateKind::Xor, a, b)
    }

    pub fn create_or(&mut self, a: Signal, b: Signal) -> Signal {
        !self.create_and(!a, !b)
    }

    pub fn create_gate(&mut self, kind: GateKind, a: Signal, b: Signal) -> Signal {
        assert!(self.is_live(a.node()) && self.is_live(b.node()), "fanin of new gate is not live");
        match normalize(kind, a, b) {
            Normalized::Trivial(s) => s,
            Normalized::Gate {
                kind,
                fanins,
                complement,
            } => {
                let id = match self.strash.get(&strash_key(kind, fanins)) {
                    Some(&id) => id,
                    None => self.push_gate(kind, fanins),
                };
                Signal::new(id, complement)
            }
        }
    }

    /// Looks up an existing live gate without creating one. Trivial gates
    /// resolve to the simplified signal.
    pub fn lookup_gate(&self, kind: GateKind, a: Signal, b: Signal) -> Option<Signal> {
        match normalize(kind, a, b) {
            Normalized::Trivial(s) => Some(s),
            Normalized::Gate {
                kind,
                fanins,
                complement,
            } => self
                .strash
                .get(&strash_key(kind, fanins))
                .map(|&id| Signal::new(id, complement)),
        }
    }

    fn push_gate(&mut self, kind: GateKind, fanins: [Signal; 2]) -> NodeId {
        let id = self.nodes.len() as NodeId;
        let level = 1 + self.nodes[fanins[0].node() as usize]
            .level
            .max(self.nodes[fanins[1].node() as usize].level);
        for f in fanins {
            self.nodes[f.node() as usize].fanout_count += 1;
            self.fanouts[f.node() as usize].push(id);
        }
        self.nodes.push(Node {
            kind: kind.into(),
            dead: false,
            fanins,
            fanout_count: 0,
            po_refs: 0,
            level,
        });
        self.fanouts.push(SmallVec::new());
        self.strash.insert(strash_key(kind, fanins), id);
        id
    }

    // ---- queries -------------------------------------------------------

    /// Total number of allocated node slots, including dead ones.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn is_live(&self, id: NodeId) -> bool {
        (id as usize) < self.nodes.len() && !self.nodes[id as usize].dead
    }

    pub fn is_gate(&self, id: NodeId) -> bool {
        self.nodes[id as usize].kind.is_gate()
    }

    pub fn is_pi(&self, id: NodeId) -> bool {
        self.nodes[id as usize].kind == NodeKind::Pi
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id as usize].kind
    }

    pub fn fanins(&self, id: NodeId) -> &[Signal] {
        self.nodes[id as usize].fanins()
    }

    pub fn fanout_count(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].fanout_count
    }

    /// Gates that reference `id` as a fanin.
    pub fn fanouts(&self, id: NodeId) -> &[NodeId] {
        &self.fanouts[id as usize]
    }

    pub fn level(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].level
    }

    pub fn pis(&self) -> &[NodeId] {
        &self.pis
    }

    pub fn pi_names(&self) -> &[String] {
        &self.pi_names
    }

    pub fn pos(&self) -> &[Signal] {
        &self.pos
    }

    pub fn num_pis(&self) -> usize {
        self.pis.len()
    }

    pub fn num_pos(&self) -> usize {
        self.pos.len()
    }

    /// Live AND plus XOR gates.
    pub fn num_gates(&self) -> usize {
        self.nodes.len() - 1 - self.pis.len() - self.num_dead
    }

    pub fn num_dead(&self) -> usize {
        self.num_dead
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| !n.dead && n.kind == kind).count()
    }

    /// Live gate ids in increasing id order.
    pub fn gates(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.dead && n.kind.is_gate())
            .map(|(i, _)| i as NodeId)
    }

    /// Live nodes in a topological order: the constant, then PIs, then gates.
    ///
    /// On a freshly built or compacted network this is increasing id order.
    /// After in-place substitutions a gate may reference a younger node, so
    /// the order is derived by depth-first search.
    pub fn topo_order(&self) -> Vec<NodeId> {
        let n = self.nodes.len();
        let mut order = Vec::with_capacity(n - self.num_dead);
        let mut visited = vec![false; n];
        order.push(0);
        visited[0] = true;
        for &pi in &self.pis {
            order.push(pi);
            visited[pi as usize] = true;
        }
        let mut stack: Vec<(NodeId, u8)> = Vec::new();
        for id in 1..n {
            if visited[id] || self.nodes[id].dead {
                continue;
            }
            stack.push((id as NodeId, 0));
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < 2 {
                    let f = self.nodes[v as usize].fanins[*next as usize].node() as usize;
                    *next += 1;
                    if !visited[f] {
                        visited[f] = true;
                        stack.push((f as NodeId, 0));
                    }
                } else {
                    stack.pop();
                    order.push(v);
                }
            }
            visited[id] = true;
        }
        order
    }

    /// Whether node ids are currently a valid topological order.
    pub fn is_id_topological(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| {
            n.dead || !n.kind.is_gate() || n.fanins.iter().all(|f| (f.node() as usize) < i)
        })
    }

    /// Maximum fanout-free cone of `root`, root first.
    pub fn mffc(&self, root: NodeId) -> Vec<NodeId> {
        self.mffc_bounded(root, |_| false)
    }

    /// MFFC computed by dereferencing from `root`; nodes for which `boundary`
    /// holds are never entered.
    pub fn mffc_bounded(&self, root: NodeId, boundary: impl Fn(NodeId) -> bool) -> Vec<NodeId> {
        let mut refs: FxHashMap<NodeId, u32> = FxHashMap::default();
        let mut cone = vec![root];
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            for &f in self.nodes[n as usize].fanins() {
                let f = f.node();
                if !self.is_gate(f) || boundary(f) {
                    continue;
                }
                let c = refs.entry(f).or_insert(self.nodes[f as usize].fanout_count);
                *c -= 1;
                if *c == 0 {
                    cone.push(f);
                    stack.push(f);
                }
            }
        }
        cone
    }

    /// True if `target` is in the transitive fanin of `from` (inclusive).
    pub fn in_tfi(&self, from: NodeId, target: NodeId) -> bool {
        let mut seen = FxHashSet::default();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if !seen.insert(n) {
                continue;
            }
            stack.extend(self.nodes[n as usize].fanins().iter().map(|f| f.node()));
        }
        false
    }

    // ---- rewriting -----------------------------------------------------

    /// Redirects every reference to `old` onto `new` and frees the MFFC of
    /// `old`. Fanouts are re-hashed in place; fanouts that become redundant
    /// are merged recursively.
    pub fn substitute(&mut self, old: NodeId, new: Signal) -> Result<(), XagError> {
        if !self.is_live(old) || !self.is_gate(old) {
            return Err(XagError::NotAGate(old));
        }
        if !self.is_live(new.node()) {
            return Err(XagError::NotLive(new.node()));
        }
        if self.in_tfi(new.node(), old) {
            return Err(XagError::Cycle { old, new });
        }
        self.substitute_unchecked(old, new);
        Ok(())
    }

    /// [`Network::substitute`] without the acyclicity check.
    pub(crate) fn substitute_unchecked(&mut self, old: NodeId, new: Signal) {
        // Queued replacement targets hold a temporary reference so they
        // cannot be freed by an unrelated cascade before they are used.
        // Queued gates keep fanins that compute their original function and
        // stay out of the strash table until they are replaced.
        let mut queue = VecDeque::new();
        let mut forward: FxHashMap<NodeId, Signal> = FxHashMap::default();
        let mut pending: FxHashSet<NodeId> = FxHashSet::default();
        self.enqueue(&mut queue, &mut pending, old, new);

        while let Some((old, target)) = queue.pop_front() {
            self.nodes[target.node() as usize].fanout_count -= 1;
            if self.nodes[old as usize].dead {
                self.release(target.node());
                continue;
            }
            let mut new = target;
            while self.nodes[new.node() as usize].dead {
                new = forward[&new.node()].complement_if(new.is_complemented());
            }
            if new.node() == old {
                continue;
            }
            let nn = new.node() as usize;

            if self.nodes[old as usize].po_refs > 0 {
                for po in self.pos.iter_mut() {
                    if po.node() == old {
                        *po = new.complement_if(po.is_complemented());
                        self.nodes[nn].po_refs += 1;
                        self.nodes[nn].fanout_count += 1;
                        self.nodes[old as usize].po_refs -= 1;
                        self.nodes[old as usize].fanout_count -= 1;
                    }
                }
            }

            let users = std::mem::take(&mut self.fanouts[old as usize]);
            for g in users {
                let gi = g as usize;
                if self.nodes[gi].dead {
                    continue;
                }
                let kind = self.nodes[gi].kind.gate_kind().expect("fanout must be a gate");
                let fanins = self.nodes[gi].fanins;
                if self.strash.get(&strash_key(kind, fanins)) == Some(&g) {
                    self.strash.remove(&strash_key(kind, fanins));
                }
                let mut raw = fanins;
                for f in raw.iter_mut() {
                    if f.node() == old {
                        *f = new.complement_if(f.is_complemented());
                    }
                }
                self.nodes[old as usize].fanout_count -= 1;
                self.nodes[nn].fanout_count += 1;
                self.fanouts[nn].push(g);
                self.nodes[gi].fanins = raw;
                if pending.contains(&g) {
                    continue;
                }

                match normalize(kind, raw[0], raw[1]) {
                    Normalized::Trivial(s) => self.enqueue(&mut queue, &mut pending, g, s),
                    Normalized::Gate {
                        kind,
                        fanins,
                        complement,
                    } => {
                        if let Some(&h) = self.strash.get(&strash_key(kind, fanins)) {
                            self.enqueue(&mut queue, &mut pending, g, Signal::new(h, complement));
                        } else if !complement {
                            self.nodes[gi].fanins = fanins;
                            self.strash.insert(strash_key(kind, fanins), g);
                            self.nodes[gi].level = 1 + self.nodes[fanins[0].node() as usize]
                                .level
                                .max(self.nodes[fanins[1].node() as usize].level);
                        } else {
                            let fresh = self.push_gate(kind, fanins);
                            self.enqueue(&mut queue, &mut pending, g, Signal::new(fresh, true));
                        }
                    }
                }
            }

            forward.insert(old, new);
            self.kill(old);
        }
    }

    fn enqueue(
        &mut self,
        queue: &mut VecDeque<(NodeId, Signal)>,
        pending: &mut FxHashSet<NodeId>,
        old: NodeId,
        target: Signal,
    ) {
        pending.insert(old);
        self.nodes[target.node() as usize].fanout_count += 1;
        queue.push_back((old, target));
    }

    fn release(&mut self, id: NodeId) {
        let n = &self.nodes[id as usize];
        if !n.dead && n.kind.is_gate() && n.fanout_count == 0 {
            self.kill(id);
        }
    }

    /// Tombstones `root` and every gate that loses its last fanout as a
    /// consequence.
    fn kill(&mut self, root: NodeId) {
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            let ni = n as usize;
            if self.nodes[ni].dead {
                continue;
            }
            self.nodes[ni].dead = true;
            self.num_dead += 1;
            let kind = self.nodes[ni].kind.gate_kind().expect("only gates die");
            let fanins = self.nodes[ni].fanins;
            if self.strash.get(&strash_key(kind, fanins)) == Some(&n) {
                self.strash.remove(&strash_key(kind, fanins));
            }
            for f in fanins {
                let fi = f.node() as usize;
                if let Some(pos) = self.fanouts[fi].iter().position(|&x| x == n) {
                    self.fanouts[fi].swap_remove(pos);
                }
                self.nodes[fi].fanout_count -= 1;
                if self.nodes[fi].fanout_count == 0 && self.nodes[fi].kind.is_gate() {
                    stack.push(f.node());
                }
            }
            self.fanouts[ni].clear();
        }
    }

    /// Removes gates that drive neither a gate nor a PO.
    pub fn sweep_dangling(&mut self) {
        for id in 1..self.nodes.len() {
            let n = &self.nodes[id];
            if !n.dead && n.kind.is_gate() && n.fanout_count == 0 {
                self.kill(id as NodeId);
            }
        }
    }

    /// Dense copy containing the constant, all PIs and the gates reachable
    /// from POs, numbered in topological order.
    pub fn compact(&self) -> Network {
        let mut out = Network::new();
        let mut map: Vec<Signal> = vec![Signal::FALSE; self.nodes.len()];
        for (i, &pi) in self.pis.iter().enumerate() {
            map[pi as usize] = out.create_named_pi(self.pi_names[i].clone());
        }
        let mut done = vec![false; self.nodes.len()];
        done[0] = true;
        for &pi in &self.pis {
            done[pi as usize] = true;
        }
        let mut stack: Vec<(NodeId, u8)> = Vec::new();
        for &po in &self.pos {
            if done[po.node() as usize] {
                continue;
            }
            stack.push((po.node(), 0));
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < 2 {
                    let f = self.nodes[v as usize].fanins[*next as usize].node();
                    *next += 1;
                    if !done[f as usize] {
                        stack.push((f, 0));
                    }
                } else {
                    stack.pop();
                    if done[v as usize] {
                        continue;
                    }
                    let node = &self.nodes[v as usize];
                    let [a, b] = node.fanins;
                    let ma = map[a.node() as usize].complement_if(a.is_complemented());
                    let mb = map[b.node() as usize].complement_if(b.is_complemented());
                    map[v as usize] = out.create_gate(node.kind.gate_kind().unwrap(), ma, mb);
                    done[v as usize] = true;
                }
            }
        }
        for &po in &self.pos {
            out.create_po(map[po.node() as usize].complement_if(po.is_complemented()));
        }
        out.sweep_dangling();
        if out.num_dead > 0 {
            return out.compact();
        }
        out
    }

    /// Structural consistency check used by tests.
    pub fn check_integrity(&self) -> Result<(), String> {
        let mut fanout = vec![0u32; self.nodes.len()];
        let mut seen_keys = FxHashMap::default();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.dead || !n.kind.is_gate() {
                continue;
            }
            for f in n.fanins {
                if self.nodes[f.node() as usize].dead {
                    return Err(format!("gate {i} has dead fanin {}", f.node()));
                }
                fanout[f.node() as usize] += 1;
                if !self.fanouts[f.node() as usize].contains(&(i as NodeId)) {
                    return Err(format!("gate {i} missing from fanout list of {}", f.node()));
                }
            }
            let kind = n.kind.gate_kind().unwrap();
            match normalize(kind, n.fanins[0], n.fanins[1]) {
                Normalized::Gate {
                    fanins, complement, ..
                } if fanins == n.fanins && !complement => {}
                other => return Err(format!("gate {i} is not canonical: {other:?}")),
            }
            let key = strash_key(kind, n.fanins);
            if let Some(prev) = seen_keys.insert(key, i) {
                return Err(format!("gates {prev} and {i} are structurally equal"));
            }
            if self.strash.get(&key) != Some(&(i as NodeId)) {
                return Err(format!("gate {i} missing from strash"));
            }
        }
        for po in &self.pos {
            if self.nodes[po.node() as usize].dead {
                return Err(format!("PO references dead node {}", po.node()));
            }
            fanout[po.node() as usize] += 1;
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if !n.dead && n.fanout_count != fanout[i] {
                return Err(format!(
                    "node {i} fanout count {} but {} references",
                    n.fanout_count, fanout[i]
                ));
            }
        }
        if seen_keys.len() != self.strash.len() {
            return Err("strash holds stale entries".into());
        }
        Ok(())
    }
}
