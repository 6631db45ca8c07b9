//! Localization for resubstitution: reconvergence-driven cuts, windows and
//! divisor collection.

use crate::tt::{simulate_window, TruthTable, TtError, MAX_VARS};
use crate::xag::{Network, NodeId, Signal};
use rustc_hash::{FxHashMap, FxHashSet};

/// Fanouts inspected per window node when collecting side nodes.
const FANOUT_SCAN_LIMIT: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub root: NodeId,
    /// Leaves in ascending id order.
    pub leaves: Vec<NodeId>,
}

/// Grows a cut from the root's fanins by repeatedly replacing the leaf whose
/// expansion adds the fewest new leaves, as long as the cut stays within
/// `max_leaves`. PIs are never expanded; ties go to the smallest id.
pub fn reconv_cut(net: &Network, root: NodeId, max_leaves: usize) -> Cut {
    assert!(net.is_gate(root), "cut root {root} is not a gate");
    let mut visited: Vec<NodeId> = vec![root];
    let mut leaves: Vec<NodeId> = Vec::new();
    for f in net.fanins(root) {
        if !visited.contains(&f.node()) {
            visited.push(f.node());
            leaves.push(f.node());
        }
    }
    loop {
        let mut best: Option<(i64, NodeId, usize)> = None;
        for (i, &l) in leaves.iter().enumerate() {
            if !net.is_gate(l) {
                continue;
            }
            let mut added = 0;
            let fanins = net.fanins(l);
            for (j, f) in fanins.iter().enumerate() {
                let n = f.node();
                if !visited.contains(&n) && (j == 0 || fanins[0].node() != n) {
                    added += 1;
                }
            }
            let cost = added - 1;
            if best.is_none_or(|(c, id, _)| (cost, l) < (c, id)) {
                best = Some((cost, l, i));
            }
        }
        let Some((cost, _, i)) = best else { break };
        if leaves.len() as i64 + cost > max_leaves as i64 {
            break;
        }
        let l = leaves.swap_remove(i);
        for f in net.fanins(l) {
            if !visited.contains(&f.node()) {
                visited.push(f.node());
                leaves.push(f.node());
            }
        }
    }
    leaves.sort_unstable();
    Cut { root, leaves }
}

#[derive(Clone, Debug)]
pub struct Window {
    pub cut: Cut,
    /// Non-leaf window nodes in topological order: the cone of the root
    /// (root last among them) followed by side nodes.
    pub members: Vec<NodeId>,
    /// Number of leading `members` that belong to the root's cone.
    pub cone_len: usize,
    /// MFFC of the root bounded at the leaves, root first.
    pub mffc: Vec<NodeId>,
    /// Leaves first, then the other usable members by increasing id.
    pub divisors: Vec<Signal>,
    /// Function of the root over the leaves.
    pub target: TruthTable,
    /// Function of every window node over the leaves.
    pub tables: FxHashMap<NodeId, TruthTable>,
}

impl Window {
    pub fn root(&self) -> NodeId {
        self.cut.root
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.cut.leaves
    }

    pub fn table(&self, s: Signal) -> Option<TruthTable> {
        self.tables.get(&s.node()).map(|t| t.complement_if(s.is_complemented()))
    }
}

/// Builds the window of `cut`: the cone between root and leaves, plus side
/// nodes whose fanins are all in the window, simulated over the leaves.
/// Nodes in the root's MFFC and the root itself are never divisors.
pub fn build_window(net: &Network, cut: &Cut, max_divisors: usize) -> Result<Window, TtError> {
    if cut.leaves.len() > MAX_VARS {
        return Err(TtError::TooManyVars(cut.leaves.len()));
    }
    let root = cut.root;
    let mut in_window: FxHashSet<NodeId> = cut.leaves.iter().copied().collect();
    in_window.insert(0);

    // Cone members in post-order.
    let mut members = Vec::new();
    let mut stack: Vec<(NodeId, u8)> = vec![(root, 0)];
    in_window.insert(root);
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if (*next as usize) < net.fanins(v).len() {
            let f = net.fanins(v)[*next as usize].node();
            *next += 1;
            if in_window.insert(f) {
                assert!(net.is_gate(f), "node {f} reached below the cut of {root}");
                stack.push((f, 0));
            }
        } else {
            stack.pop();
            members.push(v);
        }
    }
    let cone_len = members.len();

    let leaf_set: FxHashSet<NodeId> = cut.leaves.iter().copied().collect();
    let mffc = net.mffc_bounded(root, |n| leaf_set.contains(&n));
    let mffc_set: FxHashSet<NodeId> = mffc.iter().copied().collect();
    let mut usable = cut.leaves.len() + members.iter().filter(|m| !mffc_set.contains(m)).count();

    // Side nodes: fanouts of window nodes with every fanin in the window.
    // Fanouts of the root are skipped, which keeps the root's transitive
    // fanout out of the window.
    let mut frontier: Vec<NodeId> = cut.leaves.iter().copied().chain(members.iter().copied()).collect();
    let mut head = 0;
    while head < frontier.len() && usable < max_divisors {
        let n = frontier[head];
        head += 1;
        if n == root {
            continue;
        }
        for &g in net.fanouts(n).iter().take(FANOUT_SCAN_LIMIT) {
            if usable >= max_divisors {
                break;
            }
            if in_window.contains(&g) || !net.is_live(g) {
                continue;
            }
            if net.fanins(g).iter().all(|f| in_window.contains(&f.node()) && f.node() != root) {
                in_window.insert(g);
                members.push(g);
                frontier.push(g);
                usable += 1;
            }
        }
    }

    let tables = simulate_window(net, &cut.leaves, &members)?;
    let target = tables[&root].clone();

    let mut others: Vec<NodeId> = members
        .iter()
        .copied()
        .filter(|&m| m != root && !mffc_set.contains(&m))
        .collect();
    others.sort_unstable();
    let room = max_divisors.saturating_sub(cut.leaves.len());
    others.truncate(room);
    let divisors = cut
        .leaves
        .iter()
        .chain(others.iter())
        .map(|&n| Signal::new(n, false))
        .collect();

    Ok(Window {
        cut: cut.clone(),
        members,
        cone_len,
        mffc,
        divisors,
        target,
        tables,
    })
}
