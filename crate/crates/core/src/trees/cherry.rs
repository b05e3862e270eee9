use std::collections::BTreeSet;

use crate::error::{Error, Result};

use super::split::Split;
use super::tree::MarkedTree;

/// A partial order on `[n] ∖ {i, j}`: leaves in different blocks are
/// incomparable, each block is a chain (listed smallest first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialLeafOrder {
    pub endpoints: (usize, usize),
    pub blocks: Vec<Vec<usize>>,
}

impl PartialLeafOrder {
    /// `Some(true)` if `a < b`, `Some(false)` if `b < a`, `None` when
    /// incomparable or equal.
    pub fn compare(&self, a: usize, b: usize) -> Option<bool> {
        for block in &self.blocks {
            let pa = block.iter().position(|&x| x == a);
            let pb = block.iter().position(|&x| x == b);
            if let (Some(pa), Some(pb)) = (pa, pb) {
                return (pa != pb).then_some(pa < pb);
            }
        }
        None
    }
}

/// How the quartet `{a, b, c, d}` is resolved in the tree with the given
/// splits: `Some(((x, y), (z, w)))` for `xy | zw`, `None` when unresolved.
pub fn quartet_cherry(splits: &BTreeSet<Split>, q: [usize; 4]) -> Option<((usize, usize), (usize, usize))> {
    let [a, b, c, d] = q;
    for s in splits {
        for ((x, y), (z, w)) in [((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))] {
            if s.separates_pairs((x, y), (z, w)) {
                return Some(((x, y), (z, w)));
            }
        }
    }
    None
}

/// One entry per interior vertex on the `i`–`j` path, in path order from
/// `i`: the vertex and the sorted leaves hanging off it. Vertices with
/// nothing hanging are skipped.
pub fn hanging_subtrees(t: &MarkedTree, i: usize, j: usize) -> Vec<(usize, Vec<usize>)> {
    let path = t.path(t.leaf_vertex(i), t.leaf_vertex(j));
    let on_path: BTreeSet<usize> = path.iter().copied().collect();
    let mut out = Vec::new();
    for &p in &path[1..path.len() - 1] {
        let mut leaves = Vec::new();
        for &(w, _) in t.neighbors(p) {
            if !on_path.contains(&w) {
                leaves.extend(super::split::leaves_of(t.branch_mask(w, p)));
            }
        }
        leaves.sort();
        if !leaves.is_empty() {
            out.push((p, leaves));
        }
    }
    out
}

/// Leaves below `v` (away from `parent`) in depth-first order, visiting
/// children by smallest leaf so every clade is contiguous.
fn clade_order(t: &MarkedTree, v: usize, parent: usize, out: &mut Vec<usize>) {
    if let Some(k) = t.label_of(v) {
        out.push(k);
        return;
    }
    let mut children: Vec<(usize, usize)> = t
        .neighbors(v)
        .iter()
        .filter(|&&(w, _)| w != parent)
        .map(|&(w, _)| (t.branch_mask(w, v).trailing_zeros() as usize, w))
        .collect();
    children.sort();
    for (_, w) in children {
        clade_order(t, w, v, out);
    }
}

fn check_endpoints(t: &MarkedTree, i: usize, j: usize) -> Result<()> {
    let n = t.n();
    if i == j {
        return Err(Error::InvalidArgument(format!("endpoints must differ, got {i} twice")));
    }
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::InvalidArgument(format!("endpoints ({i}, {j}) outside [1, {n}]")));
    }
    Ok(())
}

/// A leaf order with the cherry property for endpoints `i`, `j`.
pub fn cherry_order(t: &MarkedTree, i: usize, j: usize) -> Result<PartialLeafOrder> {
    check_endpoints(t, i, j)?;
    let path = t.path(t.leaf_vertex(i), t.leaf_vertex(j));
    let on_path: BTreeSet<usize> = path.iter().copied().collect();
    let mut blocks = Vec::new();
    for &p in &path[1..path.len() - 1] {
        let mut branches: Vec<(usize, usize)> = t
            .neighbors(p)
            .iter()
            .filter(|(w, _)| !on_path.contains(w))
            .map(|&(w, _)| (t.branch_mask(w, p).trailing_zeros() as usize, w))
            .collect();
        branches.sort();
        let mut block = Vec::new();
        for (_, w) in branches {
            clade_order(t, w, p, &mut block);
        }
        if !block.is_empty() {
            blocks.push(block);
        }
    }
    let order = PartialLeafOrder { endpoints: (i, j), blocks };
    if check_cherry_property(t, i, j, &order) {
        return Ok(order);
    }
    all_cherry_orders(t, i, j)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("no cherry-property order for endpoints ({i}, {j})")))
}

/// Every order with the cherry property, by exhaustive search over the
/// chain order inside each block.
pub fn all_cherry_orders(t: &MarkedTree, i: usize, j: usize) -> Result<Vec<PartialLeafOrder>> {
    check_endpoints(t, i, j)?;
    let splits = t.splits();
    let subtrees = hanging_subtrees(t, i, j);
    let mut per_block: Vec<Vec<Vec<usize>>> = Vec::new();
    for (_, leaves) in &subtrees {
        let valid: Vec<Vec<usize>> = permutations(leaves)
            .into_iter()
            .filter(|chain| chain_has_cherry_property(&splits, i, chain))
            .collect();
        per_block.push(valid);
    }
    let mut out = vec![Vec::new()];
    for choices in per_block {
        let mut next = Vec::new();
        for prefix in &out {
            for c in &choices {
                let mut p: Vec<Vec<usize>> = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out.into_iter().map(|blocks| PartialLeafOrder { endpoints: (i, j), blocks }).collect())
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for idx in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(idx);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Condition (3) on one chain: for `k < l < v` the quartet `{i, k, l, v}`
/// must not be resolved as `kv | il`.
fn chain_has_cherry_property(splits: &BTreeSet<Split>, i: usize, chain: &[usize]) -> bool {
    for a in 0..chain.len() {
        for b in a + 1..chain.len() {
            for c in b + 1..chain.len() {
                let (k, l, v) = (chain[a], chain[b], chain[c]);
                if let Some(((x, y), (z, w))) = quartet_cherry(splits, [i, k, l, v]) {
                    let pair_kv = |p: (usize, usize)| p == (k, v) || p == (v, k);
                    if pair_kv((x, y)) || pair_kv((z, w)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Checks the three cherry-property conditions for `order` on `t`.
pub fn check_cherry_property(t: &MarkedTree, i: usize, j: usize, order: &PartialLeafOrder) -> bool {
    if i == j || i == 0 || j == 0 || i > t.n() || j > t.n() {
        return false;
    }
    // blocks must partition [n] ∖ {i, j}
    let mut seen = BTreeSet::new();
    for block in &order.blocks {
        for &k in block {
            if k == i || k == j || k == 0 || k > t.n() || !seen.insert(k) {
                return false;
            }
        }
    }
    if seen.len() != t.n() - 2 {
        return false;
    }
    // (1) and (2): blocks are exactly the hanging subtrees
    let subtrees: BTreeSet<Vec<usize>> = hanging_subtrees(t, i, j).into_iter().map(|(_, l)| l).collect();
    let blocks: BTreeSet<Vec<usize>> = order
        .blocks
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.sort();
            b
        })
        .collect();
    if subtrees != blocks {
        return false;
    }
    // (3)
    let splits = t.splits();
    order.blocks.iter().all(|chain| chain_has_cherry_property(&splits, i, chain))
}
