use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::split::{full_mask, Split, MAX_LEAVES};

/// A stable n-marked tree of genus zero.
///
/// Vertices are `0..vertex_count()`. All vertex weights are zero, so
/// stability means every non-leaf vertex has degree at least three.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedTree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    /// `leaf_vertex[k - 1]` is the vertex carrying marking `k`.
    leaf_vertex: Vec<usize>,
}

impl MarkedTree {
    /// Validates and builds a tree from raw parts.
    pub fn new(n: usize, vertex_count: usize, edges: Vec<(usize, usize)>, leaf_vertex: Vec<usize>) -> Result<MarkedTree> {
        let bad = |m: String| Err(Error::InvalidTree(m));
        if !(3..=MAX_LEAVES).contains(&n) {
            return bad(format!("leaf count must lie in [3, {MAX_LEAVES}], got {n}"));
        }
        if leaf_vertex.len() != n {
            return bad(format!("expected {n} leaf labels, got {}", leaf_vertex.len()));
        }
        if edges.len() + 1 != vertex_count {
            return bad(format!("{} edges on {vertex_count} vertices cannot form a tree", edges.len()));
        }
        let mut adj = vec![Vec::new(); vertex_count];
        let mut seen = BTreeSet::new();
        let mut norm = Vec::with_capacity(edges.len());
        for (idx, &(a, b)) in edges.iter().enumerate() {
            if a >= vertex_count || b >= vertex_count || a == b {
                return bad(format!("bad edge {a}-{b}"));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return bad(format!("repeated edge {a}-{b}"));
            }
            adj[a].push((b, idx));
            adj[b].push((a, idx));
            norm.push(e);
        }
        // connectivity; with |E| = |V| - 1 this also rules out cycles
        let mut reached = vec![false; vertex_count];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !reached[w] {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return bad("graph is not connected".into());
        }
        let mut is_leaf = vec![false; vertex_count];
        for (k, &v) in leaf_vertex.iter().enumerate() {
            if v >= vertex_count || is_leaf[v] {
                return bad(format!("leaf label {} maps to an invalid or shared vertex {v}", k + 1));
            }
            is_leaf[v] = true;
        }
        for v in 0..vertex_count {
            let deg = adj[v].len();
            if is_leaf[v] && deg != 1 {
                return bad(format!("labeled vertex {v} has degree {deg}"));
            }
            if !is_leaf[v] && deg == 1 {
                return bad(format!("unlabeled vertex {v} has degree 1"));
            }
            if !is_leaf[v] && deg < 3 {
                return bad(format!("vertex {v} has degree {deg}, unstable"));
            }
        }
        Ok(MarkedTree { n, edges: norm, adj, leaf_vertex })
    }

    /// The unique tree whose internal edges realize exactly `splits`.
    ///
    /// Canonical sides form a laminar family; each one becomes a vertex
    /// hanging below the smallest side strictly containing it, and the
    /// whole of `[n-1]` is the vertex that leaf `n` attaches to.
    pub fn from_splits(n: usize, splits: &BTreeSet<Split>) -> Result<MarkedTree> {
        if !(3..=MAX_LEAVES).contains(&n) {
            return Err(Error::InvalidArgument(format!("leaf count must lie in [3, {MAX_LEAVES}], got {n}")));
        }
        let list: Vec<Split> = splits.iter().copied().collect();
        for s in &list {
            if s.n() != n {
                return Err(Error::InvalidArgument(format!("split {s} is on {} leaves, expected {n}", s.n())));
            }
        }
        for (a, s) in list.iter().enumerate() {
            for t in &list[a + 1..] {
                if !s.compatible(t) {
                    return Err(Error::IncompatibleSplits(*s, *t));
                }
            }
        }
        // vertices: leaves 0..n, root cluster n, then one per split
        let root_mask = full_mask(n - 1);
        let mut clusters: Vec<u32> = vec![root_mask];
        clusters.extend(list.iter().map(|s| s.side_mask()));
        let vertex_of_cluster = |c: usize| n + c;
        let mut edges = Vec::new();
        edges.push((n - 1, vertex_of_cluster(0)));
        let parent_of = |mask: u32| -> usize {
            let mut best = 0;
            let mut best_size = u32::MAX;
            for (c, &m) in clusters.iter().enumerate() {
                if m != mask && m & mask == mask && m.count_ones() < best_size {
                    best = c;
                    best_size = m.count_ones();
                }
            }
            best
        };
        for (c, &m) in clusters.iter().enumerate().skip(1) {
            edges.push((vertex_of_cluster(parent_of(m)), vertex_of_cluster(c)));
        }
        for k in 1..n {
            edges.push((vertex_of_cluster(parent_of(1 << (k - 1))), k - 1));
        }
        MarkedTree::new(n, n + clusters.len(), edges, (0..n).collect())
    }

    pub fn star(n: usize) -> Result<MarkedTree> {
        MarkedTree::from_splits(n, &BTreeSet::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v` with the connecting edge index.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Vertex carrying marking `k` (1-based).
    pub fn leaf_vertex(&self, k: usize) -> usize {
        self.leaf_vertex[k - 1]
    }

    pub fn leaf_vertices(&self) -> &[usize] {
        &self.leaf_vertex
    }

    /// Marking carried by `v`, if `v` is a leaf.
    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.leaf_vertex.iter().position(|&w| w == v).map(|k| k + 1)
    }

    pub fn is_leaf_edge(&self, idx: usize) -> bool {
        let (a, b) = self.edges[idx];
        self.adj[a].len() == 1 || self.adj[b].len() == 1
    }

    /// Leaf mask of the component containing `from` after deleting the edge
    /// `from`–`avoid`.
    pub(crate) fn branch_mask(&self, from: usize, avoid: usize) -> u32 {
        let mut mask = 0u32;
        let mut stack = vec![(from, avoid)];
        while let Some((v, parent)) = stack.pop() {
            if let Some(k) = self.label_of(v) {
                mask |= 1 << (k - 1);
            }
            for &(w, _) in &self.adj[v] {
                if w != parent {
                    stack.push((w, v));
                }
            }
        }
        mask
    }

    /// Split induced by each edge (`None` for leaf edges), by edge index.
    pub fn edge_splits(&self) -> Vec<Option<Split>> {
        (0..self.edges.len())
            .map(|idx| {
                if self.is_leaf_edge(idx) {
                    return None;
                }
                let (a, b) = self.edges[idx];
                Split::from_mask(self.n, self.branch_mask(a, b)).ok()
            })
            .collect()
    }

    /// One split per internal edge.
    pub fn splits(&self) -> BTreeSet<Split> {
        self.edge_splits().into_iter().flatten().collect()
    }

    pub fn internal_edge_count(&self) -> usize {
        (0..self.edges.len()).filter(|&i| !self.is_leaf_edge(i)).count()
    }

    pub fn is_trivalent(&self) -> bool {
        self.n >= 3 && self.internal_edge_count() == self.n - 3
    }

    /// Vertices along the unique path from `u` to `v`, inclusive.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.adj.len()];
        let mut stack = vec![u];
        parent[u] = u;
        while let Some(x) = stack.pop() {
            if x == v {
                break;
            }
            for &(w, _) in &self.adj[x] {
                if parent[w] == usize::MAX {
                    parent[w] = x;
                    stack.push(w);
                }
            }
        }
        let mut out = vec![v];
        let mut x = v;
        while x != u {
            x = parent[x];
            out.push(x);
        }
        out.reverse();
        out
    }

    /// Canonical encoding: the sorted split set, which determines the tree.
    pub fn canonical_form(&self) -> CanonicalForm {
        CanonicalForm { n: self.n, splits: self.splits().into_iter().collect() }
    }
}

/// Sorted split list plus the leaf count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub splits: Vec<Split>,
}

pub fn splits_of_tree(t: &MarkedTree) -> BTreeSet<Split> {
    t.splits()
}

pub fn tree_from_splits(n: usize, splits: &BTreeSet<Split>) -> Result<MarkedTree> {
    MarkedTree::from_splits(n, splits)
}

pub fn canonical_form(t: &MarkedTree) -> CanonicalForm {
    t.canonical_form()
}

/// Label-preserving isomorphism test.
pub fn iso_equal(a: &MarkedTree, b: &MarkedTree) -> bool {
    a.canonical_form() == b.canonical_form()
}

/// Upper bound on `n` accepted by the enumerator.
pub const MAX_ENUMERATION_N: usize = 9;

/// Every pairwise-compatible subset of `splits`, in depth-first order.
pub(crate) fn compatible_subsets(splits: &[Split]) -> Vec<Vec<Split>> {
    fn go(splits: &[Split], from: usize, current: &mut Vec<Split>, out: &mut Vec<Vec<Split>>) {
        out.push(current.clone());
        for idx in from..splits.len() {
            let s = splits[idx];
            if current.iter().all(|c| c.compatible(&s)) {
                current.push(s);
                go(splits, idx + 1, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(splits, 0, &mut Vec::new(), &mut out);
    out
}

/// One tree per combinatorial type of stable n-marked tree, sorted by
/// canonical form.
pub fn enumerate_stable_trees(n: usize) -> Result<Vec<MarkedTree>> {
    if !(3..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "enumeration supports 3 <= n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    if n == 3 {
        return Ok(vec![MarkedTree::star(3)?]);
    }
    let splits = super::split::all_splits(n)?;
    let mut types: BTreeMap<CanonicalForm, MarkedTree> = BTreeMap::new();
    for subset in compatible_subsets(&splits) {
        let set: BTreeSet<Split> = subset.into_iter().collect();
        let t = MarkedTree::from_splits(n, &set)?;
        types.insert(t.canonical_form(), t);
    }
    Ok(types.into_values().collect())
}

/// Split sets of all stable types, sorted; cheaper than building trees.
pub fn enumerate_split_sets(n: usize) -> Result<Vec<BTreeSet<Split>>> {
    if !(3..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "enumeration supports 3 <= n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    if n == 3 {
        return Ok(vec![BTreeSet::new()]);
    }
    let splits = super::split::all_splits(n)?;
    let mut sets: Vec<BTreeSet<Split>> =
        compatible_subsets(&splits).into_iter().map(|v| v.into_iter().collect()).collect();
    sets.sort_by(|a, b| a.iter().cmp(b.iter()));
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(n: usize, l: &[usize]) -> Split {
        Split::new(n, l).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_stable_trees(3).unwrap().len(), 1);
        let four = enumerate_stable_trees(4).unwrap();
        assert_eq!(four.len(), 4);
        assert_eq!(four.iter().filter(|t| t.is_trivalent()).count(), 3);
        let five = enumerate_stable_trees(5).unwrap();
        assert_eq!(five.len(), 26);
        let by_edges = |k| five.iter().filter(|t| t.internal_edge_count() == k).count();
        assert_eq!((by_edges(0), by_edges(1), by_edges(2)), (1, 10, 15));
    }

    #[test]
    fn enumerate_rejects_out_of_range() {
        assert!(matches!(enumerate_stable_trees(2), Err(Error::InvalidArgument(_))));
        assert!(matches!(enumerate_stable_trees(10), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn caterpillar_splits() {
        let set: BTreeSet<_> = [sp(5, &[1, 5]), sp(5, &[3, 4])].into_iter().collect();
        let t = tree_from_splits(5, &set).unwrap();
        assert_eq!(splits_of_tree(&t), set);
        assert!(t.is_trivalent());
        // leaf 2 hangs off the middle vertex
        let mid = t.neighbors(t.leaf_vertex(2))[0].0;
        let one = t.neighbors(t.leaf_vertex(1))[0].0;
        let four = t.neighbors(t.leaf_vertex(4))[0].0;
        assert_eq!(t.path(one, four).len(), 3);
        assert!(t.path(one, four).contains(&mid));
    }

    #[test]
    fn star_has_no_splits() {
        for n in 3..=7 {
            assert!(splits_of_tree(&MarkedTree::star(n).unwrap()).is_empty());
        }
    }

    #[test]
    fn incompatible_pair_is_named() {
        let set: BTreeSet<_> = [sp(5, &[1, 2]), sp(5, &[1, 3])].into_iter().collect();
        match tree_from_splits(5, &set) {
            Err(Error::IncompatibleSplits(a, b)) => {
                assert_eq!((a, b), (sp(5, &[1, 2]), sp(5, &[1, 3])));
            }
            other => panic!("expected incompatible splits, got {other:?}"),
        }
    }

    #[test]
    fn iso_ignores_vertex_ids() {
        // (12|34) with internal vertices numbered two different ways
        let a = MarkedTree::new(4, 6, vec![(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)], vec![0, 1, 2, 3]).unwrap();
        let b = MarkedTree::new(4, 6, vec![(5, 0), (5, 3), (4, 5), (4, 1), (4, 2)], vec![0, 3, 1, 2]).unwrap();
        assert!(iso_equal(&a, &b));
        let c = tree_from_splits(4, &[sp(4, &[1, 3])].into_iter().collect()).unwrap();
        assert!(!iso_equal(&a, &c));
    }

    #[test]
    fn validation_errors() {
        // degree-two vertex
        assert!(MarkedTree::new(3, 5, vec![(0, 3), (3, 4), (1, 4), (2, 4)], vec![0, 1, 2]).is_err());
        // leaf label on an interior vertex
        assert!(MarkedTree::new(3, 4, vec![(0, 3), (1, 3), (2, 3)], vec![0, 1, 3]).is_err());
        // disconnected
        assert!(MarkedTree::new(3, 4, vec![(0, 3), (1, 3), (1, 2)], vec![0, 1, 2]).is_err());
    }
}
