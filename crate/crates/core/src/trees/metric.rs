use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;

use super::split::Split;
use super::tree::MarkedTree;

/// A stable tree with a strictly positive rational length on every internal
/// edge. Leaf edges carry length zero, which picks the representative of
/// the class modulo the leaf-edge directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedMetricTree {
    tree: MarkedTree,
    /// Indexed like `tree.edges()`; zero on leaf edges.
    lengths: Vec<Q>,
}

impl MarkedMetricTree {
    /// `lengths` is keyed by edge endpoints (either orientation) and must
    /// cover exactly the internal edges.
    pub fn new(tree: MarkedTree, lengths: &BTreeMap<(usize, usize), Q>) -> Result<MarkedMetricTree> {
        let mut out = vec![Q::zero(); tree.edges().len()];
        let mut used = 0;
        for (idx, &(a, b)) in tree.edges().iter().enumerate() {
            let given = lengths.get(&(a, b)).or_else(|| lengths.get(&(b, a)));
            if tree.is_leaf_edge(idx) {
                if given.is_some() {
                    return Err(Error::InvalidTree(format!("leaf edge {a}-{b} must not carry a length")));
                }
                continue;
            }
            match given {
                Some(l) if *l > Q::zero() => {
                    out[idx] = *l;
                    used += 1;
                }
                Some(l) => {
                    return Err(Error::InvalidTree(format!(
                        "internal edge {a}-{b} has non-positive length {l}; contract it instead"
                    )))
                }
                None => return Err(Error::InvalidTree(format!("internal edge {a}-{b} has no length"))),
            }
        }
        if used != lengths.len() {
            return Err(Error::InvalidTree("lengths given for edges that are not in the tree".into()));
        }
        Ok(MarkedMetricTree { tree, lengths: out })
    }

    /// Builds the tree realizing the given splits with the given lengths.
    pub fn from_split_lengths(n: usize, lengths: &BTreeMap<Split, Q>) -> Result<MarkedMetricTree> {
        let splits: BTreeSet<Split> = lengths.keys().copied().collect();
        let tree = MarkedTree::from_splits(n, &splits)?;
        let mut out = vec![Q::zero(); tree.edges().len()];
        for (idx, s) in tree.edge_splits().into_iter().enumerate() {
            if let Some(s) = s {
                let l = lengths[&s];
                if l <= Q::zero() {
                    return Err(Error::InvalidTree(format!(
                        "split {s} has non-positive length {l}; contract it instead"
                    )));
                }
                out[idx] = l;
            }
        }
        Ok(MarkedMetricTree { tree, lengths: out })
    }

    pub fn tree(&self) -> &MarkedTree {
        &self.tree
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn edge_length(&self, idx: usize) -> Q {
        self.lengths[idx]
    }

    /// Internal-edge lengths keyed by split.
    pub fn split_lengths(&self) -> BTreeMap<Split, Q> {
        self.tree
            .edge_splits()
            .into_iter()
            .enumerate()
            .filter_map(|(idx, s)| s.map(|s| (s, self.lengths[idx])))
            .collect()
    }

    /// Internal-edge lengths keyed by `(min, max)` endpoints.
    pub fn edge_lengths(&self) -> BTreeMap<(usize, usize), Q> {
        self.tree
            .edges()
            .iter()
            .enumerate()
            .filter(|(idx, _)| !self.tree.is_leaf_edge(*idx))
            .map(|(idx, &e)| (e, self.lengths[idx]))
            .collect()
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.n();
        let t = &self.tree;
        let mut d = DistanceMatrix::zero(n);
        let mut dist = vec![Q::zero(); t.vertex_count()];
        for k in 1..=n {
            let start = t.leaf_vertex(k);
            let mut stack = vec![(start, usize::MAX)];
            dist[start] = Q::zero();
            while let Some((v, parent)) = stack.pop() {
                for &(w, idx) in t.neighbors(v) {
                    if w != parent {
                        dist[w] = dist[v] + self.lengths[idx];
                        stack.push((w, v));
                    }
                }
            }
            for l in 1..=n {
                d.set(k, l, dist[t.leaf_vertex(l)]);
            }
        }
        d
    }
}

/// Symmetric leaf-to-leaf distances with zero diagonal, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Q>,
}

impl DistanceMatrix {
    pub fn zero(n: usize) -> DistanceMatrix {
        DistanceMatrix { n, d: vec![Q::zero(); n * n] }
    }

    /// Builds from a full function on pairs; only `k < l` is consulted.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Q) -> DistanceMatrix {
        let mut m = DistanceMatrix::zero(n);
        for k in 1..=n {
            for l in k + 1..=n {
                m.set(k, l, f(k, l));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, l: usize) -> Q {
        self.d[(k - 1) * self.n + (l - 1)]
    }

    pub fn set(&mut self, k: usize, l: usize, v: Q) {
        self.d[(k - 1) * self.n + (l - 1)] = v;
        self.d[(l - 1) * self.n + (k - 1)] = v;
    }

    /// Restriction to the leaves other than `leaf`, relabeled in order.
    pub fn restrict_forget(&self, leaf: usize) -> DistanceMatrix {
        let keep: Vec<usize> = (1..=self.n).filter(|&k| k != leaf).collect();
        DistanceMatrix::from_fn(self.n - 1, |a, b| self.get(keep[a - 1], keep[b - 1]))
    }
}

pub fn distance_matrix(t: &MarkedMetricTree) -> DistanceMatrix {
    t.distance_matrix()
}

/// For every 4-subset the largest of the three pairing sums occurs at least
/// twice.
pub fn four_point_check(d: &DistanceMatrix) -> bool {
    let n = d.n();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let mut s = [
                        d.get(i, j) + d.get(k, l),
                        d.get(i, k) + d.get(j, l),
                        d.get(i, l) + d.get(j, k),
                    ];
                    s.sort();
                    if s[1] != s[2] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Deletes `leaf`, suppresses the resulting degree-two vertex and relabels
/// the remaining leaves in order onto `[n-1]`.
///
/// Merging two internal edges adds their lengths. When the merged edge ends
/// at a leaf its length is dropped: leaf edges always carry zero.
pub fn forget_leaf(t: &MarkedMetricTree, leaf: usize) -> Result<MarkedMetricTree> {
    let n = t.n();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("cannot forget a leaf of a {n}-marked tree")));
    }
    if leaf == 0 || leaf > n {
        return Err(Error::InvalidArgument(format!("leaf {leaf} outside [1, {n}]")));
    }
    let tree = t.tree();
    let gone = tree.leaf_vertex(leaf);
    let hub = tree.neighbors(gone)[0].0;
    let is_leaf_vertex = |v: usize| tree.degree(v) == 1;

    // surviving edges as (a, b, length), with the hub suppressed if needed
    let mut edges: Vec<(usize, usize, Q)> = Vec::new();
    let suppress = tree.degree(hub) == 3;
    let mut hub_edges = Vec::new();
    for (idx, &(a, b)) in tree.edges().iter().enumerate() {
        if a == gone || b == gone {
            continue;
        }
        if suppress && (a == hub || b == hub) {
            let other = if a == hub { b } else { a };
            hub_edges.push((other, t.edge_length(idx)));
            continue;
        }
        edges.push((a, b, t.edge_length(idx)));
    }
    if suppress {
        let [(x, lx), (y, ly)] = <[_; 2]>::try_from(hub_edges)
            .map_err(|_| Error::Internal("suppressed vertex does not have two edges".into()))?;
        let len = if is_leaf_vertex(x) || is_leaf_vertex(y) { Q::zero() } else { lx + ly };
        edges.push((x, y, len));
    }

    // compact vertex ids
    let mut remap = vec![usize::MAX; tree.vertex_count()];
    let mut next = 0;
    for (v, slot) in remap.iter_mut().enumerate() {
        if v != gone && !(suppress && v == hub) {
            *slot = next;
            next += 1;
        }
    }
    let leaf_vertex: Vec<usize> = (1..=n).filter(|&k| k != leaf).map(|k| remap[tree.leaf_vertex(k)]).collect();
    let new_edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b, _)| (remap[a], remap[b])).collect();
    let new_tree = MarkedTree::new(n - 1, next, new_edges, leaf_vertex)?;
    let lengths: BTreeMap<(usize, usize), Q> = edges
        .iter()
        .filter(|(a, b, _)| !is_leaf_vertex(*a) && !is_leaf_vertex(*b))
        .map(|&(a, b, l)| ((remap[a], remap[b]), l))
        .collect();
    MarkedMetricTree::new(new_tree, &lengths)
}
