//! The skeleton side: boundary divisors of the log model indexed by splits,
//! strata of the Kato fan as compatible split sets, and the monomial
//! valuations their points define.
//!
//! Distances here are computed straight from split separation, never by
//! walking a tree, so the comparison against the tropical side is between
//! two independent computations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};
use crate::trees::{all_splits, DistanceMatrix, MarkedMetricTree, Split};
use crate::tropical::{all_cross_ratios, CrossRatio};
use crate::valuation::MonomialValuation;

/// The divisor `δ_I`, glued from curves whose markings break as `I ⊔ J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryDivisor {
    pub split: Split,
}

impl BoundaryDivisor {
    pub fn n(&self) -> usize {
        self.split.n()
    }

    pub fn name(&self) -> String {
        self.split.name()
    }
}

/// Largest `n` for which the full divisor list is produced.
pub const MAX_DIVISOR_N: usize = 20;

/// All `2^(n-1) - n - 1` boundary divisors.
pub fn boundary_divisors(n: usize) -> Result<Vec<BoundaryDivisor>> {
    if !(4..=MAX_DIVISOR_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("boundary divisors need 4 <= n <= {MAX_DIVISOR_N}, got {n}")));
    }
    Ok(all_splits(n)?.into_iter().map(|split| BoundaryDivisor { split }).collect())
}

/// Keel's criterion: two boundary divisors meet iff some side of one is
/// contained in some side of the other.
pub fn keel_intersects(a: &BoundaryDivisor, b: &BoundaryDivisor) -> Result<bool> {
    if a.n() != b.n() {
        return Err(Error::InvalidArgument(format!("divisors live on {} and {} markings", a.n(), b.n())));
    }
    let sides = |d: &BoundaryDivisor| -> [BTreeSet<usize>; 2] {
        [d.split.side().into_iter().collect(), d.split.complement().into_iter().collect()]
    };
    let (sa, sb) = (sides(a), sides(b));
    Ok(sa.iter().any(|x| sb.iter().any(|y| x.is_subset(y) || y.is_subset(x))))
}

/// A class `h·H - Σ eᵢ Eᵢ` on the plane blown up at four points, so the
/// exceptional curve `Eᵢ` itself has `eᵢ = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorClassN5 {
    pub h: i64,
    pub e: [i64; 4],
}

impl DivisorClassN5 {
    pub const fn exceptional(i: usize) -> DivisorClassN5 {
        let mut e = [0; 4];
        e[i - 1] = -1;
        DivisorClassN5 { h: 0, e }
    }

    /// Strict transform of the line through points `i` and `j`.
    pub const fn line(i: usize, j: usize) -> DivisorClassN5 {
        let mut e = [0; 4];
        e[i - 1] = 1;
        e[j - 1] = 1;
        DivisorClassN5 { h: 1, e }
    }
}

fn n5_pair(d: &BoundaryDivisor) -> Result<(usize, usize)> {
    if d.n() != 5 {
        return Err(Error::Unsupported(format!("the plane model exists only for n = 5, not {}", d.n())));
    }
    let two = d.split.smaller_side();
    Ok((two[0], two[1]))
}

/// `δ_{i5} ↦ Eᵢ` and `δ_{ij} ↦ H - E_k - E_l` with `{k, l} = [4] ∖ {i, j}`.
pub fn kapranov_class(d: &BoundaryDivisor) -> Result<DivisorClassN5> {
    let (i, j) = n5_pair(d)?;
    if j == 5 {
        return Ok(DivisorClassN5::exceptional(i));
    }
    let rest: Vec<usize> = (1..=4).filter(|&x| x != i && x != j).collect();
    Ok(DivisorClassN5::line(rest[0], rest[1]))
}

/// Label in the blow-up picture: `E3` for a point, `E12` for a line.
pub fn kapranov_label(d: &BoundaryDivisor) -> Result<String> {
    let c = kapranov_class(d)?;
    let idx: String = (1..=4).filter(|&i| c.e[i - 1] != 0).map(|i| i.to_string()).collect();
    Ok(format!("E{idx}"))
}

pub fn picard_pairing(a: &DivisorClassN5, b: &DivisorClassN5) -> i64 {
    a.h * b.h - a.e.iter().zip(&b.e).map(|(x, y)| x * y).sum::<i64>()
}

/// Boundary divisors joined when they meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    pub n: usize,
    pub vertices: Vec<BoundaryDivisor>,
    pub edges: Vec<(usize, usize)>,
}

/// Largest `n` accepted by [`intersection_graph`].
pub const MAX_GRAPH_N: usize = 8;

pub fn intersection_graph(n: usize) -> Result<IntersectionGraph> {
    if !(4..=MAX_GRAPH_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("intersection graph needs 4 <= n <= {MAX_GRAPH_N}, got {n}")));
    }
    let vertices = boundary_divisors(n)?;
    let mut edges = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            if keel_intersects(&vertices[a], &vertices[b])? {
                edges.push((a, b));
            }
        }
    }
    Ok(IntersectionGraph { n, vertices, edges })
}

impl IntersectionGraph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    /// Length of a shortest cycle, `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        let adj = self.adjacency();
        let mut best: Option<usize> = None;
        for root in 0..adj.len() {
            let mut dist = vec![usize::MAX; adj.len()];
            let mut parent = vec![usize::MAX; adj.len()];
            dist[root] = 0;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = v;
                        queue.push_back(w);
                    } else if parent[v] != w {
                        let len = dist[v] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    fn label(&self, d: &BoundaryDivisor) -> Option<String> {
        (self.n == 5).then(|| kapranov_label(d).ok()).flatten()
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph boundary_n{} {{\n", self.n);
        for d in &self.vertices {
            match self.label(d) {
                Some(l) => writeln!(out, "  {} [label=\"{}\"];", d.name(), l),
                None => writeln!(out, "  {};", d.name()),
            }
            .expect("writing to a String cannot fail");
        }
        for &(a, b) in &self.edges {
            writeln!(out, "  {} -- {};", self.vertices[a].name(), self.vertices[b].name())
                .expect("writing to a String cannot fail");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .map(|d| {
                let mut node = serde_json::json!({ "name": d.name(), "side": d.split.smaller_side() });
                if let Some(l) = self.label(d) {
                    node["label"] = l.into();
                }
                node
            })
            .collect();
        let edges: Vec<[String; 2]> =
            self.edges.iter().map(|&(a, b)| [self.vertices[a].name(), self.vertices[b].name()]).collect();
        serde_json::json!({ "n": self.n, "nodes": nodes, "edges": edges })
    }
}

/// A point of the skeleton: the generic point of a stratum together with
/// non-negative weights on its divisors; the uniformizer always has weight 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonPoint {
    n: usize,
    splits: Vec<Split>,
    alpha: Vec<Q>,
}

impl SkeletonPoint {
    pub fn new(n: usize, entries: impl IntoIterator<Item = (Split, Q)>) -> Result<SkeletonPoint> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 markings, got {n}")));
        }
        let mut map = BTreeMap::new();
        for (s, a) in entries {
            if s.n() != n {
                return Err(Error::InvalidArgument(format!("split {s} is on {} leaves, expected {n}", s.n())));
            }
            if a < Q::zero() {
                return Err(Error::InvalidArgument(format!("negative weight {} on {s}", format_q(&a))));
            }
            if map.insert(s, a).is_some() {
                return Err(Error::InvalidArgument(format!("split {s} listed twice")));
            }
        }
        let splits: Vec<Split> = map.keys().copied().collect();
        check_compatible(&splits)?;
        Ok(SkeletonPoint { n, splits, alpha: map.into_values().collect() })
    }

    /// The point with the same splits and edge lengths as `t`.
    pub fn from_metric_tree(t: &MarkedMetricTree) -> SkeletonPoint {
        let lengths = t.split_lengths();
        SkeletonPoint { n: t.n(), splits: lengths.keys().copied().collect(), alpha: lengths.into_values().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    pub fn alpha(&self) -> &[Q] {
        &self.alpha
    }

    pub fn pi_value(&self) -> Q {
        Q::one()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Split, Q)> + '_ {
        self.splits.iter().copied().zip(self.alpha.iter().copied())
    }

    /// Drops splits of weight zero, moving the point to the face it lies in.
    pub fn contract_zeros(&self) -> SkeletonPoint {
        let (splits, alpha) = self.entries().filter(|(_, a)| !a.is_zero()).unzip();
        SkeletonPoint { n: self.n, splits, alpha }
    }

    /// `d_α(k, l)`: total weight of the splits separating `k` from `l`.
    pub fn distance(&self, k: usize, l: usize) -> Q {
        self.entries().filter(|(s, _)| s.separates(k, l)).map(|(_, a)| a).sum()
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        DistanceMatrix::from_fn(self.n, |k, l| self.distance(k, l))
    }

    pub fn to_json(&self) -> SkeletonPointJson {
        SkeletonPointJson {
            n: self.n,
            splits: self.splits.iter().map(Split::side).collect(),
            alpha: self.alpha.iter().map(format_q).collect(),
        }
    }
}

fn check_compatible(splits: &[Split]) -> Result<()> {
    for (idx, a) in splits.iter().enumerate() {
        for b in &splits[idx + 1..] {
            if !keel_intersects(&BoundaryDivisor { split: *a }, &BoundaryDivisor { split: *b })? {
                return Err(Error::IncompatibleSplits(*a, *b));
            }
        }
    }
    Ok(())
}

/// Wire form: `{"n", "splits": [[leaves]], "alpha": ["p/q"]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonPointJson {
    pub n: usize,
    pub splits: Vec<Vec<usize>>,
    pub alpha: Vec<String>,
}

impl SkeletonPointJson {
    pub fn to_point(&self) -> Result<SkeletonPoint> {
        if self.splits.len() != self.alpha.len() {
            return Err(Error::Parse(format!("{} splits but {} weights", self.splits.len(), self.alpha.len())));
        }
        let entries = self
            .splits
            .iter()
            .zip(&self.alpha)
            .map(|(side, a)| Ok((Split::new(self.n, side)?, parse_q(a)?)))
            .collect::<Result<Vec<_>>>()?;
        SkeletonPoint::new(self.n, entries)
    }

    pub fn parse(s: &str) -> Result<SkeletonPoint> {
        let j: SkeletonPointJson = serde_json::from_str(s)?;
        j.to_point()
    }
}

/// The cone `ℝ_{≥0}^S` of a stratum; its faces drop splits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StratumCone {
    pub n: usize,
    pub splits: Vec<Split>,
}

impl StratumCone {
    /// Fails unless the divisors in `splits` meet pairwise.
    pub fn new(n: usize, splits: &[Split]) -> Result<StratumCone> {
        let mut splits = splits.to_vec();
        splits.sort();
        splits.dedup();
        if let Some(s) = splits.iter().find(|s| s.n() != n) {
            return Err(Error::InvalidArgument(format!("split {s} is on {} leaves, expected {n}", s.n())));
        }
        check_compatible(&splits)?;
        Ok(StratumCone { n, splits })
    }

    pub fn dim(&self) -> usize {
        self.splits.len()
    }

    /// Faces of codimension one.
    pub fn facets(&self) -> Vec<StratumCone> {
        (0..self.splits.len())
            .map(|drop| StratumCone {
                n: self.n,
                splits: self.splits.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, s)| *s).collect(),
            })
            .collect()
    }
}

pub fn stratum_cone(p: &SkeletonPoint) -> StratumCone {
    StratumCone { n: p.n, splits: p.splits.clone() }
}

/// One cross-ratio per split of the stratum, each a local equation of its
/// divisor: a quartet `{i,k}|{j,l}` cut by that split and by no other split
/// of the stratum, so its weight at the point is exactly that split's `α`.
///
/// Among valid quartets the one using more of the base leaves wins, then the
/// lexicographically smallest sorted leaf tuple. The base leaves take the
/// `i` and `j` slots whenever they appear.
pub fn local_generators(p: &SkeletonPoint, base: (usize, usize)) -> Result<Vec<CrossRatio>> {
    let (bi, bj) = base;
    if bi == bj || !(1..=p.n).contains(&bi) || !(1..=p.n).contains(&bj) {
        return Err(Error::InvalidArgument(format!("bad base pair ({bi}, {bj}) for n = {}", p.n)));
    }
    p.splits.iter().map(|s| generator_for(p, *s, base)).collect()
}

/// Ranking of a candidate quartet: fewer missing base leaves, then the sorted leaves.
type QuartetKey = (usize, [usize; 4]);

fn generator_for(p: &SkeletonPoint, s: Split, (bi, bj): (usize, usize)) -> Result<CrossRatio> {
    let side = s.side();
    let other = s.complement();
    let mut best: Option<(QuartetKey, [usize; 4])> = None;
    for (x, &a) in side.iter().enumerate() {
        for &c in &side[x + 1..] {
            for (y, &b) in other.iter().enumerate() {
                for &e in &other[y + 1..] {
                    let cut_elsewhere = p.splits.iter().any(|t| *t != s && t.separates_pairs((a, c), (b, e)));
                    if cut_elsewhere {
                        continue;
                    }
                    let quad = [a, c, b, e];
                    let base_count = quad.iter().filter(|&&v| v == bi || v == bj).count();
                    let mut sorted = quad;
                    sorted.sort();
                    // more base leaves first, then the smaller tuple
                    let key = (4 - base_count, sorted);
                    if best.as_ref().is_none_or(|(k, _)| key < *k) {
                        best = Some((key, quad));
                    }
                }
            }
        }
    }
    let (_, [a, c, b, e]) = best.ok_or_else(|| Error::Internal(format!("no quartet is cut by {s} alone")))?;
    Ok(orient([a, c], [b, e], (bi, bj)))
}

/// Places the quartet `{p0,p1}|{r0,r1}` into `cr(i,j;k,l)` slots with `i, k`
/// on one side and `j, l` on the other.
fn orient(p: [usize; 2], r: [usize; 2], (bi, bj): (usize, usize)) -> CrossRatio {
    let p_first = if p.contains(&bi) || r.contains(&bi) {
        p.contains(&bi)
    } else if p.contains(&bj) || r.contains(&bj) {
        r.contains(&bj)
    } else {
        p[0].min(p[1]) < r[0].min(r[1])
    };
    let (first, second) = if p_first {
        (p, r)
    } else {
        (r, p)
    };
    let pick = |pair: [usize; 2], want: usize| {
        if pair.contains(&want) {
            (want, pair[0] + pair[1] - want)
        } else {
            (pair[0].min(pair[1]), pair[0].max(pair[1]))
        }
    };
    let (i, k) = pick(first, bi);
    let (j, l) = pick(second, bj);
    CrossRatio { i, j, k, l }
}

/// Weight of a cross-ratio at the point: `½(d_il + d_jk - d_ik - d_jl)`.
pub fn skeleton_cross_ratio_weight(p: &SkeletonPoint, cr: &CrossRatio) -> Q {
    let d = |a, b| p.distance(a, b);
    (d(cr.i, cr.l) + d(cr.j, cr.k) - d(cr.i, cr.k) - d(cr.j, cr.l)) / Q::from_integer(2)
}

/// The monomial valuation of the point on every cross-ratio symbol of
/// `[n]`, with the local generators (for base pair `(1, n)`) weighted by
/// their `α` directly.
pub fn skeleton_valuation(p: &SkeletonPoint) -> Result<MonomialValuation> {
    skeleton_valuation_with_base(p, (1, p.n))
}

pub fn skeleton_valuation_with_base(p: &SkeletonPoint, base: (usize, usize)) -> Result<MonomialValuation> {
    let gens = local_generators(p, base)?;
    let direct: BTreeMap<CrossRatio, Q> = gens.into_iter().zip(p.alpha.iter().copied()).collect();
    let d = p.distance_matrix();
    let mut entries = Vec::new();
    for cr in all_cross_ratios(p.n) {
        let w = (d.get(cr.i, cr.l) + d.get(cr.j, cr.k) - d.get(cr.i, cr.k) - d.get(cr.j, cr.l)) / Q::from_integer(2);
        if let Some(a) = direct.get(&cr) {
            if *a != w {
                return Err(Error::Internal(format!("generator {cr} has weight {} but α = {}", format_q(&w), format_q(a))));
            }
        }
        entries.push((cr.symbol(), w));
    }
    MonomialValuation::new(entries)
}

/// The metric tree whose splits are the stratum and whose lengths are `α`.
pub fn trop_of_skeleton_point(p: &SkeletonPoint) -> Result<MarkedMetricTree> {
    if let Some((s, _)) = p.entries().find(|(_, a)| a.is_zero()) {
        return Err(Error::DegenerateStratum(s));
    }
    MarkedMetricTree::from_split_lengths(p.n, &p.entries().collect())
}

/// Image under forgetting `leaf`: splits are restricted, those that become
/// trivial vanish, and splits that coincide add their weights.
pub fn forget_stratum(p: &SkeletonPoint, leaf: usize) -> Result<SkeletonPoint> {
    if !(1..=p.n).contains(&leaf) || p.n < 4 {
        return Err(Error::InvalidArgument(format!("cannot forget leaf {leaf} of {}", p.n)));
    }
    let mut merged: BTreeMap<Split, Q> = BTreeMap::new();
    for (s, a) in p.entries() {
        if let Some(t) = s.forget(leaf) {
            *merged.entry(t).or_insert_with(Q::zero) += a;
        }
    }
    SkeletonPoint::new(p.n - 1, merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use crate::trees::{forget_leaf, splits_of_tree};

    fn sp(n: usize, l: &[usize]) -> Split {
        Split::new(n, l).unwrap()
    }

    fn div(n: usize, l: &[usize]) -> BoundaryDivisor {
        BoundaryDivisor { split: sp(n, l) }
    }

    fn cr(i: usize, j: usize, k: usize, l: usize) -> CrossRatio {
        CrossRatio::new(i, j, k, l).unwrap()
    }

    fn cat5(l15: Q, l34: Q) -> SkeletonPoint {
        SkeletonPoint::new(5, [(sp(5, &[1, 5]), l15), (sp(5, &[3, 4]), l34)]).unwrap()
    }

    #[test]
    fn divisor_counts() {
        for (n, c) in [(4, 3), (5, 10), (6, 25), (7, 56), (8, 119)] {
            assert_eq!(boundary_divisors(n).unwrap().len(), c);
        }
        assert!(boundary_divisors(3).is_err());
    }

    #[test]
    fn keel_examples() {
        assert!(keel_intersects(&div(5, &[1, 2]), &div(5, &[3, 4])).unwrap());
        assert!(!keel_intersects(&div(5, &[1, 2]), &div(5, &[1, 3])).unwrap());
        assert!(!keel_intersects(&div(4, &[1, 2]), &div(4, &[1, 3])).unwrap());
        assert!(keel_intersects(&div(5, &[1, 2]), &div(4, &[1, 3])).is_err());
    }

    #[test]
    fn keel_matches_compatibility() {
        for n in 4..=7 {
            let ds = boundary_divisors(n).unwrap();
            for a in &ds {
                for b in &ds {
                    if a != b {
                        assert_eq!(keel_intersects(a, b).unwrap(), a.split.compatible(&b.split));
                    }
                }
            }
        }
    }

    #[test]
    fn kapranov_dictionary() {
        assert_eq!(kapranov_class(&div(5, &[1, 5])).unwrap(), DivisorClassN5 { h: 0, e: [-1, 0, 0, 0] });
        assert_eq!(kapranov_class(&div(5, &[1, 2])).unwrap(), DivisorClassN5 { h: 1, e: [0, 0, 1, 1] });
        assert_eq!(kapranov_class(&div(5, &[3, 4])).unwrap(), DivisorClassN5 { h: 1, e: [1, 1, 0, 0] });
        assert_eq!(kapranov_label(&div(5, &[1, 2])).unwrap(), "E34");
        assert_eq!(kapranov_label(&div(5, &[3, 5])).unwrap(), "E3");
        assert!(matches!(kapranov_class(&div(6, &[1, 2])), Err(Error::Unsupported(_))));
    }

    #[test]
    fn pairing_examples() {
        let e1 = DivisorClassN5::exceptional(1);
        assert_eq!(picard_pairing(&e1, &e1), -1);
        let l12 = DivisorClassN5::line(1, 2);
        assert_eq!(picard_pairing(&l12, &l12), -1);
        assert_eq!(picard_pairing(&l12, &DivisorClassN5::line(3, 4)), 1);
        // a line through a blown-up point meets its exceptional curve once
        assert_eq!(picard_pairing(&l12, &DivisorClassN5::exceptional(1)), 1);
        assert_eq!(picard_pairing(&l12, &DivisorClassN5::exceptional(3)), 0);
    }

    #[test]
    fn outer_cycle_of_the_figure() {
        let g = intersection_graph(5).unwrap();
        let by_label: BTreeMap<String, usize> =
            g.vertices.iter().enumerate().map(|(i, d)| (kapranov_label(d).unwrap(), i)).collect();
        let adj = g.adjacency();
        let cycle = ["E34", "E3", "E23", "E2", "E12"];
        for w in 0..5 {
            let (a, b) = (by_label[cycle[w]], by_label[cycle[(w + 1) % 5]]);
            assert!(adj[a].contains(&b), "{} -- {}", cycle[w], cycle[(w + 1) % 5]);
        }
    }

    #[test]
    fn small_graphs() {
        let g4 = intersection_graph(4).unwrap();
        assert_eq!((g4.vertices.len(), g4.edges.len(), g4.girth()), (3, 0, None));
        let g5 = intersection_graph(5).unwrap();
        assert_eq!(g5.edges.len(), 15);
        assert!(g5.degrees().iter().all(|&d| d == 3));
        assert_eq!(g5.girth(), Some(5));
        assert_eq!(intersection_graph(6).unwrap().vertices.len(), 25);
        assert!(intersection_graph(9).is_err());
        let dot = g5.to_dot();
        assert!(dot.contains("d15 [label=\"E1\"]"));
        assert_eq!(dot.matches(" -- ").count(), 15);
        assert_eq!(g5.to_json()["edges"].as_array().unwrap().len(), 15);
    }

    #[test]
    fn stratum_cones() {
        let p = cat5(int(1), int(2));
        assert_eq!(stratum_cone(&p).dim(), 2);
        assert_eq!(stratum_cone(&p).facets().len(), 2);
        assert_eq!(StratumCone::new(5, &[]).unwrap().dim(), 0);
        assert!(matches!(StratumCone::new(5, &[sp(5, &[1, 2]), sp(5, &[1, 3])]), Err(Error::IncompatibleSplits(..))));
        assert!(SkeletonPoint::new(5, [(sp(5, &[1, 2]), int(1)), (sp(5, &[1, 3]), int(1))]).is_err());
        assert!(SkeletonPoint::new(5, [(sp(5, &[1, 2]), int(-1))]).is_err());
    }

    #[test]
    fn generators_small() {
        let p4 = SkeletonPoint::new(4, [(sp(4, &[1, 2]), int(1))]).unwrap();
        assert_eq!(local_generators(&p4, (1, 4)).unwrap(), vec![cr(1, 4, 2, 3)]);
        let p5 = cat5(int(1), int(2));
        // splits sort as {3,4} before {2,3,4} (= δ15)
        assert_eq!(local_generators(&p5, (1, 4)).unwrap(), vec![cr(1, 4, 2, 3), cr(1, 4, 5, 2)]);
        let empty = SkeletonPoint::new(5, []).unwrap();
        assert!(local_generators(&empty, (1, 5)).unwrap().is_empty());
        assert!(local_generators(&p5, (2, 2)).is_err());
    }

    #[test]
    fn generators_have_weight_alpha() {
        for n in 4..=7 {
            for set in crate::trees::enumerate_split_sets(n).unwrap() {
                let entries: Vec<(Split, Q)> = set.iter().enumerate().map(|(i, s)| (*s, q(i as i64 + 1, 3))).collect();
                let p = SkeletonPoint::new(n, entries).unwrap();
                for base in [(1, n), (2, 3)] {
                    let gens = local_generators(&p, base).unwrap();
                    for (g, a) in gens.iter().zip(p.alpha()) {
                        assert_eq!(skeleton_cross_ratio_weight(&p, g), *a);
                    }
                }
            }
        }
    }

    #[test]
    fn any_three_generators_span_four_leaves() {
        // the pair {k, l} away from the endpoints, over any three generators
        for n in 6..=7 {
            for set in crate::trees::enumerate_split_sets(n).unwrap() {
                let p = SkeletonPoint::new(n, set.into_iter().map(|s| (s, int(1)))).unwrap();
                let gens = local_generators(&p, (1, n)).unwrap();
                for a in 0..gens.len() {
                    for b in a + 1..gens.len() {
                        for c in b + 1..gens.len() {
                            let span: BTreeSet<usize> =
                                [gens[a], gens[b], gens[c]].iter().flat_map(|g| [g.k, g.l]).collect();
                            assert!(span.len() >= 4, "{:?}", [gens[a], gens[b], gens[c]]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn valuation_n4_and_n5() {
        let a = q(7, 3);
        let p4 = SkeletonPoint::new(4, [(sp(4, &[1, 2]), a)]).unwrap();
        let v = skeleton_valuation(&p4).unwrap();
        assert_eq!(v.weight("cr(1,4;2,3)"), Some(a));
        assert_eq!(v.alphabet().len(), 24);

        let (l15, l34) = (int(1), int(2));
        let v = skeleton_valuation_with_base(&cat5(l15, l34), (1, 4)).unwrap();
        assert_eq!(v.weight("cr(1,4;2,3)"), Some(l34));
        assert_eq!(v.weight("cr(1,4;5,3)"), Some(l15 + l34));
        assert_eq!(v.weight("cr(1,4;5,2)"), Some(l15));

        let star = skeleton_valuation(&SkeletonPoint::new(5, []).unwrap()).unwrap();
        assert!(star.entries().all(|(_, w)| w.is_zero()));
    }

    #[test]
    fn trop_round_trip_and_cases() {
        let p = cat5(int(1), int(2));
        let t = trop_of_skeleton_point(&p).unwrap();
        assert_eq!(SkeletonPoint::from_metric_tree(&t), p);
        assert_eq!(t.distance_matrix(), p.distance_matrix());
        // nested pair: 3 ∈ {3,4}, 1 on the far side of δ15
        assert_eq!(p.distance(3, 1), int(3));
        assert_eq!(p.distance(3, 4), int(0));
        assert_eq!(p.distance(2, 5), int(1));
        let zero = SkeletonPoint::new(5, [(sp(5, &[3, 4]), int(0))]).unwrap();
        assert!(matches!(trop_of_skeleton_point(&zero), Err(Error::DegenerateStratum(_))));
        assert_eq!(trop_of_skeleton_point(&zero.contract_zeros()).unwrap().tree().internal_edge_count(), 0);
    }

    #[test]
    fn forget_examples() {
        let (a, b) = (q(1, 2), int(3));
        let p = cat5(a, b);
        let f5 = forget_stratum(&p, 5).unwrap();
        assert_eq!(f5, SkeletonPoint::new(4, [(sp(4, &[3, 4]), b)]).unwrap());
        let f2 = forget_stratum(&p, 2).unwrap();
        assert_eq!(f2.splits().len(), 1);
        assert_eq!(f2.alpha(), &[a + b]);
        let oracle = forget_leaf(&trop_of_skeleton_point(&p).unwrap(), 2).unwrap();
        assert_eq!(f2, SkeletonPoint::from_metric_tree(&oracle));
        assert_eq!(splits_of_tree(oracle.tree()).len(), 1);
        assert!(forget_stratum(&SkeletonPoint::new(5, []).unwrap(), 3).unwrap().splits().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let p = cat5(q(1, 2), int(3));
        let s = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(s, r#"{"n":5,"splits":[[3,4],[2,3,4]],"alpha":["3/1","1/2"]}"#);
        assert_eq!(SkeletonPointJson::parse(&s).unwrap(), p);
        assert!(SkeletonPointJson::parse(r#"{"n":5,"splits":[[1,2]],"alpha":[]}"#).is_err());
    }
}
