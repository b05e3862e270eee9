//! The tropicalization side: tree metrics embedded in `ℚ^(n choose 2)`
//! modulo the image of `L(a)_{kl} = a_k + a_l`, the cone complex of tree
//! types, and the section valuations on Plücker coordinates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};
use crate::trees::{enumerate_split_sets, DistanceMatrix, MarkedMetricTree, Split};
use crate::valuation::{LaurentPoly, MonomialValuation, PI_SYMBOL};

/// Name of the Plücker coordinate `u_kl` (`k < l`).
pub fn plucker_symbol(k: usize, l: usize) -> String {
    let (a, b) = (k.min(l), k.max(l));
    if b < 10 {
        format!("u{a}{b}")
    } else {
        format!("u{a}_{b}")
    }
}

/// Inverse of [`plucker_symbol`].
pub fn parse_plucker_symbol(s: &str) -> Option<(usize, usize)> {
    let rest = s.strip_prefix('u')?;
    let (a, b) = match rest.split_once('_') {
        Some((a, b)) => (a.parse().ok()?, b.parse().ok()?),
        None if rest.len() == 2 => (rest[..1].parse().ok()?, rest[1..].parse().ok()?),
        None => return None,
    };
    (a < b && a >= 1).then_some((a, b))
}

/// Position of the pair `{k, l}` in lexicographic order `12, 13, …, (n-1)n`.
pub fn pair_index(n: usize, k: usize, l: usize) -> usize {
    let (a, b) = (k.min(l), k.max(l));
    // pairs starting with 1..a-1 come first
    (a - 1) * (2 * n - a) / 2 + (b - a - 1)
}

pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |k| (k + 1..=n).map(move |l| (k, l)))
}

/// A class in `ℚ^(n choose 2) / im L`, held by one representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropPoint {
    n: usize,
    coords: Vec<Q>,
    gauge: bool,
}

impl TropPoint {
    pub fn new(n: usize, coords: Vec<Q>) -> Result<TropPoint> {
        if n < 3 || coords.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidArgument(format!("{} coordinates do not fit n = {n}", coords.len())));
        }
        Ok(TropPoint { n, coords, gauge: false })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, l: usize) -> Q {
        self.coords[pair_index(self.n, k, l)]
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_gauge_fixed(&self) -> bool {
        self.gauge
    }

    /// `self + L(a)`, with `a` indexed from leaf 1.
    pub fn shift(&self, a: &[Q]) -> TropPoint {
        let coords = pairs(self.n).map(|(k, l)| self.get(k, l) + a[k - 1] + a[l - 1]).collect();
        TropPoint { n: self.n, coords, gauge: false }
    }

    pub fn to_json(&self) -> TropPointJson {
        TropPointJson {
            n: self.n,
            coords: pairs(self.n).map(|(k, l)| (format!("{k},{l}"), format_q(&self.get(k, l)))).collect(),
            gauge: self.gauge,
        }
    }
}

/// Wire form: `{"n", "coords": {"k,l": "p/q"}, "gauge": bool}` with `k < l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropPointJson {
    pub n: usize,
    pub coords: BTreeMap<String, String>,
    pub gauge: bool,
}

impl TropPointJson {
    pub fn to_point(&self) -> Result<TropPoint> {
        let n = self.n;
        if n < 3 {
            return Err(Error::Parse(format!("n = {n} is too small")));
        }
        let mut coords = vec![None; n * (n - 1) / 2];
        for (key, value) in &self.coords {
            let (k, l) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .filter(|&(k, l)| 1 <= k && k < l && l <= n)
                .ok_or_else(|| Error::Parse(format!("bad pair key {key:?}")))?;
            coords[pair_index(n, k, l)] = Some(parse_q(value)?);
        }
        let coords: Option<Vec<Q>> = coords.into_iter().collect();
        let coords = coords.ok_or_else(|| Error::Parse("missing coordinates".into()))?;
        let p = TropPoint { n, coords, gauge: false };
        if self.gauge && gauge_fix(&p).coords != p.coords {
            return Err(Error::Parse("point is flagged gauge-fixed but is not canonical".into()));
        }
        Ok(TropPoint { gauge: self.gauge, ..p })
    }
}

/// `coords(k, l) = -½ d(k, l)`, not yet gauge-fixed.
pub fn plucker_vector(t: &MarkedMetricTree) -> TropPoint {
    point_from_distances(&t.distance_matrix())
}

pub fn point_from_distances(d: &DistanceMatrix) -> TropPoint {
    let half = Q::new(-1, 2);
    let n = d.n();
    TropPoint { n, coords: pairs(n).map(|(k, l)| half * d.get(k, l)).collect(), gauge: false }
}

/// The representative zeroing coordinates `12, 13, …, 1n, 23`.
pub fn gauge_fix(x: &TropPoint) -> TropPoint {
    let n = x.n;
    let two = Q::from_integer(2);
    let a1 = (x.get(2, 3) - x.get(1, 2) - x.get(1, 3)) / two;
    let mut a = vec![a1];
    a.extend((2..=n).map(|j| -x.get(1, j) - a1));
    TropPoint { gauge: true, ..x.shift(&a) }
}

/// The coordinates `{il, jl | l ≠ i, j}` around base pair `ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    pub base: (usize, usize),
    pub members: Vec<(usize, usize)>,
}

impl IndexSet {
    pub fn caterpillar(n: usize, i: usize, j: usize) -> Result<IndexSet> {
        if i == j || !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(Error::InvalidArgument(format!("bad base pair ({i}, {j}) for n = {n}")));
        }
        let mut members: Vec<(usize, usize)> = (1..=n)
            .filter(|&l| l != i && l != j)
            .flat_map(|l| [(i.min(l), i.max(l)), (j.min(l), j.max(l))])
            .collect();
        members.sort();
        Ok(IndexSet { base: (i.min(j), i.max(j)), members })
    }
}

/// `π_I(x)_{kl} = x_kl - x_ij` on the distance representative.
pub fn local_projection(x: &TropPoint, index: &IndexSet) -> BTreeMap<(usize, usize), Q> {
    let (i, j) = index.base;
    let base = x.get(i, j);
    index.members.iter().map(|&(k, l)| ((k, l), x.get(k, l) - base)).collect()
}

/// A cone of the tree-space fan: one per combinatorial type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub splits: Vec<Split>,
}

impl Cone {
    pub fn dim(&self) -> usize {
        self.splits.len()
    }
}

/// The cones of all stable types, faces given by dropping splits.
#[derive(Debug, Clone)]
pub struct ConeComplex {
    pub n: usize,
    pub cones: Vec<Cone>,
    lookup: HashMap<Vec<Split>, usize>,
}

impl ConeComplex {
    pub fn index_of(&self, splits: &[Split]) -> Option<usize> {
        let mut key = splits.to_vec();
        key.sort();
        self.lookup.get(&key).copied()
    }

    /// Codimension-one faces of cone `idx`.
    pub fn facets(&self, idx: usize) -> Vec<usize> {
        let s = &self.cones[idx].splits;
        (0..s.len())
            .map(|drop| {
                let f: Vec<Split> = s.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, x)| *x).collect();
                self.lookup[&f]
            })
            .collect()
    }

    /// All faces of cone `idx`, itself included.
    pub fn faces(&self, idx: usize) -> Vec<usize> {
        let s = &self.cones[idx].splits;
        let mut out: Vec<usize> = (0u32..1 << s.len())
            .map(|m| {
                let f: Vec<Split> = s.iter().enumerate().filter(|&(i, _)| m >> i & 1 == 1).map(|(_, x)| *x).collect();
                self.lookup[&f]
            })
            .collect();
        out.sort();
        out
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let top = self.cones.iter().map(Cone::dim).max().unwrap_or(0);
        let mut counts = vec![0; top + 1];
        for c in &self.cones {
            counts[c.dim()] += 1;
        }
        counts
    }

    pub fn maximal(&self) -> impl Iterator<Item = (usize, &Cone)> {
        let top = self.n.saturating_sub(3);
        self.cones.iter().enumerate().filter(move |(_, c)| c.dim() == top)
    }
}

/// Upper bound on `n` accepted by [`cone_complex`].
pub const MAX_CONE_COMPLEX_N: usize = 8;

pub fn cone_complex(n: usize) -> Result<ConeComplex> {
    if !(3..=MAX_CONE_COMPLEX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("cone complex supports 3 <= n <= {MAX_CONE_COMPLEX_N}, got {n}")));
    }
    let cones: Vec<Cone> =
        enumerate_split_sets(n)?.into_iter().map(|s| Cone { splits: s.into_iter().collect() }).collect();
    let lookup = cones.iter().enumerate().map(|(i, c)| (c.splits.clone(), i)).collect();
    Ok(ConeComplex { n, cones, lookup })
}

/// The cross-ratio `(u_il u_jk) / (u_ik u_jl)`, named `cr(i,j;k,l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossRatio {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl CrossRatio {
    pub fn new(i: usize, j: usize, k: usize, l: usize) -> Result<CrossRatio> {
        let all = [i, j, k, l];
        let distinct = (0..4).all(|a| (a + 1..4).all(|b| all[a] != all[b]));
        if !distinct || all.contains(&0) {
            return Err(Error::InvalidArgument(format!("cross-ratio needs four distinct leaves, got {all:?}")));
        }
        Ok(CrossRatio { i, j, k, l })
    }

    pub fn symbol(&self) -> String {
        self.to_string()
    }

    /// Exponents on Plücker pairs: `+1` on `il`, `jk` and `-1` on `ik`, `jl`.
    pub fn plucker_exponents(&self) -> [((usize, usize), i64); 4] {
        let p = |a: usize, b: usize| (a.min(b), a.max(b));
        let CrossRatio { i, j, k, l } = *self;
        [(p(i, l), 1), (p(j, k), 1), (p(i, k), -1), (p(j, l), -1)]
    }

    /// `½(d_il + d_jk - d_ik - d_jl)`.
    pub fn weight_from_distances(&self, d: &DistanceMatrix) -> Q {
        let CrossRatio { i, j, k, l } = *self;
        (d.get(i, l) + d.get(j, k) - d.get(i, k) - d.get(j, l)) / Q::from_integer(2)
    }

    pub fn max_leaf(&self) -> usize {
        self.i.max(self.j).max(self.k).max(self.l)
    }
}

impl fmt::Display for CrossRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cr({},{};{},{})", self.i, self.j, self.k, self.l)
    }
}

impl FromStr for CrossRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<CrossRatio> {
        let bad = || Error::Parse(format!("not a cross-ratio symbol: {s:?}"));
        let body = s.trim().strip_prefix("cr(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (left, right) = body.split_once(';').ok_or_else(bad)?;
        let two = |part: &str| -> Result<(usize, usize)> {
            let (a, b) = part.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        let ((i, j), (k, l)) = (two(left)?, two(right)?);
        CrossRatio::new(i, j, k, l)
    }
}

/// All cross-ratio symbols on `n` leaves: every ordering of every 4-subset.
/// Swapping `k` and `l` inverts the function, so both orientations appear.
pub fn all_cross_ratios(n: usize) -> Vec<CrossRatio> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                for l in 1..=n {
                    if let Ok(cr) = CrossRatio::new(i, j, k, l) {
                        out.push(cr);
                    }
                }
            }
        }
    }
    out
}

/// Additive section weights `w(u_kl) = ½(d(k,l) - d(i,j))`; `w(u_ij) = 0`.
/// The seminorm is `|u_kl| = exp(-w(u_kl))`.
pub fn section_valuation(t: &MarkedMetricTree, i: usize, j: usize) -> Result<MonomialValuation> {
    let n = t.n();
    if i == j {
        return Err(Error::InvalidArgument(format!("base pair needs two distinct leaves, got {i} twice")));
    }
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return Err(Error::InvalidArgument(format!("base pair ({i}, {j}) outside [1, {n}]")));
    }
    let x = plucker_vector(t);
    let base = x.get(i, j);
    // -(x_kl - x_ij) = ½(d_kl - d_ij)
    MonomialValuation::new(pairs(n).map(|(k, l)| (plucker_symbol(k, l), base - x.get(k, l))))
}

/// Rewrites a polynomial whose symbols are cross-ratios, Plücker
/// coordinates or the uniformizer as a Laurent polynomial in the Plücker
/// coordinates of `[n]` (plus the uniformizer if used).
pub fn pull_back_to_plucker(f: &LaurentPoly, n: usize) -> Result<LaurentPoly> {
    enum Sym {
        Pair(usize),
        Cross([(usize, i64); 4]),
        Pi,
    }
    let npairs = n * (n - 1) / 2;
    let syms: Vec<Sym> = f
        .alphabet()
        .iter()
        .map(|s| {
            if s == PI_SYMBOL {
                return Ok(Sym::Pi);
            }
            if let Some((a, b)) = parse_plucker_symbol(s) {
                if b > n {
                    return Err(Error::InvalidArgument(format!("{s} refers to a leaf beyond {n}")));
                }
                return Ok(Sym::Pair(pair_index(n, a, b)));
            }
            let cr: CrossRatio = s.parse().map_err(|_| Error::InvalidArgument(format!("unknown symbol {s}")))?;
            if cr.max_leaf() > n {
                return Err(Error::InvalidArgument(format!("{s} refers to a leaf beyond {n}")));
            }
            Ok(Sym::Cross(cr.plucker_exponents().map(|((a, b), e)| (pair_index(n, a, b), e))))
        })
        .collect::<Result<_>>()?;
    let uses_pi = syms.iter().any(|s| matches!(s, Sym::Pi));
    let mut alphabet: Vec<String> = pairs(n).map(|(k, l)| plucker_symbol(k, l)).collect();
    if uses_pi {
        alphabet.push(PI_SYMBOL.to_string());
    }
    let mut terms: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
    for (exps, v) in f.terms() {
        let mut out = vec![0i64; alphabet.len()];
        for (sym, &e) in syms.iter().zip(exps) {
            match sym {
                Sym::Pair(p) => out[*p] += e,
                Sym::Cross(parts) => {
                    for &(p, s) in parts {
                        out[p] += s * e;
                    }
                }
                Sym::Pi => out[npairs] += e,
            }
        }
        terms.entry(out).and_modify(|w| *w = (*w).min(*v)).or_insert(*v);
    }
    let mut p = LaurentPoly::new(alphabet);
    for (e, v) in terms {
        p.add_term(e, crate::valuation::CoefficientVal::Finite(v))?;
    }
    Ok(p)
}

/// Weight of a cross-ratio under a valuation on Plücker coordinates.
pub fn cross_ratio_weight(v: &MonomialValuation, cr: &CrossRatio) -> Result<Q> {
    let mut total = Q::zero();
    for ((a, b), e) in cr.plucker_exponents() {
        let s = plucker_symbol(a, b);
        let w = v.weight(&s).ok_or_else(|| Error::InvalidArgument(format!("missing Plücker weight {s}")))?;
        total += w * Q::from_integer(e);
    }
    Ok(total)
}

/// For every quadruple the largest of the three pairing sums of weights is
/// attained at least twice (the convention under which section weights
/// `½(d_kl - d_ij)` satisfy the Plücker relations; see
/// [`crate::valuation::relation_consistency`]).
pub fn tropical_plucker_check(v: &MonomialValuation, n: usize) -> Result<bool> {
    let w = |a: usize, b: usize| -> Result<Q> {
        let s = plucker_symbol(a, b);
        v.weight(&s).ok_or_else(|| Error::InvalidArgument(format!("missing Plücker weight {s}")))
    };
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let mut s = [w(i, j)? + w(k, l)?, w(i, k)? + w(j, l)?, w(i, l)? + w(j, k)?];
                    s.sort();
                    if s[1] != s[2] {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}
