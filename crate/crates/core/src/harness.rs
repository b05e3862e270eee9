//! Point-by-point verification that the section and skeleton valuations
//! agree and commute with forgetting a marking. Fiber sweeps repeat the
//! forgetting check for every attachment of a new marking over a fixed tree.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{format_q, Q};
use crate::skeleton::{forget_stratum, local_generators, skeleton_valuation_with_base, SkeletonPoint};
use crate::trees::{all_splits, enumerate_split_sets, forget_leaf, MarkedMetricTree, MarkedTree, Split};
use crate::tropical::{
    all_cross_ratios, cone_complex, gauge_fix, pair_index, plucker_symbol, plucker_vector, point_from_distances,
    pull_back_to_plucker, section_valuation, CrossRatio, MAX_CONE_COMPLEX_N,
};
use crate::valuation::{CoefficientVal, LaurentPoly, PI_SYMBOL};

/// Section and skeleton weight of one local generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightPair {
    pub symbol: String,
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub section: Q,
    #[serde(serialize_with = "crate::rational::serialize_q")]
    pub skeleton: Q,
}

/// Outcome of comparing the two valuations at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub cone: Vec<Vec<usize>>,
    #[serde(serialize_with = "serialize_qs")]
    pub lengths: Vec<Q>,
    pub base: (usize, usize),
    pub generators: Vec<WeightPair>,
    pub cross_ratios_checked: usize,
    pub polynomials_checked: usize,
    pub mismatches: Vec<String>,
    pub pass: bool,
    pub seed: u64,
}

fn serialize_qs<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_q))
}

/// `compare_point_with` for base pair `(1, n)` and no random polynomials.
pub fn compare_point(t: &MarkedMetricTree) -> Result<ComparisonReport> {
    compare_point_with(t, (1, t.n()), 0, 0)
}

/// Compares the section valuation for `base` with the skeleton valuation of
/// the same point on every cross-ratio and on `polys` random Laurent
/// polynomials drawn with `seed`.
pub fn compare_point_with(t: &MarkedMetricTree, base: (usize, usize), polys: usize, seed: u64) -> Result<ComparisonReport> {
    let n = t.n();
    let section = section_valuation(t, base.0, base.1)?;
    let point = SkeletonPoint::from_metric_tree(t);
    let skeleton = skeleton_valuation_with_base(&point, base)?;

    // section weights indexed by pair, looked up through the valuation once
    let pair_weight: Vec<Q> = (1..=n)
        .flat_map(|k| (k + 1..=n).map(move |l| (k, l)))
        .map(|(k, l)| section.weight(&plucker_symbol(k, l)).ok_or_else(|| Error::Internal(format!("no weight u{k}{l}"))))
        .collect::<Result<_>>()?;
    let section_cr = |cr: &CrossRatio| -> Q {
        cr.plucker_exponents()
            .iter()
            .map(|&((a, b), e)| pair_weight[pair_index(n, a, b)] * Q::from_integer(e))
            .sum()
    };

    let mut mismatches = Vec::new();
    let crs = all_cross_ratios(n);
    let skeleton_weights: Vec<(&str, Q)> = skeleton.entries().collect();
    if skeleton_weights.len() != crs.len() {
        return Err(Error::Internal("skeleton alphabet does not list every cross-ratio".into()));
    }
    for (cr, (sym, w)) in crs.iter().zip(&skeleton_weights) {
        debug_assert_eq!(cr.symbol(), *sym);
        let s = section_cr(cr);
        if s != *w {
            mismatches.push(format!("{sym}: section {} vs skeleton {}", format_q(&s), format_q(w)));
        }
    }

    let gens = local_generators(&point, base)?;
    let generators = gens
        .iter()
        .map(|g| {
            let symbol = g.symbol();
            let skeleton = skeleton.weight(&symbol).ok_or_else(|| Error::Internal(format!("no skeleton weight for {symbol}")))?;
            Ok(WeightPair { section: section_cr(g), skeleton, symbol })
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in 0..polys {
        let f = random_polynomial(&mut rng, &gens, &crs);
        let sec = section.evaluate(&pull_back_to_plucker(&f, n)?)?;
        let sk = skeleton.evaluate(&f)?;
        if sec != sk {
            mismatches.push(format!("polynomial {idx}: section {sec} vs skeleton {sk}"));
        }
    }

    let (cone, lengths) = point.entries().map(|(s, a)| (s.side(), a)).unzip();
    Ok(ComparisonReport {
        n,
        cone,
        lengths,
        base,
        generators,
        cross_ratios_checked: crs.len(),
        polynomials_checked: polys,
        pass: mismatches.is_empty(),
        mismatches,
        seed,
    })
}

/// Coefficient valuations used for random polynomials.
const COEFFICIENT_GRID: [(i64, i64); 6] = [(0, 1), (1, 1), (1, 2), (-1, 3), (5, 2), (2, 1)];

/// A Laurent polynomial of at most five terms over the local generators,
/// two further cross-ratios and the uniformizer.
pub fn random_polynomial<R: Rng>(rng: &mut R, gens: &[CrossRatio], all: &[CrossRatio]) -> LaurentPoly {
    let mut alphabet: Vec<String> = gens.iter().map(CrossRatio::symbol).collect();
    for _ in 0..2 {
        if let Some(cr) = all.choose(rng) {
            let s = cr.symbol();
            if !alphabet.contains(&s) {
                alphabet.push(s);
            }
        }
    }
    alphabet.push(PI_SYMBOL.to_string());
    let mut f = LaurentPoly::new(alphabet);
    let width = f.alphabet().len();
    let terms = rng.gen_range(1..=5);
    for _ in 0..terms {
        let exps: Vec<i64> = (0..width).map(|_| rng.gen_range(-3..=3)).collect();
        let (p, q) = *COEFFICIENT_GRID.choose(rng).expect("grid is non-empty");
        // a repeated exponent vector is simply skipped
        let _ = f.add_term(exps, CoefficientVal::Finite(Q::new(p, q)));
    }
    f
}

/// Both legs of the forgetful square for forgetting `leaf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramReport {
    /// Forgetting on trees then embedding equals embedding then projecting.
    pub tropical: bool,
    /// Forgetting on strata equals forgetting on trees.
    pub skeleton: bool,
}

impl DiagramReport {
    pub fn pass(&self) -> bool {
        self.tropical && self.skeleton
    }
}

/// Forgets the last marking along both routes of the square.
pub fn check_diagram(t: &MarkedMetricTree) -> Result<bool> {
    Ok(check_diagram_forgetting(t, t.n())?.pass())
}

pub fn check_diagram_forgetting(t: &MarkedMetricTree, leaf: usize) -> Result<DiagramReport> {
    let down = forget_leaf(t, leaf)?;
    let via_trees = gauge_fix(&plucker_vector(&down));
    let via_coords = gauge_fix(&point_from_distances(&t.distance_matrix().restrict_forget(leaf)));
    let strata = forget_stratum(&SkeletonPoint::from_metric_tree(t), leaf)?;
    Ok(DiagramReport {
        tropical: via_trees.coords() == via_coords.coords(),
        skeleton: strata == SkeletonPoint::from_metric_tree(&down),
    })
}

/// Every stratum on `n` markings is the image of one on `n + 1` markings.
pub fn forget_surjective(n: usize) -> Result<bool> {
    let targets: BTreeSet<Vec<Split>> = enumerate_split_sets(n)?.into_iter().map(|s| s.into_iter().collect()).collect();
    let mut hit = BTreeSet::new();
    for set in enumerate_split_sets(n + 1)? {
        let p = SkeletonPoint::new(n + 1, set.into_iter().map(|s| (s, Q::from_integer(1))))?;
        hit.insert(forget_stratum(&p, n + 1)?.splits().to_vec());
    }
    Ok(targets.is_subset(&hit))
}

/// Where the new marking goes in a fiber sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Attachment {
    /// At an interior vertex.
    Vertex(usize),
    /// Inside an internal edge, at the given distance from its first end.
    Edge { edge: (usize, usize), #[serde(serialize_with = "crate::rational::serialize_q")] offset: Q },
    /// On the leg of a marking, forming a cherry with it.
    Leg { leaf: usize, #[serde(serialize_with = "crate::rational::serialize_q")] length: Q },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub base_n: usize,
    pub attachments: usize,
    pub failures: Vec<String>,
}

impl FiberReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// All ways of adding marking `n + 1` to `base`, with edge positions and
/// new leg lengths drawn from `grid`.
pub fn attachments(base: &MarkedMetricTree, grid: &[Q]) -> Result<Vec<(Attachment, MarkedMetricTree)>> {
    check_grid(grid)?;
    let t = base.tree();
    let n = t.n();
    let fresh = t.vertex_count();
    let mut leaf_vertex = t.leaf_vertices().to_vec();
    leaf_vertex.push(fresh);
    let lengths = base.edge_lengths();
    let build = |edges: Vec<(usize, usize)>, count: usize, lengths: &BTreeMap<(usize, usize), Q>| {
        MarkedTree::new(n + 1, count, edges, leaf_vertex.clone()).and_then(|tree| MarkedMetricTree::new(tree, lengths))
    };
    let mut out = Vec::new();
    for v in 0..t.vertex_count() {
        if t.label_of(v).is_none() {
            let mut edges = t.edges().to_vec();
            edges.push((v, fresh));
            out.push((Attachment::Vertex(v), build(edges, fresh + 1, &lengths)?));
        }
    }
    let mid = fresh + 1;
    for (idx, &(a, b)) in t.edges().iter().enumerate() {
        let mut edges: Vec<(usize, usize)> = t.edges().iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, e)| *e).collect();
        edges.extend([(a, mid), (mid, b), (mid, fresh)]);
        if t.is_leaf_edge(idx) {
            let (inner, leaf_v) = if t.label_of(a).is_some() { (b, a) } else { (a, b) };
            let leaf = t.label_of(leaf_v).expect("leaf edge has a labeled end");
            for &g in grid {
                let mut ls = lengths.clone();
                ls.insert((inner, mid), g);
                out.push((Attachment::Leg { leaf, length: g }, build(edges.clone(), mid + 1, &ls)?));
            }
        } else {
            let total = base.edge_length(idx);
            for &g in grid {
                // g / (1 + g) of the way along, always strictly inside
                let offset = total * g / (g + Q::from_integer(1));
                let mut ls = lengths.clone();
                ls.remove(&(a, b));
                ls.insert((a, mid), offset);
                ls.insert((mid, b), total - offset);
                out.push((Attachment::Edge { edge: (a, b), offset }, build(edges.clone(), mid + 1, &ls)?));
            }
        }
    }
    Ok(out)
}

/// Runs the comparison on every attachment over `base` and checks that
/// forgetting the new marking gives `base` back.
pub fn fiber_sweep(base: &MarkedMetricTree, grid: &[Q]) -> Result<FiberReport> {
    let all = attachments(base, grid)?;
    let mut failures = Vec::new();
    let expected = SkeletonPoint::from_metric_tree(base);
    for (at, t) in &all {
        let report = compare_point(t)?;
        if !report.pass {
            failures.push(format!("{at:?}: {}", report.mismatches.join("; ")));
        }
        let back = forget_leaf(t, t.n())?;
        if SkeletonPoint::from_metric_tree(&back) != expected {
            failures.push(format!("{at:?}: forgetting the new marking does not return the base"));
        }
    }
    Ok(FiberReport { base_n: base.n(), attachments: all.len(), failures })
}

fn check_grid(grid: &[Q]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("length grid is empty".into()));
    }
    if let Some(g) = grid.iter().find(|g| **g <= Q::zero()) {
        return Err(Error::InvalidArgument(format!("grid length {} is not positive", format_q(g))));
    }
    Ok(())
}

/// The default length grid `{1, 1/2, 7/3, 2, 3/5}`.
pub fn default_grid() -> Vec<Q> {
    vec![Q::from_integer(1), Q::new(1, 2), Q::new(7, 3), Q::from_integer(2), Q::new(3, 5)]
}

/// Parameters of a comparison sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub n_from: usize,
    pub n_to: usize,
    pub samples: usize,
    pub grid: Vec<Q>,
    pub polys: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("samples per cone must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        check_grid(&self.grid)?;
        if self.n_from <= self.n_to && (self.n_from < 3 || self.n_to > MAX_CONE_COMPLEX_N) {
            return Err(Error::InvalidArgument(format!("sweep range must lie in [3, {MAX_CONE_COMPLEX_N}]")));
        }
        Ok(())
    }
}

/// Aggregate over all sampled points of one cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeReport {
    pub n: usize,
    pub cone: Vec<Vec<usize>>,
    pub points: usize,
    pub failures: usize,
    pub seed: u64,
    /// The first failing point, if any.
    pub first_failure: Option<ComparisonReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub n: (usize, usize),
    pub cones: usize,
    pub points: usize,
    pub failures: usize,
    pub seed: u64,
}

/// Seed of one cone, fixed by the run seed and the cone's position.
fn cone_seed(seed: u64, n: usize, idx: usize) -> u64 {
    // splitmix64 finalizer over the three inputs
    let mut z = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (idx as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_cone(n: usize, splits: &[Split], cfg: &SweepConfig, seed: u64) -> Result<ConeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first_failure = None;
    for _ in 0..cfg.samples {
        let lengths: BTreeMap<Split, Q> =
            splits.iter().map(|s| (*s, *cfg.grid.choose(&mut rng).expect("grid checked non-empty"))).collect();
        let t = MarkedMetricTree::from_split_lengths(n, &lengths)?;
        let report = compare_point_with(&t, (1, n), cfg.polys, rng.gen())?;
        if !report.pass {
            failures += 1;
            first_failure.get_or_insert(report);
        }
    }
    Ok(ConeReport { n, cone: splits.iter().map(Split::side).collect(), points: cfg.samples, failures, seed, first_failure })
}

/// Compares both valuations on `samples` points of every cone for every
/// `n` in range. Reports come back in cone order whatever the thread count.
pub fn run_suite(cfg: &SweepConfig) -> Result<(SuiteSummary, Vec<ConeReport>)> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for n in cfg.n_from..=cfg.n_to {
        let complex = cone_complex(n)?;
        for (idx, cone) in complex.cones.into_iter().enumerate() {
            tasks.push((n, cone.splits, cone_seed(cfg.seed, n, idx)));
        }
    }
    let work = || tasks.par_iter().map(|(n, s, seed)| run_cone(*n, s, cfg, *seed)).collect::<Result<Vec<_>>>();
    let reports = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let summary = SuiteSummary {
        n: (cfg.n_from, cfg.n_to),
        cones: reports.len(),
        points: reports.iter().map(|r| r.points).sum(),
        failures: reports.iter().map(|r| r.failures).sum(),
        seed: cfg.seed,
    };
    Ok((summary, reports))
}

/// Largest `n` accepted by [`random_metric_tree`].
pub const MAX_RANDOM_N: usize = 12;

/// A random stable metric tree: splits are taken greedily from a shuffled
/// list, each compatible one kept with probability 4/5, so both trivalent
/// and degenerate types occur.
pub fn random_metric_tree<R: Rng>(rng: &mut R, n: usize, grid: &[Q]) -> Result<MarkedMetricTree> {
    check_grid(grid)?;
    if !(3..=MAX_RANDOM_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("random trees need 3 <= n <= {MAX_RANDOM_N}, got {n}")));
    }
    let mut lengths = BTreeMap::new();
    if n >= 4 {
        let mut pool = all_splits(n)?;
        pool.shuffle(rng);
        for s in pool {
            if lengths.keys().all(|t: &Split| t.compatible(&s)) && rng.gen_bool(0.8) {
                lengths.insert(s, *grid.choose(rng).expect("grid checked non-empty"));
            }
        }
    }
    MarkedMetricTree::from_split_lengths(n, &lengths)
}
