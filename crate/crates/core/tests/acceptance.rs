//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//!
//! Expected values come either from the worked examples (quoted as exact
//! rationals) or from oracles written here independently of the library.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use m0n_core::harness::{
    attachments, check_diagram, compare_point_with, default_grid, forget_surjective, random_metric_tree, run_suite,
    Attachment, SweepConfig,
};
use m0n_core::rational::{int, q};
use m0n_core::skeleton::{
    boundary_divisors, intersection_graph, kapranov_class, keel_intersects, local_generators, picard_pairing,
    skeleton_valuation, skeleton_valuation_with_base, SkeletonPoint,
};
use m0n_core::trees::{
    check_cherry_property, cherry_order, enumerate_split_sets, enumerate_stable_trees, forget_leaf, four_point_check,
    MarkedMetricTree, Split,
};
use m0n_core::tropical::{
    cone_complex, cross_ratio_weight, pull_back_to_plucker, section_valuation, tropical_plucker_check, CrossRatio,
};
use m0n_core::valuation::{relation_consistency, CoefficientVal, LaurentPoly, PI_SYMBOL};
use m0n_core::{Result, Q};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<std::result::Result<(), String>>;

fn sp(n: usize, l: &[usize]) -> Split {
    Split::new(n, l).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cone_counts() -> Result<std::result::Result<(), String>> {
    let c4 = cone_complex(4)?.count_by_dim();
    let c5 = cone_complex(5)?.count_by_dim();
    Ok(ensure(c4 == vec![1, 3] && c5 == vec![1, 10, 15], || format!("n=4 {c4:?}, n=5 {c5:?}")))
}

fn divisor_counts() -> Result<std::result::Result<(), String>> {
    for (n, want) in [(4, 3), (5, 10), (6, 25), (7, 56), (8, 119)] {
        let got = boundary_divisors(n)?.len();
        let formula = (1usize << (n - 1)) - n - 1;
        if got != want || got != formula {
            return Ok(Err(format!("n={n}: {got} divisors, expected {want}")));
        }
    }
    Ok(Ok(()))
}

/// Trivalent trees grown by inserting leaves into edges, one at a time;
/// splits read off with a private traversal.
/// A partly grown tree, carrying the next free vertex id.
type Grown = (Vec<(usize, usize)>, Vec<usize>, usize);

fn leaf_insertion_count(n: usize) -> usize {
    // vertex 0..3 are leaves 1..3, vertex 3 the center
    let mut trees: Vec<Grown> = vec![(vec![(0, 3), (1, 3), (2, 3)], vec![0, 1, 2], 4)];
    for _ in 4..=n {
        let mut next = Vec::new();
        for (edges, leaves, count) in &trees {
            for idx in 0..edges.len() {
                let (a, b) = edges[idx];
                let (mid, new_leaf) = (*count, *count + 1);
                let mut e = edges.clone();
                e[idx] = (a, mid);
                e.push((mid, b));
                e.push((mid, new_leaf));
                let mut l = leaves.clone();
                l.push(new_leaf);
                next.push((e, l, count + 2));
            }
        }
        trees = next;
    }
    let mut seen = BTreeSet::new();
    for (edges, leaves, count) in &trees {
        let mut adj = vec![Vec::new(); *count];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let label: BTreeMap<usize, usize> = leaves.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut splits = BTreeSet::new();
        for &(a, b) in edges {
            let mut mask = 0u32;
            let mut stack = vec![(a, b)];
            while let Some((v, from)) = stack.pop() {
                if let Some(k) = label.get(&v) {
                    mask |= 1 << k;
                }
                stack.extend(adj[v].iter().filter(|&&w| w != from).map(|&w| (w, v)));
            }
            let full = (1u32 << n) - 1;
            let side = if mask >> (n - 1) & 1 == 1 { full ^ mask } else { mask };
            if side.count_ones() >= 2 && side.count_ones() <= n as u32 - 2 {
                splits.insert(side);
            }
        }
        seen.insert(splits);
    }
    seen.len()
}

fn trivalent_counts() -> Result<std::result::Result<(), String>> {
    for n in 4..=8 {
        let double_factorial: usize = (1..=2 * n - 5).step_by(2).product();
        let library = enumerate_split_sets(n)?.iter().filter(|s| s.len() == n - 3).count();
        let oracle = leaf_insertion_count(n);
        if library != double_factorial || oracle != double_factorial {
            return Ok(Err(format!("n={n}: library {library}, oracle {oracle}, (2n-5)!! = {double_factorial}")));
        }
    }
    Ok(Ok(()))
}

fn petersen() -> Result<std::result::Result<(), String>> {
    let g = intersection_graph(5)?;
    if g.vertices.len() != 10 || g.edges.len() != 15 || g.degrees().iter().any(|&d| d != 3) || g.girth() != Some(5) {
        return Ok(Err(format!("{} vertices, {} edges, girth {:?}", g.vertices.len(), g.edges.len(), g.girth())));
    }
    // explicit isomorphism onto the Kneser graph K(5,2)
    let two_sets: Vec<BTreeSet<usize>> = g.vertices.iter().map(|d| d.split.smaller_side().into_iter().collect()).collect();
    let distinct: BTreeSet<_> = two_sets.iter().cloned().collect();
    if distinct.len() != 10 || two_sets.iter().any(|s| s.len() != 2) {
        return Ok(Err("divisors do not biject onto 2-subsets".into()));
    }
    let edges: BTreeSet<(usize, usize)> = g.edges.iter().copied().collect();
    for a in 0..10 {
        for b in a + 1..10 {
            let kneser = two_sets[a].is_disjoint(&two_sets[b]);
            if edges.contains(&(a, b)) != kneser {
                return Ok(Err(format!("Kneser mismatch at {:?}, {:?}", two_sets[a], two_sets[b])));
            }
            let keel = keel_intersects(&g.vertices[a], &g.vertices[b])?;
            let pairing = picard_pairing(&kapranov_class(&g.vertices[a])?, &kapranov_class(&g.vertices[b])?);
            if keel != (pairing == 1) {
                return Ok(Err(format!("Keel {keel} but pairing {pairing} for {:?}, {:?}", two_sets[a], two_sets[b])));
            }
        }
    }
    Ok(Ok(()))
}

const COEFFS: [(i64, i64); 5] = [(0, 1), (3, 2), (-1, 2), (2, 1), (7, 3)];

fn random_poly(rng: &mut ChaCha8Rng, alphabet: &[&str]) -> (LaurentPoly, Vec<(Vec<i64>, Q)>) {
    let mut f = LaurentPoly::new(alphabet.iter().map(|s| s.to_string()).collect());
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=5) {
        let exps: Vec<i64> = (0..alphabet.len()).map(|_| rng.gen_range(-4..=4)).collect();
        let (p, d) = *COEFFS.choose(rng).unwrap();
        if f.add_term(exps.clone(), CoefficientVal::Finite(q(p, d))).is_ok() {
            terms.push((exps, q(p, d)));
        }
    }
    (f, terms)
}

fn n4_equality() -> Result<std::result::Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = "cr(1,4;2,3)";
    for l in [int(1), q(1, 2), q(7, 3)] {
        let t = MarkedMetricTree::from_split_lengths(4, &[(sp(4, &[1, 2]), l)].into_iter().collect())?;
        let section = section_valuation(&t, 1, 4)?;
        let skeleton = skeleton_valuation(&SkeletonPoint::new(4, [(sp(4, &[1, 2]), l)])?)?;
        for _ in 0..20 {
            let (f, terms) = random_poly(&mut rng, &[u, PI_SYMBOL]);
            // min_n (v_K(a_n) + n·l), the uniformizer contributing weight 1
            let hand = terms.iter().map(|(e, c)| *c + l * int(e[0]) + int(e[1])).min().unwrap();
            let a = section.evaluate(&pull_back_to_plucker(&f, 4)?)?;
            let b = skeleton.evaluate(&f)?;
            if a != CoefficientVal::Finite(hand) || b != a {
                return Ok(Err(format!("l={l}: section {a}, skeleton {b}, by hand {hand}")));
            }
        }
    }
    Ok(Ok(()))
}

fn n5_table() -> Result<std::result::Result<(), String>> {
    let (u, v, v_over_u) = (CrossRatio::new(1, 4, 2, 3)?, CrossRatio::new(1, 4, 5, 3)?, CrossRatio::new(1, 4, 5, 2)?);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (l15, l34) in [(int(1), int(2)), (q(1, 2), q(7, 3)), (int(3), q(1, 3))] {
        let t = MarkedMetricTree::from_split_lengths(
            5,
            &[(sp(5, &[1, 5]), l15), (sp(5, &[3, 4]), l34)].into_iter().collect(),
        )?;
        let section = section_valuation(&t, 1, 4)?;
        let got = [cross_ratio_weight(&section, &u)?, cross_ratio_weight(&section, &v)?, cross_ratio_weight(&section, &v_over_u)?];
        let want = [l34, l15 + l34, l15];
        if got != want {
            return Ok(Err(format!("section gives {got:?}, table says {want:?}")));
        }
        let point = SkeletonPoint::new(5, [(sp(5, &[3, 4]), l34), (sp(5, &[1, 5]), l15)])?;
        let skeleton = skeleton_valuation_with_base(&point, (1, 4))?;
        let sk = [u, v, v_over_u].map(|c| skeleton.weight(&c.symbol()));
        if sk != want.map(Some) {
            return Ok(Err(format!("skeleton gives {sk:?}")));
        }
        if local_generators(&point, (1, 4))? != vec![u, v_over_u] {
            return Ok(Err("unexpected local generators".into()));
        }
        let (su, sv) = (u.symbol(), v.symbol());
        for _ in 0..10 {
            let (f, terms) = random_poly(&mut rng, &[&su, &sv]);
            let hand = terms.iter().map(|(e, c)| *c + l34 * int(e[0]) + (l15 + l34) * int(e[1])).min().unwrap();
            let a = section.evaluate(&pull_back_to_plucker(&f, 5)?)?;
            let b = skeleton.evaluate(&f)?;
            if a != CoefficientVal::Finite(hand) || a != b {
                return Ok(Err(format!("polynomial: section {a}, skeleton {b}, by hand {hand}")));
            }
        }
    }
    Ok(Ok(()))
}

fn comparison_sweep() -> Result<std::result::Result<(), String>> {
    let cfg = SweepConfig { n_from: 4, n_to: 7, samples: 5, grid: default_grid(), polys: 10, seed: 2024, jobs: None };
    let (summary, reports) = run_suite(&cfg)?;
    let expected_cones = 4 + 26 + 236 + 2752;
    if summary.cones != expected_cones || summary.points != 5 * expected_cones {
        return Ok(Err(format!("covered {} cones / {} points", summary.cones, summary.points)));
    }
    if let Some(r) = reports.iter().find(|r| r.failures > 0) {
        return Ok(Err(format!("{} failures, first on cone {:?}", summary.failures, r.cone)));
    }
    // the verdict does not depend on the base pair of the section
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let n = rng.gen_range(4..=7);
        let t = random_metric_tree(&mut rng, n, &default_grid())?;
        for base in [(1, n), (2, 3), (n, 1)] {
            if !compare_point_with(&t, base, 3, rng.gen())?.pass {
                return Ok(Err(format!("base {base:?} fails")));
            }
        }
    }
    Ok(Ok(()))
}

fn diagram() -> Result<std::result::Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = default_grid();
    for big in 5..=7 {
        for set in enumerate_split_sets(big)? {
            for _ in 0..3 {
                let lengths: BTreeMap<Split, Q> = set.iter().map(|s| (*s, *grid.choose(&mut rng).unwrap())).collect();
                let t = MarkedMetricTree::from_split_lengths(big, &lengths)?;
                if !check_diagram(&t)? {
                    return Ok(Err(format!("square fails on {set:?}")));
                }
            }
        }
    }
    for n in 4..=6 {
        if !forget_surjective(n)? {
            return Ok(Err(format!("some stratum on {n} markings is not hit")));
        }
    }
    Ok(Ok(()))
}

/// Distances after forgetting marking `n + 1`, predicted case by case.
fn predicted(t: &MarkedMetricTree, at: &Attachment) -> Vec<Q> {
    let d = t.distance_matrix();
    let n = t.n() - 1;
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            let shift = match at {
                // the cherry edge shared with `leaf` disappears
                Attachment::Leg { leaf, length } if *leaf == a || *leaf == b => *length,
                _ => int(0),
            };
            out.push(d.get(a, b) - shift);
        }
    }
    out
}

fn case_laws() -> Result<std::result::Result<(), String>> {
    // hand-built S1: leaf 6 in a cherry with 5 on the tree (12|3|45)
    let d0 = q(2, 3);
    let s1 = MarkedMetricTree::from_split_lengths(
        6,
        &[(sp(6, &[1, 2]), int(1)), (sp(6, &[4, 5, 6]), int(2)), (sp(6, &[5, 6]), d0)].into_iter().collect(),
    )?;
    let before = s1.distance_matrix();
    let after = forget_leaf(&s1, 6)?.distance_matrix();
    for a in 1..=5 {
        for b in a + 1..=5 {
            let want = if a == 5 || b == 5 { before.get(a, b) - d0 } else { before.get(a, b) };
            if after.get(a, b) != want {
                return Ok(Err(format!("S1 d'({a},{b}) = {}, expected {want}", after.get(a, b))));
            }
        }
    }
    // every attachment over every type with n <= 5: leg = S1, vertex = S2, edge = S3
    let mut counts = [0usize; 3];
    for n in 3..=5 {
        for tree in enumerate_stable_trees(n)? {
            let lengths: BTreeMap<Split, Q> = tree.splits().into_iter().map(|s| (s, q(3, 2))).collect();
            let base = MarkedMetricTree::from_split_lengths(n, &lengths)?;
            for (at, t) in attachments(&base, &[int(1), q(1, 3)])? {
                counts[match at {
                    Attachment::Leg { .. } => 0,
                    Attachment::Vertex(_) => 1,
                    Attachment::Edge { .. } => 2,
                }] += 1;
                let d = forget_leaf(&t, n + 1)?.distance_matrix();
                let got: Vec<Q> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).map(|(a, b)| d.get(a, b)).collect();
                if got != predicted(&t, &at) {
                    return Ok(Err(format!("{at:?} over {:?}", base.split_lengths().keys().collect::<Vec<_>>())));
                }
            }
        }
    }
    Ok(ensure(counts.iter().all(|&c| c > 0), || format!("case coverage {counts:?}")))
}

fn property_suites() -> Result<std::result::Result<(), String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for idx in 0..1000 {
        let n = rng.gen_range(4..=8);
        let t = random_metric_tree(&mut rng, n, &default_grid())?;
        let v = section_valuation(&t, 1, n)?;
        if !four_point_check(&t.distance_matrix()) || !tropical_plucker_check(&v, n)? || !relation_consistency(&v, n)? {
            return Ok(Err(format!("random tree #{idx} on {n} leaves")));
        }
    }
    for n in 4..=7 {
        for tree in enumerate_stable_trees(n)?.into_iter().filter(|t| t.is_trivalent()) {
            for i in 1..=n {
                for j in 1..=n {
                    if i != j && !check_cherry_property(&tree, i, j, &cherry_order(&tree, i, j)?) {
                        return Ok(Err(format!("cherry order fails on {:?} for ({i}, {j})", tree.splits())));
                    }
                }
            }
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("cone-complex counts for n = 4, 5", cone_counts),
        ("boundary divisor count 2^(n-1) - n - 1, n = 4..8", divisor_counts),
        ("trivalent types (2n-5)!! against leaf insertion, n = 4..8", trivalent_counts),
        ("n = 5 intersection graph is Petersen; Keel iff pairing 1", petersen),
        ("n = 4 section and skeleton evaluations agree", n4_equality),
        ("n = 5 value table for (15|2|34)", n5_table),
        ("comparison sweep over every type, n <= 7", comparison_sweep),
        ("forgetful square commutes, n + 1 <= 7; strata lift", diagram),
        ("forgetful case laws S1, S2, S3", case_laws),
        ("four-point, Plücker and cherry-order properties", property_suites),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match check() {
            Ok(r) => r,
            Err(e) => Err(format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({secs:.2}s)", idx + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} ({secs:.2}s): {why}", idx + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
