use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q};

use super::metric::MarkedMetricTree;
use super::tree::MarkedTree;

/// Wire form of a (metric) tree:
/// `{"n", "edges": [[v, w]], "leaf_labels": {"1": v}, "lengths": {"v-w": "p/q"}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub leaf_labels: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lengths: BTreeMap<String, String>,
}

impl TreeJson {
    pub fn from_tree(t: &MarkedTree) -> TreeJson {
        TreeJson {
            n: t.n(),
            edges: t.edges().iter().map(|&(a, b)| [a, b]).collect(),
            leaf_labels: (1..=t.n()).map(|k| (k.to_string(), t.leaf_vertex(k))).collect(),
            lengths: BTreeMap::new(),
        }
    }

    pub fn from_metric(t: &MarkedMetricTree) -> TreeJson {
        let mut j = TreeJson::from_tree(t.tree());
        j.lengths = t.edge_lengths().iter().map(|(&(a, b), l)| (format!("{a}-{b}"), format_q(l))).collect();
        j
    }

    /// Vertex ids may be arbitrary; they are compacted in sorted order.
    pub fn to_tree(&self) -> Result<MarkedTree> {
        let mut ids: Vec<usize> = self.edges.iter().flatten().copied().collect();
        ids.extend(self.leaf_labels.values().copied());
        ids.sort();
        ids.dedup();
        let index = |v: usize| ids.binary_search(&v).expect("collected above");
        let mut leaf_vertex = vec![usize::MAX; self.n];
        for (label, &v) in &self.leaf_labels {
            let k: usize = label.parse().map_err(|_| Error::Parse(format!("leaf label {label:?} is not an integer")))?;
            if k == 0 || k > self.n {
                return Err(Error::Parse(format!("leaf label {k} outside [1, {}]", self.n)));
            }
            leaf_vertex[k - 1] = index(v);
        }
        if leaf_vertex.contains(&usize::MAX) {
            return Err(Error::Parse(format!("expected labels 1..={}", self.n)));
        }
        let edges = self.edges.iter().map(|&[a, b]| (index(a), index(b))).collect();
        MarkedTree::new(self.n, ids.len(), edges, leaf_vertex)
    }

    pub fn to_metric(&self) -> Result<MarkedMetricTree> {
        let tree = self.to_tree()?;
        let mut ids: Vec<usize> = self.edges.iter().flatten().copied().collect();
        ids.extend(self.leaf_labels.values().copied());
        ids.sort();
        ids.dedup();
        let mut lengths = BTreeMap::new();
        for (key, value) in &self.lengths {
            let (a, b) = key
                .split_once('-')
                .ok_or_else(|| Error::Parse(format!("length key {key:?} is not \"v-w\"")))?;
            let parse_id = |s: &str| -> Result<usize> {
                let v: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad vertex id in {key:?}")))?;
                ids.binary_search(&v).map_err(|_| Error::Parse(format!("unknown vertex {v} in {key:?}")))
            };
            lengths.insert((parse_id(a)?, parse_id(b)?), parse_q(value)?);
        }
        MarkedMetricTree::new(tree, &lengths)
    }

    pub fn parse_metric(s: &str) -> Result<MarkedMetricTree> {
        serde_json::from_str::<TreeJson>(s)?.to_metric()
    }
}
