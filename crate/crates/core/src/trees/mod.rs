//! Stable marked trees: enumeration, splits, tree metrics, the forgetful
//! map and cherry-property leaf orders.

mod cherry;
mod json;
mod metric;
mod split;
mod tree;

pub use cherry::{all_cherry_orders, check_cherry_property, cherry_order, hanging_subtrees, quartet_cherry, PartialLeafOrder};
pub use json::TreeJson;
pub use metric::{distance_matrix, forget_leaf, four_point_check, DistanceMatrix, MarkedMetricTree};
pub use split::{all_splits, Split, MAX_LEAVES};
pub use tree::{
    canonical_form, enumerate_split_sets, enumerate_stable_trees, iso_equal, splits_of_tree, tree_from_splits,
    CanonicalForm, MarkedTree, MAX_ENUMERATION_N,
};
