//! Browser bindings for the demo page.
//!
//! Every export takes and returns JSON strings. The plain functions in this
//! module do the work and are what the native tests call; the `wasm_bindgen`
//! wrappers only turn their errors into JavaScript exceptions.

use m0n_core::harness::{check_diagram_forgetting, compare_point_with};
use m0n_core::skeleton::{forget_stratum, intersection_graph, trop_of_skeleton_point, SkeletonPointJson};
use m0n_core::trees::{forget_leaf, TreeJson};
use m0n_core::tropical::{gauge_fix, plucker_vector};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Random polynomials checked per comparison on top of the cross-ratios.
const DEMO_POLYS: usize = 10;

/// The boundary intersection graph on `n` markings, as nodes and edges.
pub fn boundary_graph_json(n: usize) -> Result<String, String> {
    let g = intersection_graph(n).map_err(|e| e.to_string())?;
    Ok(g.to_json().to_string())
}

/// Compares the section and skeleton valuations at a skeleton point given as
/// `{"n", "splits", "alpha"}`. Zero weights are contracted first.
pub fn compare_json(point: &str, base_i: usize, base_j: usize, seed: u64) -> Result<String, String> {
    let p = SkeletonPointJson::parse(point).map_err(|e| e.to_string())?.contract_zeros();
    let t = trop_of_skeleton_point(&p).map_err(|e| e.to_string())?;
    let report = compare_point_with(&t, (base_i, base_j), DEMO_POLYS, seed).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Forgets `leaf` at a skeleton point and reports both routes of the square.
pub fn forget_json(point: &str, leaf: usize) -> Result<String, String> {
    let p = SkeletonPointJson::parse(point).map_err(|e| e.to_string())?.contract_zeros();
    let t = trop_of_skeleton_point(&p).map_err(|e| e.to_string())?;
    let down = forget_leaf(&t, leaf).map_err(|e| e.to_string())?;
    let stratum = forget_stratum(&p, leaf).map_err(|e| e.to_string())?;
    let diagram = check_diagram_forgetting(&t, leaf).map_err(|e| e.to_string())?;
    Ok(json!({
        "tree": TreeJson::from_metric(&down),
        "stratum": stratum.to_json(),
        "plucker": gauge_fix(&plucker_vector(&down)).to_json(),
        "tropical_square": diagram.tropical,
        "skeleton_square": diagram.skeleton,
    })
    .to_string())
}

#[wasm_bindgen(js_name = boundaryGraph)]
pub fn boundary_graph(n: usize) -> Result<String, JsError> {
    boundary_graph_json(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare(point: &str, base_i: usize, base_j: usize, seed: u32) -> Result<String, JsError> {
    compare_json(point, base_i, base_j, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn forget(point: &str, leaf: usize) -> Result<String, JsError> {
    forget_json(point, leaf).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn petersen() {
        let v: serde_json::Value = serde_json::from_str(&boundary_graph_json(5).unwrap()).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 10);
        assert_eq!(v["edges"].as_array().unwrap().len(), 15);
    }

    #[test]
    fn errors_are_strings() {
        assert!(boundary_graph_json(2).is_err());
        assert!(compare_json("{", 1, 4, 0).is_err());
        assert!(forget_json(r#"{"n": 4, "splits": [], "alpha": []}"#, 7).is_err());
    }
}
