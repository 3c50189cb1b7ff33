//! Browser bindings: configuration text in, JSON out.

use pbbddc::driver::{run, Pipeline, ProblemConfig};
use pbbddc::partition::GlobKind;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_CELLS: usize = 16 * 16 * 16;

fn parse(config: &str) -> Result<ProblemConfig, String> {
    let mut cfg = ProblemConfig::parse_str(config).map_err(|e| e.to_string())?;
    cfg.threads = 1;
    let n = cfg.mesh_cells();
    if n.iter().product::<usize>() > MAX_CELLS {
        return Err(format!("mesh {}x{}x{} too large for the demo", n[0], n[1], n[2]));
    }
    Ok(cfg)
}

/// PB-subdomain ids and `log10 α` of the cells in the z-layer `layer`.
pub fn partition_layer_json(config: &str, layer: usize) -> Result<String, String> {
    let cfg = parse(config)?;
    let p = Pipeline::build(&cfg).map_err(|e| e.to_string())?;
    let [nx, ny, nz] = cfg.mesh_cells();
    if layer >= nz {
        return Err(format!("layer {layer} outside 0..{nz}"));
    }
    let cells: Vec<usize> = (0..nx * ny).map(|c| c + nx * ny * layer).collect();
    Ok(json!({
        "nx": nx,
        "ny": ny,
        "nz": nz,
        "n_subdomains": p.part.n_geo,
        "n_pb": p.part.n_pb(),
        "geo": cells.iter().map(|&c| p.part.geo[c]).collect::<Vec<_>>(),
        "pb": cells.iter().map(|&c| p.part.pb[c]).collect::<Vec<_>>(),
        "log_alpha": cells.iter().map(|&c| p.field.alpha[c].log10()).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Number of faces, coarse edges and corners, and the coarse problem size.
pub fn globs_json(config: &str) -> Result<String, String> {
    let cfg = parse(config)?;
    let p = Pipeline::build(&cfg).map_err(|e| e.to_string())?;
    let count = |k| p.globs.of_kind(k).count();
    Ok(json!({
        "faces": count(GlobKind::Face),
        "edge_globs": count(GlobKind::Edge),
        "corners": count(GlobKind::Corner),
        "coarse_edges": p.coarse.n_edges(),
        "coarse_size": p.coarse.n_coarse(),
        "n_dofs": p.space.n_dofs(),
    })
    .to_string())
}

/// Runs PCG and returns the JSON report.
pub fn solve_json(config: &str) -> Result<String, String> {
    let cfg = parse(config)?;
    run(&cfg).and_then(|r| r.without_timing().to_json()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn partition_layer(config: &str, layer: usize) -> Result<String, JsValue> {
    partition_layer_json(config, layer).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn globs(config: &str) -> Result<String, JsValue> {
    globs_json(config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve(config: &str) -> Result<String, JsValue> {
    solve_json(config).map_err(|e| JsValue::from_str(&e))
}
