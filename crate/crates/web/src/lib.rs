//! Browser demo: associahedra and punctured-polygon flip graphs, geodesics
//! between triangulations, and the rigidity census, all as JSON strings.

use fliplab::morphisms::rigidity_suite;
use fliplab::{enumerate_full, FlipGraphView, SurfaceSpec, Tracked, Triangulation};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_VERTICES: usize = 5_000;

#[derive(Serialize)]
struct Node {
    /// Chords as `[p, q]` with `p < q`, marked points numbered around the
    /// boundary; the puncture, if any, is `n`.
    chords: Vec<[u32; 2]>,
    degree: usize,
}

#[derive(Serialize)]
struct Graph {
    surface: String,
    points: u32,
    punctured: bool,
    nodes: Vec<Node>,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct Geodesic {
    distance: usize,
    count: usize,
    path: Vec<usize>,
}

fn spec(n: u32, punctured: bool) -> Result<SurfaceSpec, String> {
    let ok = if punctured { (2..=5).contains(&n) } else { (4..=9).contains(&n) };
    if !ok {
        return Err(format!("unsupported polygon size {n}"));
    }
    Ok(if punctured { SurfaceSpec::punctured_disk(n) } else { SurfaceSpec::disk(n) })
}

fn view(n: u32, punctured: bool) -> Result<FlipGraphView, String> {
    let t = Triangulation::standard(&spec(n, punctured)?).map_err(|e| e.to_string())?;
    enumerate_full(&t, MAX_VERTICES).map_err(|e| e.to_string())
}

fn chords(t: &Tracked) -> Vec<[u32; 2]> {
    let mut out: Vec<[u32; 2]> = t
        .tri
        .interior_arcs()
        .into_iter()
        .map(|a| {
            let (p, q) = t.tri.endpoints(a);
            [p.min(q), p.max(q)]
        })
        .collect();
    out.sort_unstable();
    out
}

/// Full flip graph of the `n`-gon, or of the once-punctured `n`-gon.
pub fn flip_graph_json(n: u32, punctured: bool) -> Result<String, String> {
    let g = view(n, punctured)?;
    let graph = Graph {
        surface: g.surface().to_string(),
        points: n,
        punctured,
        nodes: g
            .vertices()
            .iter()
            .map(|v| Node {
                chords: chords(&v.tracked),
                degree: v.degree,
            })
            .collect(),
        edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&graph).map_err(|e| e.to_string())
}

/// One shortest flip sequence between two vertices, plus the number of
/// geodesics (capped at 1000).
pub fn geodesic_json(n: u32, punctured: bool, from: usize, to: usize) -> Result<String, String> {
    let g = view(n, punctured)?;
    if from >= g.len() || to >= g.len() {
        return Err("vertex out of range".into());
    }
    let all = g.geodesics(from, to, 1000).map_err(|e| e.to_string())?;
    let path = all.first().cloned().ok_or("unreachable")?;
    let out = Geodesic {
        distance: path.len() - 1,
        count: all.len(),
        path,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Injective simplicial maps from the `m`-gon graph into the `n`-gon graph,
/// matched against maps induced by polygon embeddings.
pub fn census_json(m: u32, n: u32) -> Result<String, String> {
    if m > n || n > 7 {
        return Err("census needs m <= n <= 7".into());
    }
    let (a, b) = (view(m, false)?, view(n, false)?);
    let r = rigidity_suite(&a, &b, 100_000).map_err(|e| e.to_string())?;
    serde_json::to_string(&serde_json::json!({
        "summary": r.summary_line(),
        "embeddings": r.embeddings,
        "symmetries": r.symmetries,
        "exceptional_domain": r.exceptional_domain,
        "violations": r.structure_violations.len(),
    }))
    .map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn flip_graph(n: u32, punctured: bool) -> Result<String, JsValue> {
    flip_graph_json(n, punctured).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn geodesic(n: u32, punctured: bool, from: usize, to: usize) -> Result<String, JsValue> {
    geodesic_json(n, punctured, from, to).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn census(m: u32, n: u32) -> Result<String, JsValue> {
    census_json(m, n).map_err(|e| JsValue::from_str(&e))
}
