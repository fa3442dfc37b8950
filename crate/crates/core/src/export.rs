//! Deterministic JSON and DOT output for explored views.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arc_coords::{ArcCoord, TriKey};
use crate::explorer::{FlipGraphView, GraphStats};
use crate::surface::SurfaceSpec;

#[derive(Clone, Debug, Serialize)]
pub struct VertexRecord {
    pub id: usize,
    pub depth: usize,
    pub degree: usize,
    /// Indices into `arcs`.
    pub arcs: Vec<usize>,
    pub key: TriKey,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphRecord {
    pub surface: SurfaceSpec,
    pub complexity: usize,
    pub radius: Option<usize>,
    pub stats: GraphStats,
    pub arcs: Vec<ArcCoord>,
    pub vertices: Vec<VertexRecord>,
    /// `[u, v]` with `u < v`, sorted.
    pub edges: Vec<[usize; 2]>,
}

pub fn graph_record(g: &FlipGraphView) -> GraphRecord {
    GraphRecord {
        surface: g.surface().clone(),
        complexity: g.complexity(),
        radius: g.radius(),
        stats: g.stats(),
        arcs: g.arc_table().to_vec(),
        vertices: g
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, v)| VertexRecord {
                id,
                depth: v.depth,
                degree: v.degree,
                arcs: v.arcs.clone(),
                key: v.key.clone(),
            })
            .collect(),
        edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
    }
}

pub fn to_json(g: &FlipGraphView) -> String {
    serde_json::to_string_pretty(&graph_record(g)).expect("graph record serializes")
}

/// Undirected DOT graph; vertices labelled by index, degree-deficient
/// vertices drawn as boxes.
pub fn to_dot(g: &FlipGraphView) -> String {
    let d = g.complexity();
    let mut s = String::new();
    writeln!(s, "graph flips {{").unwrap();
    writeln!(s, "  label=\"{}\";", g.surface()).unwrap();
    for (i, v) in g.vertices().iter().enumerate() {
        let shape = if v.degree < d { "box" } else { "ellipse" };
        writeln!(s, "  v{i} [label=\"{i}\" shape={shape} tooltip=\"{}\"];", v.key.short_hash()).unwrap();
    }
    for (u, v) in g.edges() {
        writeln!(s, "  v{u} -- v{v};").unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::enumerate_full;
    use crate::triangulation::Triangulation;

    #[test]
    fn pentagon_dot() {
        let g = enumerate_full(&Triangulation::standard(&SurfaceSpec::disk(5)).unwrap(), 10).unwrap();
        let dot = to_dot(&g);
        assert_eq!(dot.matches(" -- ").count(), 5);
        assert!(dot.starts_with("graph flips {"));
    }

    #[test]
    fn json_is_stable() {
        let t = Triangulation::standard(&SurfaceSpec::disk(6)).unwrap();
        let a = to_json(&enumerate_full(&t, 100).unwrap());
        let b = to_json(&enumerate_full(&t, 100).unwrap());
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["edges"].as_array().unwrap().len(), 21);
    }
}
