use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::FlipGraphView;
use crate::error::{Error, Result};
use crate::triangulation::{ArcId, WedgeKind};

/// Simple cycles of exactly `len` vertices, each listed once: starting at
/// its smallest vertex, with the second vertex smaller than the last.
pub fn simple_cycles(g: &FlipGraphView, len: usize) -> Vec<Vec<usize>> {
    let per_start: Vec<Vec<Vec<usize>>> = (0..g.len())
        .into_par_iter()
        .map(|s| {
            let mut found = Vec::new();
            let mut path = vec![s];
            cycle_dfs(g, s, len, &mut path, &mut found);
            found
        })
        .collect();
    per_start.into_iter().flatten().collect()
}

fn cycle_dfs(g: &FlipGraphView, s: usize, len: usize, path: &mut Vec<usize>, found: &mut Vec<Vec<usize>>) {
    let x = *path.last().unwrap();
    if path.len() == len {
        if g.are_adjacent(x, s) && path[1] < path[len - 1] {
            found.push(path.clone());
        }
        return;
    }
    let mut next: Vec<usize> = g.neighbors(x).filter(|&y| y > s && !path.contains(&y)).collect();
    next.sort_unstable();
    for y in next {
        path.push(y);
        cycle_dfs(g, s, len, path, found);
        path.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleViolation {
    pub cycle: Vec<usize>,
    pub common_arcs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub squares: usize,
    pub pentagons: usize,
    pub expected_common_arcs: usize,
    pub violations: Vec<CycleViolation>,
}

/// Embedded 4- and 5-cycles, each checked to have exactly `d - 2` arcs
/// common to all of its vertices.
pub fn square_pentagon_census(g: &FlipGraphView) -> Result<CensusReport> {
    if !g.is_complete() {
        return Err(Error::IncompleteView("census needs a complete view".into()));
    }
    let d = g.complexity();
    let expected = d.saturating_sub(2);
    let squares = simple_cycles(g, 4);
    let pentagons = simple_cycles(g, 5);
    let violations = squares
        .iter()
        .chain(pentagons.iter())
        .filter_map(|c| {
            let common = g.common_arcs(c).len();
            (common != expected).then(|| CycleViolation {
                cycle: c.clone(),
                common_arcs: common,
            })
        })
        .collect();
    Ok(CensusReport {
        squares: squares.len(),
        pentagons: pentagons.len(),
        expected_common_arcs: expected,
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WedgeViolation {
    pub vertex: usize,
    pub toward_u: ArcId,
    pub toward_w: ArcId,
    pub kind: WedgeKind,
    pub degree_u: usize,
    pub degree_v: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WedgeReport {
    pub wedges: usize,
    /// `(kind, count)` over wedges with `deg(u) >= deg(v)`.
    pub counts: Vec<(WedgeKind, usize)>,
    /// Wedges with `deg(u) < deg(v)`, outside the trichotomy's hypothesis.
    pub below_hypothesis: usize,
    /// Degenerate wedges satisfying the hypothesis.
    pub violations: Vec<WedgeViolation>,
    /// Square or pentagon wedges with no matching 4- or 5-cycle in the
    /// view; only checked on complete views.
    pub unwitnessed: Vec<WedgeViolation>,
}

/// Classifies every wedge `u - v - w` in the view.
pub fn wedge_census(g: &FlipGraphView) -> Result<WedgeReport> {
    let rows: Vec<Result<Vec<(WedgeViolation, bool)>>> = (0..g.len())
        .into_par_iter()
        .map(|v| {
            let vert = g.vertex(v);
            let tri = vert.tri();
            let arcs = tri.flippable_arcs();
            let mut out = Vec::new();
            for &a in &arcs {
                let deg_u = tri.flip(a)?.0.degree();
                for &b in &arcs {
                    if a == b {
                        continue;
                    }
                    let kind = tri.classify_wedge(a, b)?;
                    let row = WedgeViolation {
                        vertex: v,
                        toward_u: a,
                        toward_w: b,
                        kind,
                        degree_u: deg_u,
                        degree_v: vert.degree,
                    };
                    let witnessed = match (g.is_complete(), kind) {
                        (true, WedgeKind::Square) => has_cycle(g, v, a, b, 4),
                        (true, WedgeKind::Pentagon) => has_cycle(g, v, a, b, 5),
                        _ => true,
                    };
                    out.push((row, witnessed));
                }
            }
            Ok(out)
        })
        .collect();
    let mut counts: BTreeMap<WedgeKind, usize> = BTreeMap::new();
    let mut wedges = 0;
    let mut below = 0;
    let mut violations = Vec::new();
    let mut unwitnessed = Vec::new();
    for row in rows {
        for (w, witnessed) in row? {
            wedges += 1;
            if !witnessed {
                unwitnessed.push(w.clone());
            }
            if w.degree_u < w.degree_v {
                below += 1;
                continue;
            }
            *counts.entry(w.kind).or_default() += 1;
            if w.kind == WedgeKind::Degenerate {
                violations.push(w);
            }
        }
    }
    Ok(WedgeReport {
        wedges,
        counts: counts.into_iter().collect(),
        below_hypothesis: below,
        violations,
        unwitnessed,
    })
}

/// Whether some simple cycle of length `len` passes `u - v - w`.
fn has_cycle(g: &FlipGraphView, v: usize, a: ArcId, b: ArcId, len: usize) -> bool {
    let vert = g.vertex(v);
    let (Some(u), Some(w)) = (vert.neighbor_via(a), vert.neighbor_via(b)) else {
        return false;
    };
    // Look for a path w -> ... -> u of len - 2 edges avoiding v.
    fn dfs(g: &FlipGraphView, path: &mut Vec<usize>, target: usize, steps: usize, avoid: usize) -> bool {
        let x = *path.last().unwrap();
        if steps == 0 {
            return x == target;
        }
        for y in g.neighbors(x).collect::<Vec<_>>() {
            if y == avoid || path.contains(&y) || (y == target && steps != 1) {
                continue;
            }
            path.push(y);
            if dfs(g, path, target, steps - 1, avoid) {
                return true;
            }
            path.pop();
        }
        false
    }
    let mut path = vec![w];
    dfs(g, &mut path, u, len - 2, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::enumerate_full;
    use crate::surface::SurfaceSpec;
    use crate::triangulation::Triangulation;

    #[test]
    fn hexagon_faces() {
        let g = enumerate_full(&Triangulation::standard(&SurfaceSpec::disk(6)).unwrap(), 100).unwrap();
        let r = square_pentagon_census(&g).unwrap();
        assert_eq!((r.squares, r.pentagons), (3, 6));
        assert!(r.violations.is_empty());
    }

    #[test]
    fn pentagon_is_one_cycle() {
        let g = enumerate_full(&Triangulation::standard(&SurfaceSpec::disk(5)).unwrap(), 100).unwrap();
        let r = square_pentagon_census(&g).unwrap();
        assert_eq!((r.squares, r.pentagons), (0, 1));
    }

    #[test]
    fn hexagon_wedges_are_faces() {
        let g = enumerate_full(&Triangulation::standard(&SurfaceSpec::disk(6)).unwrap(), 100).unwrap();
        let r = wedge_census(&g).unwrap();
        assert!(r.violations.is_empty());
        assert!(r.unwitnessed.is_empty());
        assert_eq!(r.wedges, 14 * 6);
    }
}
