//! Exact flip graphs of the disk and the once-punctured disk.
//!
//! These models share no code with the triangle-slot engine: arcs are
//! listed explicitly, crossing numbers come from interval interleaving in
//! a lift to the half-plane, and triangulations are maximal sets of
//! pairwise disjoint arcs. They serve as ground truth for the generic
//! engine on the surfaces where both apply.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::arc_coords::ArcCoord;
use crate::error::{Error, Result};
use crate::explorer::FlipGraphView;
use crate::surface::SurfaceSpec;

/// An arc class in one of the models. Marked points are numbered
/// `0..n` counter-clockwise; the puncture, when present, is point `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyArc {
    /// Diagonal of the unpunctured disk, `i < j`, not adjacent.
    Chord(u32, u32),
    /// Arc from boundary point `i` to the puncture.
    Radius(u32),
    /// Arc from `from` to `from + len` (mod n) cutting off the
    /// counter-clockwise run of boundary points between them, away from
    /// the puncture. `len == n` is the loop at `from` around the puncture.
    Arc { from: u32, len: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyModel {
    Disk(u32),
    Punctured(u32),
}

/// Complete model flip graph with canonical ordering: vertices sorted,
/// edges as sorted index pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelGraph {
    pub vertices: Vec<Vec<PolyArc>>,
    pub edges: Vec<[usize; 2]>,
}

impl ModelGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e[0] == v || e[1] == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e[0]] += 1;
            deg[e[1]] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl PolyModel {
    /// Model for a surface type, if it is a disk or a once-punctured disk.
    pub fn for_surface(spec: &SurfaceSpec) -> Option<PolyModel> {
        if spec.genus() != 0 || spec.boundary().len() != 1 {
            return None;
        }
        let n = spec.boundary()[0];
        match spec.punctures() {
            0 => Some(PolyModel::Disk(n)),
            1 => Some(PolyModel::Punctured(n)),
            _ => None,
        }
    }

    pub fn n(self) -> u32 {
        match self {
            PolyModel::Disk(n) | PolyModel::Punctured(n) => n,
        }
    }

    pub fn surface(self) -> SurfaceSpec {
        match self {
            PolyModel::Disk(n) => SurfaceSpec::disk(n),
            PolyModel::Punctured(n) => SurfaceSpec::punctured_disk(n),
        }
    }

    pub fn complexity(self) -> usize {
        match self {
            PolyModel::Disk(n) => n.saturating_sub(3) as usize,
            PolyModel::Punctured(n) => n as usize,
        }
    }

    pub fn arcs(self) -> Vec<PolyArc> {
        let mut out = Vec::new();
        match self {
            PolyModel::Disk(n) => {
                for i in 0..n {
                    for j in i + 2..n {
                        if !(i == 0 && j == n - 1) {
                            out.push(PolyArc::Chord(i, j));
                        }
                    }
                }
            }
            PolyModel::Punctured(n) => {
                for i in 0..n {
                    out.push(PolyArc::Radius(i));
                    for len in 2..=n {
                        out.push(PolyArc::Arc { from: i, len });
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Endpoints as a sorted pair.
    pub fn endpoints(self, a: PolyArc) -> [u32; 2] {
        let n = self.n();
        let (x, y) = match a {
            PolyArc::Chord(i, j) => (i, j),
            PolyArc::Radius(i) => (i, n),
            PolyArc::Arc { from, len } => (from, (from + len) % n),
        };
        [x.min(y), x.max(y)]
    }

    fn belongs(self, a: PolyArc) -> bool {
        let n = self.n();
        match (self, a) {
            (PolyModel::Disk(_), PolyArc::Chord(i, j)) => {
                i < j && j < n && j >= i + 2 && !(i == 0 && j == n - 1)
            }
            (PolyModel::Punctured(_), PolyArc::Radius(i)) => i < n,
            (PolyModel::Punctured(_), PolyArc::Arc { from, len }) => from < n && (2..=n).contains(&len),
            _ => false,
        }
    }

    /// Minimal intersection number of two arc classes.
    pub fn crossing_number(self, a: PolyArc, b: PolyArc) -> Result<u32> {
        if !self.belongs(a) || !self.belongs(b) {
            return Err(Error::ModelMismatch(format!("{a:?} or {b:?} is not an arc of {self:?}")));
        }
        if a == b {
            return Ok(0);
        }
        match (a, b) {
            (PolyArc::Chord(i, j), PolyArc::Chord(k, l)) => {
                let cross = (i < k && k < j && j < l) || (k < i && i < l && l < j);
                Ok(cross as u32)
            }
            _ => {
                let n = self.n() as i64;
                let (a0, a1) = lift(a);
                let (b0, b1) = lift(b);
                let mut count = 0;
                for m in -3..=3 {
                    let (c0, c1) = (b0 + m * n, b1.map(|x| x + m * n));
                    if interleave((a0, a1), (c0, c1)) {
                        count += 1;
                    }
                }
                Ok(count)
            }
        }
    }

    /// Arcs of the standard fan triangulation in the edge order used by
    /// [`crate::triangulation::Triangulation::standard`].
    pub fn base_fan(self) -> Vec<PolyArc> {
        match self {
            PolyModel::Disk(n) => (2..n.saturating_sub(1)).map(|k| PolyArc::Chord(0, k)).collect(),
            PolyModel::Punctured(n) => {
                let mut v = vec![PolyArc::Radius(0)];
                v.extend((2..=n).map(|k| PolyArc::Arc { from: 0, len: k }));
                v
            }
        }
    }

    /// Coordinates of `a` against the base fan, with the `-1` convention.
    pub fn coords(self, a: PolyArc) -> Result<Vec<i32>> {
        let base = self.base_fan();
        if let Some(i) = base.iter().position(|&b| b == a) {
            let mut v = vec![0; base.len()];
            v[i] = -1;
            return Ok(v);
        }
        base.iter()
            .map(|&b| self.crossing_number(a, b).map(|c| c as i32))
            .collect()
    }

    /// The model arc with the given coordinate vector and endpoints.
    /// Fails unless exactly one arc matches.
    pub fn identify(self, coord: &ArcCoord) -> Result<PolyArc> {
        let hits: Vec<PolyArc> = self
            .arcs()
            .into_iter()
            .filter(|&a| self.endpoints(a) == coord.ends)
            .filter(|&a| self.coords(a).map(|c| c == coord.coords).unwrap_or(false))
            .collect();
        match hits.as_slice() {
            [a] => Ok(*a),
            [] => Err(Error::ModelMismatch(format!("no {self:?} arc has coordinates {coord}"))),
            _ => Err(Error::ModelMismatch(format!("coordinates {coord} match {hits:?}"))),
        }
    }

    /// All triangulations, each a sorted arc list, in sorted order.
    pub fn triangulations(self, cap: usize) -> Result<Vec<Vec<PolyArc>>> {
        let mut out = match self {
            PolyModel::Disk(n) => {
                if n < 3 {
                    return Err(Error::ModelMismatch(format!("disk with {n} points")));
                }
                let mut memo = HashMap::new();
                disk_triangulations(0, n - 1, n, &mut memo, cap)?
            }
            PolyModel::Punctured(n) => {
                if n == 0 {
                    return Err(Error::ModelMismatch("punctured disk with no points".into()));
                }
                let arcs = self.arcs();
                let m = arcs.len();
                let mut ok = vec![vec![false; m]; m];
                for i in 0..m {
                    for j in 0..m {
                        ok[i][j] = i != j && self.crossing_number(arcs[i], arcs[j])? == 0;
                    }
                }
                let mut out = Vec::new();
                let mut chosen = Vec::new();
                cliques(&arcs, &ok, 0, self.complexity(), &mut chosen, &mut out, cap)?;
                out
            }
        };
        for t in out.iter_mut() {
            t.sort_unstable();
        }
        out.sort();
        Ok(out)
    }

    /// Complete flip graph: triangulations adjacent iff they share all but
    /// one arc.
    pub fn enumerate(self, cap: usize) -> Result<ModelGraph> {
        let vertices = self.triangulations(cap)?;
        let mut buckets: HashMap<Vec<PolyArc>, Vec<usize>> = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            for skip in 0..v.len() {
                let mut rest = v.clone();
                rest.remove(skip);
                buckets.entry(rest).or_default().push(i);
            }
        }
        let mut edges = Vec::new();
        for members in buckets.values() {
            for x in 0..members.len() {
                for y in x + 1..members.len() {
                    let (a, b) = (members[x], members[y]);
                    edges.push([a.min(b), a.max(b)]);
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(ModelGraph { vertices, edges })
    }
}

fn lift(a: PolyArc) -> (i64, Option<i64>) {
    match a {
        PolyArc::Chord(i, j) => (i as i64, Some(j as i64)),
        PolyArc::Radius(i) => (i as i64, None),
        PolyArc::Arc { from, len } => (from as i64, Some(from as i64 + len as i64)),
    }
}

/// Strict interleaving of two lifted arcs; `None` is the puncture at
/// infinity.
fn interleave(a: (i64, Option<i64>), b: (i64, Option<i64>)) -> bool {
    let lt = |x: Option<i64>, y: Option<i64>| match (x, y) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    };
    let (a0, a1) = (Some(a.0), a.1);
    let (b0, b1) = (Some(b.0), b.1);
    (lt(a0, b0) && lt(b0, a1) && lt(a1, b1)) || (lt(b0, a0) && lt(a0, b1) && lt(b1, a1))
}

type Memo = HashMap<(u32, u32), Vec<Vec<PolyArc>>>;

/// Triangulations of the sub-polygon on points `i..=j`.
fn disk_triangulations(i: u32, j: u32, n: u32, memo: &mut Memo, cap: usize) -> Result<Vec<Vec<PolyArc>>> {
    if j - i < 2 {
        return Ok(vec![Vec::new()]);
    }
    if let Some(v) = memo.get(&(i, j)) {
        return Ok(v.clone());
    }
    let chord = |x: u32, y: u32| -> Option<PolyArc> {
        let boundary = y == x + 1 || (x == 0 && y == n - 1);
        (!boundary).then_some(PolyArc::Chord(x, y))
    };
    let mut out = Vec::new();
    for k in i + 1..j {
        let left = disk_triangulations(i, k, n, memo, cap)?;
        let right = disk_triangulations(k, j, n, memo, cap)?;
        for l in &left {
            for r in &right {
                let mut t = l.clone();
                t.extend(r.iter().copied());
                t.extend(chord(i, k));
                t.extend(chord(k, j));
                out.push(t);
                if out.len() > cap {
                    return Err(Error::BudgetExceeded(format!("more than {cap} disk triangulations")));
                }
            }
        }
    }
    memo.insert((i, j), out.clone());
    Ok(out)
}

fn cliques(
    arcs: &[PolyArc],
    ok: &[Vec<bool>],
    from: usize,
    size: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<PolyArc>>,
    cap: usize,
) -> Result<()> {
    if chosen.len() == size {
        out.push(chosen.iter().map(|&i| arcs[i]).collect());
        if out.len() > cap {
            return Err(Error::BudgetExceeded(format!("more than {cap} triangulations")));
        }
        return Ok(());
    }
    for i in from..arcs.len() {
        if chosen.iter().all(|&c| ok[c][i]) {
            chosen.push(i);
            cliques(arcs, ok, i + 1, size, chosen, out, cap)?;
            chosen.pop();
        }
    }
    Ok(())
}

pub fn crossing_number(model: PolyModel, a: PolyArc, b: PolyArc) -> Result<u32> {
    model.crossing_number(a, b)
}

pub fn enumerate_model(spec: &SurfaceSpec, cap: usize) -> Result<ModelGraph> {
    let model = PolyModel::for_surface(spec)
        .ok_or_else(|| Error::ModelMismatch(format!("no polygon model for {spec}")))?;
    model.enumerate(cap)
}

/// Result of matching a generic flip-graph view against a model graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelComparison {
    pub vertices: usize,
    pub edges: usize,
    /// Generic vertex index to model vertex index.
    pub vertex_map: Vec<usize>,
    /// Generic global arc index to model arc.
    pub arc_map: Vec<PolyArc>,
}

/// Identifies every arc of a complete generic view with a model arc by its
/// coordinates, then checks that vertices and edges correspond exactly.
/// The view must have been explored from the standard triangulation.
pub fn compare_with_model(view: &FlipGraphView, model: PolyModel, graph: &ModelGraph) -> Result<ModelComparison> {
    let mismatch = |s: String| Err(Error::ModelMismatch(s));
    if !view.is_complete() {
        return Err(Error::IncompleteView("model comparison needs a complete view".into()));
    }
    let arc_map: Vec<PolyArc> = view
        .arc_table()
        .iter()
        .map(|c| model.identify(c))
        .collect::<Result<_>>()?;
    let mut seen_arcs = arc_map.clone();
    seen_arcs.sort_unstable();
    seen_arcs.dedup();
    if seen_arcs.len() != arc_map.len() {
        return mismatch("two generic arcs identified with one model arc".into());
    }
    let index: BTreeMap<&Vec<PolyArc>, usize> = graph.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut vertex_map = Vec::with_capacity(view.len());
    for v in view.vertices() {
        let mut set: Vec<PolyArc> = v.arcs.iter().map(|&g| arc_map[g]).collect();
        set.sort_unstable();
        match index.get(&set) {
            Some(&i) => vertex_map.push(i),
            None => return mismatch(format!("generic vertex {set:?} is not a model triangulation")),
        }
    }
    let mut hit = vertex_map.clone();
    hit.sort_unstable();
    hit.dedup();
    if hit.len() != graph.vertices.len() || vertex_map.len() != graph.vertices.len() {
        return mismatch(format!(
            "generic view has {} vertices, model has {}",
            view.len(),
            graph.vertices.len()
        ));
    }
    let mut mapped: Vec<[usize; 2]> = view
        .edges()
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = (vertex_map[u], vertex_map[v]);
            [a.min(b), a.max(b)]
        })
        .collect();
    mapped.sort_unstable();
    if mapped != graph.edges {
        return mismatch("edge sets differ".into());
    }
    Ok(ModelComparison {
        vertices: graph.vertices.len(),
        edges: graph.edges.len(),
        vertex_map,
        arc_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_crossings() {
        let m = PolyModel::Disk(6);
        assert_eq!(m.crossing_number(PolyArc::Chord(0, 2), PolyArc::Chord(1, 3)).unwrap(), 1);
        assert_eq!(m.crossing_number(PolyArc::Chord(0, 2), PolyArc::Chord(2, 4)).unwrap(), 0);
        assert!(m.crossing_number(PolyArc::Chord(0, 1), PolyArc::Chord(2, 4)).is_err());
    }

    #[test]
    fn punctured_digon_table() {
        let m = PolyModel::Punctured(2);
        let loop0 = PolyArc::Arc { from: 0, len: 2 };
        let loop1 = PolyArc::Arc { from: 1, len: 2 };
        assert_eq!(m.crossing_number(loop0, PolyArc::Radius(1)).unwrap(), 1);
        assert_eq!(m.crossing_number(loop0, PolyArc::Radius(0)).unwrap(), 0);
        assert_eq!(m.crossing_number(loop0, loop1).unwrap(), 2);
        assert_eq!(m.crossing_number(PolyArc::Radius(0), PolyArc::Radius(1)).unwrap(), 0);
        assert_eq!(m.arcs().len(), 4);
    }

    #[test]
    fn crossing_is_symmetric() {
        for model in [PolyModel::Punctured(3), PolyModel::Punctured(5), PolyModel::Disk(8)] {
            let arcs = model.arcs();
            for &a in &arcs {
                for &b in &arcs {
                    assert_eq!(
                        model.crossing_number(a, b).unwrap(),
                        model.crossing_number(b, a).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (4..=9)
            .map(|n| PolyModel::Disk(n).triangulations(10_000).unwrap().len())
            .collect();
        assert_eq!(counts, vec![2, 5, 14, 42, 132, 429]);
    }

    #[test]
    fn disk_six_graph() {
        let g = PolyModel::Disk(6).enumerate(1000).unwrap();
        assert_eq!(g.vertices.len(), 14);
        assert_eq!(g.edges.len(), 21);
        assert!(g.degrees().iter().all(|&d| d == 3));
        let c5 = PolyModel::Disk(5).enumerate(1000).unwrap();
        assert_eq!(c5.edges.len(), 5);
        assert!(c5.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn punctured_counts() {
        let digon = PolyModel::Punctured(2).enumerate(1000).unwrap();
        assert_eq!(digon.vertices.len(), 3);
        assert_eq!(digon.edges.len(), 2);
        let square = PolyModel::Punctured(4).enumerate(1000).unwrap();
        assert_eq!(square.vertices.len(), 35);
        assert!(square.is_connected());
        let mono = PolyModel::Punctured(1).enumerate(10).unwrap();
        assert_eq!(mono.vertices, vec![vec![PolyArc::Radius(0)]]);
    }

    #[test]
    fn radius_loop_vertices_have_lower_degree() {
        let m = PolyModel::Punctured(2);
        let g = m.enumerate(100).unwrap();
        let deg = g.degrees();
        for (i, v) in g.vertices.iter().enumerate() {
            let folded = v.iter().any(|a| match a {
                PolyArc::Arc { from, len } if *len == 2 => v.contains(&PolyArc::Radius(*from)),
                _ => false,
            });
            if folded {
                assert_eq!(deg[i], 1);
            }
        }
    }

    #[test]
    fn base_fan_is_a_triangulation() {
        for model in [PolyModel::Disk(7), PolyModel::Punctured(4)] {
            let mut fan = model.base_fan();
            fan.sort_unstable();
            assert!(model.triangulations(10_000).unwrap().contains(&fan));
        }
    }
}
