//! Flip-graph exploration: balls, full enumeration, geodesics, and the
//! graph-level checks built on them.

mod census;
mod paths;

pub use census::{
    simple_cycles, square_pentagon_census, wedge_census, CensusReport, CycleViolation, WedgeReport,
    WedgeViolation,
};
pub use paths::{
    bypass_cylinder_flip, extend_from_lower_degree, extendable_path_general, extendable_path_max_degree,
    is_extendable_edge, is_extendable_flip, path_from_view, restricted_bfs_path, restricted_subgraph_connected, verify_path,
    Extension, PathRecord,
};

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::arc_coords::{ArcCoord, TriKey, Tracked};
use crate::error::{Error, Result};
use crate::surface::SurfaceSpec;
use crate::triangulation::{ArcId, Triangulation};

/// Exploration limits. A radius of `None` explores until the graph closes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    pub radius: Option<usize>,
    pub max_vertices: usize,
    pub strict: bool,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            radius: None,
            max_vertices: 100_000,
            strict: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub key: TriKey,
    pub tracked: Tracked,
    /// Sorted global arc indices.
    pub arcs: Vec<usize>,
    /// Global arc index of each interior edge id, `None` for boundary ids.
    pub local: Vec<Option<usize>>,
    /// `(flipped edge id, neighbour)` for every flip landing in the view,
    /// sorted by edge id.
    pub neighbors: Vec<(ArcId, usize)>,
    pub depth: usize,
    /// BFS parent and the parent's edge id flipped to reach this vertex.
    pub parent: Option<(usize, ArcId)>,
    pub degree: usize,
}

impl Vertex {
    pub fn tri(&self) -> &Triangulation {
        &self.tracked.tri
    }

    pub fn has_full_link(&self) -> bool {
        self.neighbors.len() == self.degree
    }

    pub fn neighbor_via(&self, a: ArcId) -> Option<usize> {
        self.neighbors.iter().find(|(x, _)| *x == a).map(|&(_, v)| v)
    }

    pub fn arc_to(&self, w: usize) -> Option<ArcId> {
        self.neighbors.iter().find(|(_, v)| *v == w).map(|&(a, _)| a)
    }
}

/// A finite portion of a flip graph with canonical vertex keys.
#[derive(Clone, Debug)]
pub struct FlipGraphView {
    surface: SurfaceSpec,
    vertices: Vec<Vertex>,
    index: HashMap<TriKey, usize>,
    arcs: Vec<ArcCoord>,
    arc_index: HashMap<ArcCoord, usize>,
    complete: bool,
    radius: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub complete: bool,
    /// `(degree, count)` pairs in increasing degree order.
    pub degree_histogram: Vec<(usize, usize)>,
    pub diameter: Option<usize>,
}

pub fn ball(start: &Triangulation, radius: usize, max_vertices: usize) -> Result<FlipGraphView> {
    explore(
        Tracked::new(start.clone()),
        ExploreOptions {
            radius: Some(radius),
            max_vertices,
            strict: false,
        },
    )
}

pub fn enumerate_full(start: &Triangulation, max_vertices: usize) -> Result<FlipGraphView> {
    explore(
        Tracked::new(start.clone()),
        ExploreOptions {
            radius: None,
            max_vertices,
            strict: false,
        },
    )
}

type Expansion = Vec<(ArcId, TriKey, Tracked)>;

fn expand(t: &Tracked) -> Result<Expansion> {
    t.tri
        .flippable_arcs()
        .into_iter()
        .map(|a| {
            let next = t.flip(a)?;
            let key = next.key();
            Ok((a, key, next))
        })
        .collect()
}

/// Breadth-first exploration from `root`. Levels are expanded in parallel
/// and merged in vertex order, so the result does not depend on thread
/// count. Vertices at the final radius are expanded too, which gives the
/// induced edges among them.
pub fn explore(root: Tracked, opts: ExploreOptions) -> Result<FlipGraphView> {
    let root = root.strict(opts.strict);
    let surface = root.tri.surface().clone();
    let mut pending: Vec<(Tracked, TriKey, usize, Option<(usize, ArcId)>)> = Vec::new();
    let mut index: HashMap<TriKey, usize> = HashMap::new();
    let key = root.key();
    index.insert(key.clone(), 0);
    pending.push((root, key, 0, None));
    let mut targets: Vec<Vec<(ArcId, TriKey)>> = vec![Vec::new()];
    let mut level = vec![0usize];
    let mut depth = 0usize;
    while !level.is_empty() {
        let results: Vec<Result<Expansion>> = level.par_iter().map(|&i| expand(&pending[i].0)).collect();
        let mut next_level = Vec::new();
        let grow = opts.radius.is_none_or(|r| depth < r);
        for (&i, res) in level.iter().zip(results) {
            for (a, key, tracked) in res? {
                if grow && !index.contains_key(&key) {
                    let id = pending.len();
                    if id >= opts.max_vertices {
                        return Err(Error::BudgetExceeded(format!(
                            "more than {} vertices",
                            opts.max_vertices
                        )));
                    }
                    index.insert(key.clone(), id);
                    pending.push((tracked, key.clone(), depth + 1, Some((i, a))));
                    targets.push(Vec::new());
                    next_level.push(id);
                }
                targets[i].push((a, key));
            }
        }
        level = next_level;
        depth += 1;
    }

    let mut arcs: Vec<ArcCoord> = Vec::new();
    let mut arc_index: HashMap<ArcCoord, usize> = HashMap::new();
    let mut complete = true;
    let mut vertices = Vec::with_capacity(pending.len());
    for (i, (tracked, key, depth, parent)) in pending.into_iter().enumerate() {
        let mut local = vec![None; tracked.tri.edge_count()];
        let mut vs = Vec::new();
        for (a, c) in tracked.arc_coords() {
            let g = *arc_index.entry(c.clone()).or_insert_with(|| {
                arcs.push(c);
                arcs.len() - 1
            });
            local[a.index()] = Some(g);
            vs.push(g);
        }
        vs.sort_unstable();
        let mut neighbors = Vec::new();
        for (a, k) in &targets[i] {
            match index.get(k) {
                Some(&w) => neighbors.push((*a, w)),
                None => complete = false,
            }
        }
        neighbors.sort_unstable();
        let degree = tracked.tri.degree();
        vertices.push(Vertex {
            key,
            tracked,
            arcs: vs,
            local,
            neighbors,
            depth,
            parent,
            degree,
        });
    }
    Ok(FlipGraphView {
        surface,
        vertices,
        index,
        arcs,
        arc_index,
        complete,
        radius: opts.radius,
    })
}

impl FlipGraphView {
    pub fn surface(&self) -> &SurfaceSpec {
        &self.surface
    }

    pub fn complexity(&self) -> usize {
        self.surface.complexity().max(0) as usize
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn radius(&self) -> Option<usize> {
        self.radius
    }

    pub fn base(&self) -> usize {
        0
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn find(&self, key: &TriKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn arc_table(&self) -> &[ArcCoord] {
        &self.arcs
    }

    pub fn arc(&self, g: usize) -> &ArcCoord {
        &self.arcs[g]
    }

    pub fn find_arc(&self, c: &ArcCoord) -> Option<usize> {
        self.arc_index.get(c).copied()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.vertices[i].neighbors.iter().map(|&(_, w)| w)
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.vertices[u].neighbors.iter().any(|&(_, w)| w == v)
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .vertices
            .iter()
            .enumerate()
            .flat_map(|(u, v)| v.neighbors.iter().filter(move |&&(_, w)| u < w).map(move |&(_, w)| (u, w)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.iter().map(|v| v.neighbors.len()).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.vertices.iter().map(|v| v.degree).max().unwrap_or(0)
    }

    /// Local edge id of global arc `g` in vertex `v`.
    pub fn local_arc(&self, v: usize, g: usize) -> Option<ArcId> {
        self.vertices[v]
            .local
            .iter()
            .position(|x| *x == Some(g))
            .map(|i| ArcId(i as u32))
    }

    /// Edge ids flipped along the BFS tree from the base to `v`.
    pub fn flips_from_base(&self, v: usize) -> Vec<ArcId> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some((p, a)) = self.vertices[cur].parent {
            out.push(a);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Arcs common to every listed vertex.
    pub fn common_arcs(&self, vs: &[usize]) -> Vec<usize> {
        let Some((&first, rest)) = vs.split_first() else {
            return Vec::new();
        };
        self.vertices[first]
            .arcs
            .iter()
            .copied()
            .filter(|g| rest.iter().all(|&v| self.vertices[v].arcs.binary_search(g).is_ok()))
            .collect()
    }

    /// Vertices containing every arc in `arcs`.
    pub fn containing(&self, arcs: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| arcs.iter().all(|g| self.vertices[v].arcs.binary_search(g).is_ok()))
            .collect()
    }

    /// Checks symmetric adjacency and that adjacent vertices share all but
    /// one arc. Returns the offending edges.
    pub fn edge_contract_violations(&self) -> Vec<(usize, usize)> {
        let d = self.complexity();
        let mut bad = Vec::new();
        for (u, v) in self.edges() {
            let shared = self.common_arcs(&[u, v]).len();
            if shared + 1 != d || !self.are_adjacent(v, u) {
                bad.push((u, v));
            }
        }
        bad
    }

    /// Hop distances from `u` inside the view.
    pub fn bfs(&self, u: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[u] = Some(0);
        let mut q = VecDeque::from([u]);
        while let Some(x) = q.pop_front() {
            let dx = dist[x].unwrap();
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    q.push_back(y);
                }
            }
        }
        dist
    }

    /// Whether distances between `u` and `v` inside the view are distances
    /// in the whole flip graph: always for complete views, otherwise when
    /// both lie close enough to the base that no geodesic can leave.
    pub fn distances_exact(&self, u: usize, v: usize) -> bool {
        if self.complete {
            return true;
        }
        match self.radius {
            Some(r) => self.vertices[u].depth + self.vertices[v].depth <= r,
            None => false,
        }
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<usize> {
        if !self.distances_exact(u, v) {
            return Err(Error::IncompleteView(format!(
                "vertices {u} and {v} are too far from the base of a radius-{:?} ball",
                self.radius
            )));
        }
        self.bfs(u)[v].ok_or(Error::Unreachable)
    }

    /// All geodesics from `u` to `v`, at most `cap` of them, in
    /// lexicographic order of vertex sequences.
    pub fn geodesics(&self, u: usize, v: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        let len = self.distance(u, v)?;
        let from_v = self.bfs(v);
        let mut out = Vec::new();
        let mut path = vec![u];
        self.geodesic_dfs(&from_v, len, &mut path, &mut out, cap);
        Ok(out)
    }

    fn geodesic_dfs(
        &self,
        from_v: &[Option<usize>],
        len: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let x = *path.last().unwrap();
        if path.len() == len + 1 {
            out.push(path.clone());
            return;
        }
        let remaining = len - path.len();
        let mut next: Vec<usize> = self.neighbors(x).filter(|&y| from_v[y] == Some(remaining)).collect();
        next.sort_unstable();
        for y in next {
            path.push(y);
            self.geodesic_dfs(from_v, len, path, out, cap);
            path.pop();
        }
    }

    /// Every geodesic between members of `subset` stays inside it. On
    /// failure, returns a geodesic that leaves the subset.
    pub fn is_totally_geodesic(&self, subset: &[usize]) -> Result<(bool, Option<Vec<usize>>)> {
        if !self.complete {
            return Err(Error::IncompleteView("geodesic closure needs a complete view".into()));
        }
        let mut inside = vec![false; self.len()];
        for &s in subset {
            inside[s] = true;
        }
        let dists: Vec<Vec<Option<usize>>> = subset.par_iter().map(|&s| self.bfs(s)).collect();
        for (i, &u) in subset.iter().enumerate() {
            for (j, &v) in subset.iter().enumerate().skip(i + 1) {
                let duv = dists[i][v].ok_or(Error::Unreachable)?;
                for w in 0..self.len() {
                    if inside[w] {
                        continue;
                    }
                    if let (Some(a), Some(b)) = (dists[i][w], dists[j][w]) {
                        if a + b == duv {
                            let mut witness = self.geodesics(u, w, 1)?.remove(0);
                            let tail = self.geodesics(w, v, 1)?.remove(0);
                            witness.extend_from_slice(&tail[1..]);
                            return Ok((false, Some(witness)));
                        }
                    }
                }
            }
        }
        Ok((true, None))
    }

    pub fn stats(&self) -> GraphStats {
        let mut hist: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for v in &self.vertices {
            *hist.entry(v.neighbors.len()).or_default() += 1;
        }
        let diameter = self.complete.then(|| {
            (0..self.len())
                .into_par_iter()
                .map(|u| self.bfs(u).into_iter().flatten().max().unwrap_or(0))
                .max()
                .unwrap_or(0)
        });
        GraphStats {
            vertices: self.len(),
            edges: self.edge_count(),
            complete: self.complete,
            degree_histogram: hist.into_iter().collect(),
            diameter,
        }
    }

    /// Tracked triangulation reached by flipping `flips` from vertex `v`,
    /// with its index in the view if present.
    pub fn walk(&self, v: usize, flips: &[ArcId]) -> Result<(Tracked, Option<usize>)> {
        let mut t = self.vertices[v].tracked.clone();
        for &a in flips {
            t = t.flip(a)?;
        }
        let key = t.key();
        Ok((t, self.find(&key)))
    }
}

pub fn distance(g: &FlipGraphView, u: usize, v: usize) -> Result<usize> {
    g.distance(u, v)
}

pub fn geodesics(g: &FlipGraphView, u: usize, v: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    g.geodesics(u, v, cap)
}

pub fn is_totally_geodesic(g: &FlipGraphView, subset: &[usize]) -> Result<(bool, Option<Vec<usize>>)> {
    g.is_totally_geodesic(subset)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(spec: &SurfaceSpec) -> FlipGraphView {
        enumerate_full(&Triangulation::standard(spec).unwrap(), 10_000).unwrap()
    }

    #[test]
    fn hexagon_graph() {
        let g = full(&SurfaceSpec::disk(6));
        assert_eq!(g.len(), 14);
        assert_eq!(g.edge_count(), 21);
        assert!(g.is_complete());
        assert!(g.vertices().iter().all(|v| v.neighbors.len() == 3));
        assert!(g.edge_contract_violations().is_empty());
    }

    #[test]
    fn radius_zero_is_single_vertex() {
        let t = Triangulation::standard(&SurfaceSpec::disk(6)).unwrap();
        let g = ball(&t, 0, 10).unwrap();
        assert_eq!(g.len(), 1);
        assert!(!g.is_complete());
    }

    #[test]
    fn annulus_ball_is_a_path() {
        let t = Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap();
        let g = ball(&t, 10, 1000).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g.edge_count(), 20);
        assert!(g.vertices().iter().all(|v| v.neighbors.len() <= 2));
    }

    #[test]
    fn torus_exceeds_budget() {
        let t = Triangulation::standard(&SurfaceSpec::new(1, vec![], 1).unwrap()).unwrap();
        assert!(matches!(enumerate_full(&t, 1000), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn distances_and_geodesics() {
        let g = full(&SurfaceSpec::disk(6));
        assert_eq!(g.distance(0, 0).unwrap(), 0);
        let n = g.vertex(0).neighbors[0].1;
        assert_eq!(g.distance(0, n).unwrap(), 1);
        assert_eq!(g.geodesics(0, n, 10).unwrap(), vec![vec![0, n]]);
        assert!(g.is_totally_geodesic(&[3]).unwrap().0);
    }

    #[test]
    fn incomplete_ball_refuses_far_distances() {
        let t = Triangulation::standard(&SurfaceSpec::disk(7)).unwrap();
        let g = ball(&t, 2, 1000).unwrap();
        let far = (0..g.len()).find(|&v| g.vertex(v).depth == 2).unwrap();
        assert_eq!(g.distance(0, far).unwrap(), 2);
        let other = (0..g.len()).rev().find(|&v| g.vertex(v).depth == 2 && v != far).unwrap();
        assert!(matches!(g.distance(far, other), Err(Error::IncompleteView(_))));
    }

    #[test]
    fn parallel_and_serial_agree() {
        let t = Triangulation::standard(&SurfaceSpec::disk(8)).unwrap();
        let a = enumerate_full(&t, 10_000).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| enumerate_full(&t, 10_000).unwrap());
        let ka: Vec<_> = a.vertices().iter().map(|v| v.key.clone()).collect();
        let kb: Vec<_> = b.vertices().iter().map(|v| v.key.clone()).collect();
        assert_eq!(ka, kb);
        assert_eq!(a.edges(), b.edges());
    }
}
