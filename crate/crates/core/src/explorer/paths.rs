use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::FlipGraphView;
use crate::arc_coords::{TriKey, Tracked};
use crate::error::{Error, Result};
use crate::triangulation::{ArcId, EdgeRef, Triangulation, WedgeKind};

/// A flip path with per-edge and per-vertex annotations.
#[derive(Clone, Debug, Serialize)]
pub struct PathRecord {
    #[serde(skip)]
    pub steps: Vec<Tracked>,
    pub keys: Vec<TriKey>,
    /// `flips[i]` is the edge id flipped in `steps[i]` to reach `steps[i + 1]`.
    pub flips: Vec<ArcId>,
    pub degrees: Vec<usize>,
    pub cylinder: Vec<bool>,
    pub extendable: Vec<bool>,
}

impl PathRecord {
    pub fn from_flips(start: &Tracked, flips: &[ArcId]) -> Result<PathRecord> {
        let mut steps = vec![start.clone()];
        let mut cylinder = Vec::with_capacity(flips.len());
        let mut extendable = Vec::with_capacity(flips.len());
        for &a in flips {
            let cur = steps.last().unwrap();
            cylinder.push(cur.tri.is_cylinder_flip(a)?);
            let next = cur.flip(a)?;
            extendable.push(is_extendable_flip(&next.tri, a)?);
            steps.push(next);
        }
        Ok(PathRecord {
            keys: steps.iter().map(|s| s.key()).collect(),
            degrees: steps.iter().map(|s| s.tri.degree()).collect(),
            flips: flips.to_vec(),
            cylinder,
            extendable,
            steps,
        })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    pub fn start(&self) -> &TriKey {
        &self.keys[0]
    }

    pub fn end(&self) -> &TriKey {
        self.keys.last().unwrap()
    }

    pub fn all_extendable(&self) -> bool {
        self.extendable.iter().all(|&e| e)
    }

    pub fn has_cylinder_flip(&self) -> bool {
        self.cylinder.iter().any(|&c| c)
    }

    /// Joins `other`, which must start where `self` ends.
    fn concat(mut self, other: PathRecord) -> PathRecord {
        debug_assert_eq!(self.end(), other.start());
        self.steps.extend(other.steps.into_iter().skip(1));
        self.keys.extend(other.keys.into_iter().skip(1));
        self.degrees.extend(other.degrees.into_iter().skip(1));
        self.flips.extend(other.flips);
        self.cylinder.extend(other.cylinder);
        self.extendable.extend(other.extendable);
        self
    }
}

/// Recomputes every annotation of a path from its triangulations and
/// returns a description of each disagreement.
pub fn verify_path(p: &PathRecord) -> Vec<String> {
    let mut bad = Vec::new();
    let n = p.steps.len();
    if p.keys.len() != n || p.degrees.len() != n || p.flips.len() + 1 != n {
        bad.push("length mismatch".to_string());
        return bad;
    }
    if p.cylinder.len() != p.flips.len() || p.extendable.len() != p.flips.len() {
        bad.push("annotation length mismatch".to_string());
        return bad;
    }
    for i in 0..n {
        if p.steps[i].key() != p.keys[i] {
            bad.push(format!("key {i} does not match its triangulation"));
        }
        if p.steps[i].tri.degree() != p.degrees[i] {
            bad.push(format!("degree {i} is wrong"));
        }
    }
    for i in 0..p.flips.len() {
        let (x, y) = (&p.keys[i], &p.keys[i + 1]);
        if x.difference(y).len() != 1 || y.difference(x).len() != 1 {
            bad.push(format!("step {i} does not change exactly one arc"));
        }
        match p.steps[i].flip(p.flips[i]) {
            Ok(next) if next.key() == p.keys[i + 1] => {}
            _ => bad.push(format!("step {i} is not the recorded flip")),
        }
        match p.steps[i].tri.is_cylinder_flip(p.flips[i]) {
            Ok(c) if c == p.cylinder[i] => {}
            _ => bad.push(format!("cylinder flag {i} is wrong")),
        }
        match is_extendable_flip(&p.steps[i + 1].tri, p.flips[i]) {
            Ok(e) if e == p.extendable[i] => {}
            _ => bad.push(format!("extendable flag {i} is wrong")),
        }
    }
    bad
}

/// Whether the edge into `v` made by creating `toward_u` is extendable:
/// every other flip out of `v` forms a square or a pentagon with it.
pub fn is_extendable_flip(v: &Triangulation, toward_u: ArcId) -> Result<bool> {
    if !v.is_flippable(toward_u)? {
        return Err(Error::NotAdjacent);
    }
    for b in v.flippable_arcs() {
        if b == toward_u {
            continue;
        }
        match v.classify_wedge(toward_u, b)? {
            WedgeKind::Square | WedgeKind::Pentagon => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Extendability of the oriented view edge `u -> v`.
pub fn is_extendable_edge(g: &FlipGraphView, u: usize, v: usize) -> Result<bool> {
    let a = g.vertex(v).arc_to(u).ok_or(Error::NotAdjacent)?;
    is_extendable_flip(g.vertex(v).tri(), a)
}

/// Shortest directed path from `u` to `v` through view vertices of degree
/// at least `min_degree` using only extendable edges.
pub fn restricted_bfs_path(g: &FlipGraphView, u: usize, v: usize, min_degree: usize) -> Result<Option<Vec<usize>>> {
    let ok = |x: usize| g.vertex(x).degree >= min_degree;
    if !ok(u) || !ok(v) {
        return Ok(None);
    }
    let mut prev: Vec<Option<usize>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    seen[u] = true;
    let mut q = VecDeque::from([u]);
    while let Some(x) = q.pop_front() {
        if x == v {
            let mut path = vec![v];
            let mut cur = v;
            while let Some(p) = prev[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok(Some(path));
        }
        for &(_, y) in &g.vertex(x).neighbors {
            if seen[y] || !ok(y) {
                continue;
            }
            if is_extendable_edge(g, x, y)? {
                seen[y] = true;
                prev[y] = Some(x);
                q.push_back(y);
            }
        }
    }
    Ok(None)
}

/// Whether every maximal-degree vertex of the view reaches every other one
/// along extendable edges through maximal-degree vertices.
pub fn restricted_subgraph_connected(g: &FlipGraphView) -> Result<bool> {
    let d = g.complexity();
    let top: Vec<usize> = (0..g.len()).filter(|&v| g.vertex(v).degree == d).collect();
    let Some(&root) = top.first() else {
        return Ok(true);
    };
    let mut allowed: HashMap<(usize, usize), bool> = HashMap::new();
    for &x in &top {
        for &(_, y) in &g.vertex(x).neighbors {
            if g.vertex(y).degree == d {
                allowed.insert((x, y), is_extendable_edge(g, x, y)?);
            }
        }
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; g.len()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(_, y) in &g.vertex(x).neighbors {
                let edge = if forward { (x, y) } else { (y, x) };
                if !seen[y] && allowed.get(&edge).copied().unwrap_or(false) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    };
    let (f, b) = (reach(true), reach(false));
    Ok(top.iter().all(|&x| f[x] && b[x]))
}

/// Breadth-first search from `start` to `target` flipping only `movable`
/// edge ids. `accept(current, flipped, next, is_target)` filters moves.
fn region_search<F>(start: &Tracked, movable: &BTreeSet<ArcId>, target: &TriKey, accept: F, cap: usize) -> Result<Option<Vec<ArcId>>>
where
    F: Fn(&Tracked, ArcId, &Tracked, bool) -> Result<bool>,
{
    let start_key = start.key();
    if &start_key == target {
        return Ok(Some(Vec::new()));
    }
    let mut states = vec![start.clone()];
    let mut prev: Vec<Option<(usize, ArcId)>> = vec![None];
    let mut seen: HashMap<TriKey, usize> = HashMap::from([(start_key, 0)]);
    let mut q = VecDeque::from([0usize]);
    while let Some(i) = q.pop_front() {
        for &a in movable {
            let cur = &states[i];
            if !cur.tri.is_flippable(a)? {
                continue;
            }
            let next = cur.flip(a)?;
            let key = next.key();
            if seen.contains_key(&key) {
                continue;
            }
            let hit = &key == target;
            if !accept(cur, a, &next, hit)? {
                continue;
            }
            if hit {
                let mut flips = vec![a];
                let mut cur = i;
                while let Some((p, b)) = prev[cur] {
                    flips.push(b);
                    cur = p;
                }
                flips.reverse();
                return Ok(Some(flips));
            }
            if states.len() >= cap {
                return Err(Error::BudgetExceeded(format!("region search passed {cap} states")));
            }
            seen.insert(key, states.len());
            states.push(next);
            prev.push(Some((i, a)));
            q.push_back(states.len() - 1);
        }
    }
    Ok(None)
}

fn triangle_of(tri: &Triangulation, e: ArcId, side: u8) -> usize {
    tri.slot(e, side).0
}

/// Interior edges with both slots in `region`.
fn region_edges(tri: &Triangulation, region: &BTreeSet<usize>) -> BTreeSet<ArcId> {
    tri.interior_arcs()
        .into_iter()
        .filter(|&e| region.contains(&triangle_of(tri, e, 0)) && region.contains(&triangle_of(tri, e, 1)))
        .collect()
}

fn grow_ring(tri: &Triangulation, region: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut out = region.clone();
    for &t in region {
        for r in &tri.triangles()[t] {
            if !tri.is_boundary(r.edge) {
                out.insert(triangle_of(tri, r.edge, 1 - r.side));
            }
        }
    }
    out
}

const REGION_CAP: usize = 200_000;

/// Replaces a cylinder flip by a path of non-cylinder flips between
/// vertices of the same degree.
///
/// With `l` the edge on two opposite sides of the flip quadrilateral and
/// `a`, `b` the other two sides, the detour runs inside the pentagon made
/// of the quadrilateral and the triangle across `a`; when that triangle
/// also has `b` as a side, the triangle across its third side is added and
/// the detour runs in the resulting hexagon.
pub fn bypass_cylinder_flip(u: &Tracked, flip: ArcId) -> Result<PathRecord> {
    let tri = &u.tri;
    let quad = tri.quadrilateral_around(flip)?;
    if !quad.has_opposite_identified() {
        return Err(Error::NotCylinderFlip);
    }
    let v = u.flip(flip)?;
    let degree = tri.degree();
    if v.tri.degree() != degree {
        return Err(Error::HypothesisViolated("cylinder flip between vertices of different degree".into()));
    }
    let s = quad.sides;
    let (alpha, beta) = if s[0].edge == s[2].edge {
        (s[1], s[3])
    } else {
        (s[0], s[2])
    };
    if alpha.edge == beta.edge || (tri.is_boundary(alpha.edge) && tri.is_boundary(beta.edge)) {
        return Err(Error::ExceptionalSurface);
    }
    let q_tris = BTreeSet::from([quad.t1, quad.t2]);
    // Pick the loop whose outer triangle has two distinct other sides.
    let mut plan = None;
    for (a, other) in [(alpha, beta), (beta, alpha)] {
        if tri.is_boundary(a.edge) {
            continue;
        }
        let outer = triangle_of(tri, a.edge, 1 - a.side);
        if q_tris.contains(&outer) {
            continue;
        }
        let others: Vec<_> = tri.triangles()[outer]
            .iter()
            .copied()
            .filter(|r| *r != EdgeRef::new(a.edge, 1 - a.side))
            .collect();
        if others.len() != 2 || others[0].edge == others[1].edge {
            continue;
        }
        plan = Some((a, other, outer, others));
        break;
    }
    let Some((a, other, outer, others)) = plan else {
        return Err(Error::ExceptionalSurface);
    };
    let mut region = q_tris.clone();
    region.insert(outer);
    let mut movable = BTreeSet::from([flip, a.edge]);
    if let Some(x) = others.iter().find(|r| r.edge != other.edge && others.iter().any(|o| o.edge == other.edge)) {
        if tri.is_boundary(x.edge) {
            return Err(Error::ExceptionalSurface);
        }
        region.insert(triangle_of(tri, x.edge, 1 - x.side));
        movable.insert(x.edge);
    }
    let target = v.key();
    let accept = |cur: &Tracked, e: ArcId, next: &Tracked, _hit: bool| -> Result<bool> {
        Ok(!cur.tri.is_cylinder_flip(e)? && next.tri.degree() == degree)
    };
    let flips = region_search(u, &movable, &target, accept, REGION_CAP)?
        .ok_or_else(|| Error::HypothesisViolated("no cylinder-free detour in the local region".into()))?;
    PathRecord::from_flips(u, &flips)
}

/// A path of maximal-degree vertices joined by extendable edges.
///
/// Starts from a shortest path in the view; each stretch of vertices of
/// lower degree is replaced by a detour through maximal-degree vertices,
/// searched inside the triangles the stretch touches (widened ring by ring
/// if needed); remaining cylinder flips are then bypassed.
pub fn extendable_path_max_degree(g: &FlipGraphView, u: usize, v: usize) -> Result<PathRecord> {
    let d = g.complexity();
    if g.surface().is_exceptional() {
        return Err(Error::ExceptionalSurface);
    }
    if g.vertex(u).degree != d || g.vertex(v).degree != d {
        return Err(Error::HypothesisViolated("endpoints must have maximal degree".into()));
    }
    let start = &g.vertex(u).tracked;
    if u == v {
        return PathRecord::from_flips(start, &[]);
    }
    let path = g
        .geodesics(u, v, 1)
        .or_else(|_| {
            // Far pairs in a ball: any path in the view will do.
            let dist = g.bfs(u);
            if dist[v].is_none() {
                return Err(Error::Unreachable);
            }
            let from_v = g.bfs(v);
            let mut p = vec![u];
            let mut cur = u;
            while cur != v {
                cur = g.neighbors(cur).min_by_key(|&y| (from_v[y].unwrap_or(usize::MAX), y)).unwrap();
                p.push(cur);
            }
            Ok(vec![p])
        })?
        .remove(0);
    let mut rec = path_from_view(g, &path)?;

    // Degree repair.
    while let Some(i) = rec.degrees.iter().position(|&x| x < d) {
        let j = (i..rec.degrees.len()).find(|&k| rec.degrees[k] == d).expect("endpoint has maximal degree");
        let from = &rec.steps[i - 1];
        let target = rec.keys[j].clone();
        let mut region = BTreeSet::new();
        for k in i - 1..j {
            let q = rec.steps[k].tri.quadrilateral_around(rec.flips[k])?;
            region.insert(q.t1);
            region.insert(q.t2);
        }
        let accept = |_: &Tracked, _: ArcId, next: &Tracked, _hit: bool| -> Result<bool> { Ok(next.tri.degree() == d) };
        let mut detour = None;
        for _ in 0..=from.tri.triangles().len() {
            let movable = region_edges(&from.tri, &region);
            if let Some(f) = region_search(from, &movable, &target, accept, REGION_CAP)? {
                detour = Some(f);
                break;
            }
            let bigger = grow_ring(&from.tri, &region);
            if bigger == region {
                break;
            }
            region = bigger;
        }
        let detour = detour.ok_or_else(|| Error::HypothesisViolated("no maximal-degree detour".into()))?;
        let head = PathRecord::from_flips(start, &rec.flips[..i - 1])?;
        let mid = PathRecord::from_flips(head.steps.last().unwrap(), &detour)?;
        let head = head.concat(mid);
        rec = replay_onto(head, &rec, j)?;
    }

    let rec = bypass_all(rec)?;
    if !rec.all_extendable() {
        return Err(Error::HypothesisViolated("repaired path has a non-extendable edge".into()));
    }
    Ok(rec)
}

/// The path through the given view vertices, tracked from the first.
pub fn path_from_view(g: &FlipGraphView, path: &[usize]) -> Result<PathRecord> {
    let mut out = PathRecord::from_flips(&g.vertex(path[0]).tracked, &[])?;
    for w in path.windows(2) {
        let here = &g.vertex(w[0]).tracked;
        let a = g.vertex(w[0]).arc_to(w[1]).ok_or(Error::NotAdjacent)?;
        let cur = out.steps.last().unwrap();
        let step = PathRecord::from_flips(cur, &[translate(here, a, cur)?])?;
        out = out.concat(step);
    }
    Ok(out)
}

/// Finds the edge of `to` carrying the arc that `a` carries in `from`.
/// Equal triangulations may label their arcs differently.
fn translate(from: &Tracked, a: ArcId, to: &Tracked) -> Result<ArcId> {
    to.find_arc(&from.arc_coord(a)).ok_or(Error::UnknownArc(a))
}

/// Appends the flips of `src` from step `k` on to `out`, whose end has the
/// same key as `src.steps[k]`.
fn replay_onto(mut out: PathRecord, src: &PathRecord, k: usize) -> Result<PathRecord> {
    debug_assert_eq!(out.end(), &src.keys[k]);
    for i in k..src.flips.len() {
        let cur = out.steps.last().unwrap();
        let a = translate(&src.steps[i], src.flips[i], cur)?;
        let step = PathRecord::from_flips(cur, &[a])?;
        out = out.concat(step);
    }
    Ok(out)
}

fn bypass_all(rec: PathRecord) -> Result<PathRecord> {
    if !rec.has_cylinder_flip() {
        return Ok(rec);
    }
    let mut out = PathRecord::from_flips(&rec.steps[0], &[])?;
    for k in 0..rec.flips.len() {
        let piece = if rec.cylinder[k] && rec.degrees[k] == rec.degrees[k + 1] {
            bypass_cylinder_flip(&rec.steps[k], rec.flips[k])?
        } else {
            PathRecord::from_flips(&rec.steps[k], &[rec.flips[k]])?
        };
        // Rebase the piece on the current end so traces stay continuous.
        out = replay_onto(out, &piece, 0)?;
    }
    Ok(out)
}

/// Valence-`k` variant: restricted search over vertices of degree at least
/// `k` with extendable edges. Experimental; no guarantee is asserted.
pub fn extendable_path_general(g: &FlipGraphView, u: usize, v: usize, k: usize) -> Result<Option<PathRecord>> {
    match restricted_bfs_path(g, u, v, k)? {
        None => Ok(None),
        Some(p) => {
            path_from_view(g, &p).map(Some)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum Extension {
    /// The fourth vertex of a square through `u, v, w`.
    SquareCompletion { vertex: TriKey },
    /// An extendable path from `u` to `w`.
    Path(PathRecord),
}

/// Given `v` and the flips toward `u` and `w`, where `u` has larger degree
/// than `v`, completes `u, v, w` to a square or connects `u` to `w` by a
/// path that keeps the degree of `u` until its final vertex.
pub fn extend_from_lower_degree(v: &Tracked, toward_u: ArcId, toward_w: ArcId) -> Result<Extension> {
    if toward_u == toward_w {
        return Err(Error::HypothesisViolated("w must differ from u".into()));
    }
    let u = v.flip(toward_u)?;
    let w = v.flip(toward_w)?;
    let tri = &v.tri;
    if u.tri.degree() <= tri.degree() {
        return Err(Error::HypothesisViolated("deg(u) must exceed deg(v)".into()));
    }
    // toward_u is the loop of a self-folded triangle in v.
    let (t0, _) = tri.slot(toward_u, 0);
    let (t1, _) = tri.slot(toward_u, 1);
    let folded = |t: usize| {
        let s = &tri.triangles()[t];
        s[0].edge == s[1].edge || s[1].edge == s[2].edge || s[0].edge == s[2].edge
    };
    let (inner, outer) = match (folded(t0), folded(t1)) {
        (true, false) => (t0, t1),
        (false, true) => (t1, t0),
        _ => return Err(Error::HypothesisViolated("flip toward u does not remove a self-folded triangle".into())),
    };
    let radius = tri.triangles()[inner]
        .iter()
        .find(|r| r.edge != toward_u)
        .map(|r| r.edge)
        .expect("self-folded triangle has a radius");
    let outer_sides: Vec<ArcId> = tri.triangles()[outer]
        .iter()
        .map(|r| r.edge)
        .filter(|&e| e != toward_u)
        .collect();
    if !outer_sides.contains(&toward_w) {
        let v_prime = u.flip(toward_w)?;
        let other = w.flip(toward_u)?;
        if v_prime.key() != other.key() {
            return Err(Error::HypothesisViolated("independent flips do not commute".into()));
        }
        return Ok(Extension::SquareCompletion { vertex: v_prime.key() });
    }
    let degree = u.tri.degree();
    let movable = BTreeSet::from([toward_u, radius, toward_w]);
    let accept = |_: &Tracked, _: ArcId, next: &Tracked, hit: bool| -> Result<bool> { Ok(hit || next.tri.degree() == degree) };
    let flips = region_search(&u, &movable, &w.key(), accept, REGION_CAP)?
        .ok_or_else(|| Error::HypothesisViolated("no detour inside the punctured triangle".into()))?;
    let rec = PathRecord::from_flips(&u, &flips)?;
    let rec = bypass_all(rec)?;
    Ok(Extension::Path(rec))
}
