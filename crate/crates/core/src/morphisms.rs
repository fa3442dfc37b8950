//! Simplicial maps between flip graphs.
//!
//! Maps are vertex maps between two explored views. Those induced by
//! embeddings are built by cutting the codomain along a multiarc and
//! replaying flips through a triangulation isomorphism; the census finds
//! every injective simplicial map by backtracking, and the checks here
//! recover the invariant multiarc and the induced arc map from a bare
//! vertex map.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::arc_coords::{ArcCoord, Tracked};
use crate::error::{Error, Result};
use crate::explorer::FlipGraphView;
use crate::polygon::{PolyArc, PolyModel};
use crate::surface::{cut_along, SurfaceSpec};
use crate::triangulation::{ArcId, Triangulation};

/// Edges of an embedded subsurface are only tracked through the cut
/// model: boundary arcs of the image that are interior in the codomain
/// come back as glued arcs, and are not listed separately.
pub const BOUNDARY_ARCS_NOTE: &str =
    "image vertices are the glued component arcs plus the cut multiarc; boundary-parallel arcs of the image are not listed separately";

/// A combinatorial isomorphism between two triangulations, possibly
/// reversing orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TriIso {
    /// Image of every edge id.
    pub edges: Vec<ArcId>,
    /// Image of every triangle index.
    pub triangles: Vec<usize>,
    pub reversed: bool,
}

/// All isomorphisms from `a` to `b`, orientation-preserving ones first.
pub fn triangulation_isomorphisms(a: &Triangulation, b: &Triangulation) -> Vec<TriIso> {
    let n = a.triangles().len();
    if n == 0 || n != b.triangles().len() || a.edge_count() != b.edge_count() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for reversed in [false, true] {
        for t in 0..n {
            for rho in 0..3 {
                if let Some(iso) = propagate(a, b, t, rho, reversed) {
                    out.push(iso);
                }
            }
        }
    }
    out
}

fn image_slot(rho: usize, i: usize, reversed: bool) -> usize {
    if reversed {
        (rho + 3 - i) % 3
    } else {
        (i + rho) % 3
    }
}

/// Extends `triangle 0 -> t0` with slot rotation `rho0` across every edge.
fn propagate(a: &Triangulation, b: &Triangulation, t0: usize, rho0: usize, reversed: bool) -> Option<TriIso> {
    let n = a.triangles().len();
    let mut tmap: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut t_used = vec![false; n];
    let mut emap: Vec<Option<ArcId>> = vec![None; a.edge_count()];
    let mut e_used = vec![false; b.edge_count()];
    tmap[0] = Some((t0, rho0));
    t_used[t0] = true;
    let mut stack = vec![0];
    while let Some(t) = stack.pop() {
        let (bt, rho) = tmap[t]?;
        for i in 0..3 {
            let r = a.triangles()[t][i];
            let j = image_slot(rho, i, reversed);
            let s = b.triangles()[bt][j];
            if a.is_boundary(r.edge) != b.is_boundary(s.edge) {
                return None;
            }
            match emap[r.edge.index()] {
                Some(x) if x != s.edge => return None,
                Some(_) => {}
                None => {
                    if e_used[s.edge.index()] {
                        return None;
                    }
                    e_used[s.edge.index()] = true;
                    emap[r.edge.index()] = Some(s.edge);
                }
            }
            if a.is_boundary(r.edge) {
                continue;
            }
            let (t2, i2) = a.slot(r.edge, 1 - r.side);
            let (u2, j2) = b.slot(s.edge, 1 - s.side);
            let rho2 = if reversed { (j2 + i2) % 3 } else { (j2 + 3 - i2) % 3 };
            match tmap[t2] {
                Some(x) if x != (u2, rho2) => return None,
                Some(_) => {}
                None => {
                    if t_used[u2] {
                        return None;
                    }
                    t_used[u2] = true;
                    tmap[t2] = Some((u2, rho2));
                    stack.push(t2);
                }
            }
        }
    }
    Some(TriIso {
        edges: emap.into_iter().collect::<Option<Vec<_>>>()?,
        triangles: tmap.into_iter().map(|x| x.map(|(t, _)| t)).collect::<Option<Vec<_>>>()?,
        reversed,
    })
}

/// Carries every vertex of `src` to `dst`: the flips leading from `start`
/// to a vertex are applied to `target` through `edges`.
fn replay(src: &FlipGraphView, start: usize, dst: &FlipGraphView, target: &Tracked, edges: &[ArcId]) -> Result<Vec<usize>> {
    let first = dst
        .find(&target.key())
        .ok_or_else(|| Error::IncompleteView("replay target outside the codomain view".into()))?;
    let mut map = vec![usize::MAX; src.len()];
    let mut states: Vec<Option<(Tracked, Tracked)>> = vec![None; src.len()];
    map[start] = first;
    states[start] = Some((src.vertex(start).tracked.clone(), target.clone()));
    let mut q = VecDeque::from([start]);
    while let Some(x) = q.pop_front() {
        let (s, t) = states[x].clone().unwrap();
        let own = &src.vertex(x).tracked;
        for &(a, y) in &src.vertex(x).neighbors {
            if states[y].is_some() {
                continue;
            }
            let a = s.find_arc(&own.arc_coord(a)).ok_or(Error::UnknownArc(a))?;
            let s2 = s.flip(a)?;
            let t2 = t.flip(edges[a.index()])?;
            map[y] = dst
                .find(&t2.key())
                .ok_or_else(|| Error::IncompleteView("replayed vertex outside the codomain view".into()))?;
            states[y] = Some((s2, t2));
            q.push_back(y);
        }
    }
    if map.contains(&usize::MAX) {
        return Err(Error::Unreachable);
    }
    Ok(map)
}

/// A vertex map between two views, with lazily computed invariants.
#[derive(Debug)]
pub struct SimplicialMap<'a> {
    domain: &'a FlipGraphView,
    codomain: &'a FlipGraphView,
    map: Vec<usize>,
    multiarc: OnceLock<Result<Multiarc>>,
    arc_map: OnceLock<Result<ArcMap>>,
}

impl Clone for SimplicialMap<'_> {
    fn clone(&self) -> Self {
        SimplicialMap {
            domain: self.domain,
            codomain: self.codomain,
            map: self.map.clone(),
            multiarc: self.multiarc.clone(),
            arc_map: self.arc_map.clone(),
        }
    }
}

/// Serialized form of a map: vertex pairs plus the arc table.
#[derive(Clone, Debug, Serialize)]
pub struct MapRecord {
    pub pairs: Vec<[usize; 2]>,
    pub arcs: Vec<(ArcCoord, ArcCoord)>,
    pub multiarc: Vec<ArcCoord>,
}

impl<'a> SimplicialMap<'a> {
    pub fn new(domain: &'a FlipGraphView, codomain: &'a FlipGraphView, map: Vec<usize>) -> Result<Self> {
        if map.len() != domain.len() || map.iter().any(|&x| x >= codomain.len()) {
            return Err(Error::HypothesisViolated("vertex map does not fit the views".into()));
        }
        Ok(SimplicialMap {
            domain,
            codomain,
            map,
            multiarc: OnceLock::new(),
            arc_map: OnceLock::new(),
        })
    }

    pub fn domain(&self) -> &'a FlipGraphView {
        self.domain
    }

    pub fn codomain(&self) -> &'a FlipGraphView {
        self.codomain
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v]
    }

    /// Sorted image vertices.
    pub fn image_set(&self) -> Vec<usize> {
        let s: BTreeSet<usize> = self.map.iter().copied().collect();
        s.into_iter().collect()
    }

    pub fn multiarc(&self) -> Result<&Multiarc> {
        self.multiarc.get_or_init(|| compute_multiarc(self)).as_ref().map_err(Clone::clone)
    }

    pub fn arc_map(&self) -> Result<&ArcMap> {
        self.arc_map.get_or_init(|| compute_arc_map(self)).as_ref().map_err(Clone::clone)
    }

    pub fn record(&self) -> MapRecord {
        let arcs = self
            .arc_map()
            .map(|m| {
                m.map
                    .iter()
                    .map(|(&a, &b)| (self.domain.arc(a).clone(), self.codomain.arc(b).clone()))
                    .collect()
            })
            .unwrap_or_default();
        let multiarc = self
            .multiarc()
            .map(|m| m.coords.clone())
            .unwrap_or_default();
        MapRecord {
            pairs: self.map.iter().enumerate().map(|(v, &w)| [v, w]).collect(),
            arcs,
            multiarc,
        }
    }
}

/// Whether the vertex map is injective and sends edges to edges.
pub fn check_simplicial_injective(m: &SimplicialMap) -> bool {
    let distinct: BTreeSet<usize> = m.map.iter().copied().collect();
    distinct.len() == m.map.len()
        && m.domain.edges().iter().all(|&(u, v)| m.codomain.are_adjacent(m.map[u], m.map[v]))
}

/// Arcs of the codomain, by global index, with their coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multiarc {
    pub arcs: Vec<usize>,
    pub coords: Vec<ArcCoord>,
    /// Domain vertex whose link determined the multiarc.
    pub witness: usize,
}

impl Multiarc {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Local edge ids of the multiarc in codomain vertex `v`.
    pub fn local_ids(&self, codomain: &FlipGraphView, v: usize) -> Option<Vec<ArcId>> {
        self.arcs.iter().map(|&g| codomain.local_arc(v, g)).collect()
    }
}

/// Arcs common to the images of a maximal-degree vertex and its whole link,
/// checked to lie in every image vertex.
pub fn invariant_multiarc(m: &SimplicialMap) -> Result<Multiarc> {
    m.multiarc().cloned()
}

fn compute_multiarc(m: &SimplicialMap) -> Result<Multiarc> {
    let (dom, cod) = (m.domain, m.codomain);
    let d = dom.complexity();
    let d2 = cod.complexity();
    if d2 < d {
        return Err(Error::HypothesisViolated("codomain has smaller complexity".into()));
    }
    let u = (0..dom.len())
        .find(|&v| dom.vertex(v).degree == d && dom.vertex(v).has_full_link())
        .ok_or(Error::DegreeDeficientDomain)?;
    let mut group = vec![m.map[u]];
    group.extend(dom.neighbors(u).map(|w| m.map[w]));
    let arcs = cod.common_arcs(&group);
    if arcs.len() != d2 - d {
        return Err(Error::InvarianceViolation { vertex: u });
    }
    for w in 0..dom.len() {
        let img = &cod.vertex(m.map[w]).arcs;
        if arcs.iter().any(|g| img.binary_search(g).is_err()) {
            return Err(Error::InvarianceViolation { vertex: w });
        }
    }
    Ok(Multiarc {
        coords: arcs.iter().map(|&g| cod.arc(g).clone()).collect(),
        arcs,
        witness: u,
    })
}

/// Induced map from domain arcs to codomain arcs, by global indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcMap {
    pub map: BTreeMap<usize, usize>,
}

impl ArcMap {
    pub fn get(&self, a: usize) -> Option<usize> {
        self.map.get(&a).copied()
    }

    pub fn is_injective(&self) -> bool {
        let s: BTreeSet<usize> = self.map.values().copied().collect();
        s.len() == self.map.len()
    }
}

/// For each domain arc `a`, the unique codomain arc outside the invariant
/// multiarc common to the images of all vertices containing `a`. When a
/// loop and its radius both qualify, the one contained in exactly those
/// images is taken.
pub fn induced_arc_map(m: &SimplicialMap) -> Result<ArcMap> {
    m.arc_map().cloned()
}

fn compute_arc_map(m: &SimplicialMap) -> Result<ArcMap> {
    let (dom, cod) = (m.domain, m.codomain);
    let a = m.multiarc()?;
    let mut map = BTreeMap::new();
    for g in 0..dom.arc_table().len() {
        let fa: Vec<usize> = dom.containing(&[g]).into_iter().map(|v| m.map[v]).collect();
        let mut cands: Vec<usize> = cod
            .common_arcs(&fa)
            .into_iter()
            .filter(|x| !a.arcs.contains(x))
            .collect();
        if cands.len() > 1 {
            // A loop around a puncture always comes with its radius; keep
            // the arc whose support in the image is exactly the image of F_a.
            let fa: BTreeSet<usize> = fa.into_iter().collect();
            cands.retain(|&b| {
                let support: BTreeSet<usize> = m
                    .map
                    .iter()
                    .copied()
                    .filter(|&w| cod.vertex(w).arcs.binary_search(&b).is_ok())
                    .collect();
                support == fa
            });
        }
        if cands.len() != 1 {
            return Err(Error::AmbiguousInducedArc { arc: g });
        }
        map.insert(g, cands[0]);
    }
    for v in 0..dom.len() {
        let mut expect: Vec<usize> = dom.vertex(v).arcs.iter().map(|g| map[g]).collect();
        expect.extend(&a.arcs);
        expect.sort_unstable();
        if expect != cod.vertex(m.map[v]).arcs {
            return Err(Error::InvarianceViolation { vertex: v });
        }
    }
    Ok(ArcMap { map })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum StructureViolation {
    Unflippability { vertex: usize, arc: usize },
    Degree { vertex: usize, domain: usize, image: usize },
    TriangleMates { vertex: usize, arcs: [usize; 2] },
    FlipPair { edge: [usize; 2] },
    Disjointness { arcs: [usize; 2] },
    CrossingOnce { arcs: [usize; 2] },
    Surjectivity { missed: usize },
    ArcMapNotInjective,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub vertices: usize,
    /// Vertices whose degree could be compared (full links on both sides).
    pub degree_checked: usize,
    /// Whether crossing numbers came from exact polygon models.
    pub exact_crossings: bool,
    pub surjective: Option<bool>,
    pub violations: Vec<StructureViolation>,
    pub note: &'static str,
}

impl StructureReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks unflippability, degree, triangle-mate, flip-pair and crossing
/// preservation over the explored region.
pub fn verify_structure_preservation(m: &SimplicialMap) -> Result<StructureReport> {
    let (dom, cod) = (m.domain, m.codomain);
    let a = m.multiarc()?;
    let psi = m.arc_map()?;
    let mut violations = Vec::new();
    let mut degree_checked = 0;
    let in_fa = |y: usize| a.arcs.iter().all(|g| cod.vertex(y).arcs.binary_search(g).is_ok());
    for v in 0..dom.len() {
        let dv = dom.vertex(v);
        let w = m.map[v];
        let tw = cod.vertex(w).tri();
        let local = |g: usize| cod.local_arc(w, g).expect("image arc present");
        for e in dv.tri().interior_arcs() {
            let g = dv.local[e.index()].unwrap();
            if !dv.tri().is_flippable(e)? && tw.is_flippable(local(psi.map[&g]))? {
                violations.push(StructureViolation::Unflippability { vertex: v, arc: g });
            }
        }
        let arcs = dv.tri().interior_arcs();
        for (i, &x) in arcs.iter().enumerate() {
            for &y in &arcs[i + 1..] {
                if !dv.tri().share_triangle(x, y) {
                    continue;
                }
                let (gx, gy) = (dv.local[x.index()].unwrap(), dv.local[y.index()].unwrap());
                if !tw.share_triangle(local(psi.map[&gx]), local(psi.map[&gy])) {
                    violations.push(StructureViolation::TriangleMates { vertex: v, arcs: [gx, gy] });
                }
            }
        }
        if dv.has_full_link() && cod.vertex(w).has_full_link() {
            degree_checked += 1;
            let image = cod.neighbors(w).filter(|&y| in_fa(y)).count();
            if image != dv.degree {
                violations.push(StructureViolation::Degree {
                    vertex: v,
                    domain: dv.degree,
                    image,
                });
            }
        }
    }
    for (u, v) in dom.edges() {
        let only = |x: usize, y: usize, view: &FlipGraphView| -> Vec<usize> {
            let other = &view.vertex(y).arcs;
            view.vertex(x).arcs.iter().copied().filter(|g| other.binary_search(g).is_err()).collect()
        };
        let (du, dv) = (only(u, v, dom), only(v, u, dom));
        let (cu, cv) = (only(m.map[u], m.map[v], cod), only(m.map[v], m.map[u], cod));
        let mapped = |s: &[usize]| s.iter().map(|g| psi.map[g]).collect::<Vec<_>>();
        if mapped(&du) != cu || mapped(&dv) != cv {
            violations.push(StructureViolation::FlipPair { edge: [u, v] });
        }
    }
    if !psi.is_injective() {
        violations.push(StructureViolation::ArcMapNotInjective);
    }
    let exact = exact_crossings(m, psi, &mut violations);
    if !exact {
        // Disjointness through co-occurrence in some vertex.
        let together = |view: &FlipGraphView| {
            let mut s = BTreeSet::new();
            for v in view.vertices() {
                for (i, &x) in v.arcs.iter().enumerate() {
                    for &y in &v.arcs[i + 1..] {
                        s.insert((x, y));
                    }
                }
            }
            s
        };
        let cod_pairs = together(cod);
        for (x, y) in together(dom) {
            let (p, q) = (psi.map[&x], psi.map[&y]);
            if !cod_pairs.contains(&(p.min(q), p.max(q))) {
                violations.push(StructureViolation::Disjointness { arcs: [x, y] });
            }
        }
    }
    let surjective = (dom.complexity() == cod.complexity() && dom.is_complete() && cod.is_complete()).then(|| {
        let hit = m.image_set().len();
        if hit != cod.len() {
            violations.push(StructureViolation::Surjectivity { missed: cod.len() - hit });
        }
        hit == cod.len()
    });
    Ok(StructureReport {
        vertices: dom.len(),
        degree_checked,
        exact_crossings: exact,
        surjective,
        violations,
        note: BOUNDARY_ARCS_NOTE,
    })
}

/// Compares crossing numbers `0` and `1` through polygon models when both
/// surfaces have one. Returns whether the comparison was made.
fn exact_crossings(m: &SimplicialMap, psi: &ArcMap, out: &mut Vec<StructureViolation>) -> bool {
    let (dom, cod) = (m.domain, m.codomain);
    let (Some(pd), Some(pc)) = (PolyModel::for_surface(dom.surface()), PolyModel::for_surface(cod.surface())) else {
        return false;
    };
    let ident = |model: PolyModel, view: &FlipGraphView| -> Option<Vec<PolyArc>> {
        view.arc_table().iter().map(|c| model.identify(c).ok()).collect()
    };
    let (Some(da), Some(ca)) = (ident(pd, dom), ident(pc, cod)) else {
        return false;
    };
    for x in 0..da.len() {
        for y in x + 1..da.len() {
            let (Ok(i), Ok(j)) = (
                pd.crossing_number(da[x], da[y]),
                pc.crossing_number(ca[psi.map[&x]], ca[psi.map[&y]]),
            ) else {
                return false;
            };
            if i == 0 && j != 0 {
                out.push(StructureViolation::Disjointness { arcs: [x, y] });
            }
            if i == 1 && j != 1 {
                out.push(StructureViolation::CrossingOnce { arcs: [x, y] });
            }
        }
    }
    true
}

/// Every injective simplicial vertex map from `domain` to `codomain`, in
/// lexicographic order of the assignment sequence.
pub fn injective_map_census<'a>(domain: &'a FlipGraphView, codomain: &'a FlipGraphView, cap: usize) -> Result<Vec<SimplicialMap<'a>>> {
    if !domain.is_complete() || !codomain.is_complete() {
        return Err(Error::IncompleteView("census needs complete views".into()));
    }
    census_maps(domain, codomain, cap)?
        .into_iter()
        .map(|m| SimplicialMap::new(domain, codomain, m))
        .collect()
}

/// Census on possibly incomplete views. Results are evidence only.
pub fn injective_map_census_partial<'a>(domain: &'a FlipGraphView, codomain: &'a FlipGraphView, cap: usize) -> Result<Vec<SimplicialMap<'a>>> {
    census_maps(domain, codomain, cap)?
        .into_iter()
        .map(|m| SimplicialMap::new(domain, codomain, m))
        .collect()
}

fn census_maps(domain: &FlipGraphView, codomain: &FlipGraphView, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = domain.len();
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    // BFS order; every later vertex has an earlier neighbour as anchor.
    let mut order = Vec::with_capacity(n);
    let mut anchor = vec![None; n];
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            order.push(x);
            for y in domain.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    anchor[y] = Some(x);
                    q.push_back(y);
                }
            }
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let earlier: Vec<Vec<usize>> = order
        .iter()
        .map(|&v| domain.neighbors(v).filter(|&y| pos[y] < pos[v]).collect())
        .collect();
    let found = AtomicUsize::new(0);
    let branches: Vec<Result<Vec<Vec<usize>>>> = (0..codomain.len())
        .into_par_iter()
        .map(|c| {
            let mut st = Search {
                codomain,
                order: &order,
                anchor: &anchor,
                earlier: &earlier,
                map: vec![usize::MAX; n],
                used: vec![false; codomain.len()],
                out: Vec::new(),
                found: &found,
                cap,
            };
            st.map[order[0]] = c;
            st.used[c] = true;
            st.go(1)?;
            Ok(st.out)
        })
        .collect();
    let mut all = Vec::new();
    for b in branches {
        all.extend(b?);
    }
    Ok(all)
}

struct Search<'s> {
    codomain: &'s FlipGraphView,
    order: &'s [usize],
    anchor: &'s [Option<usize>],
    earlier: &'s [Vec<usize>],
    map: Vec<usize>,
    used: Vec<bool>,
    out: Vec<Vec<usize>>,
    found: &'s AtomicUsize,
    cap: usize,
}

impl Search<'_> {
    fn go(&mut self, k: usize) -> Result<()> {
        if k == self.order.len() {
            if self.found.fetch_add(1, Ordering::Relaxed) >= self.cap {
                return Err(Error::BudgetExceeded(format!("more than {} maps", self.cap)));
            }
            self.out.push(self.map.clone());
            return Ok(());
        }
        let v = self.order[k];
        let cands: Vec<usize> = match self.anchor[v] {
            Some(p) => {
                let mut c: Vec<usize> = self.codomain.neighbors(self.map[p]).collect();
                c.sort_unstable();
                c
            }
            None => (0..self.codomain.len()).collect(),
        };
        for c in cands {
            if self.used[c] || !self.earlier[k].iter().all(|&q| self.codomain.are_adjacent(self.map[q], c)) {
                continue;
            }
            self.map[v] = c;
            self.used[c] = true;
            self.go(k + 1)?;
            self.used[c] = false;
            self.map[v] = usize::MAX;
        }
        Ok(())
    }
}

/// An embedding of the domain surface into the codomain, given by a cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingSpec {
    /// Codomain vertex whose triangulation is cut.
    pub codomain_vertex: usize,
    /// Edge ids of that triangulation to cut along.
    pub multiarc: Vec<ArcId>,
    /// Index of the component identified with the domain.
    pub component: usize,
    /// Domain vertex whose triangulation matches the component.
    pub domain_vertex: usize,
    /// From the domain vertex's triangulation to the component's.
    pub iso: TriIso,
}

/// The map `v -> h(v) ∪ A` for the embedding `h` described by `emb`.
pub fn build_embedding_induced<'a>(domain: &'a FlipGraphView, codomain: &'a FlipGraphView, emb: &EmbeddingSpec) -> Result<SimplicialMap<'a>> {
    if emb.codomain_vertex >= codomain.len() || emb.domain_vertex >= domain.len() {
        return Err(Error::InvalidEmbedding("vertex out of range".into()));
    }
    let cv = codomain.vertex(emb.codomain_vertex);
    let comps = cut_along(cv.tri(), &emb.multiarc)?;
    let comp = comps
        .get(emb.component)
        .ok_or_else(|| Error::InvalidEmbedding(format!("no component {}", emb.component)))?;
    if !comp.spec.same_topological_type(domain.surface()) {
        return Err(Error::InvalidEmbedding(format!(
            "component is {} but the domain is {}",
            comp.spec,
            domain.surface()
        )));
    }
    let dt = domain.vertex(emb.domain_vertex).tri();
    if !triangulation_isomorphisms(dt, &comp.triangulation).contains(&emb.iso) {
        return Err(Error::InvalidEmbedding("identification is not an isomorphism".into()));
    }
    let edges: Vec<ArcId> = emb.iso.edges.iter().map(|e| comp.origin[e.index()]).collect();
    let map = replay(domain, emb.domain_vertex, codomain, &cv.tracked, &edges)?;
    SimplicialMap::new(domain, codomain, map)
}

/// One embedding per distinct image, found by cutting every codomain
/// vertex along every multiarc of the right size.
pub fn enumerate_embeddings(domain: &FlipGraphView, codomain: &FlipGraphView) -> Result<Vec<EmbeddingSpec>> {
    let (d, d2) = (domain.complexity(), codomain.complexity());
    if d2 < d || domain.is_empty() {
        return Ok(Vec::new());
    }
    let k = d2 - d;
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for c in 0..codomain.len() {
        let arcs = codomain.vertex(c).tri().interior_arcs();
        for subset in subsets(&arcs, k) {
            let comps = cut_along(codomain.vertex(c).tri(), &subset)?;
            for (ci, comp) in comps.iter().enumerate() {
                if !comp.spec.same_topological_type(domain.surface()) {
                    continue;
                }
                let Some((w, iso)) = (0..domain.len()).find_map(|w| {
                    triangulation_isomorphisms(domain.vertex(w).tri(), &comp.triangulation)
                        .into_iter()
                        .next()
                        .map(|iso| (w, iso))
                }) else {
                    continue;
                };
                let emb = EmbeddingSpec {
                    codomain_vertex: c,
                    multiarc: subset.clone(),
                    component: ci,
                    domain_vertex: w,
                    iso,
                };
                let m = build_embedding_induced(domain, codomain, &emb)?;
                if seen.insert(m.image_set()) {
                    out.push(emb);
                }
            }
        }
    }
    Ok(out)
}

fn subsets(items: &[ArcId], k: usize) -> Vec<Vec<ArcId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Vertex maps of the view induced by self-homeomorphisms of the surface,
/// including orientation-reversing ones. Maps leaving the view are dropped.
pub fn homeomorphism_automorphisms(g: &FlipGraphView) -> Result<Vec<Vec<usize>>> {
    if g.is_empty() {
        return Ok(Vec::new());
    }
    let base = g.vertex(0).tri();
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for w in 0..g.len() {
        for iso in triangulation_isomorphisms(base, g.vertex(w).tri()) {
            match replay(g, 0, g, &g.vertex(w).tracked, &iso.edges) {
                Ok(m) => {
                    out.insert(m);
                }
                Err(Error::IncompleteView(_)) if !g.is_complete() => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapMatch {
    pub map: usize,
    pub embedding: usize,
    pub symmetry: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub maps: usize,
    pub matched: usize,
    pub unmatched: Vec<usize>,
    pub multiply_matched: Vec<usize>,
    pub embeddings: usize,
    pub symmetries: usize,
    pub matches: Vec<MapMatch>,
    pub evidence_only: bool,
    pub note: &'static str,
}

/// Matches every map to a pair (embedding, domain symmetry) whose
/// composite equals it.
pub fn classify_against_embeddings(maps: &[SimplicialMap], known: &[EmbeddingSpec]) -> Result<ClassificationReport> {
    let Some(first) = maps.first() else {
        return Ok(ClassificationReport {
            maps: 0,
            matched: 0,
            unmatched: Vec::new(),
            multiply_matched: Vec::new(),
            embeddings: known.len(),
            symmetries: 0,
            matches: Vec::new(),
            evidence_only: false,
            note: BOUNDARY_ARCS_NOTE,
        });
    };
    let (dom, cod) = (first.domain, first.codomain);
    let syms = homeomorphism_automorphisms(dom)?;
    let mut table: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for (ei, emb) in known.iter().enumerate() {
        let phi = build_embedding_induced(dom, cod, emb)?;
        for (si, s) in syms.iter().enumerate() {
            let composite: Vec<usize> = s.iter().map(|&x| phi.map[x]).collect();
            table.entry(composite).or_default().push((ei, si));
        }
    }
    let mut report = ClassificationReport {
        maps: maps.len(),
        matched: 0,
        unmatched: Vec::new(),
        multiply_matched: Vec::new(),
        embeddings: known.len(),
        symmetries: syms.len(),
        matches: Vec::new(),
        evidence_only: !dom.is_complete() || !cod.is_complete(),
        note: BOUNDARY_ARCS_NOTE,
    };
    for (mi, m) in maps.iter().enumerate() {
        match table.get(&m.map).map(Vec::as_slice) {
            None | Some([]) => report.unmatched.push(mi),
            Some([(e, s)]) => {
                report.matched += 1;
                report.matches.push(MapMatch {
                    map: mi,
                    embedding: *e,
                    symmetry: *s,
                });
            }
            Some(_) => report.multiply_matched.push(mi),
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitReport {
    pub vertices: usize,
    /// Type of the single component carrying the image's moving arcs.
    pub moving_component: Option<SurfaceSpec>,
    /// Types of the components carrying no moving arcs.
    pub inert_components: Vec<SurfaceSpec>,
    /// Domain edges whose two flipped image arcs were both found in the
    /// moving component.
    pub flip_witnesses: usize,
}

/// Cuts every image vertex along the invariant multiarc and checks that
/// all other arcs lie in one component of the domain's type.
pub fn component_split_check(m: &SimplicialMap) -> Result<SplitReport> {
    let (dom, cod) = (m.domain, m.codomain);
    let a = m.multiarc()?;
    let mut report = SplitReport {
        vertices: dom.len(),
        moving_component: None,
        inert_components: Vec::new(),
        flip_witnesses: 0,
    };
    // Component index of every moving arc, per domain vertex.
    let mut where_: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(dom.len());
    for v in 0..dom.len() {
        let w = m.map[v];
        let ids = a
            .local_ids(cod, w)
            .ok_or_else(|| Error::SplitViolation(format!("multiarc missing from image of {v}")))?;
        let comps = cut_along(cod.vertex(w).tri(), &ids)?;
        let mut place = BTreeMap::new();
        let mut moving = Vec::new();
        let mut inert = Vec::new();
        for (ci, c) in comps.iter().enumerate() {
            let inner = c.triangulation.interior_arcs();
            if inner.is_empty() {
                inert.push(c.spec.clone());
                continue;
            }
            moving.push(c.spec.clone());
            for e in inner {
                let g = cod.vertex(w).local[c.origin[e.index()].index()].expect("interior arc");
                place.insert(g, ci);
            }
        }
        if moving.len() > 1 {
            return Err(Error::SplitViolation(format!("image of {v} has {} moving components", moving.len())));
        }
        if let Some(s) = moving.first() {
            if !s.same_topological_type(dom.surface()) {
                return Err(Error::SplitViolation(format!("moving component {s} differs from the domain")));
            }
            report.moving_component.get_or_insert_with(|| s.clone());
        }
        if v == 0 {
            report.inert_components = inert;
        }
        where_.push(place);
    }
    for (u, v) in dom.edges() {
        let only = |x: usize, y: usize| -> Vec<usize> {
            let other = &cod.vertex(m.map[y]).arcs;
            cod.vertex(m.map[x]).arcs.iter().copied().filter(|g| other.binary_search(g).is_err()).collect()
        };
        let (p, q) = (only(u, v), only(v, u));
        if p.iter().all(|g| where_[u].contains_key(g)) && q.iter().all(|g| where_[v].contains_key(g)) {
            report.flip_witnesses += 1;
        } else {
            return Err(Error::SplitViolation(format!("flip {u}-{v} moves an arc outside the moving component")));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineFailure {
    pub map: usize,
    pub stage: &'static str,
    pub error: String,
}

/// Census, classification and per-map checks for one pair of views.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub domain: SurfaceSpec,
    pub codomain: SurfaceSpec,
    pub exceptional_domain: bool,
    pub evidence_only: bool,
    pub maps: usize,
    pub matched: usize,
    pub unmatched: usize,
    pub multiply_matched: usize,
    pub embeddings: usize,
    pub symmetries: usize,
    pub structure_violations: Vec<(usize, StructureViolation)>,
    pub failures: Vec<PipelineFailure>,
}

impl RigidityReport {
    pub fn summary_line(&self) -> String {
        format!("maps={} matched={} unmatched={}", self.maps, self.matched, self.unmatched)
    }

    /// Whether the run supports rigidity. Exceptional domains only report.
    pub fn passed(&self) -> bool {
        self.exceptional_domain
            || (self.unmatched == 0
                && self.multiply_matched == 0
                && self.structure_violations.is_empty()
                && self.failures.is_empty())
    }
}

pub fn rigidity_suite(domain: &FlipGraphView, codomain: &FlipGraphView, cap: usize) -> Result<RigidityReport> {
    let evidence_only = !domain.is_complete() || !codomain.is_complete();
    let maps = if evidence_only {
        injective_map_census_partial(domain, codomain, cap)?
    } else {
        injective_map_census(domain, codomain, cap)?
    };
    let known = enumerate_embeddings(domain, codomain).or_else(|e| match e {
        Error::IncompleteView(_) if evidence_only => Ok(Vec::new()),
        e => Err(e),
    })?;
    let class = classify_against_embeddings(&maps, &known)?;
    let exceptional = domain.surface().is_exceptional();
    let per_map: Vec<(Vec<(usize, StructureViolation)>, Vec<PipelineFailure>)> = maps
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let mut sv = Vec::new();
            let mut fails = Vec::new();
            let mut fail = |stage: &'static str, e: Error| {
                fails.push(PipelineFailure {
                    map: i,
                    stage,
                    error: e.to_string(),
                })
            };
            if !check_simplicial_injective(m) {
                fail("simplicial", Error::HypothesisViolated("not injective simplicial".into()));
            }
            match verify_structure_preservation(m) {
                Ok(r) => sv.extend(r.violations.into_iter().map(|v| (i, v))),
                Err(e) => fail("structure", e),
            }
            if let Err(e) = component_split_check(m) {
                fail("split", e);
            }
            (sv, fails)
        })
        .collect();
    let mut report = RigidityReport {
        domain: domain.surface().clone(),
        codomain: codomain.surface().clone(),
        exceptional_domain: exceptional,
        evidence_only,
        maps: class.maps,
        matched: class.matched,
        unmatched: class.unmatched.len(),
        multiply_matched: class.multiply_matched.len(),
        embeddings: class.embeddings,
        symmetries: class.symmetries,
        structure_violations: Vec::new(),
        failures: Vec::new(),
    };
    for (sv, f) in per_map {
        report.structure_violations.extend(sv);
        report.failures.extend(f);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::enumerate_full;

    fn full(n: u32) -> FlipGraphView {
        enumerate_full(&Triangulation::standard(&SurfaceSpec::disk(n)).unwrap(), 1000).unwrap()
    }

    #[test]
    fn hexagon_fan_has_two_symmetries() {
        let t = Triangulation::standard(&SurfaceSpec::disk(6)).unwrap();
        // The fan from one vertex is fixed by a reflection only.
        assert_eq!(triangulation_isomorphisms(&t, &t).len(), 2);
    }

    #[test]
    fn pentagon_self_maps_are_dihedral() {
        let c5 = full(5);
        let maps = injective_map_census(&c5, &c5, 100).unwrap();
        assert_eq!(maps.len(), 10);
        assert_eq!(homeomorphism_automorphisms(&c5).unwrap().len(), 10);
    }

    #[test]
    fn identity_embedding() {
        let c5 = full(5);
        let embs = enumerate_embeddings(&c5, &c5).unwrap();
        assert_eq!(embs.len(), 1);
        let m = build_embedding_induced(&c5, &c5, &embs[0]).unwrap();
        assert!(invariant_multiarc(&m).unwrap().is_empty());
        assert!(check_simplicial_injective(&m));
        let psi = induced_arc_map(&m).unwrap();
        assert!(psi.is_injective());
        assert_eq!(psi.map.len(), c5.arc_table().len());
    }

    #[test]
    fn collapsing_map_is_rejected() {
        let c5 = full(5);
        let mut map: Vec<usize> = (0..5).collect();
        map[1] = map[0];
        assert!(!check_simplicial_injective(&SimplicialMap::new(&c5, &c5, map).unwrap()));
    }

    #[test]
    fn wrong_component_type_is_invalid() {
        let c5 = full(5);
        let a6 = full(6);
        let e = enumerate_embeddings(&c5, &a6).unwrap().remove(0);
        let bad = EmbeddingSpec {
            component: 1 - e.component,
            ..e
        };
        assert!(matches!(build_embedding_induced(&c5, &a6, &bad), Err(Error::InvalidEmbedding(_))));
    }
}
