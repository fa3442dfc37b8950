//! Triangle-slot representation of triangulated marked surfaces.
//!
//! A triangulation is a list of triangles, each with three slots listed in
//! counter-clockwise order. A slot names an edge and a side token. An
//! interior edge (an arc) fills exactly two slots, one per side; a boundary
//! segment fills one slot. The side-0 slot traverses its edge from tail to
//! head, the side-1 slot from head to tail, which is what makes the gluing
//! orientation-coherent.
//!
//! Corner `j` of a triangle is the marked point at the end of slot `j`, so
//! the corner opposite slot `j` is corner `j + 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::SurfaceSpec;

/// Edge identifier inside one triangulation. Flips reuse the id of the
/// removed arc for the new one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeRef {
    #[serde(rename = "e")]
    pub edge: ArcId,
    pub side: u8,
}

impl EdgeRef {
    pub fn new(edge: ArcId, side: u8) -> Self {
        EdgeRef { edge, side }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: ArcId,
    pub boundary: bool,
}

/// Serialized form of a triangulation, also the fixture format for tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    pub triangles: Vec<[EdgeRef; 3]>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corners: Option<Vec<[u32; 3]>>,
}

/// A violated invariant reported by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Diagnostic {
    EmptyTriangulation,
    EdgeTableMismatch { index: usize },
    UnknownEdge { triangle: usize, slot: usize },
    InvalidSide { triangle: usize, slot: usize },
    DanglingInteriorEdge { edge: ArcId },
    SlotCountMismatch { edge: ArcId, count: usize },
    IncoherentOrientation { edge: ArcId },
    BoundarySideNotZero { edge: ArcId },
    Disconnected,
    NonManifoldVertex { vertex: u32 },
    CornerLabelMismatch,
    NonIntegralGenus,
    ComplexityMismatch { expected: i64, found: usize },
    TriangleCountMismatch { expected: i64, found: usize },
    VertexCountMismatch { expected: u32, found: u32 },
    SurfaceMismatch { declared: SurfaceSpec, inferred: SurfaceSpec },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Checks every structural and topological invariant. Structural problems
/// (slot counts, sides, unknown ids) are reported alone since the
/// topological checks are meaningless without a well-formed gluing.
pub fn validate(data: &TriangulationData) -> Vec<Diagnostic> {
    match analyse(data) {
        Ok(_) => Vec::new(),
        Err(diags) => diags,
    }
}

struct Analysis {
    surface: SurfaceSpec,
    corners: Vec<[u32; 3]>,
    puncture: Vec<bool>,
}

fn analyse(data: &TriangulationData) -> std::result::Result<Analysis, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    if data.triangles.is_empty() {
        return Err(vec![Diagnostic::EmptyTriangulation]);
    }
    for (i, rec) in data.edges.iter().enumerate() {
        if rec.id.index() != i {
            diags.push(Diagnostic::EdgeTableMismatch { index: i });
        }
    }
    let ne = data.edges.len();
    let mut seen: Vec<Vec<u8>> = vec![Vec::new(); ne];
    for (t, tri) in data.triangles.iter().enumerate() {
        for (k, r) in tri.iter().enumerate() {
            if r.edge.index() >= ne {
                diags.push(Diagnostic::UnknownEdge { triangle: t, slot: k });
            } else if r.side > 1 {
                diags.push(Diagnostic::InvalidSide { triangle: t, slot: k });
            } else {
                seen[r.edge.index()].push(r.side);
            }
        }
    }
    for (i, sides) in seen.iter().enumerate() {
        let edge = ArcId(i as u32);
        let boundary = data.edges.get(i).map(|r| r.boundary).unwrap_or(false);
        if boundary {
            if sides.len() != 1 {
                diags.push(Diagnostic::SlotCountMismatch {
                    edge,
                    count: sides.len(),
                });
            } else if sides[0] != 0 {
                diags.push(Diagnostic::BoundarySideNotZero { edge });
            }
        } else if sides.len() == 1 {
            diags.push(Diagnostic::DanglingInteriorEdge { edge });
        } else if sides.len() != 2 {
            diags.push(Diagnostic::SlotCountMismatch {
                edge,
                count: sides.len(),
            });
        } else if sides[0] == sides[1] {
            diags.push(Diagnostic::IncoherentOrientation { edge });
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    let nt = data.triangles.len();
    let slots = slot_table(&data.triangles, ne);

    // Connectivity of the dual graph.
    let mut reached = vec![false; nt];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(t) = stack.pop() {
        for r in &data.triangles[t] {
            if data.edges[r.edge.index()].boundary {
                continue;
            }
            let (o, _) = slots[r.edge.index()][1 - r.side as usize].unwrap();
            if !reached[o as usize] {
                reached[o as usize] = true;
                stack.push(o as usize);
            }
        }
    }
    if reached.iter().any(|r| !r) {
        diags.push(Diagnostic::Disconnected);
    }

    // Corner orbits.
    let mut uf = UnionFind::new(3 * nt);
    for (e, rec) in data.edges.iter().enumerate() {
        if rec.boundary {
            continue;
        }
        let (t0, i0) = slots[e][0].unwrap();
        let (t1, i1) = slots[e][1].unwrap();
        let (t0, i0, t1, i1) = (t0 as usize, i0 as usize, t1 as usize, i1 as usize);
        // Head: end of the side-0 slot, start of the side-1 slot.
        uf.union(3 * t0 + i0, 3 * t1 + (i1 + 2) % 3);
        // Tail: start of the side-0 slot, end of the side-1 slot.
        uf.union(3 * t0 + (i0 + 2) % 3, 3 * t1 + i1);
    }
    let mut label_of_root: BTreeMap<usize, u32> = BTreeMap::new();
    let mut computed = vec![[0u32; 3]; nt];
    for t in 0..nt {
        for j in 0..3 {
            let root = uf.find(3 * t + j);
            let next = label_of_root.len() as u32;
            computed[t][j] = *label_of_root.entry(root).or_insert(next);
        }
    }
    let nv = label_of_root.len() as u32;
    let corners = match &data.corners {
        None => computed,
        Some(given) => {
            // Given labels must induce the same partition, bijectively.
            let mut forward: BTreeMap<u32, u32> = BTreeMap::new();
            let mut backward: BTreeMap<u32, u32> = BTreeMap::new();
            let mut ok = given.len() == nt;
            if ok {
                'outer: for t in 0..nt {
                    for j in 0..3 {
                        let (c, g) = (computed[t][j], given[t][j]);
                        if *forward.entry(c).or_insert(g) != g || *backward.entry(g).or_insert(c) != c {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if !ok {
                diags.push(Diagnostic::CornerLabelMismatch);
                computed
            } else {
                given.clone()
            }
        }
    };

    // Boundary walks: each boundary marked point must have one incoming and
    // one outgoing boundary segment.
    let mut outgoing: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut incoming: BTreeMap<u32, usize> = BTreeMap::new();
    let mut boundary_edges = Vec::new();
    for (e, rec) in data.edges.iter().enumerate() {
        if !rec.boundary {
            continue;
        }
        let (t, i) = slots[e][0].unwrap();
        let head = corners[t as usize][i as usize];
        let tail = corners[t as usize][(i as usize + 2) % 3];
        outgoing.entry(tail).or_default().push(e);
        *incoming.entry(head).or_default() += 1;
        boundary_edges.push((e, tail, head));
    }
    for (&v, outs) in &outgoing {
        if outs.len() != 1 || incoming.get(&v) != Some(&1) {
            diags.push(Diagnostic::NonManifoldVertex { vertex: v });
        }
    }
    for &v in incoming.keys() {
        if !outgoing.contains_key(&v) {
            diags.push(Diagnostic::NonManifoldVertex { vertex: v });
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut head_of: BTreeMap<u32, u32> = BTreeMap::new();
    for &(_, tail, head) in &boundary_edges {
        head_of.insert(tail, head);
    }
    let mut on_boundary = vec![false; nv as usize];
    let mut cycles = Vec::new();
    for &start in head_of.keys() {
        if on_boundary[start as usize] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        loop {
            on_boundary[v as usize] = true;
            len += 1;
            v = head_of[&v];
            if v == start {
                break;
            }
        }
        cycles.push(len);
    }
    let q: u32 = cycles.iter().sum();
    let b = cycles.len() as i64;
    let p = nv - q;
    let chi = nv as i64 - ne as i64 + nt as i64;
    let twice_genus = 2 - b - chi;
    if twice_genus < 0 || twice_genus % 2 != 0 {
        return Err(vec![Diagnostic::NonIntegralGenus]);
    }
    let inferred = match SurfaceSpec::new((twice_genus / 2) as u32, cycles, p) {
        Ok(s) => s,
        Err(_) => return Err(vec![Diagnostic::NonIntegralGenus]),
    };
    let interior = data.edges.iter().filter(|r| !r.boundary).count();
    let surface = match &data.surface {
        None => inferred,
        Some(declared) => {
            let d = declared.complexity();
            if d != interior as i64 {
                diags.push(Diagnostic::ComplexityMismatch {
                    expected: d,
                    found: interior,
                });
            }
            let tcount = (2 * d + declared.boundary_points() as i64) / 3;
            if tcount != nt as i64 {
                diags.push(Diagnostic::TriangleCountMismatch {
                    expected: tcount,
                    found: nt,
                });
            }
            if declared.marked_points() != nv {
                diags.push(Diagnostic::VertexCountMismatch {
                    expected: declared.marked_points(),
                    found: nv,
                });
            }
            if !declared.same_topological_type(&inferred) {
                diags.push(Diagnostic::SurfaceMismatch {
                    declared: declared.clone(),
                    inferred,
                });
            }
            declared.clone()
        }
    };
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut puncture = vec![true; nv as usize];
    for (v, &ob) in on_boundary.iter().enumerate() {
        if ob {
            puncture[v] = false;
        }
    }
    // Labels may be arbitrary when supplied; remap puncture flags to them.
    let max_label = corners.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut flags = vec![false; max_label + 1];
    for t in 0..nt {
        for j in 0..3 {
            let computed_label = {
                let root = uf.find(3 * t + j);
                label_of_root[&root]
            };
            flags[corners[t][j] as usize] = puncture[computed_label as usize];
        }
    }
    Ok(Analysis {
        surface,
        corners,
        puncture: flags,
    })
}

fn slot_table(triangles: &[[EdgeRef; 3]], ne: usize) -> Vec<[Option<(u32, u8)>; 2]> {
    let mut slots = vec![[None, None]; ne];
    for (t, tri) in triangles.iter().enumerate() {
        for (k, r) in tri.iter().enumerate() {
            slots[r.edge.index()][r.side as usize] = Some((t as u32, k as u8));
        }
    }
    slots
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Letter of a polygon gluing word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    Boundary,
    Forward(u32),
    Backward(u32),
}

/// The two triangles around a flippable arc, rotated so that the arc sits
/// in slot 0 of both.
///
/// With `P -> Q` the arc's direction, `R` the corner opposite it in the
/// side-0 triangle and `S` the corner opposite it in the side-1 triangle,
/// `sides` lists the quadrilateral's sides counter-clockwise as
/// `[Q->R, R->P, P->S, S->Q]` and `corners` holds `[P, Q, R, S]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadContext {
    pub diagonal: ArcId,
    pub t1: usize,
    pub t2: usize,
    pub sides: [EdgeRef; 4],
    pub corners: [u32; 4],
}

impl QuadContext {
    /// Pairs of side positions holding the same edge.
    pub fn repeated_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                if self.sides[i].edge == self.sides[j].edge {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn positions_of(&self, edge: ArcId) -> Vec<usize> {
        (0..4).filter(|&k| self.sides[k].edge == edge).collect()
    }

    pub fn has_opposite_identified(&self) -> bool {
        self.sides[0].edge == self.sides[2].edge || self.sides[1].edge == self.sides[3].edge
    }

    /// Position of a slot among the sides, resolving repeated edges.
    pub fn position_of_slot(&self, slot: EdgeRef) -> Option<usize> {
        self.sides.iter().position(|s| *s == slot)
    }
}

/// How two flips out of a common vertex interact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WedgeKind {
    Square,
    Pentagon,
    CylinderPair,
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    surface: SurfaceSpec,
    triangles: Vec<[EdgeRef; 3]>,
    corners: Vec<[u32; 3]>,
    boundary: Vec<bool>,
    slots: Vec<[Option<(u32, u8)>; 2]>,
    puncture: Vec<bool>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.triangles == other.triangles
            && self.corners == other.corners
            && self.boundary == other.boundary
    }
}

impl Eq for Triangulation {}

impl TryFrom<TriangulationData> for Triangulation {
    type Error = Error;

    fn try_from(data: TriangulationData) -> Result<Self> {
        let analysis = analyse(&data).map_err(|d| {
            let text: Vec<String> = d.iter().map(|x| x.to_string()).collect();
            Error::InvalidTriangulation(text.join(", "))
        })?;
        let boundary: Vec<bool> = data.edges.iter().map(|r| r.boundary).collect();
        let slots = slot_table(&data.triangles, boundary.len());
        Ok(Triangulation {
            surface: analysis.surface,
            triangles: data.triangles,
            corners: analysis.corners,
            boundary,
            slots,
            puncture: analysis.puncture,
        })
    }
}

impl Serialize for Triangulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Triangulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = TriangulationData::deserialize(d)?;
        Triangulation::try_from(data).map_err(serde::de::Error::custom)
    }
}

impl Triangulation {
    /// Fan triangulation of a polygon whose sides are glued by `word`.
    /// Paired letters become interior edges (numbered first, in order of
    /// first appearance), followed by the fan diagonals from polygon
    /// vertex 0, then the boundary segments.
    pub fn from_word(word: &[Letter]) -> Result<Triangulation> {
        let n = word.len();
        if n < 3 {
            return Err(Error::InvalidSurface("polygon word needs at least three letters".into()));
        }
        let mut pair_ids: BTreeMap<u32, u32> = BTreeMap::new();
        let mut pair_count: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
        for l in word {
            match *l {
                Letter::Forward(x) => pair_count.entry(x).or_default().0 += 1,
                Letter::Backward(x) => pair_count.entry(x).or_default().1 += 1,
                Letter::Boundary => {}
            }
        }
        if pair_count.values().any(|&c| c != (1, 1)) {
            return Err(Error::InvalidSurface(
                "each paired letter must occur once forward and once backward".into(),
            ));
        }
        let mut edges = Vec::new();
        for l in word {
            if let Letter::Forward(x) | Letter::Backward(x) = *l {
                pair_ids.entry(x).or_insert_with(|| {
                    let id = edges.len() as u32;
                    edges.push(EdgeRecord {
                        id: ArcId(id),
                        boundary: false,
                    });
                    id
                });
            }
        }
        // Diagonal 0-k for k = 2..n-2.
        let mut diag = vec![0u32; n];
        for (k, slot) in diag.iter_mut().enumerate().take(n - 1).skip(2) {
            *slot = edges.len() as u32;
            edges.push(EdgeRecord {
                id: ArcId(*slot),
                boundary: false,
            });
            let _ = k;
        }
        let mut side_ref = Vec::with_capacity(n);
        for l in word {
            side_ref.push(match *l {
                Letter::Boundary => {
                    let id = edges.len() as u32;
                    edges.push(EdgeRecord {
                        id: ArcId(id),
                        boundary: true,
                    });
                    EdgeRef::new(ArcId(id), 0)
                }
                Letter::Forward(x) => EdgeRef::new(ArcId(pair_ids[&x]), 0),
                Letter::Backward(x) => EdgeRef::new(ArcId(pair_ids[&x]), 1),
            });
        }
        let mut triangles = Vec::with_capacity(n - 2);
        for k in 1..n - 1 {
            let first = if k == 1 {
                side_ref[0]
            } else {
                EdgeRef::new(ArcId(diag[k]), 0)
            };
            let last = if k + 1 == n - 1 {
                side_ref[n - 1]
            } else {
                EdgeRef::new(ArcId(diag[k + 1]), 1)
            };
            triangles.push([first, side_ref[k], last]);
        }
        let data = TriangulationData {
            surface: None,
            triangles,
            edges,
            corners: None,
        };
        let mut tri = Triangulation::try_from(data)?;
        // Relabel marked points by their lowest polygon vertex.
        let mut lowest: BTreeMap<u32, u32> = BTreeMap::new();
        for (t, c) in tri.corners.iter().enumerate() {
            let k = t as u32 + 1;
            let poly = [k, k + 1, 0];
            for j in 0..3 {
                let e = lowest.entry(c[j]).or_insert(poly[j]);
                *e = (*e).min(poly[j]);
            }
        }
        let mut order: Vec<(u32, u32)> = lowest.iter().map(|(&l, &p)| (p, l)).collect();
        order.sort_unstable();
        let mut relabel = vec![0u32; order.len()];
        for (new, &(_, old)) in order.iter().enumerate() {
            relabel[old as usize] = new as u32;
        }
        let mut puncture = vec![false; order.len()];
        for c in tri.corners.iter_mut() {
            for x in c.iter_mut() {
                puncture[relabel[*x as usize] as usize] = tri.puncture[*x as usize];
                *x = relabel[*x as usize];
            }
        }
        tri.puncture = puncture;
        Ok(tri)
    }

    /// The standard triangulation of a surface type. The largest boundary
    /// component comes first in the gluing word, so for a disk the marked
    /// points are labelled `0..n` counter-clockwise and the arcs form the
    /// fan at point 0.
    pub fn standard(spec: &SurfaceSpec) -> Result<Triangulation> {
        if spec.complexity() < 1 {
            return Err(Error::InvalidSurface(format!(
                "{spec} has complexity {} and no flippable triangulation",
                spec.complexity()
            )));
        }
        let canon = spec.canonical();
        let mut word = Vec::new();
        let mut next = 0u32;
        let mut pair = |word: &mut Vec<Letter>| {
            next += 1;
            word.push(Letter::Forward(next));
            next
        };
        let boundary = canon.boundary();
        if let Some(&q) = boundary.first() {
            word.extend(std::iter::repeat_n(Letter::Boundary, q as usize));
        }
        for _ in 0..canon.genus() {
            let a = pair(&mut word);
            let b = pair(&mut word);
            word.push(Letter::Backward(a));
            word.push(Letter::Backward(b));
        }
        let free_punctures = if boundary.is_empty() {
            canon.punctures().saturating_sub(1)
        } else {
            canon.punctures()
        };
        for _ in 0..free_punctures {
            let x = pair(&mut word);
            word.push(Letter::Backward(x));
        }
        for &q in boundary.iter().skip(1) {
            let x = pair(&mut word);
            word.extend(std::iter::repeat_n(Letter::Boundary, q as usize));
            word.push(Letter::Backward(x));
        }
        let mut tri = Triangulation::from_word(&word)?;
        debug_assert!(tri.surface.same_topological_type(spec));
        tri.surface = spec.clone();
        Ok(tri)
    }

    pub fn to_data(&self) -> TriangulationData {
        TriangulationData {
            surface: Some(self.surface.clone()),
            triangles: self.triangles.clone(),
            edges: self
                .boundary
                .iter()
                .enumerate()
                .map(|(i, &b)| EdgeRecord {
                    id: ArcId(i as u32),
                    boundary: b,
                })
                .collect(),
            corners: Some(self.corners.clone()),
        }
    }

    pub fn surface(&self) -> &SurfaceSpec {
        &self.surface
    }

    pub fn triangles(&self) -> &[[EdgeRef; 3]] {
        &self.triangles
    }

    pub fn corners(&self) -> &[[u32; 3]] {
        &self.corners
    }

    pub fn edge_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn marked_point_count(&self) -> usize {
        self.puncture.len()
    }

    pub fn is_puncture(&self, point: u32) -> bool {
        self.puncture.get(point as usize).copied().unwrap_or(false)
    }

    pub fn is_boundary(&self, e: ArcId) -> bool {
        self.boundary[e.index()]
    }

    pub fn interior_arcs(&self) -> Vec<ArcId> {
        (0..self.boundary.len() as u32)
            .map(ArcId)
            .filter(|&a| !self.is_boundary(a))
            .collect()
    }

    pub fn boundary_arcs(&self) -> Vec<ArcId> {
        (0..self.boundary.len() as u32)
            .map(ArcId)
            .filter(|&a| self.is_boundary(a))
            .collect()
    }

    fn check_interior(&self, a: ArcId) -> Result<()> {
        if a.index() >= self.boundary.len() || self.boundary[a.index()] {
            return Err(Error::UnknownArc(a));
        }
        Ok(())
    }

    /// Triangle index and slot position holding the given side of an edge.
    pub fn slot(&self, e: ArcId, side: u8) -> (usize, usize) {
        let (t, k) = self.slots[e.index()][side as usize].expect("slot present");
        (t as usize, k as usize)
    }

    /// Marked points at the tail and head of an edge.
    pub fn endpoints(&self, e: ArcId) -> (u32, u32) {
        let (t, k) = self.slot(e, 0);
        (self.corners[t][(k + 2) % 3], self.corners[t][k])
    }

    /// First interior arc joining two marked points, if any.
    pub fn arc_between(&self, p: u32, q: u32) -> Option<ArcId> {
        self.interior_arcs().into_iter().find(|&a| {
            let (x, y) = self.endpoints(a);
            (x, y) == (p, q) || (x, y) == (q, p)
        })
    }

    pub fn is_flippable(&self, a: ArcId) -> Result<bool> {
        self.check_interior(a)?;
        Ok(self.slot(a, 0).0 != self.slot(a, 1).0)
    }

    pub fn flippable_arcs(&self) -> Vec<ArcId> {
        self.interior_arcs()
            .into_iter()
            .filter(|&a| self.slot(a, 0).0 != self.slot(a, 1).0)
            .collect()
    }

    pub fn unflippable_arcs(&self) -> Vec<ArcId> {
        self.interior_arcs()
            .into_iter()
            .filter(|&a| self.slot(a, 0).0 == self.slot(a, 1).0)
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.flippable_arcs().len()
    }

    /// Number of triangles with two slots on the same edge.
    pub fn self_folded_count(&self) -> usize {
        self.triangles
            .iter()
            .filter(|t| t[0].edge == t[1].edge || t[1].edge == t[2].edge || t[0].edge == t[2].edge)
            .count()
    }

    /// Whether two interior arcs are sides of a common triangle.
    pub fn share_triangle(&self, a: ArcId, b: ArcId) -> bool {
        self.triangles
            .iter()
            .any(|t| t.iter().any(|r| r.edge == a) && t.iter().any(|r| r.edge == b))
    }

    pub fn quadrilateral_around(&self, a: ArcId) -> Result<QuadContext> {
        self.check_interior(a)?;
        let a = if fault::active() { fault::substitute(self, a) } else { a };
        let (t1, i) = self.slot(a, 0);
        let (t2, k) = self.slot(a, 1);
        if t1 == t2 {
            return Err(Error::Unflippable(a));
        }
        let x = &self.triangles[t1];
        let y = &self.triangles[t2];
        let cx = &self.corners[t1];
        let cy = &self.corners[t2];
        // t1 rotated: [e, a, b] with corners [Q, R, P].
        // t2 rotated: [e, c, d] with corners [P, S, Q].
        Ok(QuadContext {
            diagonal: a,
            t1,
            t2,
            sides: [x[(i + 1) % 3], x[(i + 2) % 3], y[(k + 1) % 3], y[(k + 2) % 3]],
            corners: [cx[(i + 2) % 3], cx[i], cx[(i + 1) % 3], cy[(k + 1) % 3]],
        })
    }

    /// Replaces `a` by the other diagonal of its quadrilateral. The new arc
    /// keeps the id of `a` and runs from `R` to `S` (see [`QuadContext`]).
    pub fn flip(&self, a: ArcId) -> Result<(Triangulation, ArcId)> {
        let q = self.quadrilateral_around(a)?;
        Ok((self.flip_with(&q), a))
    }

    pub(crate) fn flip_with(&self, q: &QuadContext) -> Triangulation {
        let [sa, sb, sc, sd] = q.sides;
        let [p, qq, r, s] = q.corners;
        let mut next = self.clone();
        next.triangles[q.t1] = [sb, sc, EdgeRef::new(q.diagonal, 1)];
        next.corners[q.t1] = [p, s, r];
        next.triangles[q.t2] = [sd, sa, EdgeRef::new(q.diagonal, 0)];
        next.corners[q.t2] = [qq, r, s];
        for t in [q.t1, q.t2] {
            for (k, rf) in next.triangles[t].iter().enumerate() {
                next.slots[rf.edge.index()][rf.side as usize] = Some((t as u32, k as u8));
            }
        }
        next
    }

    pub fn is_cylinder_flip(&self, a: ArcId) -> Result<bool> {
        Ok(self.quadrilateral_around(a)?.has_opposite_identified())
    }

    /// Classifies the wedge at this vertex formed by flipping `toward_u`
    /// and flipping `toward_w`.
    ///
    /// `Square` when the two arcs lie in different triangles, `Pentagon`
    /// when they share exactly one triangle, `CylinderPair` when
    /// `toward_w` occupies two opposite sides of the quadrilateral around
    /// `toward_u`, and `Degenerate` when it occupies two adjacent sides.
    pub fn classify_wedge(&self, toward_u: ArcId, toward_w: ArcId) -> Result<WedgeKind> {
        if toward_u == toward_w
            || !self.is_flippable(toward_u)?
            || !self.is_flippable(toward_w)?
        {
            return Err(Error::NotAdjacent);
        }
        let q = self.quadrilateral_around(toward_u)?;
        let pos = q.positions_of(toward_w);
        Ok(match pos.as_slice() {
            [] => WedgeKind::Square,
            [_] => WedgeKind::Pentagon,
            [i, j] if j - i == 2 => WedgeKind::CylinderPair,
            _ => WedgeKind::Degenerate,
        })
    }

    pub fn link(&self) -> Vec<(ArcId, Triangulation)> {
        self.flippable_arcs()
            .into_iter()
            .map(|a| (a, self.flip(a).expect("flippable").0))
            .collect()
    }

    /// Renders the triangulation in the fixture format.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_data()).expect("serializable")
    }
}

/// Deliberately wrong flip rule, for checking that verification notices.
#[doc(hidden)]
pub mod fault {
    use std::sync::atomic::{AtomicBool, Ordering};

    use super::{ArcId, Triangulation};

    static CORRUPT_FLIP: AtomicBool = AtomicBool::new(false);

    /// While on, flipping an arc flips the next flippable arc instead.
    pub fn corrupt_flip_rule(on: bool) {
        CORRUPT_FLIP.store(on, Ordering::SeqCst);
    }

    pub(crate) fn active() -> bool {
        CORRUPT_FLIP.load(Ordering::Relaxed)
    }

    pub(crate) fn substitute(t: &Triangulation, a: ArcId) -> ArcId {
        let arcs = t.flippable_arcs();
        match arcs.iter().position(|&x| x == a) {
            Some(i) => arcs[(i + 1) % arcs.len()],
            None => a,
        }
    }
}

pub fn is_flippable(tri: &Triangulation, a: ArcId) -> Result<bool> {
    tri.is_flippable(a)
}

pub fn flip(tri: &Triangulation, a: ArcId) -> Result<(Triangulation, ArcId)> {
    tri.flip(a)
}

pub fn degree(tri: &Triangulation) -> usize {
    tri.degree()
}

pub fn quadrilateral_around(tri: &Triangulation, a: ArcId) -> Result<QuadContext> {
    tri.quadrilateral_around(a)
}

pub fn is_cylinder_flip(tri: &Triangulation, a: ArcId) -> Result<bool> {
    tri.is_cylinder_flip(a)
}

pub fn link(tri: &Triangulation) -> Vec<(ArcId, Triangulation)> {
    tri.link()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon() -> Triangulation {
        Triangulation::standard(&SurfaceSpec::disk(6)).unwrap()
    }

    fn torus() -> Triangulation {
        Triangulation::standard(&SurfaceSpec::new(1, vec![], 1).unwrap()).unwrap()
    }

    fn punctured_digon() -> Triangulation {
        Triangulation::standard(&SurfaceSpec::punctured_disk(2)).unwrap()
    }

    fn arc_set(t: &Triangulation) -> Vec<(u32, u32)> {
        let mut v: Vec<_> = t
            .interior_arcs()
            .into_iter()
            .map(|a| {
                let (x, y) = t.endpoints(a);
                (x.min(y), x.max(y))
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn hexagon_fan_shape() {
        let h = hexagon();
        assert!(validate(&h.to_data()).is_empty());
        assert_eq!(arc_set(&h), vec![(0, 2), (0, 3), (0, 4)]);
        assert_eq!(h.degree(), 3);
        assert_eq!(h.triangles().len(), 4);
        assert_eq!(h.marked_point_count(), 6);
    }

    #[test]
    fn deleting_a_gluing_dangles() {
        let mut data = hexagon().to_data();
        let a = ArcId(0);
        let extra = ArcId(data.edges.len() as u32);
        data.edges.push(EdgeRecord {
            id: extra,
            boundary: true,
        });
        for tri in data.triangles.iter_mut() {
            for r in tri.iter_mut() {
                if r.edge == a && r.side == 1 {
                    *r = EdgeRef::new(extra, 0);
                }
            }
        }
        assert_eq!(validate(&data), vec![Diagnostic::DanglingInteriorEdge { edge: a }]);
    }

    #[test]
    fn torus_two_triangles() {
        let t = torus();
        assert!(validate(&t.to_data()).is_empty());
        assert_eq!(t.triangles().len(), 2);
        assert_eq!(t.degree(), 3);
        assert_eq!(t.marked_point_count(), 1);
        for a in t.interior_arcs() {
            assert!(t.is_flippable(a).unwrap());
        }
    }

    #[test]
    fn hexagon_flip_replaces_one_chord() {
        let h = hexagon();
        let a = h.arc_between(0, 3).unwrap();
        let (f, new) = h.flip(a).unwrap();
        assert_eq!(new, a);
        assert_eq!(arc_set(&f), vec![(0, 2), (0, 4), (2, 4)]);
        assert!(validate(&f.to_data()).is_empty());
        let (back, _) = f.flip(a).unwrap();
        assert_eq!(arc_set(&back), arc_set(&h));
    }

    #[test]
    fn hexagon_quad_sides_distinct() {
        let h = hexagon();
        let a = h.arc_between(0, 3).unwrap();
        let q = h.quadrilateral_around(a).unwrap();
        assert!(q.repeated_pairs().is_empty());
        let mut ends: Vec<_> = q.sides.iter().map(|s| {
            let (x, y) = h.endpoints(s.edge);
            (x.min(y), x.max(y))
        }).collect();
        ends.sort();
        assert_eq!(ends, vec![(0, 2), (0, 4), (2, 3), (3, 4)]);
        assert!(!h.is_cylinder_flip(a).unwrap());
    }

    #[test]
    fn punctured_digon_has_unflippable_radius() {
        let t = punctured_digon();
        assert_eq!(t.degree(), 1);
        assert_eq!(t.unflippable_arcs().len(), 1);
        let r = t.unflippable_arcs()[0];
        let (x, y) = t.endpoints(r);
        assert!(t.is_puncture(x) ^ t.is_puncture(y));
        assert_eq!(t.flip(r).unwrap_err(), Error::Unflippable(r));
        assert_eq!(t.link().len(), 1);
        assert_eq!(t.self_folded_count(), 1);
    }

    #[test]
    fn annulus_flips_are_cylinder_flips() {
        let t = Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap();
        assert_eq!(t.degree(), 2);
        for a in t.interior_arcs() {
            assert!(t.is_cylinder_flip(a).unwrap());
            let q = t.quadrilateral_around(a).unwrap();
            assert_eq!(q.repeated_pairs().len(), 1);
            let (f, _) = t.flip(a).unwrap();
            assert_eq!(f.degree(), 2);
        }
        let arcs = t.interior_arcs();
        assert_eq!(t.classify_wedge(arcs[0], arcs[1]).unwrap(), WedgeKind::CylinderPair);
    }

    #[test]
    fn hexagon_wedges() {
        let h = hexagon();
        let a13 = h.arc_between(0, 2).unwrap();
        let a14 = h.arc_between(0, 3).unwrap();
        let a15 = h.arc_between(0, 4).unwrap();
        // v = {13, 35, 15}; u = fan. Flipping 13 at v is a pentagon move.
        let (v, _) = h.flip(a14).unwrap();
        assert_eq!(v.classify_wedge(a14, a13).unwrap(), WedgeKind::Pentagon);
        assert_eq!(h.classify_wedge(a13, a15).unwrap(), WedgeKind::Square);
        assert_eq!(h.classify_wedge(a13, a13).unwrap_err(), Error::NotAdjacent);
    }

    #[test]
    fn standard_types_match() {
        for spec in [
            SurfaceSpec::disk(7),
            SurfaceSpec::punctured_disk(4),
            SurfaceSpec::annulus(3, 2),
            SurfaceSpec::new(1, vec![], 2).unwrap(),
            SurfaceSpec::new(0, vec![], 4).unwrap(),
            SurfaceSpec::new(2, vec![], 1).unwrap(),
            SurfaceSpec::new(1, vec![2, 1], 1).unwrap(),
        ] {
            let t = Triangulation::standard(&spec).unwrap();
            assert_eq!(t.interior_arcs().len() as i64, spec.complexity(), "{spec}");
            let mut data = t.to_data();
            data.corners = None;
            let back = Triangulation::try_from(data).unwrap();
            assert!(back.surface().same_topological_type(&spec), "{spec}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let t = Triangulation::standard(&SurfaceSpec::annulus(3, 2)).unwrap();
        let json = t.to_json();
        let back: Triangulation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(json.contains(r#"{"e":0,"side":0}"#));
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert!(Triangulation::standard(&SurfaceSpec::disk(3)).is_err());
        assert!(Triangulation::standard(&SurfaceSpec::new(0, vec![], 3).unwrap()).is_ok());
    }
}
