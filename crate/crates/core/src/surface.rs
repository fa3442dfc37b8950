//! Topological types of marked surfaces and the bookkeeping around them.
//!
//! A [`SurfaceSpec`] records genus, the number of marked points on each
//! boundary component, and the number of interior marked points
//! (punctures). Everything the flip-graph code needs about the topology of
//! a surface, including its arc complexity and whether rigidity statements
//! apply to it, is derived from this triple.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{ArcId, EdgeRecord, EdgeRef, Triangulation, TriangulationData};

/// Topological type of a compact orientable surface with marked points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSurfaceSpec", into = "RawSurfaceSpec")]
pub struct SurfaceSpec {
    genus: u32,
    boundary: Vec<u32>,
    punctures: u32,
}

#[derive(Serialize, Deserialize)]
struct RawSurfaceSpec {
    genus: u32,
    #[serde(default)]
    boundary: Vec<u32>,
    #[serde(default)]
    punctures: u32,
}

impl TryFrom<RawSurfaceSpec> for SurfaceSpec {
    type Error = Error;

    fn try_from(raw: RawSurfaceSpec) -> Result<Self> {
        SurfaceSpec::new(raw.genus, raw.boundary, raw.punctures)
    }
}

impl From<SurfaceSpec> for RawSurfaceSpec {
    fn from(spec: SurfaceSpec) -> Self {
        RawSurfaceSpec {
            genus: spec.genus,
            boundary: spec.boundary,
            punctures: spec.punctures,
        }
    }
}

impl SurfaceSpec {
    pub fn new(genus: u32, boundary: Vec<u32>, punctures: u32) -> Result<Self> {
        if boundary.contains(&0) {
            return Err(Error::InvalidSurface(
                "every boundary component needs at least one marked point".into(),
            ));
        }
        if punctures == 0 && boundary.is_empty() {
            return Err(Error::InvalidSurface("surface has no marked points".into()));
        }
        Ok(SurfaceSpec {
            genus,
            boundary,
            punctures,
        })
    }

    /// Disk with `n` marked points on its boundary.
    pub fn disk(n: u32) -> Self {
        SurfaceSpec::new(0, vec![n], 0).expect("disk with n >= 1 points")
    }

    /// Disk with `n` boundary marked points and one puncture.
    pub fn punctured_disk(n: u32) -> Self {
        SurfaceSpec::new(0, vec![n], 1).expect("punctured disk with n >= 1 points")
    }

    pub fn annulus(outer: u32, inner: u32) -> Self {
        SurfaceSpec::new(0, vec![outer, inner], 0).expect("annulus with marked boundary")
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    pub fn punctures(&self) -> u32 {
        self.punctures
    }

    pub fn boundary_components(&self) -> u32 {
        self.boundary.len() as u32
    }

    pub fn boundary_points(&self) -> u32 {
        self.boundary.iter().sum()
    }

    pub fn marked_points(&self) -> u32 {
        self.punctures + self.boundary_points()
    }

    /// Number of arcs in any triangulation: `6g + 3b + 3p + q - 6`.
    ///
    /// Degenerate types (monogons, digons, spheres with few points) give a
    /// value below one; callers building triangulations must check.
    pub fn complexity(&self) -> i64 {
        6 * self.genus as i64
            + 3 * self.boundary_components() as i64
            + 3 * self.punctures as i64
            + self.boundary_points() as i64
            - 6
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_components() as i64
    }

    /// Triangle count `(2d + q) / 3` of any triangulation.
    pub fn triangle_count(&self) -> Option<u64> {
        let d = self.complexity();
        if d < 0 {
            return None;
        }
        let twice = 2 * d + self.boundary_points() as i64;
        (twice % 3 == 0).then_some((twice / 3) as u64)
    }

    /// Boundary list in a canonical (descending) order.
    pub fn canonical(&self) -> SurfaceSpec {
        let mut boundary = self.boundary.clone();
        boundary.sort_unstable_by(|a, b| b.cmp(a));
        SurfaceSpec {
            genus: self.genus,
            boundary,
            punctures: self.punctures,
        }
    }

    pub fn same_topological_type(&self, other: &SurfaceSpec) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn is_exceptional(&self) -> bool {
        ExceptionalityPredicate::ClosedForm.is_exceptional(self)
    }

    /// Parses the short names used by the CLI and the demo: `disk6`,
    /// `punctured4`, `annulus3_2`, `torus1`, `torus2`, `sphere4`.
    pub fn from_name(name: &str) -> Result<SurfaceSpec> {
        let bad = || Error::InvalidSurface(format!("unrecognised surface name {name:?}"));
        let number = |s: &str| s.parse::<u32>().map_err(|_| bad());
        if let Some(rest) = name.strip_prefix("disk") {
            return SurfaceSpec::new(0, vec![number(rest)?], 0);
        }
        if let Some(rest) = name.strip_prefix("punctured") {
            return SurfaceSpec::new(0, vec![number(rest)?], 1);
        }
        if let Some(rest) = name.strip_prefix("annulus") {
            let (a, b) = rest.split_once('_').ok_or_else(bad)?;
            return SurfaceSpec::new(0, vec![number(a)?, number(b)?], 0);
        }
        if let Some(rest) = name.strip_prefix("torus") {
            return SurfaceSpec::new(1, vec![], number(rest)?);
        }
        if let Some(rest) = name.strip_prefix("sphere") {
            return SurfaceSpec::new(0, vec![], number(rest)?);
        }
        Err(bad())
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S(g={}, boundary={:?}, p={})",
            self.genus, self.boundary, self.punctures
        )
    }
}

impl FromStr for SurfaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SurfaceSpec::from_name(s)
    }
}

pub fn complexity(spec: &SurfaceSpec) -> i64 {
    spec.complexity()
}

pub fn euler_characteristic(spec: &SurfaceSpec) -> i64 {
    spec.euler_characteristic()
}

pub fn same_topological_type(a: &SurfaceSpec, b: &SurfaceSpec) -> bool {
    a.same_topological_type(b)
}

/// Which surfaces are excluded from the rigidity statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExceptionalityPredicate {
    /// `(g = 0 and p + q <= 4) or (g = 1 and p + q <= 2)`.
    ClosedForm,
    /// Membership in the closure of {torus with at most two marked points,
    /// sphere with at most four} under cutting along arcs.
    Whitelist,
}

impl ExceptionalityPredicate {
    pub fn is_exceptional(self, spec: &SurfaceSpec) -> bool {
        match self {
            ExceptionalityPredicate::ClosedForm => {
                let points = spec.marked_points();
                (spec.genus == 0 && points <= 4) || (spec.genus == 1 && points <= 2)
            }
            ExceptionalityPredicate::Whitelist => exceptional_whitelist()
                .iter()
                .any(|w| w.same_topological_type(spec)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExceptionalityPredicate::ClosedForm => "closed-form",
            ExceptionalityPredicate::Whitelist => "whitelist",
        }
    }
}

impl FromStr for ExceptionalityPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-form" => Ok(ExceptionalityPredicate::ClosedForm),
            "whitelist" => Ok(ExceptionalityPredicate::Whitelist),
            other => Err(Error::InvalidSurface(format!(
                "unknown exceptionality predicate {other:?}"
            ))),
        }
    }
}

pub fn is_exceptional(spec: &SurfaceSpec, predicate: ExceptionalityPredicate) -> bool {
    predicate.is_exceptional(spec)
}

/// Surface types reachable from the seed surfaces by cutting along arcs,
/// one arc at a time. Types of complexity below one are kept as well.
pub fn exceptional_whitelist() -> &'static [SurfaceSpec] {
    static LIST: OnceLock<Vec<SurfaceSpec>> = OnceLock::new();
    LIST.get_or_init(|| {
        let seeds = [
            SurfaceSpec::new(1, vec![], 1).unwrap(),
            SurfaceSpec::new(1, vec![], 2).unwrap(),
            SurfaceSpec::new(0, vec![], 3).unwrap(),
            SurfaceSpec::new(0, vec![], 4).unwrap(),
        ];
        arc_cut_closure(&seeds, 3)
    })
}

/// Closure of `seeds` under single-arc cuts. Arc types are discovered from
/// the flip-graph ball of the given radius around the standard
/// triangulation, which reaches every mapping-class orbit of arcs for the
/// small surfaces this is used on.
pub fn arc_cut_closure(seeds: &[SurfaceSpec], radius: usize) -> Vec<SurfaceSpec> {
    let mut seen: BTreeSet<(u32, Vec<u32>, u32)> = BTreeSet::new();
    let mut queue: Vec<SurfaceSpec> = Vec::new();
    let key = |s: &SurfaceSpec| {
        let c = s.canonical();
        (c.genus, c.boundary, c.punctures)
    };
    for s in seeds {
        if seen.insert(key(s)) {
            queue.push(s.canonical());
        }
    }
    let mut i = 0;
    while i < queue.len() {
        let spec = queue[i].clone();
        i += 1;
        if spec.complexity() < 1 {
            continue;
        }
        let Ok(start) = Triangulation::standard(&spec) else {
            continue;
        };
        let Ok(view) = crate::explorer::ball(&start, radius, 5_000) else {
            continue;
        };
        for v in view.vertices() {
            let tri = &v.tracked.tri;
            for arc in tri.interior_arcs() {
                let Ok(parts) = cut_along(tri, &[arc]) else {
                    continue;
                };
                for part in parts {
                    if seen.insert(key(&part.spec)) {
                        queue.push(part.spec.canonical());
                    }
                }
            }
        }
    }
    queue
}

/// One connected piece of a surface cut open along a multiarc.
#[derive(Clone, Debug)]
pub struct CutComponent {
    pub spec: SurfaceSpec,
    pub triangulation: Triangulation,
    /// For every edge id of the component, the edge id it came from in the
    /// parent triangulation. Cut arcs contribute two boundary edges each.
    pub origin: Vec<ArcId>,
}

/// Cuts `tri` open along every arc in `arcs`.
///
/// Each cut arc becomes two boundary segments; marked points on a cut arc
/// are duplicated as needed. Components are returned in order of their
/// smallest parent triangle index.
pub fn cut_along(tri: &Triangulation, arcs: &[ArcId]) -> Result<Vec<CutComponent>> {
    let cut: BTreeSet<ArcId> = arcs.iter().copied().collect();
    for &a in &cut {
        if a.index() >= tri.edge_count() || tri.is_boundary(a) {
            return Err(Error::EmptyCut);
        }
    }

    let triangles = tri.triangles();
    // Connected components through uncut interior edges.
    let mut comp = vec![usize::MAX; triangles.len()];
    let mut ncomp = 0;
    for start in 0..triangles.len() {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = ncomp;
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for r in &triangles[t] {
                if tri.is_boundary(r.edge) || cut.contains(&r.edge) {
                    continue;
                }
                let (other, _) = tri.slot(r.edge, 1 - r.side);
                if comp[other] == usize::MAX {
                    comp[other] = ncomp;
                    stack.push(other);
                }
            }
        }
        ncomp += 1;
    }

    let mut out = Vec::with_capacity(ncomp);
    for c in 0..ncomp {
        let members: Vec<usize> = (0..triangles.len()).filter(|&t| comp[t] == c).collect();
        let mut edges: Vec<EdgeRecord> = Vec::new();
        let mut origin: Vec<ArcId> = Vec::new();
        // (parent edge, side) -> new edge id; uncut interior edges share one id.
        let mut remap: BTreeMap<(ArcId, u8), ArcId> = BTreeMap::new();
        let mut new_tris = Vec::with_capacity(members.len());
        for &t in &members {
            let mut slots = [EdgeRef::new(ArcId(0), 0); 3];
            for (k, r) in triangles[t].iter().enumerate() {
                let separate = tri.is_boundary(r.edge) || cut.contains(&r.edge);
                let lookup = if separate { (r.edge, r.side) } else { (r.edge, 0) };
                let id = *remap.entry(lookup).or_insert_with(|| {
                    let id = ArcId(edges.len() as u32);
                    edges.push(EdgeRecord {
                        id,
                        boundary: separate,
                    });
                    origin.push(r.edge);
                    id
                });
                let side = if separate { 0 } else { r.side };
                // A separated slot keeps its traversal direction; boundary
                // edges are oriented so that their single slot is side 0.
                slots[k] = EdgeRef::new(id, side);
            }
            new_tris.push(slots);
        }
        let data = TriangulationData {
            surface: None,
            triangles: new_tris,
            edges,
            corners: None,
        };
        let triangulation = Triangulation::try_from(data)?;
        out.push(CutComponent {
            spec: triangulation.surface().clone(),
            triangulation,
            origin,
        });
    }
    Ok(out)
}
