//! Arc identity across flip sequences.
//!
//! Every arc of a fixed base triangulation is followed through flips as a
//! normal curve in the current triangulation: either it is an edge, or it
//! is recorded by the ordered list of edges it crosses. Intersection counts
//! read off these traces give each current arc a coordinate vector
//! relative to the base, and the sorted list of those vectors is a
//! path-independent key for the current triangulation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{ArcId, QuadContext, Triangulation};

/// One crossing of a traced arc with an edge of the current triangulation.
/// `from_side` is the side of the edge the arc comes from, i.e. the slot
/// side of the triangle it leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub edge: ArcId,
    pub from_side: u8,
}

/// A base arc seen in the current triangulation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ArcTrace {
    Edge(ArcId),
    Crossings(Vec<Crossing>),
}

impl ArcTrace {
    pub fn crossings_with(&self, e: ArcId) -> usize {
        match self {
            ArcTrace::Edge(_) => 0,
            ArcTrace::Crossings(cs) => cs.iter().filter(|c| c.edge == e).count(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ArcTrace::Edge(_) => 0,
            ArcTrace::Crossings(cs) => cs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrackingState {
    base: Vec<ArcId>,
    traces: Vec<ArcTrace>,
    strict: bool,
}

/// Intersection vector of an arc against the base arcs, plus its endpoint
/// labels. Entry `f` is the number of crossings with base arc `f`, or `-1`
/// (with zeros elsewhere) when the arc is base arc `f` itself.
///
/// The endpoint pair is part of the identity; serialized, an `ArcCoord`
/// is the integer array `coords ++ [lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcCoord {
    pub coords: Vec<i32>,
    pub ends: [u32; 2],
}

impl ArcCoord {
    pub fn is_base_arc(&self) -> Option<usize> {
        self.coords.iter().position(|&x| x < 0)
    }

    fn check(&self) -> bool {
        let neg: Vec<usize> = (0..self.coords.len())
            .filter(|&i| self.coords[i] < 0)
            .collect();
        match neg.as_slice() {
            [] => self.coords.iter().any(|&x| x > 0),
            [i] => self.coords[*i] == -1 && self.coords.iter().filter(|&&x| x != 0).count() == 1,
            _ => false,
        }
    }
}

impl fmt::Display for ArcCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}-{}", self.coords, self.ends[0], self.ends[1])
    }
}

impl Serialize for ArcCoord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut flat: Vec<i64> = self.coords.iter().map(|&x| x as i64).collect();
        flat.extend(self.ends.iter().map(|&x| x as i64));
        flat.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArcCoord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let flat = Vec::<i64>::deserialize(d)?;
        if flat.len() < 2 {
            return Err(serde::de::Error::custom("arc coordinate too short"));
        }
        let n = flat.len() - 2;
        Ok(ArcCoord {
            coords: flat[..n].iter().map(|&x| x as i32).collect(),
            ends: [flat[n] as u32, flat[n + 1] as u32],
        })
    }
}

/// Canonical vertex key: the sorted coordinates of all interior arcs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TriKey(pub Vec<ArcCoord>);

impl TriKey {
    /// Arcs of `self` missing from `other`.
    pub fn difference<'a>(&'a self, other: &'a TriKey) -> Vec<&'a ArcCoord> {
        self.0.iter().filter(|a| other.0.binary_search(a).is_err()).collect()
    }

    /// Short stable hash for labels.
    pub fn short_hash(&self) -> String {
        // FNV-1a over the serialized form; stable across runs and platforms.
        let text = serde_json::to_string(self).expect("serializable");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Port {
    /// Slot position in the rotated quadrilateral: 0..4 are the sides
    /// `a, b, c, d`, 4 and 5 the diagonal's side-0 and side-1 slots.
    Slot(usize),
    /// Corner position `P, Q, R, S`.
    Corner(usize),
    Outside,
}

const P: usize = 0;
const Q: usize = 1;
const R: usize = 2;
const S: usize = 3;

fn slot_port(quad: &QuadContext, edge: ArcId, side: u8) -> Port {
    if edge == quad.diagonal {
        return Port::Slot(4 + side as usize);
    }
    let slot = crate::triangulation::EdgeRef::new(edge, side);
    match quad.position_of_slot(slot) {
        Some(k) => Port::Slot(k),
        None => Port::Outside,
    }
}

/// Corner of the old quadrilateral opposite a slot port.
fn opposite_corner(port: Port) -> Port {
    match port {
        Port::Slot(4) => Port::Corner(R),
        Port::Slot(0) => Port::Corner(P),
        Port::Slot(1) => Port::Corner(Q),
        Port::Slot(5) => Port::Corner(S),
        Port::Slot(2) => Port::Corner(Q),
        Port::Slot(3) => Port::Corner(P),
        _ => Port::Outside,
    }
}

/// New triangle holding a port after the flip: 1 for the triangle that
/// takes the diagonal's side-1 slot, 2 for the other, 0 when the port is
/// a corner of both.
fn new_triangle(port: Port) -> Option<u8> {
    match port {
        Port::Slot(0) | Port::Slot(3) | Port::Corner(Q) => Some(2),
        Port::Slot(1) | Port::Slot(2) | Port::Corner(P) => Some(1),
        Port::Corner(R) | Port::Corner(S) => Some(0),
        _ => None,
    }
}

impl TrackingState {
    /// Every interior arc of `base` traced as itself.
    pub fn new(base: &Triangulation) -> TrackingState {
        let arcs = base.interior_arcs();
        TrackingState {
            traces: arcs.iter().map(|&a| ArcTrace::Edge(a)).collect(),
            base: arcs,
            strict: false,
        }
    }

    /// Enables the max-sum cross-check on every transport.
    pub fn strict(mut self, on: bool) -> Self {
        self.strict = on;
        self
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn base_arcs(&self) -> &[ArcId] {
        &self.base
    }

    pub fn traces(&self) -> &[ArcTrace] {
        &self.traces
    }

    /// Updates every trace for the flip described by `quad`.
    pub fn transport(&self, quad: &QuadContext) -> Result<TrackingState> {
        let traces = self
            .traces
            .iter()
            .map(|t| {
                let next = transport_trace(t, quad)?;
                if self.strict {
                    cross_check(t, &next, quad)?;
                }
                Ok(next)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrackingState {
            base: self.base.clone(),
            traces,
            strict: self.strict,
        })
    }

    /// Coordinate vector of the current edge `a`.
    pub fn arc_coord(&self, tri: &Triangulation, a: ArcId) -> ArcCoord {
        let coords = self
            .traces
            .iter()
            .map(|t| match t {
                ArcTrace::Edge(x) if *x == a => -1,
                other => other.crossings_with(a) as i32,
            })
            .collect();
        let (x, y) = tri.endpoints(a);
        ArcCoord {
            coords,
            ends: [x.min(y), x.max(y)],
        }
    }

    pub fn key(&self, tri: &Triangulation) -> TriKey {
        let mut arcs: Vec<ArcCoord> = tri
            .interior_arcs()
            .into_iter()
            .map(|a| self.arc_coord(tri, a))
            .collect();
        arcs.sort_unstable();
        TriKey(arcs)
    }
}

fn transport_trace(trace: &ArcTrace, quad: &QuadContext) -> Result<ArcTrace> {
    let e = quad.diagonal;
    let cs = match trace {
        ArcTrace::Edge(x) if *x == e => {
            // The old diagonal runs from P, a corner of the new side-1
            // triangle only, across the new diagonal.
            return Ok(ArcTrace::Crossings(vec![Crossing { edge: e, from_side: 1 }]));
        }
        ArcTrace::Edge(_) => return Ok(trace.clone()),
        ArcTrace::Crossings(cs) => cs,
    };
    let m = cs.len();
    let exit_slot = |k: usize| slot_port(quad, cs[k].edge, cs[k].from_side);
    let entry_slot = |k: usize| slot_port(quad, cs[k - 1].edge, 1 - cs[k - 1].from_side);
    let entry_port = |k: usize| -> Port {
        if k == 0 {
            opposite_corner(exit_slot(0))
        } else {
            entry_slot(k)
        }
    };
    let exit_port = |k: usize| -> Port {
        if k == m {
            opposite_corner(entry_slot(m))
        } else {
            exit_slot(k)
        }
    };
    let underflow = |what: &str| Error::CoordinateUnderflow(format!("{what} across {e} in {cs:?}"));

    let mut out = Vec::with_capacity(m + 1);
    let mut k = 0;
    while k <= m {
        let mut j = k;
        while j < m && cs[j].edge == e {
            j += 1;
        }
        let inside = j > k
            || matches!(entry_port(k), Port::Slot(_) | Port::Corner(_))
            || matches!(exit_port(k), Port::Slot(_) | Port::Corner(_));
        if j - k > 1 {
            return Err(underflow("repeated diagonal crossing"));
        }
        if inside {
            let (from, to) = (entry_port(k), exit_port(j));
            if from == to || from == Port::Outside || to == Port::Outside {
                return Err(underflow("passage"));
            }
            let (a, b) = (new_triangle(from), new_triangle(to));
            match (a, b) {
                (Some(0), Some(0)) => {
                    if m == 1 && j == 1 && matches!((from, to), (Port::Corner(R), Port::Corner(S)) | (Port::Corner(S), Port::Corner(R))) {
                        return Ok(ArcTrace::Edge(e));
                    }
                    return Err(underflow("corner-to-corner passage"));
                }
                (Some(x), Some(y)) if x != 0 && y != 0 && x != y => {
                    out.push(Crossing {
                        edge: e,
                        from_side: if x == 1 { 1 } else { 0 },
                    });
                }
                (Some(_), Some(_)) => {}
                _ => return Err(underflow("port")),
            }
        }
        if j < m {
            out.push(cs[j]);
        }
        k = j + 1;
    }
    if out.is_empty() {
        return Err(underflow("empty trace"));
    }
    Ok(ArcTrace::Crossings(out))
}

/// Checks the new diagonal count against `max(a + c, b + d) - e` when the
/// rule applies: distinct quadrilateral sides and no trace endpoint inside
/// the quadrilateral.
fn cross_check(old: &ArcTrace, new: &ArcTrace, quad: &QuadContext) -> Result<()> {
    let ArcTrace::Crossings(cs) = old else {
        return Ok(());
    };
    if !quad.repeated_pairs().is_empty() {
        return Ok(());
    }
    let touches = |c: &Crossing| {
        c.edge == quad.diagonal || quad.sides.iter().any(|s| s.edge == c.edge)
    };
    let ends_inside = cs.first().is_some_and(touches) || cs.last().is_some_and(touches);
    if ends_inside {
        return Ok(());
    }
    let x: Vec<i64> = quad
        .sides
        .iter()
        .map(|s| old.crossings_with(s.edge) as i64)
        .collect();
    let e = old.crossings_with(quad.diagonal) as i64;
    let expected = (x[0] + x[2]).max(x[1] + x[3]) - e;
    let found = new.crossings_with(quad.diagonal) as i64;
    if expected != found {
        return Err(Error::CoordinateUnderflow(format!(
            "max-sum rule predicts {expected} crossings with {}, transport gives {found}",
            quad.diagonal
        )));
    }
    Ok(())
}

/// A triangulation together with the traces of the base arcs in it.
#[derive(Clone, Debug)]
pub struct Tracked {
    pub tri: Triangulation,
    pub state: TrackingState,
}

impl Tracked {
    pub fn new(tri: Triangulation) -> Tracked {
        let state = TrackingState::new(&tri);
        Tracked { tri, state }
    }

    pub fn strict(mut self, on: bool) -> Tracked {
        self.state = self.state.strict(on);
        self
    }

    pub fn flip(&self, a: ArcId) -> Result<Tracked> {
        let quad = self.tri.quadrilateral_around(a)?;
        let state = self.state.transport(&quad)?;
        Ok(Tracked {
            tri: self.tri.flip_with(&quad),
            state,
        })
    }

    pub fn key(&self) -> TriKey {
        self.state.key(&self.tri)
    }

    pub fn arc_coord(&self, a: ArcId) -> ArcCoord {
        self.state.arc_coord(&self.tri, a)
    }

    /// Coordinates of all interior arcs, indexed like `tri.interior_arcs()`.
    pub fn arc_coords(&self) -> Vec<(ArcId, ArcCoord)> {
        self.tri
            .interior_arcs()
            .into_iter()
            .map(|a| (a, self.arc_coord(a)))
            .collect()
    }

    /// Edge id currently carrying the arc with coordinate `c`.
    pub fn find_arc(&self, c: &ArcCoord) -> Option<ArcId> {
        self.tri.interior_arcs().into_iter().find(|&a| &self.arc_coord(a) == c)
    }

    /// Checks the coordinate invariants of every current arc.
    pub fn coords_well_formed(&self) -> bool {
        self.arc_coords().iter().all(|(_, c)| c.check())
    }
}

pub fn base_tracking(base: &Triangulation) -> TrackingState {
    TrackingState::new(base)
}

pub fn transport(state: &TrackingState, quad: &QuadContext) -> Result<TrackingState> {
    state.transport(quad)
}

pub fn triangulation_key(state: &TrackingState, tri: &Triangulation) -> TriKey {
    state.key(tri)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceSpec;

    #[test]
    fn base_keys_are_identity_vectors() {
        let t = Tracked::new(Triangulation::standard(&SurfaceSpec::disk(6)).unwrap());
        let coords: Vec<Vec<i32>> = t.arc_coords().into_iter().map(|(_, c)| c.coords).collect();
        assert_eq!(coords, vec![vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]]);
        assert!(t.coords_well_formed());
    }

    #[test]
    fn hexagon_flip_crosses_once() {
        let t = Tracked::new(Triangulation::standard(&SurfaceSpec::disk(6)).unwrap());
        let a = t.tri.arc_between(0, 3).unwrap();
        let f = t.flip(a).unwrap();
        let c = f.arc_coord(a);
        assert_eq!(c.ends, [2, 4]);
        assert_eq!(c.coords, vec![0, 1, 0]);
        let back = f.flip(a).unwrap();
        assert_eq!(back.state, t.state);
        assert_eq!(back.key(), t.key());
    }

    #[test]
    fn annulus_line_keys_distinct() {
        let mut t = Tracked::new(Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap());
        let mut keys = vec![t.key()];
        // Walk in one direction: always flip the arc that was not just flipped.
        let mut last = None;
        for _ in 0..20 {
            let a = t.tri.interior_arcs().into_iter().find(|&a| Some(a) != last).unwrap();
            t = t.flip(a).unwrap();
            last = Some(a);
            keys.push(t.key());
        }
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), keys.len());
    }

    #[test]
    fn serialized_key_is_array_of_arrays() {
        let t = Tracked::new(Triangulation::standard(&SurfaceSpec::disk(5)).unwrap());
        let json = serde_json::to_string(&t.key()).unwrap();
        assert_eq!(json, "[[-1,0,0,2],[0,-1,0,3]]");
        let back: TriKey = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t.key());
    }
}
