//! Verification suites behind `fliplab verify`.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};

use clap::ValueEnum;
use fliplab::explorer::{
    bypass_cylinder_flip, extendable_path_max_degree, restricted_bfs_path, restricted_subgraph_connected,
    square_pentagon_census, verify_path, wedge_census,
};
use fliplab::morphisms::{build_embedding_induced, enumerate_embeddings, invariant_multiarc, rigidity_suite};
use fliplab::polygon::{PolyArc, PolyModel};
use fliplab::surface::ExceptionalityPredicate;
use fliplab::{ball, enumerate_full, Error, FlipGraphView, SurfaceSpec, Tracked, Triangulation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FlipContract,
    Coords,
    ShallowCensus,
    Wedges,
    Bypass,
    Extendable,
    Geodesic,
    Rigidity,
}

pub struct Config {
    pub suites: Vec<Suite>,
    pub pair: Option<(SurfaceSpec, SurfaceSpec)>,
    pub predicate: ExceptionalityPredicate,
    pub max_vertices: usize,
    pub seed: u64,
    pub fault: bool,
}

#[derive(Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub budget_exceeded: bool,
    pub summary: String,
    pub violations: Vec<Value>,
}

#[derive(Serialize)]
pub struct Report {
    pub seed: u64,
    pub predicate: &'static str,
    pub fault_injected: bool,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else if self.suites.iter().any(|s| !s.passed && s.violations.is_empty() && s.budget_exceeded) {
            3
        } else {
            2
        }
    }
}

/// Outcome of a suite body: summary plus violations, or an error.
type Body = Result<(String, Vec<Value>), Error>;

pub fn run(cfg: &Config) -> Report {
    let mut suites: BTreeSet<Suite> = cfg.suites.iter().copied().collect();
    if suites.is_empty() {
        if cfg.pair.is_some() {
            suites.insert(Suite::Rigidity);
        } else {
            suites.extend(Suite::value_variants().iter().copied());
        }
    }
    let prev = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let results: Vec<SuiteResult> = suites.into_iter().map(|s| run_one(s, cfg)).collect();
    panic::set_hook(prev);
    Report {
        seed: cfg.seed,
        predicate: cfg.predicate.name(),
        fault_injected: cfg.fault,
        passed: results.iter().all(|r| r.passed),
        suites: results,
    }
}

fn run_one(suite: Suite, cfg: &Config) -> SuiteResult {
    let body = panic::catch_unwind(AssertUnwindSafe(|| match suite {
        Suite::FlipContract => flip_contract(cfg),
        Suite::Coords => coords(cfg),
        Suite::ShallowCensus => shallow(cfg),
        Suite::Wedges => wedges(cfg),
        Suite::Bypass => bypass(cfg),
        Suite::Extendable => extendable(cfg),
        Suite::Geodesic => geodesic(cfg),
        Suite::Rigidity => rigidity(cfg),
    }));
    let (summary, violations, budget) = match body {
        Ok(Ok((s, v))) => (s, v, false),
        Ok(Err(e @ Error::BudgetExceeded(_))) => (e.to_string(), Vec::new(), true),
        Ok(Err(e)) => (String::new(), vec![json!({ "kind": "error", "message": e.to_string() })], false),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (String::new(), vec![json!({ "kind": "panic", "message": msg })], false)
        }
    };
    SuiteResult {
        suite,
        passed: violations.is_empty() && !budget,
        budget_exceeded: budget,
        summary,
        violations,
    }
}

fn full(spec: &SurfaceSpec, cap: usize) -> Result<FlipGraphView, Error> {
    enumerate_full(&Triangulation::standard(spec)?, cap)
}

fn census_fixtures(cap: usize) -> Result<Vec<FlipGraphView>, Error> {
    [SurfaceSpec::disk(5), SurfaceSpec::disk(6), SurfaceSpec::disk(7), SurfaceSpec::punctured_disk(4)]
        .iter()
        .map(|s| full(s, cap))
        .collect()
}

fn annulus_fixtures(cap: usize) -> Result<Vec<FlipGraphView>, Error> {
    [(1, 1, 10), (2, 1, 4), (2, 2, 3), (3, 2, 3)]
        .iter()
        .map(|&(a, b, r)| ball(&Triangulation::standard(&SurfaceSpec::annulus(a, b))?, r, cap))
        .collect()
}

/// Every flip removes exactly the flipped arc, is undone by flipping the
/// new arc, and distinct arcs lead to distinct neighbours.
fn flip_contract(cfg: &Config) -> Body {
    let mut checked = 0;
    let mut out = Vec::new();
    let specs = [
        SurfaceSpec::disk(5),
        SurfaceSpec::disk(6),
        SurfaceSpec::punctured_disk(3),
        SurfaceSpec::annulus(2, 1),
        SurfaceSpec::new(1, vec![], 2)?,
    ];
    for spec in &specs {
        let g = ball(&Triangulation::standard(spec)?, 2, cfg.max_vertices)?;
        for (i, v) in g.vertices().iter().enumerate() {
            let t = &v.tracked;
            let key = t.key();
            let mut seen = BTreeSet::new();
            for a in t.tri.flippable_arcs() {
                checked += 1;
                let before = t.arc_coord(a);
                let next = t.flip(a)?;
                let next_key = next.key();
                let kept = key.0.iter().filter(|c| next_key.0.contains(c)).count();
                if next_key.0.contains(&before) || kept + 1 != key.0.len() {
                    out.push(json!({ "kind": "flip-result", "surface": spec.to_string(), "vertex": i, "arc": a.index() }));
                    continue;
                }
                let Some(b) = next.tri.interior_arcs().into_iter().find(|&b| !key.0.contains(&next.arc_coord(b))) else {
                    continue;
                };
                if next.flip(b)?.key() != key {
                    out.push(json!({ "kind": "flip-inverse", "surface": spec.to_string(), "vertex": i, "arc": a.index() }));
                }
                if !seen.insert(next_key) {
                    out.push(json!({ "kind": "duplicate-neighbour", "surface": spec.to_string(), "vertex": i, "arc": a.index() }));
                }
            }
        }
    }
    Ok((format!("{checked} flips checked"), out))
}

fn chord_set(t: &Tracked) -> Vec<(u32, u32)> {
    let mut v: Vec<(u32, u32)> = t
        .tri
        .interior_arcs()
        .into_iter()
        .map(|a| {
            let (x, y) = t.tri.endpoints(a);
            (x.min(y), x.max(y))
        })
        .collect();
    v.sort_unstable();
    v
}

/// Random walks on the octagon: transported coordinates against exact
/// chord crossings, and key equality against chord-set equality.
fn coords(cfg: &Config) -> Body {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let model = PolyModel::Disk(8);
    let start = Tracked::new(Triangulation::standard(&SurfaceSpec::disk(8))?);
    let mut out = Vec::new();
    let mut t = start.clone();
    for step in 0..300 {
        let arcs = t.tri.flippable_arcs();
        t = t.flip(arcs[rng.gen_range(0..arcs.len())])?;
        for (a, c) in t.arc_coords() {
            let (x, y) = t.tri.endpoints(a);
            let chord = PolyArc::Chord(x.min(y), x.max(y));
            if model.coords(chord)? != c.coords {
                out.push(json!({ "kind": "coordinate", "step": step, "chord": [x, y] }));
            }
        }
    }
    let pool: Vec<Tracked> = (0..60)
        .map(|i| {
            let mut w = start.clone();
            for _ in 0..i % 11 {
                let arcs = w.tri.flippable_arcs();
                w = w.flip(arcs[rng.gen_range(0..arcs.len())]).expect("flippable");
            }
            w
        })
        .collect();
    let mut pairs = 0;
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            pairs += 1;
            if (pool[i].key() == pool[j].key()) != (chord_set(&pool[i]) == chord_set(&pool[j])) {
                out.push(json!({ "kind": "key", "walks": [i, j] }));
            }
        }
    }
    Ok((format!("300 steps, {pairs} key pairs"), out))
}

fn shallow(cfg: &Config) -> Body {
    let mut parts = Vec::new();
    let mut out = Vec::new();
    for g in census_fixtures(cfg.max_vertices)?.iter().skip(1) {
        let r = square_pentagon_census(g)?;
        parts.push(format!("{}: {} squares {} pentagons", g.surface(), r.squares, r.pentagons));
        out.extend(r.violations.iter().map(|v| json!({ "surface": g.surface().to_string(), "violation": v })));
    }
    Ok((parts.join("; "), out))
}

fn wedges(cfg: &Config) -> Body {
    let mut views = census_fixtures(cfg.max_vertices)?;
    views.extend(annulus_fixtures(cfg.max_vertices)?);
    let mut total = 0;
    let mut out = Vec::new();
    for g in &views {
        let r = wedge_census(g)?;
        total += r.counts.iter().map(|c| c.1).sum::<usize>();
        for v in r.violations.iter().chain(&r.unwitnessed) {
            out.push(json!({ "surface": g.surface().to_string(), "violation": v }));
        }
    }
    Ok((format!("{total} wedges classified"), out))
}

fn bypass(cfg: &Config) -> Body {
    let g = ball(&Triangulation::standard(&SurfaceSpec::annulus(3, 2))?, 4, cfg.max_vertices)?;
    let mut found = 0;
    let mut out = Vec::new();
    for (i, v) in g.vertices().iter().enumerate() {
        let t = &v.tracked;
        for a in t.tri.flippable_arcs() {
            if !t.tri.is_cylinder_flip(a)? {
                continue;
            }
            let target = t.flip(a)?;
            if target.tri.degree() != t.tri.degree() {
                continue;
            }
            found += 1;
            let ok = match bypass_cylinder_flip(t, a) {
                Ok(p) => {
                    verify_path(&p).is_empty()
                        && p.end() == &target.key()
                        && !p.has_cylinder_flip()
                        && p.degrees.iter().all(|&d| d == t.tri.degree())
                }
                Err(_) => false,
            };
            if !ok {
                out.push(json!({ "kind": "bypass", "vertex": i, "arc": a.index() }));
            }
        }
    }
    if found == 0 {
        out.push(json!({ "kind": "bypass", "message": "no cylinder flips found" }));
    }
    Ok((format!("{found} cylinder flips"), out))
}

fn extendable(cfg: &Config) -> Body {
    let mut pairs = 0;
    let mut out = Vec::new();
    for g in &census_fixtures(cfg.max_vertices)? {
        let name = g.surface().to_string();
        if !restricted_subgraph_connected(g)? {
            out.push(json!({ "kind": "disconnected", "surface": name }));
        }
        let d = g.complexity();
        let top: Vec<usize> = (0..g.len()).filter(|&v| g.vertex(v).degree == d).collect();
        let step = (top.len() / 8).max(1);
        for &u in top.iter().step_by(step) {
            for &v in top.iter().step_by(step) {
                pairs += 1;
                let oracle = restricted_bfs_path(g, u, v, d)?;
                let ok = match (oracle, extendable_path_max_degree(g, u, v)) {
                    (Some(_), Ok(p)) => verify_path(&p).is_empty() && p.all_extendable() && p.degrees.iter().all(|&x| x == d),
                    _ => false,
                };
                if !ok {
                    out.push(json!({ "kind": "repair", "surface": name, "pair": [u, v] }));
                }
            }
        }
    }
    Ok((format!("{pairs} pairs"), out))
}

fn geodesic(cfg: &Config) -> Body {
    let c5 = full(&SurfaceSpec::disk(5), cfg.max_vertices)?;
    let mut images = 0;
    let mut out = Vec::new();
    for n in [6, 7] {
        let cod = full(&SurfaceSpec::disk(n), cfg.max_vertices)?;
        for e in enumerate_embeddings(&c5, &cod)? {
            let m = build_embedding_induced(&c5, &cod, &e)?;
            let a = invariant_multiarc(&m)?;
            if a.len() != n as usize - 5 {
                out.push(json!({ "kind": "multiarc", "codomain": n, "vertex": e.codomain_vertex, "size": a.len() }));
            }
            match cod.is_totally_geodesic(&m.image_set())? {
                (true, _) => images += 1,
                (false, w) => out.push(json!({ "kind": "escaping-geodesic", "codomain": n, "witness": w })),
            }
        }
    }
    Ok((format!("{images} images totally geodesic"), out))
}

fn rigidity(cfg: &Config) -> Body {
    let pairs = match &cfg.pair {
        Some(p) => vec![p.clone()],
        None => vec![
            (SurfaceSpec::disk(5), SurfaceSpec::disk(6)),
            (SurfaceSpec::disk(6), SurfaceSpec::disk(6)),
            (SurfaceSpec::disk(5), SurfaceSpec::disk(7)),
            (SurfaceSpec::punctured_disk(4), SurfaceSpec::punctured_disk(4)),
        ],
    };
    let mut lines = Vec::new();
    let mut out = Vec::new();
    for (a, b) in &pairs {
        let (ga, gb) = (full(a, cfg.max_vertices)?, full(b, cfg.max_vertices)?);
        let r = rigidity_suite(&ga, &gb, cfg.max_vertices)?;
        let exceptional = cfg.predicate.is_exceptional(a);
        let clean = r.unmatched == 0 && r.multiply_matched == 0 && r.structure_violations.is_empty() && r.failures.is_empty();
        lines.push(if pairs.len() == 1 {
            r.summary_line()
        } else {
            format!("{a}->{b} {}", r.summary_line())
        });
        if !(exceptional || clean) {
            out.push(json!({ "domain": a.to_string(), "codomain": b.to_string(), "report": r }));
        }
    }
    Ok((lines.join("; "), out))
}
