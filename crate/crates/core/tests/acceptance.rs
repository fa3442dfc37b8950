//! Acceptance suite. Runs without the libtest harness so that each
//! criterion prints a single PASS/FAIL line.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use fliplab::explorer::{
    bypass_cylinder_flip, extendable_path_max_degree, restricted_bfs_path, restricted_subgraph_connected,
    square_pentagon_census, verify_path, wedge_census,
};
use fliplab::morphisms::{
    build_embedding_induced, classify_against_embeddings, enumerate_embeddings, injective_map_census,
    invariant_multiarc, rigidity_suite, verify_structure_preservation,
};
use fliplab::polygon::{enumerate_model, PolyArc, PolyModel};
use fliplab::{ball, enumerate_full, FlipGraphView, SurfaceSpec, Tracked, Triangulation, WedgeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn full(spec: &SurfaceSpec) -> FlipGraphView {
    enumerate_full(&Triangulation::standard(spec).unwrap(), 100_000).unwrap()
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_catalan() -> Outcome {
    let mut counts = Vec::new();
    for n in 4..=9u32 {
        let spec = SurfaceSpec::disk(n);
        let g = full(&spec);
        let oracle = enumerate_model(&spec, 100_000).map_err(|e| e.to_string())?;
        check(g.len() == oracle.vertices.len(), format!("disk{n}: {} vertices, model {}", g.len(), oracle.vertices.len()))?;
        check(g.edge_count() == oracle.edges.len(), format!("disk{n}: edge counts differ"))?;
        let r = (n - 3) as usize;
        check(g.vertices().iter().all(|v| v.neighbors.len() == r), format!("disk{n} not {r}-regular"))?;
        counts.push(g.len());
    }
    check(counts == [2, 5, 14, 42, 132, 429], format!("counts {counts:?}"))?;
    Ok(format!("vertex counts {counts:?}"))
}

fn c2_line() -> Outcome {
    let g = ball(&Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap(), 10, 10_000).map_err(|e| e.to_string())?;
    check(g.len() == 21, format!("{} vertices", g.len()))?;
    check(g.edge_count() == 20, format!("{} edges", g.edge_count()))?;
    check(g.vertices().iter().all(|v| v.degree <= 2), "degree above 2")?;
    let leaves = g.vertices().iter().filter(|v| v.neighbors.len() == 1).count();
    check(leaves == 2, format!("{leaves} leaves"))?;
    check(g.bfs(0).iter().all(Option::is_some), "disconnected")?;
    Ok("21 vertices, 20 edges, path".into())
}

fn census_graphs() -> Vec<FlipGraphView> {
    [SurfaceSpec::disk(6), SurfaceSpec::disk(7), SurfaceSpec::punctured_disk(4)]
        .iter()
        .map(full)
        .collect()
}

fn c3_shallow(graphs: &[FlipGraphView]) -> Outcome {
    let mut parts = Vec::new();
    for g in graphs {
        let r = square_pentagon_census(g).map_err(|e| e.to_string())?;
        check(r.violations.is_empty(), format!("{}: {} violations", g.surface(), r.violations.len()))?;
        parts.push(format!("{}sq/{}pe", r.squares, r.pentagons));
    }
    Ok(parts.join(" "))
}

fn c4_trichotomy(graphs: &[FlipGraphView]) -> Outcome {
    let mut views: Vec<FlipGraphView> = graphs.to_vec();
    for (a, b, r) in [(1, 1, 10), (2, 1, 4), (2, 2, 3), (3, 2, 3)] {
        views.push(ball(&Triangulation::standard(&SurfaceSpec::annulus(a, b)).unwrap(), r, 50_000).map_err(|e| e.to_string())?);
    }
    let mut total = 0;
    let mut cylinder = 0;
    for g in &views {
        let r = wedge_census(g).map_err(|e| e.to_string())?;
        check(r.violations.is_empty(), format!("{}: {} degenerate wedges", g.surface(), r.violations.len()))?;
        check(r.unwitnessed.is_empty(), format!("{}: unwitnessed faces", g.surface()))?;
        total += r.counts.iter().map(|c| c.1).sum::<usize>();
        cylinder += r.counts.iter().filter(|c| c.0 == WedgeKind::CylinderPair).map(|c| c.1).sum::<usize>();
    }
    Ok(format!("{total} wedges classified ({cylinder} cylinder pairs), 0 degenerate"))
}

fn c5_bypass() -> Outcome {
    let g = ball(&Triangulation::standard(&SurfaceSpec::annulus(3, 2)).unwrap(), 4, 100_000).map_err(|e| e.to_string())?;
    let mut found = 0;
    for v in g.vertices() {
        let t = &v.tracked;
        for a in t.tri.flippable_arcs() {
            if !t.tri.is_cylinder_flip(a).unwrap() {
                continue;
            }
            let target = t.flip(a).unwrap();
            if target.tri.degree() != t.tri.degree() {
                continue;
            }
            found += 1;
            let p = bypass_cylinder_flip(t, a).map_err(|e| format!("bypass failed: {e}"))?;
            check(verify_path(&p).is_empty(), "bypass path fails verification")?;
            check(p.end() == &target.key(), "bypass ends elsewhere")?;
            check(!p.has_cylinder_flip(), "bypass uses a cylinder flip")?;
            check(p.degrees.iter().all(|&d| d == t.tri.degree()), "bypass changes degree")?;
        }
    }
    check(found > 0, "no cylinder flips found")?;
    Ok(format!("{found}/{found} cylinder flips bypassed"))
}

fn c6_extend(graphs: &[FlipGraphView]) -> Outcome {
    let mut views: Vec<FlipGraphView> = [5, 8, 9].iter().map(|&n| full(&SurfaceSpec::disk(n))).collect();
    views.extend(graphs.iter().cloned());
    let mut pairs = 0;
    for g in &views {
        check(restricted_subgraph_connected(g).map_err(|e| e.to_string())?, format!("{}: restricted subgraph disconnected", g.surface()))?;
        let d = g.complexity();
        let top: Vec<usize> = (0..g.len()).filter(|&v| g.vertex(v).degree == d).collect();
        // All pairs on small graphs, a stride sample on larger ones.
        let step = if top.len() <= 50 { 1 } else { top.len() / 10 };
        for &u in top.iter().step_by(step) {
            for &v in top.iter().step_by(step) {
                pairs += 1;
                let oracle = restricted_bfs_path(g, u, v, d).map_err(|e| e.to_string())?;
                let repair = extendable_path_max_degree(g, u, v);
                match (oracle, repair) {
                    (Some(o), Ok(p)) => {
                        check(o.first() == Some(&u) && o.last() == Some(&v), "oracle endpoints")?;
                        check(p.start() == &g.vertex(u).key && p.end() == &g.vertex(v).key, "repair endpoints")?;
                        check(verify_path(&p).is_empty() && p.all_extendable(), format!("{}: invalid repair {u}->{v}", g.surface()))?;
                        check(p.degrees.iter().all(|&x| x == d), "repair leaves maximal degree")?;
                    }
                    (o, r) => return Err(format!("{}: {u}->{v} oracle {:?} repair {:?}", g.surface(), o.is_some(), r.err())),
                }
            }
        }
    }
    Ok(format!("{pairs} pairs agree"))
}

fn c7_9_embeddings() -> (Outcome, Outcome) {
    let c5 = full(&SurfaceSpec::disk(5));
    let mut c7 = Ok(String::new());
    let mut c9 = Ok(String::new());
    let mut counts = Vec::new();
    let mut images = 0;
    for n in [6, 7] {
        let cod = full(&SurfaceSpec::disk(n));
        let embs = match enumerate_embeddings(&c5, &cod) {
            Ok(e) => e,
            Err(e) => return (Err(e.to_string()), Err("no embeddings".into())),
        };
        counts.push(embs.len());
        for e in &embs {
            let m = build_embedding_induced(&c5, &cod, e).unwrap();
            let cut: BTreeSet<_> = e
                .multiarc
                .iter()
                .map(|&a| cod.vertex(e.codomain_vertex).tracked.arc_coord(a))
                .collect();
            match invariant_multiarc(&m) {
                Ok(a) => {
                    let got: BTreeSet<_> = a.coords.iter().cloned().collect();
                    if got != cut || a.len() != n as usize - 5 {
                        c7 = Err(format!("disk{n}: multiarc {got:?} differs from cut {cut:?}"));
                    }
                    for v in 0..c5.len() {
                        if a.arcs.iter().any(|g| cod.vertex(m.image(v)).arcs.binary_search(g).is_err()) {
                            c7 = Err(format!("disk{n}: multiarc missing from image of {v}"));
                        }
                    }
                }
                Err(err) => c7 = Err(err.to_string()),
            }
            match cod.is_totally_geodesic(&m.image_set()) {
                Ok((true, _)) => images += 1,
                Ok((false, w)) => c9 = Err(format!("disk{n}: escaping geodesic {w:?}")),
                Err(err) => c9 = Err(err.to_string()),
            }
        }
    }
    (
        c7.map(|_| format!("embeddings disk5->disk6 {}, disk5->disk7 {}; multiarc equals cut", counts[0], counts[1])),
        c9.map(|_| format!("{images} images totally geodesic")),
    )
}

fn c8_rigidity() -> Outcome {
    let c5 = full(&SurfaceSpec::disk(5));
    let a6 = full(&SurfaceSpec::disk(6));
    let maps = injective_map_census(&c5, &a6, 10_000).map_err(|e| e.to_string())?;
    let embs = enumerate_embeddings(&c5, &a6).map_err(|e| e.to_string())?;
    let r = classify_against_embeddings(&maps, &embs).map_err(|e| e.to_string())?;
    check(maps.len() == 60, format!("{} maps C5 -> Asso(6)", maps.len()))?;
    check(embs.len() == 6 && r.symmetries == 10, format!("{} embeddings x {} symmetries", embs.len(), r.symmetries))?;
    check(r.matched == 60 && r.unmatched.is_empty() && r.multiply_matched.is_empty(), format!("matched {}", r.matched))?;
    let auto = injective_map_census(&a6, &a6, 10_000).map_err(|e| e.to_string())?;
    let ra = classify_against_embeddings(&auto, &enumerate_embeddings(&a6, &a6).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check(ra.matched == auto.len() && ra.unmatched.is_empty(), format!("Asso(6): {} maps, {} matched", auto.len(), ra.matched))?;
    check(auto.len() == 12, format!("{} automorphisms", auto.len()))?;
    Ok(format!("C5->Asso(6) maps=60 matched=60 unmatched=0; Asso(6)->Asso(6) maps={} matched={}", auto.len(), ra.matched))
}

fn c10_reports() -> Outcome {
    let specs = [
        (SurfaceSpec::disk(5), SurfaceSpec::disk(5)),
        (SurfaceSpec::disk(5), SurfaceSpec::disk(6)),
        (SurfaceSpec::disk(6), SurfaceSpec::disk(6)),
        (SurfaceSpec::disk(5), SurfaceSpec::disk(7)),
        (SurfaceSpec::punctured_disk(4), SurfaceSpec::punctured_disk(4)),
    ];
    let mut maps = 0;
    for (a, b) in &specs {
        let (ga, gb) = (full(a), full(b));
        let r = rigidity_suite(&ga, &gb, 100_000).map_err(|e| e.to_string())?;
        check(r.passed(), format!("{a} -> {b}: {} violations, {} failures", r.structure_violations.len(), r.failures.len()))?;
        maps += r.maps;
        // Embedding fixtures directly.
        for e in enumerate_embeddings(&ga, &gb).map_err(|e| e.to_string())? {
            let m = build_embedding_induced(&ga, &gb, &e).map_err(|e| e.to_string())?;
            let s = verify_structure_preservation(&m).map_err(|e| e.to_string())?;
            check(s.is_clean(), format!("{a} -> {b}: embedding report {:?}", s.violations))?;
        }
    }
    Ok(format!("{maps} census maps, 0 violations"))
}

fn random_walk(start: &Tracked, steps: usize, rng: &mut ChaCha8Rng) -> Tracked {
    let mut t = start.clone();
    for _ in 0..steps {
        let arcs = t.tri.flippable_arcs();
        t = t.flip(arcs[rng.gen_range(0..arcs.len())]).unwrap();
    }
    t
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

fn c11_coords() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let model = PolyModel::Disk(8);
    let start = Tracked::new(Triangulation::standard(&SurfaceSpec::disk(8)).unwrap());
    let mut t = start.clone();
    let mut checked = 0;
    for _ in 0..1000 {
        let arcs = t.tri.flippable_arcs();
        t = t.flip(arcs[rng.gen_range(0..arcs.len())]).unwrap();
        for (a, c) in t.arc_coords() {
            let (x, y) = t.tri.endpoints(a);
            let chord = PolyArc::Chord(x.min(y), x.max(y));
            let exact = model.coords(chord).map_err(|e| e.to_string())?;
            check(exact == c.coords, format!("chord {chord:?}: transported {:?}, exact {exact:?}", c.coords))?;
            checked += 1;
        }
    }
    let pool: Vec<Tracked> = (0..150).map(|i| random_walk(&start, i % 13, &mut rng)).collect();
    let mut pairs = 0;
    let mut equal = 0;
    'outer: for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if pairs == 10_000 {
                break 'outer;
            }
            pairs += 1;
            let same_key = pool[i].key() == pool[j].key();
            let same_chords = chord_set(&pool[i]) == chord_set(&pool[j]);
            check(same_key == same_chords, format!("walks {i}, {j}: key equality {same_key}, oracle {same_chords}"))?;
            equal += same_key as usize;
        }
    }
    check(pairs == 10_000, "too few pairs")?;
    Ok(format!("{checked} coordinates exact; {pairs} pairs adjudicated ({equal} equal)"))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let graphs = census_graphs();
    let (c7, c9) = c7_9_embeddings();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "catalan counts and regularity", c1_catalan()),
        (2, "annulus(1,1) line graph", c2_line()),
        (3, "squares and pentagons share d-2 arcs", c3_shallow(&graphs)),
        (4, "wedge trichotomy", c4_trichotomy(&graphs)),
        (5, "cylinder bypass", c5_bypass()),
        (6, "extendable paths vs oracle", c6_extend(&graphs)),
        (7, "invariant multiarc", c7),
        (8, "rigidity census", c8_rigidity()),
        (9, "images totally geodesic", c9),
        (10, "structure reports", c10_reports()),
        (11, "coordinate soundness", c11_coords()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {n:>2} PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {msg}");
            }
        }
    }
    println!("acceptance: {}/{} passed in {:.1?}", results.len() - failed, results.len(), t0.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
