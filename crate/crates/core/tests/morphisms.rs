use fliplab::morphisms::*;
use fliplab::{ball, enumerate_full, Error, FlipGraphView, SurfaceSpec, Triangulation};

fn full(spec: SurfaceSpec) -> FlipGraphView {
    enumerate_full(&Triangulation::standard(&spec).unwrap(), 10_000).unwrap()
}

#[test]
fn ear_chord_image_is_the_chord_star() {
    let (c5, a6) = (full(SurfaceSpec::disk(5)), full(SurfaceSpec::disk(6)));
    for e in enumerate_embeddings(&c5, &a6).unwrap() {
        let m = build_embedding_induced(&c5, &a6, &e).unwrap();
        assert!(check_simplicial_injective(&m));
        let a = invariant_multiarc(&m).unwrap();
        assert_eq!(a.len(), 1);
        // The image is exactly the set of triangulations containing the chord.
        assert_eq!(m.image_set(), a6.containing(&a.arcs));
        let split = component_split_check(&m).unwrap();
        assert_eq!(split.moving_component, Some(SurfaceSpec::disk(5)));
        assert_eq!(split.inert_components, vec![SurfaceSpec::disk(3)]);
        assert_eq!(split.flip_witnesses, 5);
    }
}

#[test]
fn two_chord_embeddings_into_the_heptagon() {
    let (c5, a7) = (full(SurfaceSpec::disk(5)), full(SurfaceSpec::disk(7)));
    let embs = enumerate_embeddings(&c5, &a7).unwrap();
    assert!(!embs.is_empty());
    for e in &embs {
        let m = build_embedding_induced(&c5, &a7, e).unwrap();
        let a = invariant_multiarc(&m).unwrap();
        assert_eq!(a.len(), 2);
        assert!(a7.is_totally_geodesic(&m.image_set()).unwrap().0);
        let split = component_split_check(&m).unwrap();
        assert_eq!(split.inert_components.len(), 2);
    }
}

#[test]
fn non_cycle_bijection_is_not_simplicial() {
    let (c5, a6) = (full(SurfaceSpec::disk(5)), full(SurfaceSpec::disk(6)));
    // Domain vertices in cycle order.
    let mut cycle = vec![0];
    while cycle.len() < 5 {
        let last = *cycle.last().unwrap();
        cycle.push(c5.neighbors(last).find(|y| !cycle.contains(y)).unwrap());
    }
    // An induced path on five vertices whose ends are not adjacent.
    fn open_path(g: &FlipGraphView, path: &mut Vec<usize>) -> bool {
        if path.len() == 5 {
            return !g.are_adjacent(path[0], path[4]);
        }
        let last = *path.last().unwrap();
        for y in g.neighbors(last).collect::<Vec<_>>() {
            if !path.contains(&y) {
                path.push(y);
                if open_path(g, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let mut path = vec![0];
    assert!(open_path(&a6, &mut path));
    let mut map = vec![0; 5];
    for (k, &v) in cycle.iter().enumerate() {
        map[v] = path[k];
    }
    assert!(!check_simplicial_injective(&SimplicialMap::new(&c5, &a6, map).unwrap()));
}

#[test]
fn hexagon_automorphisms_preserve_degree() {
    let a6 = full(SurfaceSpec::disk(6));
    for m in injective_map_census(&a6, &a6, 100).unwrap() {
        let r = verify_structure_preservation(&m).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(r.surjective, Some(true));
        assert!(r.exact_crossings);
        assert!(invariant_multiarc(&m).unwrap().is_empty());
    }
}

#[test]
fn census_refuses_incomplete_views() {
    let g = ball(&Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap(), 3, 100).unwrap();
    assert!(matches!(injective_map_census(&g, &g, 100), Err(Error::IncompleteView(_))));
}

#[test]
fn exceptional_domain_is_reported_not_failed() {
    let g = ball(&Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap(), 3, 100).unwrap();
    let r = rigidity_suite(&g, &g, 1000).unwrap();
    assert!(r.evidence_only && r.exceptional_domain);
    assert!(r.passed());
    assert_eq!(r.maps, 2);
}

#[test]
fn census_budget() {
    let (c5, a6) = (full(SurfaceSpec::disk(5)), full(SurfaceSpec::disk(6)));
    assert!(matches!(injective_map_census(&c5, &a6, 10), Err(Error::BudgetExceeded(_))));
}

#[test]
fn map_record_serializes() {
    let c5 = full(SurfaceSpec::disk(5));
    let m = injective_map_census(&c5, &c5, 100).unwrap().remove(0);
    let v: serde_json::Value = serde_json::to_value(m.record()).unwrap();
    assert_eq!(v["pairs"].as_array().unwrap().len(), 5);
    assert_eq!(v["arcs"].as_array().unwrap().len(), 5);
}
