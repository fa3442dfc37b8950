use fliplab::explorer::{
    extend_from_lower_degree, extendable_path_general, extendable_path_max_degree, verify_path, Extension,
};
use fliplab::{ball, enumerate_full, Error, SurfaceSpec, Triangulation};

#[test]
fn lower_degree_wedges_in_the_punctured_square() {
    let g = enumerate_full(&Triangulation::standard(&SurfaceSpec::punctured_disk(4)).unwrap(), 1000).unwrap();
    let (mut squares, mut paths) = (0, 0);
    for v in g.vertices() {
        let t = &v.tracked;
        let arcs = t.tri.flippable_arcs();
        for &a in &arcs {
            if t.flip(a).unwrap().tri.degree() <= t.tri.degree() {
                continue;
            }
            for &b in arcs.iter().filter(|&&b| b != a) {
                match extend_from_lower_degree(t, a, b).unwrap() {
                    Extension::SquareCompletion { vertex } => {
                        squares += 1;
                        assert!(g.find(&vertex).is_some());
                    }
                    Extension::Path(p) => {
                        paths += 1;
                        assert!(verify_path(&p).is_empty());
                        assert!(p.all_extendable());
                        assert_eq!(p.end(), &t.flip(b).unwrap().key());
                        let top = p.degrees[0];
                        assert!(p.degrees[..p.degrees.len() - 1].iter().all(|&d| d == top));
                    }
                }
            }
        }
    }
    assert!(squares > 0 && paths > 0);
}

#[test]
fn exceptional_surfaces_are_refused() {
    let g = ball(&Triangulation::standard(&SurfaceSpec::annulus(1, 1)).unwrap(), 2, 100).unwrap();
    assert_eq!(extendable_path_max_degree(&g, 0, 1).unwrap_err(), Error::ExceptionalSurface);
}

#[test]
fn general_valence_variant_agrees_at_full_degree() {
    let g = enumerate_full(&Triangulation::standard(&SurfaceSpec::disk(7)).unwrap(), 1000).unwrap();
    let p = extendable_path_general(&g, 0, 30, 4).unwrap().unwrap();
    assert_eq!(p.len(), g.distance(0, 30).unwrap());
}
