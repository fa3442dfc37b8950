use fliplab::polygon::{compare_with_model, PolyArc, PolyModel};
use fliplab::{enumerate_full, SurfaceSpec, Triangulation};

#[test]
fn generic_disks_match_the_polygon_model() {
    for n in 4..=8 {
        let spec = SurfaceSpec::disk(n);
        let g = enumerate_full(&Triangulation::standard(&spec).unwrap(), 10_000).unwrap();
        let model = PolyModel::Disk(n);
        let cmp = compare_with_model(&g, model, &model.enumerate(10_000).unwrap()).unwrap();
        assert_eq!(cmp.vertices, g.len());
        assert_eq!(cmp.edges, g.edge_count());
    }
}

#[test]
fn generic_punctured_polygons_match_the_model() {
    for (n, count) in [(2, 3), (3, 10), (4, 35)] {
        let spec = SurfaceSpec::punctured_disk(n);
        let g = enumerate_full(&Triangulation::standard(&spec).unwrap(), 10_000).unwrap();
        assert_eq!(g.len(), count);
        let model = PolyModel::Punctured(n);
        let cmp = compare_with_model(&g, model, &model.enumerate(10_000).unwrap()).unwrap();
        assert_eq!(cmp.arc_map.len(), (n * n) as usize);
    }
}

#[test]
fn punctured_digon_graph_is_a_path() {
    let model = PolyModel::Punctured(2);
    let g = model.enumerate(100).unwrap();
    assert_eq!((g.vertices.len(), g.edges.len()), (3, 2));
    assert!(g.is_connected());
}

#[test]
fn loop_crosses_radius_outside_it() {
    let m = PolyModel::Punctured(3);
    let lp = PolyArc::Arc { from: 0, len: 3 };
    assert_eq!(m.crossing_number(lp, PolyArc::Radius(0)).unwrap(), 0);
    assert_eq!(m.crossing_number(lp, PolyArc::Radius(1)).unwrap(), 1);
}
