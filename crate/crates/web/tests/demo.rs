use fliplab_web::{census_json, flip_graph_json, geodesic_json};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn hexagon_graph() {
    let g = parse(flip_graph_json(6, false));
    assert_eq!(g["nodes"].as_array().unwrap().len(), 14);
    assert_eq!(g["edges"].as_array().unwrap().len(), 21);
    for node in g["nodes"].as_array().unwrap() {
        assert_eq!(node["chords"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn punctured_square_graph() {
    let g = parse(flip_graph_json(4, true));
    assert_eq!(g["nodes"].as_array().unwrap().len(), 35);
    assert!(flip_graph_json(10, false).is_err());
}

#[test]
fn geodesic_across_hexagon() {
    let g = parse(flip_graph_json(6, false));
    let nodes = g["nodes"].as_array().unwrap();
    // Fans at adjacent corners share no chords, so every chord must flip.
    let fan = |p: u64| {
        nodes
            .iter()
            .position(|n| n["chords"].as_array().unwrap().iter().all(|c| c[0] == p || c[1] == p))
            .unwrap()
    };
    let r = parse(geodesic_json(6, false, fan(0), fan(1)));
    assert_eq!(r["distance"], 3);
    assert_eq!(r["path"].as_array().unwrap().len(), 4);
    assert!(geodesic_json(6, false, 0, 99).is_err());
}

#[test]
fn pentagon_into_hexagon_census() {
    let r = parse(census_json(5, 6));
    assert_eq!(r["summary"], "maps=60 matched=60 unmatched=0");
    assert_eq!(r["embeddings"], 6);
    assert!(census_json(6, 5).is_err());
}
