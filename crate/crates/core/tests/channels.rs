use spf_core::channels::{random_connected_graph, ChannelDescription, LAYOUT_VERSION};
use spf_core::{build_channel, ChannelSpec};

#[test]
fn frozen_lattice_counts() {
    let table = [
        ("square", [(2, 6, 8), (3, 11, 18), (4, 18, 32)]),
        ("triangular", [(2, 6, 9), (3, 11, 22), (4, 18, 41)]),
        ("hexagonal", [(2, 6, 7), (3, 11, 15), (4, 18, 26)]),
    ];
    for (kind, sizes) in table {
        for (k, nodes, edges) in sizes {
            let spec = ChannelSpec::from_kind(kind, &[k], 0).unwrap();
            let ch = build_channel(&spec).unwrap();
            assert_eq!((ch.graph.num_nodes(), ch.graph.num_edges()), (nodes, edges), "{spec}");
            assert_eq!(ch.state.num_qubits(), nodes);
        }
    }
}

#[test]
fn every_channel_is_a_graph_state() {
    let specs = [
        ChannelSpec::Square { rows: 4, cols: 4 },
        ChannelSpec::Triangular { rows: 4, cols: 4 },
        ChannelSpec::Hexagonal { rows: 4, cols: 4 },
        ChannelSpec::Crazy { columns: 4, per_column: 4 },
        ChannelSpec::TreeToTree { depth: 2 },
        ChannelSpec::Linear { edges: 4 },
        ChannelSpec::Star { leaves: 3 },
        ChannelSpec::parallel_chains(3, 3),
        ChannelSpec::RandomGnm { nodes: 9, edges: 14, seed: 5 },
    ];
    for spec in specs {
        let ch = build_channel(&spec).unwrap();
        ch.check_graph_state().unwrap();
        ch.state.check_invariants().unwrap();
        assert!(ch.graph.is_connected(), "{spec}");
        assert_eq!(ch.graph.labels()[ch.input()], "I");
        assert_eq!(ch.graph.labels()[ch.output()], "O");
    }
}

#[test]
fn crazy_graph_is_complete_between_columns() {
    let ch = build_channel(&ChannelSpec::Crazy { columns: 4, per_column: 4 }).unwrap();
    let g = &ch.graph;
    assert_eq!(g.num_nodes(), 18);
    let column = |c: usize| (1 + 4 * c..=4 + 4 * c).collect::<Vec<_>>();
    for c in 0..3 {
        for &u in &column(c) {
            for &v in &column(c + 1) {
                assert!(g.has_edge(u, v));
            }
            for &v in &column(c) {
                assert!(!g.has_edge(u, v));
            }
        }
    }
    for &u in &column(0) {
        assert!(g.has_edge(0, u));
    }
    for &u in &column(3) {
        assert!(g.has_edge(u, 17));
    }
}

#[test]
fn graph_generators_match_displayed_forms() {
    let ch = build_channel(&ChannelSpec::parallel_chains(3, 3)).unwrap();
    let s = &ch.state;
    let k = |q: &str| s.generator(s.slot_of(q).unwrap()).unwrap().sparse_string();
    assert_eq!(k("1"), "+Z0 X1 Z4");
    assert_eq!(k("O"), "+Z7 Z8 Z9 X10");
    let star = build_channel(&ChannelSpec::Star { leaves: 3 }).unwrap();
    assert_eq!(star.state.generator(0).unwrap().sparse_string(), "+Z0 X1 Z2 Z3 Z4");
}

#[test]
fn random_graphs_are_reproducible() {
    let tree = random_connected_graph(5, 4, 11).unwrap();
    assert_eq!(tree.graph.num_edges(), 4);
    assert!(tree.graph.is_connected());
    let a = random_connected_graph(8, 12, 3).unwrap();
    let b = random_connected_graph(8, 12, 3).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.graph.num_edges(), 12);
    assert!(!a.graph.has_edge(a.input(), a.output()));
    assert!(random_connected_graph(8, 27, 3).is_ok());
    assert!(random_connected_graph(8, 28, 3).is_err());
    assert!(random_connected_graph(8, 6, 3).is_err());
}

#[test]
fn description_echoes_layout() {
    let ch = build_channel(&ChannelSpec::Triangular { rows: 2, cols: 3 }).unwrap();
    let json = serde_json::to_value(ch.description()).unwrap();
    assert_eq!(json["kind"], "triangular");
    assert_eq!(json["layout_version"], LAYOUT_VERSION);
    assert_eq!(json["nodes"].as_array().unwrap().len(), 8);
    let back: ChannelDescription = serde_json::from_value(json).unwrap();
    assert_eq!(back.graph().unwrap(), ch.graph);
}
