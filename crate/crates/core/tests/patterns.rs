mod common;

use std::collections::BTreeMap;

use spf_core::oracle::{brute_force_patterns, certify_pattern, map_contains, InputState};
use spf_core::patterns::{
    find_measurement_patterns, find_patterns_auto, gpf_patterns, tolerable_loss_configurations, PathBudget,
};
use spf_core::{build_channel, Basis, BitSet, ChannelSpec, MeasurementPattern, StabilizerState};

fn map(state: &StabilizerState, spec: &str) -> BTreeMap<usize, Basis> {
    spec.split_whitespace()
        .map(|tok| {
            let (b, q) = tok.split_at(1);
            (state.qubit(q).unwrap(), b.parse().unwrap())
        })
        .collect()
}

fn labels(state: &StabilizerState, set: &BitSet) -> Vec<String> {
    set.iter().map(|q| state.label(q).to_string()).collect()
}

fn set(state: &StabilizerState, qubits: &[&str]) -> BitSet {
    qubits.iter().map(|q| state.qubit(*q).unwrap()).collect()
}

#[test]
fn worked_example_contains_the_three_column_patterns() {
    let ch = common::worked_example();
    let s = &ch.state;
    let search = find_measurement_patterns(s, ch.output(), s.num_qubits()).unwrap();
    assert_eq!(search.xz_pair_count, 2657);
    for extra in ["X1 X7", "X2 X8", "X3 X9"] {
        let m = map(s, &format!("XI X4 X5 X6 {extra}"));
        let p = search.patterns.iter().find(|p| p.measurements == m).expect("column pattern present");
        assert_eq!(p.weight(), 6);
        let cert = certify_pattern(s, p, &InputState::default_set(1)).unwrap();
        assert!(cert.certified, "{:?}", cert.failure);
    }
    let tol = tolerable_loss_configurations(&search.patterns, &ch.graph.channel_qubits());
    assert_eq!(tol.total, 60);
    assert_eq!(tol.max_size, 4);
    assert_eq!(tol.counts, vec![1, 9, 30, 18, 3, 0, 0, 0, 0, 0]);
}

#[test]
fn patterns_are_sorted_and_distinct() {
    let ch = common::worked_example();
    let search = find_patterns_auto(&ch.state, ch.output(), 3).unwrap();
    assert_eq!(search.max_weight, 9);
    let keys: Vec<(usize, &BTreeMap<usize, Basis>)> =
        search.patterns.iter().map(|p| (p.weight(), &p.measurements)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(keys, sorted);
    assert_eq!(search.patterns.first().unwrap().weight(), 6);
}

#[test]
fn graph_paths_on_worked_example() {
    let ch = common::worked_example();
    let s = &ch.state;
    let gpf = gpf_patterns(&ch.graph, ch.input(), ch.output(), PathBudget::default());
    assert_eq!(gpf.len(), 3);
    let middle = map(s, "XI X2 X5 X8 Z1 Z3 Z7 Z9");
    assert!(gpf.iter().any(|p| p.measurements == middle));
    let tol = tolerable_loss_configurations(&gpf, &ch.graph.channel_qubits());
    assert_eq!(tol.max_size, 2);
    assert!(tol.is_tolerable(&set(s, &["4", "6"])));
    let maximal: Vec<Vec<String>> = tol.maximal.iter().map(|m| labels(s, m)).collect();
    assert_eq!(maximal, vec![vec!["4", "5"], vec!["4", "6"], vec!["5", "6"]]);
    for p in &gpf {
        let cert = certify_pattern(s, p, &InputState::default_set(2)).unwrap();
        assert!(cert.certified);
    }
}

#[test]
fn graph_paths_on_small_channels() {
    let chain = build_channel(&ChannelSpec::Linear { edges: 3 }).unwrap();
    let gpf = gpf_patterns(&chain.graph, chain.input(), chain.output(), PathBudget::default());
    assert_eq!(gpf.len(), 1);
    assert_eq!(gpf[0].measurements, map(&chain.state, "XI X1 X2"));

    let crazy = build_channel(&ChannelSpec::Crazy { columns: 4, per_column: 4 }).unwrap();
    let gpf = gpf_patterns(&crazy.graph, crazy.input(), crazy.output(), PathBudget::default());
    assert_eq!(gpf.len(), 256);
    let all = crazy.graph.channel_qubits();
    assert!(gpf.iter().all(|p| all.is_subset(&p.measured())));
    let tol = tolerable_loss_configurations(&gpf, &all);
    assert_eq!((tol.total, tol.max_size), (0, 0));
}

#[test]
fn every_graph_path_pattern_contains_a_stabilizer_pattern() {
    let specs = [
        ChannelSpec::Square { rows: 3, cols: 3 },
        ChannelSpec::Triangular { rows: 3, cols: 3 },
        ChannelSpec::Hexagonal { rows: 3, cols: 3 },
        ChannelSpec::Crazy { columns: 4, per_column: 4 },
        ChannelSpec::TreeToTree { depth: 2 },
    ];
    for spec in specs {
        let ch = build_channel(&spec).unwrap();
        let gpf = gpf_patterns(&ch.graph, ch.input(), ch.output(), PathBudget::default());
        let w = gpf.iter().map(MeasurementPattern::weight).max().unwrap();
        let spf = find_measurement_patterns(&ch.state, ch.output(), w).unwrap();
        for g in &gpf {
            assert!(
                spf.patterns.iter().any(|p| map_contains(&g.measurements, &p.measurements)),
                "{spec}: {:?}",
                g.measurements
            );
        }
    }
}

#[test]
fn single_bond_minimal_pattern() {
    let ch = build_channel(&ChannelSpec::Linear { edges: 1 }).unwrap();
    let search = find_patterns_auto(&ch.state, ch.output(), 0).unwrap();
    assert_eq!(search.patterns[0].measurements, map(&ch.state, "XI"));
    let brute = brute_force_patterns(&ch.state, ch.output()).unwrap();
    assert!(brute.contains(&map(&ch.state, "XI")));
}

#[test]
fn brute_force_contains_known_patterns() {
    let chain = build_channel(&ChannelSpec::Linear { edges: 3 }).unwrap();
    let brute = brute_force_patterns(&chain.state, chain.output()).unwrap();
    assert!(brute.contains(&map(&chain.state, "XI X1 X2")));

    let star = build_channel(&ChannelSpec::Star { leaves: 3 }).unwrap();
    let brute = brute_force_patterns(&star.state, star.output()).unwrap();
    assert!(brute.contains(&map(&star.state, "XI X1 Z2 Z3")));
    let spf = find_measurement_patterns(&star.state, star.output(), 4).unwrap();
    assert!(spf.patterns.iter().any(|p| p.measurements == map(&star.state, "XI X1 Z2 Z3")));
}

#[test]
fn corrupted_pattern_fails_certification() {
    let ch = common::worked_example();
    let s = &ch.state;
    let search = find_patterns_auto(s, ch.output(), 0).unwrap();
    let mut bad = search.patterns[0].clone();
    let q = s.qubit("4").unwrap();
    bad.measurements.insert(q, Basis::Z);
    bad.provenance.clear();
    let cert = certify_pattern(s, &bad, &InputState::default_set(3)).unwrap();
    assert!(!cert.certified);
}

#[test]
fn output_errors() {
    let ch = common::worked_example();
    assert!(find_measurement_patterns(&ch.state, 0usize, 6).is_err());
    assert!(find_measurement_patterns(&ch.state, "Q", 6).is_err());
    let none = find_measurement_patterns(&ch.state, ch.output(), 2).unwrap();
    assert!(none.patterns.is_empty());
}
