#![allow(dead_code)]

pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spf_core::channels::random_gnm;
use spf_core::{Basis, ChannelGraph, ChannelSpec, Letter, Outcome, PauliOperator, SpfError, StabilizerState};

/// The worked-example channel: three chains I–1–4–7–O, I–2–5–8–O, I–3–6–9–O.
pub fn worked_example() -> ChannelGraph {
    spf_core::build_channel(&ChannelSpec::parallel_chains(3, 3)).unwrap()
}

/// Builds a random connected graph state on `n` nodes edge by edge, with up
/// to `measurements` single-qubit Pauli measurements on random channel
/// qubits interleaved between the gates, plus occasional local Cliffords.
pub fn random_circuit(seed: u64, n: usize, measurements: usize) -> StabilizerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_edges = n * (n - 1) / 2 - 1;
    let m = rng.random_range(n - 1..=max_edges);
    let graph = random_gnm(n, m, seed).unwrap();
    let mut state = StabilizerState::initialise();
    state.apply_h(0usize).unwrap();
    for label in &graph.labels()[1..] {
        let q = state.add_qubit(label).unwrap();
        state.apply_h(q).unwrap();
    }
    let edges = graph.construction_order();
    let mut stops: Vec<usize> = (0..measurements).map(|_| rng.random_range(0..=edges.len())).collect();
    stops.sort_unstable();
    let mut next = 0;
    for (i, &(u, v)) in edges.iter().enumerate() {
        while next < stops.len() && stops[next] == i {
            measure_random(&mut state, &mut rng);
            next += 1;
        }
        state.apply_cz(u, v).unwrap();
        if rng.random_bool(0.1) {
            let q = rng.random_range(0..state.num_qubits());
            if rng.random_bool(0.5) {
                state.apply_h(q).unwrap();
            } else {
                state.apply_s(q).unwrap();
            }
        }
    }
    while next < stops.len() {
        measure_random(&mut state, &mut rng);
        next += 1;
    }
    state
}

fn measure_random(state: &mut StabilizerState, rng: &mut ChaCha8Rng) {
    for _ in 0..16 {
        let q = rng.random_range(1..state.num_qubits());
        let basis = Basis::ALL[rng.random_range(0..3)];
        let outcome = if rng.random_bool(0.5) { Outcome::Plus } else { Outcome::Minus };
        match state.measure_qubit(q, basis, outcome) {
            Ok(_) => return,
            Err(SpfError::LogicalDestroying { .. }) => continue,
            Err(e) => panic!("measurement failed: {e}"),
        }
    }
}

/// Operator from sparse text such as `-Z3 X6 ZO`, with qubits named by label.
pub fn op(state: &StabilizerState, text: &str) -> PauliOperator {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let letters: Vec<(usize, Letter)> = body
        .split_whitespace()
        .map(|tok| {
            let (l, q) = tok.split_at(1);
            let letter = match l {
                "X" => Letter::X,
                "Y" => Letter::Y,
                "Z" => Letter::Z,
                _ => panic!("bad letter in {tok}"),
            };
            (state.qubit(q).unwrap(), letter)
        })
        .collect();
    let mut p = PauliOperator::from_letters(state.num_qubits(), &letters).unwrap();
    if negative {
        p.negate();
    }
    p
}
