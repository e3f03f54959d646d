use std::sync::OnceLock;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::strategy::Strategy;
use rayon::ThreadPool;
use spf_core::losssim::{self, LossMode, LossSimConfig, PatternSource, Strategy as LossStrategy};
use spf_core::oracle::enumerate_nontrivial_bruteforce;
use spf_core::patterns::{bare_logical, find_patterns_auto};
use spf_core::triviality::product_of;
use spf_core::{BitSet, ChannelSpec, Combination, Gate, Letter, MeasurementPattern, PauliOperator, StabilizerState};

pub const CASES: u32 = 10_000;

pub type Check = std::result::Result<(), TestCaseError>;

pub fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, failure_persistence: None, ..ProptestConfig::default() }
}

fn letter(k: u8) -> Letter {
    [Letter::I, Letter::X, Letter::Y, Letter::Z][k as usize]
}

fn pauli(n: usize, letters: &[u8], phase: u8) -> PauliOperator {
    let ls: Vec<(usize, Letter)> = letters.iter().enumerate().map(|(q, &k)| (q, letter(k))).collect();
    let mut p = PauliOperator::from_letters(n, &ls).unwrap();
    p.mul_phase(phase);
    p
}

pub type Triple = (PauliOperator, PauliOperator, PauliOperator);

pub fn pauli_triple() -> impl Strategy<Value = Triple> {
    (1usize..=70).prop_flat_map(|n| {
        (vec(0u8..4, n), 0u8..4, vec(0u8..4, n), 0u8..4, vec(0u8..4, n), 0u8..4).prop_map(
            move |(a, pa, b, pb, c, pc)| (pauli(n, &a, pa), pauli(n, &b, pb), pauli(n, &c, pc)),
        )
    })
}

pub fn group_laws((a, b, c): Triple) -> Check {
    let n = a.num_qubits();
    let id = PauliOperator::identity(n);
    prop_assert_eq!(&(&(&a * &b) * &c), &(&a * &(&b * &c)));
    prop_assert_eq!(&(&a * &id), &a);
    prop_assert_eq!(&(&id * &a), &a);
    prop_assert_eq!(&(&a * &a.inverse()), &id);
    prop_assert_eq!(&(&a.inverse() * &a), &id);

    let ab = &a * &b;
    let ba = &b * &a;
    if a.commutes(&b) {
        prop_assert_eq!(&ab, &ba);
    } else {
        prop_assert_eq!(&ab, &ba.negated());
    }
    prop_assert_eq!(a.commutes(&b), b.commutes(&a));
    prop_assert_eq!(&(&a.negated() * &b), &ab.negated());
    let same: BitSet = (0..n).filter(|&q| a.letter(q) != Letter::I && a.letter(q) == b.letter(q)).collect();
    prop_assert_eq!(ab.support(), a.support().union(&b.support()).difference(&same));

    if a.is_hermitian() {
        prop_assert_eq!(&(&a * &a), &id);
    } else {
        prop_assert_eq!(&(&a * &a), &id.negated());
    }
    Ok(())
}

pub type ConjugationCase = (Triple, Gate, (usize, usize));

pub fn conjugation_case() -> impl Strategy<Value = ConjugationCase> {
    (pauli_triple(), prop_oneof![Just(Gate::H), Just(Gate::S), Just(Gate::Cz)], (0usize..1000, 1usize..1000))
}

pub fn conjugation_is_an_automorphism(((a, b, _), gate, picks): ConjugationCase) -> Check {
    let n = a.num_qubits();
    prop_assume!(gate != Gate::Cz || n >= 2);
    let q = picks.0 % n;
    let targets = if gate == Gate::Cz { vec![q, (q + picks.1 % (n - 1) + 1) % n] } else { vec![q] };
    let ca = a.conjugate(gate, &targets).unwrap();
    let cb = b.conjugate(gate, &targets).unwrap();
    prop_assert_eq!(&(&a * &b).conjugate(gate, &targets).unwrap(), &(&ca * &cb));
    prop_assert_eq!(ca.commutes(&cb), a.commutes(&b));
    prop_assert_eq!(ca.is_hermitian(), a.is_hermitian());
    let order = match gate {
        Gate::S => 4,
        _ => 2,
    };
    let mut back = a.clone();
    for _ in 0..order {
        back = back.conjugate(gate, &targets).unwrap();
    }
    prop_assert_eq!(&back, &a);
    for r in (0..n).filter(|r| !targets.contains(r)) {
        prop_assert_eq!(ca.letter(r), a.letter(r));
    }
    Ok(())
}

/// Seed, qubit count and number of interleaved measurements.
pub type SmallState = (u64, usize, usize);

fn small_state() -> impl Strategy<Value = SmallState> {
    (any::<u64>(), 3usize..=8, 0usize..=2)
}

pub type LocalGateCase = (SmallState, Vec<(Gate, usize)>);

pub fn local_gate_case() -> impl Strategy<Value = LocalGateCase> {
    (small_state(), vec((prop_oneof![Just(Gate::H), Just(Gate::S)], 0usize..16), 1..4))
}

pub fn local_gates_preserve_triviality(((seed, n, m), ops): LocalGateCase) -> Check {
    let mut s = super::random_circuit(seed, n, m);
    for (gate, q) in ops {
        let q = q % s.num_qubits();
        let before = s.nt_stabs().clone();
        s.apply_single_qubit_gate(q, gate).unwrap();
        let mut keys_before: Vec<_> = before.keys().cloned().collect();
        let mut keys_after: Vec<_> = s.nt_stabs().keys().cloned().collect();
        keys_before.sort();
        keys_after.sort();
        prop_assert_eq!(keys_before, keys_after);
        for (c, op) in &before {
            prop_assert_eq!(&s.nt_stabs()[c], &op.conjugate(gate, &[q]).unwrap());
        }
    }
    prop_assert_eq!(s.nt_stabs(), &enumerate_nontrivial_bruteforce(s.generators()).unwrap());
    Ok(())
}

pub type CzCase = (SmallState, (usize, usize));

pub fn cz_case() -> impl Strategy<Value = CzCase> {
    (small_state(), (0usize..16, 1usize..16))
}

pub fn cz_preserves_triviality_off_support(((seed, n, m), pair): CzCase) -> Check {
    let mut s = super::random_circuit(seed, n, m);
    let k = s.num_qubits();
    let u = pair.0 % k;
    let v = (u + pair.1 % (k - 1) + 1) % k;
    let g = s.num_generators();
    let off: Vec<(BitSet, bool)> = (1u64..(1 << g))
        .filter_map(|mask| {
            let c: BitSet = (0..g).filter(|i| mask >> i & 1 == 1).collect();
            let op = product_of(&c, s.generators()).unwrap();
            let nt = s.nt_stabs().contains_key(&Combination::from(c.clone()));
            (!op.acts_on(u) && !op.acts_on(v)).then_some((c, nt))
        })
        .collect();
    s.apply_cz(u, v).unwrap();
    let brute = enumerate_nontrivial_bruteforce(s.generators()).unwrap();
    prop_assert_eq!(s.nt_stabs(), &brute);
    for (c, nt) in off {
        prop_assert_eq!(brute.contains_key(&Combination::from(c)), nt);
    }
    Ok(())
}

pub type PatternCase = (SmallState, usize, usize);

pub fn pattern_case() -> impl Strategy<Value = PatternCase> {
    (small_state(), 1usize..16, 0usize..=3)
}

pub fn patterns_satisfy_pairing_conditions(((seed, n, m), out, extra): PatternCase) -> Check {
    let s = super::random_circuit(seed, n, m);
    let output = 1 + out % (s.num_qubits() - 1);
    let search = find_patterns_auto(&s, output, extra).unwrap();
    for p in &search.patterns {
        prop_assert!(!p.provenance.is_empty());
        prop_assert!(!p.measurements.contains_key(&output));
        prop_assert!(p.weight() <= search.max_weight);
        for (a, b) in &p.provenance {
            check_pair(&s, p, output, &a.op, &b.op)?;
            for l in [a, b] {
                let mut expect = bare_logical(&s, l.kind);
                if !l.source.is_empty() {
                    expect = &s.stabilizer_of(&l.source).unwrap() * &expect;
                }
                prop_assert_eq!(&l.op, &expect);
            }
            prop_assert!(p.weight() + 1 >= a.op.weight().max(b.op.weight()));
        }
    }
    Ok(())
}

/// Pairing conditions checked letter by letter, independently of the search.
fn check_pair(s: &StabilizerState, p: &MeasurementPattern, output: usize, a: &PauliOperator, b: &PauliOperator) -> Check {
    for g in s.generators() {
        prop_assert!(a.commutes(g) && b.commutes(g));
    }
    prop_assert!(!a.commutes(b));
    prop_assert!(!a.letter(output).commutes_with(b.letter(output)));
    for q in (0..s.num_qubits()).filter(|&q| q != output) {
        let (la, lb) = (a.letter(q), b.letter(q));
        prop_assert!(la.commutes_with(lb));
        let expect = if la != Letter::I { la } else { lb };
        match p.measurements.get(&q) {
            Some(basis) => prop_assert_eq!(basis.letter(), expect),
            None => prop_assert_eq!(expect, Letter::I),
        }
    }
    Ok(())
}

struct SimFixture {
    patterns: Vec<(Vec<MeasurementPattern>, BitSet)>,
    pools: Vec<ThreadPool>,
}

fn fixture() -> &'static SimFixture {
    static CELL: OnceLock<SimFixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let specs = [
            ChannelSpec::parallel_chains(3, 3),
            ChannelSpec::Crazy { columns: 3, per_column: 3 },
            ChannelSpec::Square { rows: 3, cols: 3 },
        ];
        let patterns = specs
            .iter()
            .map(|spec| {
                let ch = spf_core::build_channel(spec).unwrap();
                let search = find_patterns_auto(&ch.state, ch.output(), 2).unwrap();
                (search.patterns, losssim::lossy_qubits(ch.state.num_qubits(), ch.input(), ch.output()))
            })
            .collect();
        let pools = [1, 2, 4].iter().map(|&t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap()).collect();
        SimFixture { patterns, pools }
    })
}

/// Channel index, seed, loss grid, trials, unheralded, most-common, keep-omitting.
pub type SimCase = (usize, u64, Vec<f64>, u64, bool, bool, bool);

pub fn sim_case() -> impl Strategy<Value = SimCase> {
    (0usize..3, any::<u64>(), vec(0.0f64..=1.0, 1..3), 1u64..40, any::<bool>(), any::<bool>(), any::<bool>())
}

pub fn simulation_is_independent_of_worker_count(
    (which, seed, mut loss_grid, trials, unheralded, most_common, keep_omitting): SimCase,
) -> Check {
    let fx = fixture();
    let (patterns, lossy) = &fx.patterns[which];
    loss_grid.sort_by(f64::total_cmp);
    let config = LossSimConfig {
        loss_grid,
        trials,
        seed,
        mode: if unheralded { LossMode::Unheralded } else { LossMode::Heralded },
        strategy: if most_common { LossStrategy::MostCommon } else { LossStrategy::MaxTolerance },
        keep_omitting,
        source: PatternSource::default(),
    };
    let runs: Vec<_> =
        fx.pools.iter().map(|pool| pool.install(|| losssim::simulate(patterns, lossy, &config).unwrap())).collect();
    for r in &runs[1..] {
        prop_assert_eq!(&r.points, &runs[0].points);
        prop_assert_eq!(r.to_csv(), runs[0].to_csv());
    }
    Ok(())
}
