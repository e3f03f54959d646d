mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(config())]

    #[test]
    fn pauli_group_laws(t in pauli_triple()) {
        group_laws(t)?;
    }

    #[test]
    fn clifford_conjugation_is_an_automorphism(case in conjugation_case()) {
        conjugation_is_an_automorphism(case)?;
    }

    #[test]
    fn single_qubit_gates_preserve_triviality(case in local_gate_case()) {
        local_gates_preserve_triviality(case)?;
    }

    #[test]
    fn cz_preserves_triviality_off_its_support(case in cz_case()) {
        cz_preserves_triviality_off_support(case)?;
    }

    #[test]
    fn patterns_satisfy_pairing_conditions_and_weight_bound(case in pattern_case()) {
        patterns_satisfy_pairing_conditions(case)?;
    }

    #[test]
    fn simulation_is_independent_of_worker_count(case in sim_case()) {
        common::props::simulation_is_independent_of_worker_count(case)?;
    }
}
