use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttnc_core::circuit::random_circuit;
use ttnc_core::mps::{fidelity, mcz_mpo, random_mps, random_mps_with, Ensemble, Mps, Statevector};
use ttnc_core::transpiler::{equivalence_error, transpile_with_layout, Topology};
use ttnc_core::ttn::{renormalize, staircase_circuit, ttn_to_circuit};
use ttnc_core::verifier::{apply_mpo, build_verifier, overlap_exact};
use ttnc_core::Circuit;

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

fn ensemble() -> impl Strategy<Value = Ensemble> {
    prop::sample::select(Ensemble::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_compilation_prepares_the_state(
        n in 2usize..=9,
        chi in prop::sample::select(vec![2usize, 4]),
        seed in any::<u64>(),
        ens in ensemble(),
    ) {
        let m = random_mps_with(n, chi, seed, ens).unwrap();
        let t = renormalize(&m, None).unwrap();
        prop_assert!(t.max_isometry_deviation() < 1e-10);
        prop_assert!(t.total_discarded_weight() < 1e-12);
        let c = ttn_to_circuit(&t).unwrap();
        prop_assert!(c.multi_qubit_depth() <= ceil_log2(n) + 1);
        let f = fidelity(&c.prepare().unwrap(), &m.to_statevector().unwrap()).unwrap();
        prop_assert!(f >= 1.0 - 1e-9, "fidelity {f}");
    }

    #[test]
    fn truncation_never_overshoots(n in 4usize..=10, seed in any::<u64>(), ens in ensemble()) {
        let m = random_mps_with(n, 4, seed, ens).unwrap();
        let t = renormalize(&m, Some(2)).unwrap();
        prop_assert!(t.max_bond() <= 2);
        let dw = t.total_discarded_weight();
        prop_assert!((0.0..=1.0).contains(&dw));
        let mut got = t.to_statevector().unwrap();
        got.normalize();
        let f = fidelity(&got, &m.to_statevector().unwrap()).unwrap();
        prop_assert!(f <= 1.0 + 1e-9);
        // the prepared circuit reproduces the truncated tree
        let c = ttn_to_circuit(&t).unwrap();
        let prepared = c.prepare().unwrap();
        prop_assert!(fidelity(&prepared, &got).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn circuit_json_round_trips(n in 2usize..=6, seed in any::<u64>()) {
        let m = random_mps(n, 2, seed).unwrap();
        let c = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
        let back = Circuit::from_json(&c.to_json().unwrap()).unwrap();
        let (a, b) = (back.prepare().unwrap(), c.prepare().unwrap());
        prop_assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[test]
    fn mps_json_round_trips(n in 2usize..=6, seed in any::<u64>()) {
        let m = random_mps(n, 2, seed).unwrap();
        let back = Mps::from_json(&m.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.sites(), m.sites());
    }

    #[test]
    fn transpiled_circuits_are_equivalent(
        n in 2usize..=6,
        gates in 1usize..=8,
        seed in any::<u64>(),
        topo in prop::sample::select(Topology::ALL.to_vec()),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(n, gates, 3, &mut rng);
        let g = topo.graph(n);
        let t = transpile_with_layout(&c, &g, None).unwrap();
        for gate in t.circuit.gates() {
            prop_assert!(gate.arity() <= 2);
            if gate.arity() == 2 {
                prop_assert!(g.has_edge(gate.qubits()[0], gate.qubits()[1]));
            }
        }
        prop_assert!(equivalence_error(&c, &t).unwrap() < 1e-8);
    }

    #[test]
    fn verifier_matches_direct_overlap(n in 2usize..=4, a in any::<u64>(), b in any::<u64>()) {
        let u = mcz_mpo(n).unwrap();
        let v = build_verifier(&u, None).unwrap();
        let psi = Statevector::random(n, a).unwrap();
        let phi = Statevector::random(n, b).unwrap();
        let direct = phi.inner(&apply_mpo(&u, &psi).unwrap()).unwrap().norm_sqr();
        prop_assert!((overlap_exact(&v, &psi, &phi).unwrap() - direct).abs() < 1e-9);
    }
}

#[test]
fn ghz_and_product_states() {
    for n in [2, 5, 8] {
        let ghz = Mps::ghz(n).unwrap();
        let c = ttn_to_circuit(&renormalize(&ghz, None).unwrap()).unwrap();
        let f = fidelity(&c.prepare().unwrap(), &ghz.to_statevector().unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "GHZ-{n}: {f}");
    }
    let bits = [1, 0, 1, 1, 0, 0, 1];
    let p = Mps::product_state(&bits).unwrap();
    let c = ttn_to_circuit(&renormalize(&p, None).unwrap()).unwrap();
    assert_eq!(c.depth(true), 1);
    assert_eq!(c.multi_qubit_depth(), 0);
    assert_eq!(
        c.prepare().unwrap().amplitudes()[0b1011001]
            .norm_sqr()
            .round(),
        1.0
    );
}

#[test]
fn tree_beats_staircase_depth() {
    for n in 6..=14 {
        let m = random_mps(n, 2, n as u64).unwrap();
        let tree = ttn_to_circuit(&renormalize(&m, None).unwrap()).unwrap();
        let stairs = staircase_circuit(&m).unwrap();
        assert!(
            tree.multi_qubit_depth() < stairs.multi_qubit_depth(),
            "N={n}"
        );
        let f = fidelity(&stairs.prepare().unwrap(), &m.to_statevector().unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-9);
    }
}
