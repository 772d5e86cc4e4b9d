mod common;

use common::*;
use mbpat::fixtures::lc_example_graph;
use mbpat::graph::GraphRegister;
use mbpat::local_clifford::LocalClifford;
use mbpat::pauli::{CliffordGate, Pauli};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state(reg: &GraphRegister) -> Vec<C> {
    reg.to_statevector().unwrap().amplitudes().to_vec()
}

fn gates_of(k: usize) -> Vec<CliffordGate> {
    let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
    random_circuit(6, 30, &mut rng)
}

fn projector(q: usize, p: Pauli, outcome: u8, n: usize) -> Mat {
    let pm = one_qubit_gate(
        {
            let m = pauli_1q(p);
            [[m[0][0], m[0][1]], [m[1][0], m[1][1]]]
        },
        q,
        n,
    );
    let s = if outcome == 0 { 0.5 } else { -0.5 };
    add(&scale(&identity(1 << n), c(0.5, 0.0)), &pm, c(s, 0.0))
}

#[test]
fn vop_table_matches_matrices() {
    let phase_free = |a: [[C; 2]; 2], b: [[C; 2]; 2]| {
        let ip: C = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| a[i][j].conj() * b[i][j]).sum();
        (ip.norm() - 2.0).abs() < 1e-10
    };
    let all: Vec<LocalClifford> = LocalClifford::all().collect();
    assert_eq!(all.len(), 24);
    for &a in &all {
        for &b in &all {
            let (ma, mb) = (a.matrix(), b.matrix());
            let mut prod = [[c(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    prod[i][j] = ma[i][0] * mb[0][j] + ma[i][1] * mb[1][j];
                }
            }
            assert!(phase_free(a.compose(b).matrix(), prod), "{a} ∘ {b}");
        }
    }
}

#[test]
fn local_operations() {
    let mut reg = GraphRegister::new_zero(2);
    let before = reg.clone();
    reg.apply_local(0, LocalClifford::hadamard()).unwrap();
    assert_eq!(reg.vop(0), LocalClifford::identity());
    reg.apply_local(0, LocalClifford::hadamard()).unwrap();
    assert_eq!(reg, before);
    for _ in 0..4 {
        reg.apply_local(1, LocalClifford::phase()).unwrap();
    }
    assert_eq!(reg, before);
    assert!(reg.apply_local(2, LocalClifford::phase()).is_err());
}

#[test]
fn cz_examples() {
    let mut reg = GraphRegister::new_plus(2);
    reg.apply_cz(0, 1).unwrap();
    assert_eq!(reg.edges(), vec![(0, 1)]);
    assert!(reg.vops().iter().all(|&v| v == LocalClifford::identity()));
    reg.apply_cz(0, 1).unwrap();
    assert_eq!(reg, GraphRegister::new_plus(2));
    assert!(reg.apply_cz(1, 1).is_err());
    assert!(reg.apply_cz(0, 5).is_err());
}

#[test]
fn random_circuits_match_the_oracle() {
    for k in 0..40 {
        let gates = gates_of(k);
        let mut reg = GraphRegister::new_zero(6);
        reg.apply_circuit(&gates).unwrap();
        let f = overlap(&state(&reg), &oracle_state(&gates, 6));
        assert!((f - 1.0).abs() < 1e-10, "circuit {k}: fidelity {f}");
    }
}

#[test]
fn measurement_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let mut reg = GraphRegister::new_zero(1);
        assert_eq!(reg.measure_pauli(0, Pauli::Z, &mut rng).unwrap(), 0);
    }
    let edge = GraphRegister::from_edges(2, &[(0, 1)]).unwrap();
    assert!((edge.probability_zero(0, Pauli::X).unwrap() - 0.5).abs() < 1e-12);
    let ones: u32 = (0..2000)
        .map(|_| u32::from(edge.clone().measure_pauli(0, Pauli::X, &mut rng).unwrap()))
        .sum();
    assert!((ones as f64 - 1000.0).abs() < 150.0);
    assert!(edge.clone().measure_pauli(2, Pauli::X, &mut rng).is_err());
}

#[test]
fn bell_pair_gives_correlated_outcomes() {
    // Edge plus H on one end: (|00⟩ + |11⟩)/√2.
    let mut bell = GraphRegister::from_edges(2, &[(0, 1)]).unwrap();
    bell.apply_local(1, LocalClifford::hadamard()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counts = [0u64; 4];
    for _ in 0..10_000 {
        let b = bell.sample_shot(&[(0, Pauli::Z), (1, Pauli::Z)], &mut rng).unwrap();
        counts[(b[0] + 2 * b[1]) as usize] += 1;
    }
    assert_eq!(counts[1] + counts[2], 0);
    assert!(chi_square_p(&counts, &[0.5, 0.0, 0.0, 0.5]) > 1e-3);
}

#[test]
fn post_measurement_states_match_projectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..30 {
        let gates = gates_of(100 + k);
        let mut reg = GraphRegister::new_zero(6);
        reg.apply_circuit(&gates).unwrap();
        let mut psi = oracle_state(&gates, 6);
        for _ in 0..4 {
            let q = rng.gen_range(0..6);
            let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
            let p0 = reg.probability_zero(q, p).unwrap();
            let m = reg.measure_pauli(q, p, &mut rng).unwrap();
            let projected = apply(&projector(q, p, m, 6), &psi);
            let norm: f64 = projected.iter().map(|x| x.norm_sqr()).sum();
            let expected_p0 = if m == 0 { norm } else { 1.0 - norm };
            assert!((p0 - expected_p0).abs() < 1e-10);
            psi = projected.iter().map(|x| x / norm.sqrt()).collect();
            assert!((overlap(&state(&reg), &psi) - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn sampled_statistics_pass_chi_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..3 {
        let gates = random_circuit(4, 20, &mut rng);
        let mut reg = GraphRegister::new_zero(4);
        reg.apply_circuit(&gates).unwrap();
        let psi = oracle_state(&gates, 4);
        let probs: Vec<f64> = psi.iter().map(|x| x.norm_sqr()).collect();
        let bases: Vec<(usize, Pauli)> = (0..4).map(|q| (q, Pauli::Z)).collect();
        let mut counts = vec![0u64; 16];
        for _ in 0..100_000 {
            let b = reg.sample_shot(&bases, &mut rng).unwrap();
            counts[b.iter().enumerate().map(|(i, &x)| (x as usize) << i).sum::<usize>()] += 1;
        }
        let p = chi_square_p(&counts, &probs);
        assert!(p > 1e-3, "circuit {k}: p = {p}");
        // Nonzero outcomes of a stabilizer state are equally likely.
        let support: Vec<f64> = probs.iter().copied().filter(|&x| x > 1e-12).collect();
        assert!(support.iter().all(|&x| (x - support[0]).abs() < 1e-10));
    }
}

#[test]
fn local_complementation_examples() {
    let mut path = GraphRegister::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    path.local_complement(1).unwrap();
    assert_eq!(path.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    path.local_complement(0).unwrap();
    assert_eq!(path.edges(), vec![(0, 1), (0, 2)]);
    let mut g = lc_example_graph();
    assert_eq!(g.edge_count(), 5);
    g.local_complement(0).unwrap();
    assert_eq!(g.edge_count(), 4);
    assert!(g.local_complement(4).is_err());
}

#[test]
fn prep_circuit_examples() {
    let star = GraphRegister::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
    assert_eq!(star.prep_circuit().entangling_depth(), 3);
    assert_eq!(GraphRegister::new_plus(5).prep_circuit().entangling_depth(), 0);
}

#[test]
fn text_formats_round_trip() {
    let mut reg = GraphRegister::new_zero(5);
    reg.apply_circuit(&gates_of(7).into_iter().filter(|g| g.qubits().iter().all(|&q| q < 5)).collect::<Vec<_>>())
        .unwrap();
    let back = GraphRegister::parse_adjacency_text(&reg.to_adjacency_text()).unwrap();
    assert_eq!(back, reg);
    let dot = reg.to_dot(None);
    assert!(dot.starts_with("graph G {"));
    assert_eq!(dot.matches(" -- ").count(), reg.edge_count());
}

fn graph_strategy(n: usize) -> impl Strategy<Value = GraphRegister> {
    (prop::collection::vec(any::<bool>(), n * (n - 1) / 2), prop::collection::vec(0usize..24, n)).prop_map(
        move |(bits, vops)| {
            let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            let edges: Vec<(usize, usize)> = pairs.zip(bits).filter(|(_, on)| *on).map(|(e, _)| e).collect();
            let mut g = GraphRegister::from_edges(n, &edges).unwrap();
            for (q, v) in vops.into_iter().enumerate() {
                g.set_vop(q, LocalClifford::from_index(v).unwrap()).unwrap();
            }
            g
        },
    )
}

proptest! {
    #[test]
    fn local_complement_preserves_state(g in graph_strategy(6), seq in prop::collection::vec(0usize..6, 1..8)) {
        let before = state(&g);
        let mut h = g.clone();
        for &v in &seq {
            h.local_complement(v).unwrap();
            prop_assert!((overlap(&before, &state(&h)) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn local_complement_is_an_involution_on_graphs(g in graph_strategy(7), v in 0usize..7) {
        let mut h = g.clone();
        h.local_complement(v).unwrap();
        h.local_complement(v).unwrap();
        prop_assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn prep_circuit_reproduces_state(g in graph_strategy(6)) {
        let prep = g.prep_circuit();
        let depth = prep.entangling_depth();
        prop_assert!(depth >= prep.max_degree && depth <= prep.max_degree + 1);
        let v = oracle_state(&prep.gates, 6);
        prop_assert!((overlap(&v, &state(&g)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gates_on_graph_states_match_oracle(g in graph_strategy(5), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_circuit(5, 12, &mut rng);
        let mut all = g.prep_circuit().gates;
        all.extend(gates.iter().copied());
        let mut h = g.clone();
        h.apply_circuit(&gates).unwrap();
        prop_assert!((overlap(&oracle_state(&all, 5), &state(&h)) - 1.0).abs() < 1e-10);
    }
}
