//! Reference instances: the weighted max-cut QAOA circuit, the H₂O VQE
//! ansatz with its first four measurement groups, the double-excitation
//! sequence, and a few small circuits and graphs.

use crate::compile::{CircuitInput, CircuitItem};
use crate::graph::GraphRegister;
use crate::hamiltonian::Hamiltonian;
use crate::io::circuit_from_json;
use crate::pauli::{CliffordGate, PauliRotation, PauliString};

pub const QAOA_GAMMA: f64 = -2.290;
pub const QAOA_BETA: f64 = -2.186;
/// The two optimal cuts, qubit 0 rightmost.
pub const QAOA_SOLUTIONS: [&str; 2] = ["0100", "1011"];

pub const MAXCUT_TEXT: &str = include_str!("../fixtures/maxcut.txt");
pub const QAOA_JSON: &str = include_str!("../fixtures/qaoa.json");
pub const VQE_ANSATZ_JSON: &str = include_str!("../fixtures/vqe_ansatz.json");
pub const DOUBLE_EXCITATION_JSON: &str = include_str!("../fixtures/double_excitation.json");
pub const H2O_GROUP_TEXT: [&str; 4] = [
    include_str!("../fixtures/h2o_h1.txt"),
    include_str!("../fixtures/h2o_h2.txt"),
    include_str!("../fixtures/h2o_h3.txt"),
    include_str!("../fixtures/h2o_h4.txt"),
];

/// Ideal values of the first four H₂O groups for the ansatz.
pub const H2O_IDEAL: [f64; 4] = [-0.2565, -0.2546, 1.0223, -0.1223];
/// Ground-state energy of the full Hamiltonian in Hartree. Documentation
/// only: the full term list is not shipped.
pub const H2O_FULL_ENERGY: f64 = -74.9910;

/// Excitation pool with angles, in application order.
pub const VQE_POOL: [(&str, f64); 9] = [
    ("X0 X1 Y8 X9", -0.157),
    ("X2 X3 Y8 X9", -0.080),
    ("X4 X5 Y8 X9", -0.023),
    ("X0 X1 Y6 X7", -0.078),
    ("X2 X3 Y6 X7", -0.081),
    ("X4 X5 Y6 X7", -0.054),
    ("X1 X2 Y6 X9", 0.099),
    ("X0 X3 Y6 X9", -0.067),
    ("X1 X2 X7 Y8", -0.065),
];

pub fn maxcut_hamiltonian() -> Hamiltonian {
    Hamiltonian::parse(MAXCUT_TEXT).expect("shipped fixture parses")
}

/// One QAOA layer: `|+⟩⁴`, then `exp(−iγ/2·H_c)`, then `exp(−iβ/2·ΣXᵢ)`.
pub fn qaoa_circuit(gamma: f64, beta: f64) -> CircuitInput {
    let h = maxcut_hamiltonian();
    let mut rotations: Vec<PauliRotation> = h
        .terms()
        .map(|(c, p)| PauliRotation::new(p.clone(), gamma * c).expect("non-identity term"))
        .collect();
    for q in 0..4 {
        rotations.push(PauliRotation::new(PauliString::single(4, q, crate::pauli::Pauli::X).unwrap(), beta).unwrap());
    }
    CircuitInput::from_rotations(4, (0..4).map(CliffordGate::H).collect(), rotations)
}

pub fn h2o_group(k: usize) -> Hamiltonian {
    Hamiltonian::parse(H2O_GROUP_TEXT[k]).expect("shipped fixture parses")
}

/// Pool rotations on the Hartree-Fock state with qubits 0–5 occupied.
pub fn vqe_ansatz() -> CircuitInput {
    circuit_from_json(VQE_ANSATZ_JSON).expect("shipped fixture parses")
}

/// The ansatz followed by `gates`, e.g. a group's diagonalizing circuit.
pub fn with_suffix(input: &CircuitInput, gates: &[CliffordGate]) -> CircuitInput {
    let mut out = input.clone();
    out.items.push(CircuitItem::Clifford(gates.to_vec()));
    out
}

/// The eight strings of the double excitation on qubits `i j a b = 0 1 2 3`
/// with their angle signs, in application order.
pub const DOUBLE_EXCITATION: [(&str, f64); 8] = [
    ("XXXY", 1.0),
    ("XXYX", 1.0),
    ("XYYY", 1.0),
    ("YYYX", -1.0),
    ("YXYY", 1.0),
    ("YXXX", -1.0),
    ("YYXY", -1.0),
    ("XYXX", -1.0),
];

pub fn double_excitation(theta: f64) -> Vec<PauliRotation> {
    DOUBLE_EXCITATION
        .iter()
        .map(|(s, k)| PauliRotation::new(s.parse().expect("fixture string"), k * theta).expect("non-identity"))
        .collect()
}

/// `exp(−iθ/2·Z₀Z₁)` on two qubits.
pub fn zz_circuit(theta: f64) -> CircuitInput {
    CircuitInput::from_rotations(2, vec![], vec![PauliRotation::parse("ZZ", 2, theta).unwrap()])
}

/// `exp(−iθ₂/2·XX)·exp(−iθ₁/2·YY)` on two qubits.
pub fn yy_xx_circuit(theta1: f64, theta2: f64) -> CircuitInput {
    CircuitInput::from_rotations(
        2,
        vec![],
        vec![
            PauliRotation::parse("YY", 2, theta1).unwrap(),
            PauliRotation::parse("XX", 2, theta2).unwrap(),
        ],
    )
}

/// Five-edge graph where complementing vertex 0 removes one edge.
pub fn lc_example_graph() -> GraphRegister {
    GraphRegister::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
}
