//! Exact branch-by-branch checks of patterns against the dense simulator.

use crate::compile::CircuitInput;
use crate::dense::{branch_enumerate, MeasureBasis, StateVector};
use crate::error::{Error, Result};
use crate::pattern::{CliffordPart, Pattern};

/// One outcome branch of a pattern after correction.
#[derive(Clone, Debug)]
pub struct PatternBranch {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Logical state read off the main holders.
    pub logical: StateVector,
    /// Weight of the post-correction state on the slice where every
    /// non-main qubit is in its expected basis state; 1 when the main
    /// register factors out.
    pub weight: f64,
}

/// Full register state after the Clifford part, with `input` on the main
/// qubits (ignored for graph form, which fixes `|0…0⟩`).
pub fn prepared_state(pattern: &Pattern, input: Option<&StateVector>) -> Result<StateVector> {
    match &pattern.clifford {
        CliffordPart::Circuit(gates) => {
            let n = pattern.total_qubits;
            let main: Vec<usize> = (0..pattern.main_qubits).collect();
            let rest: Vec<(usize, u8)> = (pattern.main_qubits..n).map(|q| (q, 0)).collect();
            let logical = match input {
                Some(s) => s.clone(),
                None => StateVector::zero(pattern.main_qubits)?,
            };
            let mut s = StateVector::embed(&logical, n, &main, &rest)?;
            s.apply_circuit(gates)?;
            Ok(s)
        }
        CliffordPart::Graph(gf) => {
            if let Some(s) = input {
                let zero = StateVector::zero(pattern.main_qubits)?;
                if s.fidelity(&zero)? < 1.0 - 1e-12 {
                    return Err(Error::Invalid("graph-form patterns start from |0…0⟩".into()));
                }
            }
            gf.register.to_statevector()
        }
    }
}

/// Enumerates every measurement branch (adaptive angles included), applies
/// the final correction and extracts the logical state.
pub fn pattern_branches(pattern: &Pattern, input: Option<&StateVector>) -> Result<Vec<PatternBranch>> {
    let state = prepared_state(pattern, input)?;
    let branches = branch_enumerate(&state, pattern.measurements.len(), |prefix| {
        let i = prefix.len();
        let angle = pattern.adaptive_angle(i, prefix)?;
        Ok((pattern.measurements[i].target, MeasureBasis::Angle(angle)))
    })?;
    branches
        .into_iter()
        .map(|b| {
            let mut s = b.state;
            s.apply_pauli(&pattern.physical_correction(&b.outcomes)?.with_phase(0))?;
            let mut fixed: Vec<(usize, u8)> = pattern
                .measurements
                .iter()
                .zip(&b.outcomes)
                .map(|(m, &o)| (m.target, o))
                .collect();
            fixed.extend(pattern.spare.iter().map(|&q| (q, 0)));
            let (logical, weight) = s.slice(&pattern.main_map, &fixed)?;
            Ok(PatternBranch {
                outcomes: b.outcomes,
                probability: b.probability,
                logical,
                weight,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchReport {
    pub branches: usize,
    pub total_probability: f64,
    pub min_fidelity: f64,
    pub min_weight: f64,
}

impl BranchReport {
    /// Largest deviation from an exact match over all branches.
    pub fn max_deviation(&self) -> f64 {
        (1.0 - self.min_fidelity)
            .max(1.0 - self.min_weight)
            .max((self.total_probability - 1.0).abs())
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

/// Compares every branch of `pattern` with the circuit applied directly to
/// `input` (default `|0…0⟩`).
pub fn verify_branches(circuit: &CircuitInput, pattern: &Pattern, input: Option<&StateVector>) -> Result<BranchReport> {
    if circuit.num_qubits != pattern.main_qubits {
        return Err(Error::LengthMismatch(circuit.num_qubits, pattern.main_qubits));
    }
    let mut expected = match input {
        Some(s) => s.clone(),
        None => StateVector::zero(circuit.num_qubits)?,
    };
    circuit.apply_to(&mut expected)?;
    let branches = pattern_branches(pattern, input)?;
    let mut report = BranchReport {
        branches: branches.len(),
        total_probability: 0.0,
        min_fidelity: 1.0,
        min_weight: 1.0,
    };
    for b in &branches {
        report.total_probability += b.probability;
        report.min_fidelity = report.min_fidelity.min(b.logical.fidelity(&expected)?);
        report.min_weight = report.min_weight.min(b.weight);
    }
    Ok(report)
}

/// Distribution of the corrected main register in the computational basis,
/// computed exactly from the branches. Index bit `q` is logical qubit `q`.
pub fn pattern_distribution(pattern: &Pattern) -> Result<Vec<f64>> {
    let n = pattern.main_qubits;
    let mut dist = vec![0.0; 1 << n];
    for b in pattern_branches(pattern, None)? {
        let all: Vec<usize> = (0..n).collect();
        for (k, p) in b.logical.distribution(&all)?.into_iter().enumerate() {
            dist[k] += b.probability * p;
        }
    }
    Ok(dist)
}
