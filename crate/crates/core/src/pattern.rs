//! Standard-form patterns: a Clifford part, a measurement layer with
//! adaptive angles, and a final Pauli correction.

use serde::{Deserialize, Serialize};

use crate::circuit;
use crate::error::{Error, Result};
use crate::graph::GraphRegister;
use crate::pauli::{CliffordGate, Pauli, PauliRotation, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Rotation carried on the highest-indexed support qubit.
    Star,
    /// Rotation carried on an ancilla that returns to `|0⟩`.
    StarAncilla,
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Layout> {
        match s {
            "star" => Ok(Layout::Star),
            "star_ancilla" | "star-ancilla" | "star+ancilla" => Ok(Layout::StarAncilla),
            _ => Err(Error::Parse(format!("unknown layout {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementInstruction {
    /// Physical qubit measured in `M(θ)`.
    pub target: usize,
    pub base_angle: f64,
    /// Earlier instruction indices whose outcomes flip the angle's sign.
    pub adapt_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTerm {
    pub control: usize,
    /// Pauli on the logical main register.
    pub pauli: PauliString,
}

/// Graph-form Clifford part: the stabilizer state the Clifford part
/// prepares from `|0…0⟩`, stored as graph plus VOPs.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphForm {
    pub register: GraphRegister,
}

impl GraphForm {
    /// Basis a main holder is read in once its VOP is stripped: the image of
    /// `Z` under `V†·V`, with sign.
    pub fn main_basis(&self, q: usize) -> (Pauli, bool) {
        let s = self.register.vop(q).conjugate_inverse(Pauli::Z);
        (s.pauli, s.negative)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CliffordPart {
    Circuit(Vec<CliffordGate>),
    Graph(GraphForm),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub main_qubits: usize,
    pub total_qubits: usize,
    pub layout: Layout,
    /// Physical qubit holding each logical main qubit at the end.
    pub main_map: Vec<usize>,
    /// Unmeasured non-main qubits; they end in `|0⟩`.
    pub spare: Vec<usize>,
    pub clifford: CliffordPart,
    pub measurements: Vec<MeasurementInstruction>,
    pub corrections: Vec<CorrectionTerm>,
    pub generators: Vec<PauliRotation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub entangling_layers: usize,
    pub cnot_count: usize,
    pub cz_count: usize,
    pub ancilla_count: usize,
    pub parallel_groups: usize,
}

impl Pattern {
    pub fn is_graph_form(&self) -> bool {
        matches!(self.clifford, CliffordPart::Graph(_))
    }

    pub fn gates(&self) -> Option<&[CliffordGate]> {
        match &self.clifford {
            CliffordPart::Circuit(g) => Some(g),
            CliffordPart::Graph(_) => None,
        }
    }

    /// Measured qubits that are not original main qubits.
    pub fn ancilla_count(&self) -> usize {
        self.measurements
            .iter()
            .filter(|m| m.target >= self.main_qubits)
            .count()
    }

    /// `(−1)^{hᵢ}·θᵢ` with `hᵢ` the parity of the outcomes in the adapt set.
    pub fn adaptive_angle(&self, i: usize, outcomes: &[u8]) -> Result<f64> {
        let m = self
            .measurements
            .get(i)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                n: self.measurements.len(),
            })?;
        adaptive_angle(m, outcomes)
    }

    /// `∏ₘ 𝒫ₘ^{sₘ}` on the logical register, phase kept.
    pub fn final_correction(&self, outcomes: &[u8]) -> Result<PauliString> {
        if outcomes.len() != self.measurements.len() {
            return Err(Error::Arity {
                expected: self.measurements.len(),
                got: outcomes.len(),
            });
        }
        let mut acc = PauliString::identity(self.main_qubits);
        for c in &self.corrections {
            if outcomes[c.control] == 1 {
                acc = acc.multiply(&c.pauli)?;
            }
        }
        Ok(acc)
    }

    /// Final correction placed on the physical holders of the main qubits.
    pub fn physical_correction(&self, outcomes: &[u8]) -> Result<PauliString> {
        self.final_correction(outcomes)?
            .embed(self.total_qubits, &self.main_map)
    }

    /// Measurement rounds when every instruction waits only for its adapt set.
    pub fn parallel_groups(&self) -> usize {
        let mut round = vec![0usize; self.measurements.len()];
        for (i, m) in self.measurements.iter().enumerate() {
            round[i] = m.adapt_set.iter().map(|&j| round[j] + 1).max().unwrap_or(0);
        }
        round.iter().map(|r| r + 1).max().unwrap_or(0)
    }

    pub fn depth_report(&self) -> DepthReport {
        let (layers, cx, cz) = match &self.clifford {
            CliffordPart::Circuit(g) => {
                let s = circuit::stats(g);
                (s.entangling_depth, s.cx_count, s.cz_count)
            }
            CliffordPart::Graph(gf) => {
                let prep = gf.register.prep_circuit();
                (prep.entangling_depth(), 0, gf.register.edge_count())
            }
        };
        DepthReport {
            entangling_layers: layers,
            cnot_count: cx,
            cz_count: cz,
            ancilla_count: self.ancilla_count(),
            parallel_groups: self.parallel_groups(),
        }
    }

    /// Replaces the Clifford part by the graph state it prepares from
    /// `|0…0⟩`. Only valid when the logical input is `|0…0⟩`, which is the
    /// case for patterns whose initial state is built into the Clifford part.
    pub fn to_graph_form(&self) -> Result<Pattern> {
        let gates = match &self.clifford {
            CliffordPart::Circuit(g) => g,
            CliffordPart::Graph(_) => return Ok(self.clone()),
        };
        let mut reg = GraphRegister::new_zero(self.total_qubits);
        reg.apply_circuit(gates)?;
        let mut out = self.clone();
        out.clifford = CliffordPart::Graph(GraphForm { register: reg });
        Ok(out)
    }

    /// Structural checks for patterns read from disk.
    pub fn validate(&self) -> Result<()> {
        let n = self.total_qubits;
        if self.main_map.len() != self.main_qubits {
            return Err(Error::LengthMismatch(self.main_map.len(), self.main_qubits));
        }
        let mut role = vec![false; n];
        let targets = self.measurements.iter().map(|m| m.target);
        for q in self.main_map.iter().copied().chain(self.spare.iter().copied()).chain(targets) {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, n });
            }
            if role[q] {
                return Err(Error::Invalid(format!("qubit {q} has two roles")));
            }
            role[q] = true;
        }
        for (i, m) in self.measurements.iter().enumerate() {
            if !m.base_angle.is_finite() {
                return Err(Error::NonFiniteAngle);
            }
            if m.adapt_set.iter().any(|&j| j >= i) {
                return Err(Error::Invalid(format!("adapt set of instruction {i} is not causal")));
            }
        }
        for c in &self.corrections {
            if c.control >= self.measurements.len() {
                return Err(Error::IndexOutOfRange {
                    index: c.control,
                    n: self.measurements.len(),
                });
            }
            if c.pauli.num_qubits() != self.main_qubits {
                return Err(Error::LengthMismatch(c.pauli.num_qubits(), self.main_qubits));
            }
        }
        match &self.clifford {
            CliffordPart::Circuit(g) => g.iter().try_for_each(|g| g.validate(n)),
            CliffordPart::Graph(gf) if gf.register.num_qubits() != n => {
                Err(Error::LengthMismatch(gf.register.num_qubits(), n))
            }
            CliffordPart::Graph(_) => Ok(()),
        }
    }
}

pub fn adaptive_angle(m: &MeasurementInstruction, outcomes: &[u8]) -> Result<f64> {
    let mut h = 0u8;
    for &j in &m.adapt_set {
        h ^= *outcomes.get(j).ok_or(Error::MissingOutcome(j))? & 1;
    }
    Ok(if h == 1 { -m.base_angle } else { m.base_angle })
}

/// Greedy ordered partition into commuting groups. Each rotation joins the
/// group right after the last group holding a rotation it anticommutes
/// with, so concatenating the groups keeps every non-commuting pair in order.
pub fn group_commuting(rotations: &[PauliRotation]) -> Result<Vec<Vec<usize>>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, r) in rotations.iter().enumerate() {
        let mut last_conflict = None;
        for (g, members) in groups.iter().enumerate() {
            for &j in members {
                if !rotations[j].string().commutes(r.string())? {
                    last_conflict = Some(g);
                }
            }
        }
        let slot = last_conflict.map_or(0, |g| g + 1);
        if slot == groups.len() {
            groups.push(vec![i]);
        } else {
            groups[slot].push(i);
        }
    }
    Ok(groups)
}
