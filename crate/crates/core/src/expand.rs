//! Constant-depth rewriting of Clifford circuits by gate teleportation.
//!
//! The circuit is cut into slices, one per entangling layer. Each slice runs
//! on its own copy of the register, the input and the copies are chained by
//! Bell pairs, and Bell measurements move the state forward. Bell
//! preparation, all slices and all Bell measurements each take one
//! entangling layer, so the result has three. The measurement byproducts are Paulis pushed through
//! the remaining slices into a frame on the output.

use rand::Rng;

use crate::circuit;
use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::graph::GraphRegister;
use crate::pauli::{CliffordGate, Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BellMeasurement {
    /// Holder of the logical qubit before `slice`.
    pub source: usize,
    /// Bell partner of the holder for `slice`.
    pub partner: usize,
    pub logical: usize,
    pub slice: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub num_logical: usize,
    pub total_qubits: usize,
    pub gates: Vec<CliffordGate>,
    /// Physical holder of each logical qubit at the end.
    pub outputs: Vec<usize>,
    /// Each is measured in Z after `gates`, giving outcomes `[source, partner]`.
    pub bell: Vec<BellMeasurement>,
    // per Bell measurement: frame factor for a `1` on source and on partner
    factors: Vec<(PauliString, PauliString)>,
}

impl Expansion {
    pub fn ancilla_count(&self) -> usize {
        self.total_qubits - self.num_logical
    }

    pub fn entangling_depth(&self) -> usize {
        circuit::entangling_depth_in_order(&self.gates)
    }

    /// Measured qubits in outcome order.
    pub fn measured(&self) -> Vec<usize> {
        self.bell.iter().flat_map(|b| [b.source, b.partner]).collect()
    }

    /// Logical Pauli `F` with output `= F·U|ψ⟩` (up to phase) for the given
    /// outcomes, two per Bell measurement.
    pub fn frame(&self, outcomes: &[u8]) -> Result<PauliString> {
        if outcomes.len() != 2 * self.bell.len() {
            return Err(Error::Arity {
                expected: 2 * self.bell.len(),
                got: outcomes.len(),
            });
        }
        let mut f = PauliString::identity(self.num_logical);
        for (k, (zf, xf)) in self.factors.iter().enumerate() {
            if outcomes[2 * k] == 1 {
                f = f.multiply(zf)?;
            }
            if outcomes[2 * k + 1] == 1 {
                f = f.multiply(xf)?;
            }
        }
        Ok(f.with_phase(0))
    }
}

/// Rewrites `gates` on `n` qubits into three entangling layers. Circuits of
/// entangling depth at most one come back unchanged.
pub fn expand_constant_depth(gates: &[CliffordGate], n: usize) -> Result<Expansion> {
    gates.iter().try_for_each(|g| g.validate(n))?;
    // slice gates by in-order entangling layer
    let mut level = vec![0usize; n];
    let mut tagged: Vec<(usize, CliffordGate)> = Vec::with_capacity(gates.len());
    for g in gates {
        let qs = g.qubits();
        if g.is_entangling() {
            let l = level[qs[0]].max(level[qs[1]]);
            level[qs[0]] = l + 1;
            level[qs[1]] = l + 1;
            tagged.push((l, *g));
        } else {
            tagged.push((level[qs[0]], *g));
        }
    }
    let depth = level.iter().copied().max().unwrap_or(0);
    if depth <= 1 {
        return Ok(Expansion {
            num_logical: n,
            total_qubits: n,
            gates: gates.to_vec(),
            outputs: (0..n).collect(),
            bell: Vec::new(),
            factors: Vec::new(),
        });
    }
    let mut slices: Vec<Vec<CliffordGate>> = vec![Vec::new(); depth];
    for (l, g) in tagged {
        slices[l.min(depth - 1)].push(g);
    }
    // slice t runs on holder(q, t); the input is teleported in as well, so
    // every slice sits between the Bell preparation and measurement layers
    let holder = |q: usize, t: usize| n + 2 * n * t + q;
    let partner = |q: usize, t: usize| n + 2 * n * t + n + q;
    let source = |q: usize, t: usize| if t == 0 { q } else { holder(q, t - 1) };
    let total = n + 2 * n * depth;

    let mut out = Vec::new();
    for t in 0..depth {
        for q in 0..n {
            out.push(CliffordGate::H(partner(q, t)));
            out.push(CliffordGate::CX(partner(q, t), holder(q, t)));
        }
    }
    for (t, slice) in slices.iter().enumerate() {
        out.extend(slice.iter().map(|g| g.map_qubits(|q| holder(q, t))));
    }
    let mut bell = Vec::new();
    let mut factors = Vec::new();
    for t in 0..depth {
        let rest: Vec<CliffordGate> = slices[t..].concat();
        for q in 0..n {
            let (s, a) = (source(q, t), partner(q, t));
            out.push(CliffordGate::CX(s, a));
            out.push(CliffordGate::H(s));
            bell.push(BellMeasurement {
                source: s,
                partner: a,
                logical: q,
                slice: t,
            });
            let z = PauliString::single(n, q, Pauli::Z)?.conjugate_by_circuit(&rest)?;
            let x = PauliString::single(n, q, Pauli::X)?.conjugate_by_circuit(&rest)?;
            factors.push((z, x));
        }
    }
    Ok(Expansion {
        num_logical: n,
        total_qubits: total,
        gates: out,
        outputs: (0..n).map(|q| holder(q, depth - 1)).collect(),
        bell,
        factors,
    })
}

/// Checks sampled branches of `exp` against `gates` through the Choi state:
/// each logical input is entangled with a reference qubit, the expansion is
/// run on the stabilizer simulator with random outcomes, the frame is
/// undone, and the output+reference state is compared with the original
/// circuit's Choi state. Returns the smallest fidelity seen.
pub fn verify_expansion<R: Rng + ?Sized>(
    gates: &[CliffordGate],
    exp: &Expansion,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = exp.num_logical;
    let mut expected = StateVector::zero(2 * n)?;
    for q in 0..n {
        expected.apply_h(n + q)?;
        expected.apply_gate(&CliffordGate::CX(n + q, q))?;
    }
    expected.apply_circuit(gates)?;

    let total = exp.total_qubits + n;
    let mut start = GraphRegister::new_zero(total);
    for q in 0..n {
        let r = exp.total_qubits + q;
        start.apply_gate(&CliffordGate::H(r))?;
        start.apply_gate(&CliffordGate::CX(r, q))?;
    }
    start.apply_circuit(&exp.gates)?;
    let measured = exp.measured();
    let mut worst: f64 = 1.0;
    for _ in 0..samples.max(1) {
        let mut reg = start.clone();
        let outcomes = measured
            .iter()
            .map(|&q| reg.measure_pauli(q, Pauli::Z, rng))
            .collect::<Result<Vec<u8>>>()?;
        let frame = exp.frame(&outcomes)?;
        for q in 0..n {
            let h = exp.outputs[q];
            match frame.get(q) {
                Pauli::X => reg.apply_gate(&CliffordGate::X(h))?,
                Pauli::Y => reg.apply_gate(&CliffordGate::Y(h))?,
                Pauli::Z => reg.apply_gate(&CliffordGate::Z(h))?,
                Pauli::I => {}
            }
        }
        let keep: Vec<usize> = exp
            .outputs
            .iter()
            .copied()
            .chain((0..n).map(|q| exp.total_qubits + q))
            .collect();
        let got = reg.induced(&keep)?.to_statevector()?;
        worst = worst.min(got.fidelity(&expected)?);
    }
    Ok(worst)
}
