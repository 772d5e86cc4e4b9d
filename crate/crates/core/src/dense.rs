//! Full statevector simulator used as ground truth.
//!
//! Amplitude index bit `q` is qubit `q`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::pauli::{CliffordGate, Pauli, PauliRotation, PauliString};

pub type C64 = Complex64;
pub type Matrix2 = [[C64; 2]; 2];

pub const DEFAULT_CAP: usize = 20;
pub const ENUMERATION_CAP: usize = 14;

const NORM_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn hadamard_matrix() -> Matrix2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

pub fn s_matrix() -> Matrix2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]
}

pub fn rz_matrix(theta: f64) -> Matrix2 {
    [
        [C64::from_polar(1.0, -theta / 2.0), c(0.0, 0.0)],
        [c(0.0, 0.0), C64::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn pauli_matrix(p: Pauli) -> Matrix2 {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    out
}

/// Single-qubit measurement basis: a Pauli basis, or `M(θ)` realised as
/// `Rz(θ)` then `H` then a Z-measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureBasis {
    Pauli(Pauli),
    Angle(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<StateVector> {
        StateVector::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<StateVector> {
        if n > DEFAULT_CAP {
            return Err(Error::Capacity { n, cap: DEFAULT_CAP });
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        if index >= amps.len() {
            return Err(Error::Invalid(format!("basis index {index} out of range")));
        }
        amps[index] = c(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<StateVector> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Invalid("amplitude count must be a power of two".into()));
        }
        let n = len.trailing_zeros() as usize;
        if n > DEFAULT_CAP {
            return Err(Error::Capacity { n, cap: DEFAULT_CAP });
        }
        let mut s = StateVector { n, amps };
        if s.norm() < 1e-300 {
            return Err(Error::Invalid("zero vector".into()));
        }
        s.normalize();
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let nrm = self.norm();
        if (nrm - 1.0).abs() > NORM_TOL {
            for a in &mut self.amps {
                *a /= nrm;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch(self.n, other.n));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::IndexOutOfRange { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn apply_matrix1(&mut self, q: usize, m: &Matrix2) -> Result<()> {
        self.check(q)?;
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        self.apply_matrix1(q, &hadamard_matrix())
    }

    pub fn apply_rz(&mut self, q: usize, theta: f64) -> Result<()> {
        self.apply_matrix1(q, &rz_matrix(theta))
    }

    fn apply_cx(&mut self, ctl: usize, tgt: usize) -> Result<()> {
        self.check(ctl)?;
        self.check(tgt)?;
        let (cb, tb) = (1usize << ctl, 1usize << tgt);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
        Ok(())
    }

    fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            CliffordGate::H(q) => self.apply_h(q),
            CliffordGate::S(q) => self.apply_matrix1(q, &s_matrix()),
            CliffordGate::Sdg(q) => {
                let mut m = s_matrix();
                m[1][1] = m[1][1].conj();
                self.apply_matrix1(q, &m)
            }
            CliffordGate::X(q) => self.apply_matrix1(q, &pauli_matrix(Pauli::X)),
            CliffordGate::Y(q) => self.apply_matrix1(q, &pauli_matrix(Pauli::Y)),
            CliffordGate::Z(q) => self.apply_matrix1(q, &pauli_matrix(Pauli::Z)),
            CliffordGate::CX(a, b) => self.apply_cx(a, b),
            CliffordGate::CZ(a, b) => self.apply_cz(a, b),
        }
    }

    pub fn apply_circuit(&mut self, gates: &[CliffordGate]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Applies the Pauli word as an operator, phase included.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch(p.num_qubits(), self.n));
        }
        self.amps = self.pauli_image(p);
        Ok(())
    }

    fn pauli_image(&self, p: &PauliString) -> Vec<C64> {
        let (xm, zm, ny) = masks(p);
        let global = C64::i().powu((p.phase() as u32 + ny) % 4);
        let mut out = vec![c(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            // P|i⟩ = i^{phase+ny} (-1)^{|i & z|} |i ^ x⟩ with Y = i·XZ
            let sign = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ xm] = global * a * sign;
        }
        out
    }

    /// `exp(-iθ/2·P)ψ = cos(θ/2)ψ − i·sin(θ/2)·Pψ`.
    pub fn apply_rotation(&mut self, r: &PauliRotation) -> Result<()> {
        if r.num_qubits() != self.n {
            return Err(Error::LengthMismatch(r.num_qubits(), self.n));
        }
        let image = self.pauli_image(r.string());
        let (co, si) = ((r.angle() / 2.0).cos(), (r.angle() / 2.0).sin());
        let f = c(0.0, -si);
        for (a, b) in self.amps.iter_mut().zip(image) {
            *a = *a * co + f * b;
        }
        Ok(())
    }

    pub fn expectation_pauli(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::LengthMismatch(p.num_qubits(), self.n));
        }
        let image = self.pauli_image(p);
        Ok(self
            .amps
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }

    /// `Σ cᵢ⟨Pᵢ⟩ + offset`.
    pub fn expectation(&self, h: &Hamiltonian) -> Result<f64> {
        let mut acc = h.offset();
        for (coef, p) in h.terms() {
            acc += coef * self.expectation_pauli(p)?;
        }
        Ok(acc)
    }

    pub fn probability(&self, q: usize, outcome: u8) -> Result<f64> {
        self.check(q)?;
        let bit = 1usize << q;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| ((i & bit) != 0) == (outcome == 1))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects qubit `q` onto `|outcome⟩` and renormalises; returns the Born
    /// probability. A zero-probability projection leaves the state untouched.
    pub fn project(&mut self, q: usize, outcome: u8) -> Result<f64> {
        let p = self.probability(q, outcome)?;
        if p <= 1e-300 {
            return Ok(0.0);
        }
        let bit = 1usize << q;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit) != 0) == (outcome == 1) {
                *a *= scale;
            } else {
                *a = c(0.0, 0.0);
            }
        }
        Ok(p)
    }

    fn rotate_to_z(&mut self, q: usize, basis: MeasureBasis) -> Result<()> {
        match basis {
            MeasureBasis::Pauli(Pauli::Z) | MeasureBasis::Pauli(Pauli::I) => Ok(()),
            MeasureBasis::Pauli(Pauli::X) => self.apply_h(q),
            MeasureBasis::Pauli(Pauli::Y) => {
                self.apply_gate(&CliffordGate::Sdg(q))?;
                self.apply_h(q)
            }
            MeasureBasis::Angle(theta) => {
                self.apply_rz(q, theta)?;
                self.apply_h(q)
            }
        }
    }

    /// Measures `q` in `basis`, leaving the qubit in `|outcome⟩` of the
    /// rotated frame.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        basis: MeasureBasis,
        rng: &mut R,
    ) -> Result<u8> {
        self.rotate_to_z(q, basis)?;
        let p1 = self.probability(q, 1)?;
        let outcome = u8::from(rng.gen::<f64>() < p1);
        self.project(q, outcome)?;
        Ok(outcome)
    }

    /// Forced-outcome variant of [`measure`](Self::measure); returns the probability.
    pub fn project_in_basis(&mut self, q: usize, basis: MeasureBasis, outcome: u8) -> Result<f64> {
        self.rotate_to_z(q, basis)?;
        self.project(q, outcome)
    }

    /// Born probabilities over the listed qubits; entry index bit `i` is the
    /// outcome of `qubits[i]`.
    pub fn distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for &q in qubits {
            self.check(q)?;
        }
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut k = 0;
            for (j, &q) in qubits.iter().enumerate() {
                k |= ((i >> q) & 1) << j;
            }
            out[k] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Places `logical` on `positions` of an `n`-qubit register whose other
    /// qubits are in the computational basis states given by `fixed`.
    pub fn embed(logical: &StateVector, n: usize, positions: &[usize], fixed: &[(usize, u8)]) -> Result<StateVector> {
        if positions.len() != logical.n {
            return Err(Error::LengthMismatch(positions.len(), logical.n));
        }
        if positions.len() + fixed.len() != n {
            return Err(Error::Invalid("embedding must cover every qubit".into()));
        }
        let mut base = 0usize;
        for &(q, b) in fixed {
            base |= (b as usize) << q;
        }
        let mut out = StateVector::zero(n)?;
        out.amps[0] = c(0.0, 0.0);
        for (k, &a) in logical.amps.iter().enumerate() {
            let mut idx = base;
            for (j, &q) in positions.iter().enumerate() {
                idx |= ((k >> j) & 1) << q;
            }
            out.amps[idx] = a;
        }
        Ok(out)
    }

    /// Amplitudes of the listed qubits when every other qubit is in the
    /// given basis state, renormalised, together with the slice's weight.
    /// Fails if that weight is zero.
    pub fn slice(&self, positions: &[usize], fixed: &[(usize, u8)]) -> Result<(StateVector, f64)> {
        let mut base = 0usize;
        for &(q, b) in fixed {
            base |= (b as usize) << q;
        }
        let mut amps = vec![c(0.0, 0.0); 1 << positions.len()];
        for (k, a) in amps.iter_mut().enumerate() {
            let mut idx = base;
            for (j, &q) in positions.iter().enumerate() {
                idx |= ((k >> j) & 1) << q;
            }
            *a = self.amps[idx];
        }
        let weight = amps.iter().map(|a| a.norm_sqr()).sum();
        Ok((StateVector::from_amplitudes(amps)?, weight))
    }
}

fn masks(p: &PauliString) -> (usize, usize, u32) {
    let (mut xm, mut zm, mut ny) = (0usize, 0usize, 0u32);
    for q in 0..p.num_qubits() {
        let (x, z) = p.get(q).bits();
        xm |= (x as usize) << q;
        zm |= (z as usize) << q;
        ny += (x && z) as u32;
    }
    (xm, zm, ny)
}

/// One measurement branch: outcomes, probability and normalised post-state.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub state: StateVector,
}

/// Enumerates every outcome sequence of `count` sequential measurements.
/// `step(prefix)` names the qubit and basis of the next measurement given
/// earlier outcomes, which is how adaptive bases are expressed.
/// Zero-probability branches are dropped.
pub fn branch_enumerate<F>(state: &StateVector, count: usize, step: F) -> Result<Vec<Branch>>
where
    F: Fn(&[u8]) -> Result<(usize, MeasureBasis)>,
{
    if count > ENUMERATION_CAP {
        return Err(Error::Capacity { n: count, cap: ENUMERATION_CAP });
    }
    let mut frontier = vec![Branch {
        outcomes: Vec::new(),
        probability: 1.0,
        state: state.clone(),
    }];
    for _ in 0..count {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for b in frontier {
            let (q, basis) = step(&b.outcomes)?;
            let mut rotated = b.state.clone();
            rotated.rotate_to_z(q, basis)?;
            for outcome in [0u8, 1] {
                let mut s = rotated.clone();
                let p = s.project(q, outcome)?;
                if p > 1e-14 {
                    let mut outcomes = b.outcomes.clone();
                    outcomes.push(outcome);
                    next.push(Branch {
                        outcomes,
                        probability: b.probability * p,
                        state: s,
                    });
                }
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Fixed (non-adaptive) measurement list.
pub fn branch_enumerate_fixed(state: &StateVector, measured: &[(usize, MeasureBasis)]) -> Result<Vec<Branch>> {
    branch_enumerate(state, measured.len(), |prefix| Ok(measured[prefix.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn z_rotation_only_changes_phase() {
        let mut s = StateVector::zero(1).unwrap();
        let r = PauliRotation::parse("Z", 1, 0.7).unwrap();
        s.apply_rotation(&r).unwrap();
        let zero = StateVector::zero(1).unwrap();
        assert!((s.fidelity(&zero).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_rotation_by_pi_flips() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_rotation(&PauliRotation::parse("X", 1, PI).unwrap()).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        assert!((s.fidelity(&one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_state_branches() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_h(0).unwrap();
        let br = branch_enumerate_fixed(&s, &[(0, MeasureBasis::Pauli(Pauli::Z))]).unwrap();
        assert_eq!(br.len(), 2);
        for b in &br {
            assert!((b.probability - 0.5).abs() < 1e-12);
            assert!((b.state.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn z_expectation() {
        let s = StateVector::zero(1).unwrap();
        assert!((s.expectation_pauli(&"Z".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(StateVector::zero(21), Err(Error::Capacity { .. })));
    }

    #[test]
    fn embed_and_slice_are_inverse() {
        let mut l = StateVector::zero(2).unwrap();
        l.apply_h(0).unwrap();
        l.apply_gate(&CliffordGate::CX(0, 1)).unwrap();
        let big = StateVector::embed(&l, 4, &[3, 1], &[(0, 1), (2, 0)]).unwrap();
        let (back, w) = big.slice(&[3, 1], &[(0, 1), (2, 0)]).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        assert!((back.fidelity(&l).unwrap() - 1.0).abs() < 1e-12);
    }
}
