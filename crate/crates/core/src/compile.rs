//! Compiler from Pauli-rotation circuits to standard-form patterns.
//!
//! Each rotation `exp(−iθ/2·P)` is emitted as: basis change of the support
//! to `Z`, a parity fan onto the carrier, the `Rz` teleportation gadget
//! (fresh `|+⟩` qubit, CZ, measure the old carrier in `M(θ)`, `H` on the
//! new carrier), the inverse fan onto the new carrier, and the inverse basis
//! change. The gadget leaves a byproduct `Z^s` on the carrier, which is `P^s`
//! on the logical register; pushing it to the end flips later angles whose
//! strings anticommute with `P`.

use crate::circuit;
use crate::dense::StateVector;
use crate::error::{Error, Result};
use crate::hamiltonian::diagonalize;
use crate::pattern::{
    group_commuting, CliffordPart, CorrectionTerm, Layout, MeasurementInstruction, Pattern,
};
use crate::pauli::{CliffordGate, Pauli, PauliRotation, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Compute parities with a log-depth CX tree instead of a ladder.
    pub parallel_fan: bool,
    /// Diagonalise each commuting group with one shared Clifford.
    pub diagonalize_groups: bool,
    /// Cancel inverse pairs and reschedule the Clifford part.
    pub optimize: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            parallel_fan: false,
            diagonalize_groups: false,
            optimize: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitItem {
    Rotation(PauliRotation),
    Clifford(Vec<CliffordGate>),
}

/// A circuit of Pauli rotations with interleaved Clifford blocks, run on
/// `initial|0…0⟩` (or on an arbitrary input when verifying).
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitInput {
    pub num_qubits: usize,
    pub initial: Vec<CliffordGate>,
    pub items: Vec<CircuitItem>,
}

impl CircuitInput {
    pub fn from_rotations(num_qubits: usize, initial: Vec<CliffordGate>, rotations: Vec<PauliRotation>) -> CircuitInput {
        CircuitInput {
            num_qubits,
            initial,
            items: rotations.into_iter().map(CircuitItem::Rotation).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        self.initial.iter().try_for_each(|g| g.validate(n))?;
        for item in &self.items {
            match item {
                CircuitItem::Rotation(r) if r.num_qubits() != n => {
                    return Err(Error::LengthMismatch(r.num_qubits(), n))
                }
                CircuitItem::Rotation(_) => {}
                CircuitItem::Clifford(gs) => gs.iter().try_for_each(|g| g.validate(n))?,
            }
        }
        Ok(())
    }

    /// Moves every Clifford block in front of the rotations. A block `g`
    /// after rotations `R₁…Rₖ` satisfies `g·Rₖ⋯R₁ = (gRₖg†)⋯(gR₁g†)·g`, so
    /// the strings before the block are conjugated by it.
    pub fn normalize(&self) -> Result<(Vec<CliffordGate>, Vec<PauliRotation>)> {
        self.validate()?;
        let mut prefix = self.initial.clone();
        let mut rotations: Vec<PauliRotation> = Vec::new();
        for item in &self.items {
            match item {
                CircuitItem::Rotation(r) => rotations.push(r.clone()),
                CircuitItem::Clifford(gs) => {
                    for r in rotations.iter_mut() {
                        let s = r.string().conjugate_by_circuit(gs)?;
                        *r = PauliRotation::from_signed(s, r.angle())?;
                    }
                    prefix.extend(gs.iter().copied());
                }
            }
        }
        Ok((prefix, rotations))
    }

    /// Applies the circuit (initial gates included) to `state` directly.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        state.apply_circuit(&self.initial)?;
        for item in &self.items {
            match item {
                CircuitItem::Rotation(r) => state.apply_rotation(r)?,
                CircuitItem::Clifford(gs) => state.apply_circuit(gs)?,
            }
        }
        Ok(())
    }
}

struct Builder {
    n: usize,
    layout: Layout,
    opts: CompileOptions,
    gates: Vec<CliffordGate>,
    total: usize,
    main_map: Vec<usize>,
    ancilla: Option<usize>,
    measurements: Vec<MeasurementInstruction>,
    corrections: Vec<CorrectionTerm>,
    generators: Vec<PauliRotation>,
    origin: Vec<usize>,
    order: u8,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.total += 1;
        self.total - 1
    }

    // Parity of `sources` onto `target`: (tree gates, feeder qubits).
    fn fan(&self, sources: &[usize]) -> (Vec<CliffordGate>, Vec<usize>) {
        if !self.opts.parallel_fan {
            return (Vec::new(), sources.to_vec());
        }
        // slot 0 stands for the target; pairs (odd → even) merge per round
        let mut level: Vec<Option<usize>> = std::iter::once(None).chain(sources.iter().map(|&q| Some(q))).collect();
        let (mut tree, mut feeders) = (Vec::new(), Vec::new());
        while level.len() > 1 {
            let mut next = Vec::new();
            for pair in level.chunks(2) {
                match pair {
                    [None, Some(s)] => {
                        feeders.push(*s);
                        next.push(None);
                    }
                    [Some(a), Some(b)] => {
                        tree.push(CliffordGate::CX(*b, *a));
                        next.push(Some(*a));
                    }
                    [x] => next.push(*x),
                    _ => unreachable!("target occupies slot 0 only"),
                }
            }
            level = next;
        }
        (tree, feeders)
    }

    // Rz(θ) teleportation from `carrier` to a fresh qubit; returns it.
    fn gadget(&mut self, carrier: usize, angle: f64) -> usize {
        let b = self.fresh();
        self.gates.push(CliffordGate::H(b));
        self.gates.push(CliffordGate::CZ(carrier, b));
        self.gates.push(CliffordGate::H(b));
        self.measurements.push(MeasurementInstruction {
            target: carrier,
            base_angle: angle,
            adapt_set: Vec::new(),
        });
        b
    }

    // Maps the support onto Z, qubit-ascending (X = HZH, Y = S·HZH·S†);
    // `undo` gives the inverse sequence.
    fn basis_change(&self, string: &PauliString, undo: bool) -> Vec<CliffordGate> {
        let mut out = Vec::new();
        for q in string.support() {
            let p = self.main_map[q];
            match string.get(q) {
                Pauli::X => out.push(CliffordGate::H(p)),
                Pauli::Y => out.extend([CliffordGate::Sdg(p), CliffordGate::H(p)]),
                _ => {}
            }
        }
        if undo {
            out = out.iter().rev().map(|g| g.inverse()).collect();
        }
        out
    }

    /// Emits `exp(−i·angle/2·string)`; `generator` is the logical rotation
    /// recorded for the correction and adaptivity.
    fn rotation(&mut self, string: &PauliString, angle: f64, generator: &PauliRotation, origin: usize) {
        let support = string.support();
        let pre = self.basis_change(string, false);
        self.gates.extend(pre);
        let phys: Vec<usize> = support.iter().map(|&q| self.main_map[q]).collect();
        let (carrier, sources, carrier_logical) = match self.layout {
            Layout::StarAncilla => {
                let a = match self.ancilla {
                    Some(a) => a,
                    None => self.fresh(),
                };
                (a, phys.clone(), None)
            }
            Layout::Star => {
                let c = *support.last().expect("non-identity string");
                (self.main_map[c], phys[..phys.len() - 1].to_vec(), Some(c))
            }
        };
        // ladder order variant: 0 ascending, 1 descending, 2/3 rotated
        let mut sources = sources;
        match self.order {
            1 => sources.reverse(),
            2 => { let k = sources.len().min(1); sources.rotate_left(k) },
            3 => { let k = sources.len().min(1); sources.rotate_right(k) },
            _ => {}
        }
        let (tree, feeders) = self.fan(&sources);
        self.gates.extend(tree.iter().copied());
        self.gates.extend(feeders.iter().map(|&f| CliffordGate::CX(f, carrier)));
        let b = self.gadget(carrier, angle);
        match carrier_logical {
            Some(c) => self.main_map[c] = b,
            None => self.ancilla = Some(b),
        }
        self.gates.extend(feeders.iter().map(|&f| CliffordGate::CX(f, b)));
        self.gates.extend(tree.iter().rev().copied());
        let post = self.basis_change(string, true);
        self.gates.extend(post);
        self.corrections.push(CorrectionTerm {
            control: self.measurements.len() - 1,
            pauli: generator.string().clone(),
        });
        self.generators.push(generator.clone());
        self.origin.push(origin);
    }

    fn mapped(&self, gates: &[CliffordGate]) -> Vec<CliffordGate> {
        gates.iter().map(|g| g.map_qubits(|q| self.main_map[q])).collect()
    }

    fn group(&mut self, rotations: &[PauliRotation], origin: &[usize]) -> Result<()> {
        let strings: Vec<PauliString> = rotations.iter().map(|r| r.string().clone()).collect();
        let (cliff, diag) = diagonalize(&strings)?;
        let fwd = self.mapped(&cliff);
        self.gates.extend(fwd);
        for k in nearest_neighbour_order(&diag) {
            let sign = diag[k].sign().expect("Hermitian image");
            let z = diag[k].clone().with_phase(0);
            self.rotation(&z, sign * rotations[k].angle(), &rotations[k], origin[k]);
        }
        let inv: Vec<CliffordGate> = cliff.iter().rev().map(|g| g.inverse()).collect();
        let back = self.mapped(&inv);
        self.gates.extend(back);
        Ok(())
    }
}

// Visits diagonal strings so consecutive supports differ little.
fn nearest_neighbour_order(diag: &[PauliString]) -> Vec<usize> {
    let mut left: Vec<usize> = (0..diag.len()).collect();
    let mut order = Vec::with_capacity(diag.len());
    let mut prev: Option<Vec<usize>> = None;
    while !left.is_empty() {
        let pick = match &prev {
            None => 0,
            Some(p) => {
                let dist = |k: usize| diag[k].support().iter().filter(|q| !p.contains(q)).count()
                    + p.iter().filter(|q| !diag[k].support().contains(q)).count();
                (0..left.len()).min_by_key(|&i| (dist(left[i]), left[i])).unwrap()
            }
        };
        let k = left.remove(pick);
        prev = Some(diag[k].support());
        order.push(k);
    }
    order
}

/// Compiles with default options.
pub fn compile(rotations: &[PauliRotation], layout: Layout, initial: &[CliffordGate]) -> Result<Pattern> {
    compile_with(rotations, layout, initial, &CompileOptions::default())
}

pub fn compile_input(input: &CircuitInput, layout: Layout, opts: &CompileOptions) -> Result<Pattern> {
    let (initial, rotations) = input.normalize()?;
    compile_sized(input.num_qubits, &rotations, layout, &initial, opts)
}

pub fn compile_with(
    rotations: &[PauliRotation],
    layout: Layout,
    initial: &[CliffordGate],
    opts: &CompileOptions,
) -> Result<Pattern> {
    let n = rotations.first().map(|r| r.num_qubits()).ok_or_else(|| {
        Error::Invalid("empty rotation list needs an explicit register size".into())
    })?;
    compile_sized(n, rotations, layout, initial, opts)
}

/// Compiles on an explicit register size, so an empty rotation list is allowed.
///
/// With `optimize` set, several orderings of the parity ladders are tried
/// and the one with the fewest entangling layers is kept.
pub fn compile_sized(
    n: usize,
    rotations: &[PauliRotation],
    layout: Layout,
    initial: &[CliffordGate],
    opts: &CompileOptions,
) -> Result<Pattern> {
    for r in rotations {
        if r.num_qubits() != n {
            return Err(Error::LengthMismatch(r.num_qubits(), n));
        }
    }
    initial.iter().try_for_each(|g| g.validate(n))?;
    if !opts.optimize {
        return build(n, rotations, layout, initial, opts, 0);
    }
    let mut best: Option<(usize, Pattern)> = None;
    for order in 0..4 {
        let p = build(n, rotations, layout, initial, opts, order)?;
        let d = p.depth_report().entangling_layers;
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, p));
        }
    }
    Ok(best.expect("at least one variant").1)
}

fn build(
    n: usize,
    rotations: &[PauliRotation],
    layout: Layout,
    initial: &[CliffordGate],
    opts: &CompileOptions,
    order: u8,
) -> Result<Pattern> {
    let mut b = Builder {
        n,
        layout,
        opts: *opts,
        gates: initial.to_vec(),
        total: n,
        main_map: (0..n).collect(),
        ancilla: None,
        measurements: Vec::new(),
        corrections: Vec::new(),
        generators: Vec::new(),
        origin: Vec::new(),
        order,
    };
    if opts.diagonalize_groups {
        for g in group_commuting(rotations)? {
            let members: Vec<PauliRotation> = g.iter().map(|&i| rotations[i].clone()).collect();
            b.group(&members, &g)?;
        }
    } else {
        for (i, r) in rotations.iter().enumerate() {
            b.rotation(r.string(), r.angle(), r, i);
        }
    }
    // Report measurements in input order. Reordering only ever swaps
    // commuting rotations, so anticommuting pairs keep their order.
    let mut perm: Vec<usize> = (0..b.origin.len()).collect();
    perm.sort_by_key(|&k| b.origin[k]);
    let mut rank = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        rank[old] = new;
    }
    b.measurements = perm.iter().map(|&k| b.measurements[k].clone()).collect();
    b.generators = perm.iter().map(|&k| b.generators[k].clone()).collect();
    b.corrections = perm
        .iter()
        .map(|&k| {
            let c = &b.corrections[k];
            CorrectionTerm { control: rank[c.control], pauli: c.pauli.clone() }
        })
        .collect();
    for i in 0..b.generators.len() {
        let adapt = (0..i)
            .filter(|&j| !b.generators[j].string().commutes_unchecked(b.generators[i].string()))
            .collect();
        b.measurements[i].adapt_set = adapt;
    }
    let mut gates = b.gates;
    if opts.optimize {
        gates = circuit::schedule(&circuit::peephole(&gates)).0;
    }
    debug_assert_eq!(b.main_map.len(), b.n);
    Ok(Pattern {
        main_qubits: n,
        total_qubits: b.total,
        layout,
        main_map: b.main_map,
        spare: b.ancilla.into_iter().collect(),
        clifford: CliffordPart::Circuit(gates),
        measurements: b.measurements,
        corrections: b.corrections,
        generators: b.generators,
    })
}
