//! Hybrid execution of graph-form patterns: the main register is sampled on
//! the stabilizer simulator, and only the ancilla measurements run on a
//! backend.
//!
//! Reading the main holders in Z commutes with the ancilla measurements, so
//! each shot first samples the main bits, which leaves the ancillas in a
//! stabilizer state that depends only on those bits. The backend measures
//! that state in the adaptive `M(θ)` bases, and the X parts of the fired
//! corrections flip main bits (Z parts do nothing to a Z read-out).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{format_bits, parse_bits};
use crate::dense::{branch_enumerate, MeasureBasis, StateVector, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::graph::GraphRegister;
use crate::hamiltonian::{Estimate, Hamiltonian};
use crate::pattern::{CliffordPart, Pattern};
use crate::pauli::{CliffordGate, Pauli, PauliString};

pub type Counts = BTreeMap<String, u64>;

/// Stabilizer state left on the non-main qubits after the main read-out.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaState {
    /// Physical qubits kept, in register order.
    pub qubits: Vec<usize>,
    pub register: GraphRegister,
    /// Position in `qubits` of each measurement target, in instruction order.
    pub targets: Vec<usize>,
}

impl AncillaState {
    /// Clifford circuit preparing the state from `|0…0⟩`.
    pub fn prep_circuit(&self) -> Vec<CliffordGate> {
        self.register.prep_circuit().gates
    }
}

/// One measurement of the ancilla program, in local indices.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaMeasurement {
    pub target: usize,
    pub base_angle: f64,
    pub adapt_set: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ShotRecord {
    /// Raw main read-out, one entry per logical main qubit.
    pub main_bits: Vec<u8>,
    pub ancilla_state: Arc<AncillaState>,
    /// For each main qubit, the `(instruction, Pauli)` pairs acting on it.
    pub correction_map: Vec<Vec<(usize, Pauli)>>,
    pub ancilla_bits: Vec<u8>,
    pub corrected_bits: Vec<u8>,
}

/// Where ancilla programs run. `prepare` sees a stabilizer state and the
/// measurement list once per distinct main outcome; `run` returns one
/// outcome per instruction, honouring adaptive angles in order.
pub trait Backend: Sync {
    type Prepared: Send + Sync;

    fn prepare(&self, state: &AncillaState, program: &[AncillaMeasurement]) -> Result<Self::Prepared>;

    fn run(&self, prepared: &Self::Prepared, rng: &mut ChaCha8Rng) -> Result<Vec<u8>>;
}

/// Statevector backend. Non-adaptive programs are turned into one outcome
/// distribution per preparation; adaptive ones are measured shot by shot.
#[derive(Clone, Copy, Debug)]
pub struct DenseBackend {
    pub cap: usize,
}

impl Default for DenseBackend {
    fn default() -> Self {
        DenseBackend { cap: DEFAULT_CAP }
    }
}

pub enum DensePrepared {
    Table { cdf: Vec<f64> },
    Sequential { state: StateVector, program: Vec<AncillaMeasurement> },
}

impl Backend for DenseBackend {
    type Prepared = DensePrepared;

    fn prepare(&self, state: &AncillaState, program: &[AncillaMeasurement]) -> Result<DensePrepared> {
        let n = state.register.num_qubits();
        if n > self.cap {
            return Err(Error::Capacity { n, cap: self.cap });
        }
        let mut sv = state.register.to_statevector()?;
        if program.iter().all(|m| m.adapt_set.is_empty()) {
            for m in program {
                sv.apply_rz(m.target, m.base_angle)?;
                sv.apply_h(m.target)?;
            }
            let targets: Vec<usize> = program.iter().map(|m| m.target).collect();
            let mut acc = 0.0;
            let cdf = sv
                .distribution(&targets)?
                .into_iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            Ok(DensePrepared::Table { cdf })
        } else {
            Ok(DensePrepared::Sequential {
                state: sv,
                program: program.to_vec(),
            })
        }
    }

    fn run(&self, prepared: &DensePrepared, rng: &mut ChaCha8Rng) -> Result<Vec<u8>> {
        match prepared {
            DensePrepared::Table { cdf } => {
                let total = cdf.last().copied().unwrap_or(1.0);
                let u = rng.gen::<f64>() * total;
                let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                let m = cdf.len().trailing_zeros() as usize;
                Ok((0..m).map(|i| ((k >> i) & 1) as u8).collect())
            }
            DensePrepared::Sequential { state, program } => {
                let mut s = state.clone();
                let mut out: Vec<u8> = Vec::with_capacity(program.len());
                for m in program {
                    let h = m.adapt_set.iter().fold(0u8, |h, &j| h ^ out[j]);
                    let theta = if h == 1 { -m.base_angle } else { m.base_angle };
                    out.push(s.measure(m.target, MeasureBasis::Angle(theta), rng)?);
                }
                Ok(out)
            }
        }
    }
}

fn graph_register(pattern: &Pattern) -> Result<&GraphRegister> {
    match &pattern.clifford {
        CliffordPart::Graph(gf) => Ok(&gf.register),
        CliffordPart::Circuit(_) => Err(Error::NotGraphForm),
    }
}

/// For each main qubit, the corrections touching it.
pub fn correction_map(pattern: &Pattern) -> Vec<Vec<(usize, Pauli)>> {
    let mut map = vec![Vec::new(); pattern.main_qubits];
    for c in &pattern.corrections {
        for q in c.pauli.support() {
            map[q].push((c.control, c.pauli.get(q)));
        }
    }
    map
}

fn ancilla_state(pattern: &Pattern, reg: &GraphRegister) -> Result<AncillaState> {
    let qubits: Vec<usize> = (0..pattern.total_qubits)
        .filter(|q| !pattern.main_map.contains(q))
        .collect();
    let targets = pattern
        .measurements
        .iter()
        .map(|m| qubits.iter().position(|&q| q == m.target).expect("targets are not main holders"))
        .collect();
    Ok(AncillaState {
        register: reg.induced(&qubits)?,
        qubits,
        targets,
    })
}

fn program(state: &AncillaState, pattern: &Pattern) -> Vec<AncillaMeasurement> {
    pattern
        .measurements
        .iter()
        .zip(&state.targets)
        .map(|(m, &t)| AncillaMeasurement {
            target: t,
            base_angle: m.base_angle,
            adapt_set: m.adapt_set.clone(),
        })
        .collect()
}

fn apply_flips(main_bits: &[u8], map: &[Vec<(usize, Pauli)>], ancilla_bits: &[u8]) -> Vec<u8> {
    main_bits
        .iter()
        .zip(map)
        .map(|(&b, controls)| {
            controls
                .iter()
                .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
                .fold(b, |acc, &(c, _)| acc ^ ancilla_bits[c])
        })
        .collect()
}

// samples the main register; returns bits and the collapsed register
fn sample_main<R: Rng + ?Sized>(pattern: &Pattern, reg: &GraphRegister, rng: &mut R) -> Result<(Vec<u8>, GraphRegister)> {
    let mut r = reg.clone();
    let bits = pattern
        .main_map
        .iter()
        .map(|&q| r.measure_pauli(q, Pauli::Z, rng))
        .collect::<Result<Vec<u8>>>()?;
    Ok((bits, r))
}

/// Samples the main register, ignoring the correction layer, and extracts
/// the ancilla state for that outcome. Ancilla fields stay empty and
/// `corrected_bits` equals `main_bits`.
pub fn simulate_main<R: Rng + ?Sized>(pattern: &Pattern, rng: &mut R) -> Result<ShotRecord> {
    let reg = graph_register(pattern)?;
    let (main_bits, collapsed) = sample_main(pattern, reg, rng)?;
    Ok(ShotRecord {
        corrected_bits: main_bits.clone(),
        main_bits,
        ancilla_state: Arc::new(ancilla_state(pattern, &collapsed)?),
        correction_map: correction_map(pattern),
        ancilla_bits: Vec::new(),
    })
}

/// Runs `shots` shots; shot `k` draws from stream `k` of `seed`, so the
/// record stream is fixed by `(seed, pattern)`. Ancilla states are built
/// once per distinct main outcome, on first use.
pub fn execute_records<B: Backend>(pattern: &Pattern, shots: usize, backend: &B, seed: u64) -> Result<Vec<ShotRecord>> {
    if shots == 0 {
        return Err(Error::Invalid("at least one shot is needed".into()));
    }
    let reg = graph_register(pattern)?;
    let map = correction_map(pattern);
    type Entry<P> = Arc<(Arc<AncillaState>, P)>;
    let memo: Mutex<HashMap<Vec<u8>, Entry<B::Prepared>>> = Mutex::new(HashMap::new());
    (0..shots as u64)
        .into_par_iter()
        .map(|shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot);
            let (main_bits, collapsed) = sample_main(pattern, reg, &mut rng)?;
            let cached = memo.lock().expect("memo lock").get(&main_bits).cloned();
            let entry = match cached {
                Some(e) => e,
                None => {
                    let state = ancilla_state(pattern, &collapsed)?;
                    let prepared = backend.prepare(&state, &program(&state, pattern))?;
                    let e = Arc::new((Arc::new(state), prepared));
                    memo.lock().expect("memo lock").insert(main_bits.clone(), e.clone());
                    e
                }
            };
            let ancilla_bits = backend.run(&entry.1, &mut rng)?;
            Ok(ShotRecord {
                corrected_bits: apply_flips(&main_bits, &map, &ancilla_bits),
                main_bits,
                ancilla_state: entry.0.clone(),
                correction_map: map.clone(),
                ancilla_bits,
            })
        })
        .collect()
}

/// Counts of corrected main bitstrings (qubit 0 rightmost).
pub fn execute<B: Backend>(pattern: &Pattern, shots: usize, backend: &B, seed: u64) -> Result<Counts> {
    let mut counts = Counts::new();
    for r in execute_records(pattern, shots, backend, seed)? {
        *counts.entry(format_bits(&r.corrected_bits)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Empirical distribution indexed like the dense oracle (bit `q` = qubit `q`).
pub fn counts_to_distribution(counts: &Counts, n: usize) -> Result<Vec<f64>> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::Invalid("no shots".into()));
    }
    let mut p = vec![0.0; 1 << n];
    for (k, &c) in counts {
        let bits = parse_bits(k)?;
        if bits.len() != n {
            return Err(Error::LengthMismatch(bits.len(), n));
        }
        let idx = bits.iter().enumerate().fold(0, |a, (q, &b)| a | ((b as usize) << q));
        p[idx] += c as f64 / total as f64;
    }
    Ok(p)
}

/// Estimate of a diagonal observable from corrected counts, with the
/// per-shot standard error.
pub fn expectation_from_counts(counts: &Counts, observable: &Hamiltonian) -> Result<Estimate> {
    for (_, p) in observable.terms() {
        if !p.is_diagonal() {
            return Err(Error::NonDiagonal(p.to_string()));
        }
    }
    let (mut n, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
    for (k, &c) in counts {
        let bits = parse_bits(k)?;
        if bits.len() != observable.num_qubits() {
            return Err(Error::LengthMismatch(bits.len(), observable.num_qubits()));
        }
        let v: f64 = observable.offset()
            + observable
                .terms()
                .map(|(coef, p)| {
                    let parity = p.support().iter().filter(|&&q| bits[q] == 1).count() % 2;
                    if parity == 1 {
                        -coef
                    } else {
                        coef
                    }
                })
                .sum::<f64>();
        n += c;
        sum += v * c as f64;
        sum_sq += v * v * c as f64;
    }
    if n == 0 {
        return Err(Error::Invalid("no shots".into()));
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = if n > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        value: mean,
        std_error: (var / nf).sqrt(),
    })
}

/// Hybrid estimate of an observable diagonal in the main read-out basis.
pub fn expectation<B: Backend>(
    pattern: &Pattern,
    observable: &Hamiltonian,
    shots: usize,
    backend: &B,
    seed: u64,
) -> Result<Estimate> {
    if observable.num_qubits() != pattern.main_qubits {
        return Err(Error::LengthMismatch(observable.num_qubits(), pattern.main_qubits));
    }
    for (_, p) in observable.terms() {
        if !p.is_diagonal() {
            return Err(Error::NonDiagonal(p.to_string()));
        }
    }
    expectation_from_counts(&execute(pattern, shots, backend, seed)?, observable)
}

fn hellinger(p: &[f64], q: &[f64]) -> f64 {
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    s * s
}

/// Hellinger fidelity rescaled so the uniform distribution scores 0 and a
/// perfect match scores 1.
pub fn hellinger_normalized(p_ideal: &[f64], p_measured: &[f64]) -> Result<f64> {
    if p_ideal.len() != p_measured.len() {
        return Err(Error::LengthMismatch(p_ideal.len(), p_measured.len()));
    }
    for p in [p_ideal, p_measured] {
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-9 || p.iter().any(|&x| x < 0.0) {
            return Err(Error::NotNormalized(s));
        }
    }
    let u = vec![1.0 / p_ideal.len() as f64; p_ideal.len()];
    let fd = hellinger(p_ideal, &u);
    if (1.0 - fd).abs() < 1e-15 {
        return Err(Error::Invalid("ideal distribution is uniform".into()));
    }
    Ok((hellinger(p_ideal, p_measured) - fd) / (1.0 - fd))
}

/// Both sides of the main/ancilla split of a Z-string expectation, computed
/// exactly: the direct value on the corrected output, and the sum over main
/// outcomes `n` of `p(n)·(−1)^{parity of n on the string}·⟨𝒵_a⟩ₙ`, where
/// `𝒵_a` is the parity of the ancilla outcomes whose corrections flip the
/// string's support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitCheck {
    pub direct: f64,
    pub split: f64,
    pub main_outcomes: usize,
    /// Whether all main outcomes were equally likely.
    pub uniform: bool,
}

pub fn split_expectation(pattern: &Pattern, string: &PauliString) -> Result<SplitCheck> {
    if string.num_qubits() != pattern.main_qubits {
        return Err(Error::LengthMismatch(string.num_qubits(), pattern.main_qubits));
    }
    if !string.is_diagonal() {
        return Err(Error::NonDiagonal(string.to_string()));
    }
    let reg = graph_register(pattern)?;
    let support = string.support();
    let sign = string.sign().unwrap_or(1.0);

    let dist = crate::verify::pattern_distribution(pattern)?;
    let direct = sign
        * dist
            .iter()
            .enumerate()
            .map(|(k, p)| if support.iter().filter(|&&q| (k >> q) & 1 == 1).count() % 2 == 1 { -p } else { *p })
            .sum::<f64>();

    // ancilla outcomes that flip the parity of the support
    let mut flips = vec![0u8; pattern.measurements.len()];
    for (q, controls) in correction_map(pattern).iter().enumerate() {
        if support.contains(&q) {
            for &(c, p) in controls {
                if matches!(p, Pauli::X | Pauli::Y) {
                    flips[c] ^= 1;
                }
            }
        }
    }

    let mut outcomes: Vec<(Vec<u8>, f64, GraphRegister)> = vec![(Vec::new(), 1.0, reg.clone())];
    for &h in &pattern.main_map {
        let mut next = Vec::new();
        for (bits, p, r) in outcomes {
            for o in [0u8, 1] {
                let mut s = r.clone();
                let po = s.project(h, Pauli::Z, o)?;
                if po > 0.0 {
                    let mut b = bits.clone();
                    b.push(o);
                    next.push((b, p * po, s));
                }
            }
        }
        outcomes = next;
    }
    let mut split = 0.0;
    let p0 = outcomes[0].1;
    let uniform = outcomes.iter().all(|(_, p, _)| (p - p0).abs() < 1e-12);
    for (bits, p, r) in &outcomes {
        let state = ancilla_state(pattern, r)?;
        let prog = program(&state, pattern);
        let sv = state.register.to_statevector()?;
        let branches = branch_enumerate(&sv, prog.len(), |prefix| {
            let m = &prog[prefix.len()];
            let h = m.adapt_set.iter().fold(0u8, |h, &j| h ^ prefix[j]);
            let theta = if h == 1 { -m.base_angle } else { m.base_angle };
            Ok((m.target, MeasureBasis::Angle(theta)))
        })?;
        let za: f64 = branches
            .iter()
            .map(|b| {
                let parity = b.outcomes.iter().zip(&flips).fold(0u8, |a, (o, f)| a ^ (o & f));
                if parity == 1 {
                    -b.probability
                } else {
                    b.probability
                }
            })
            .sum();
        let main_parity = support.iter().fold(0u8, |a, &q| a ^ bits[q]);
        let s = if main_parity == 1 { -1.0 } else { 1.0 };
        split += p * s * za;
    }
    Ok(SplitCheck {
        direct,
        split: sign * split,
        main_outcomes: outcomes.len(),
        uniform,
    })
}
