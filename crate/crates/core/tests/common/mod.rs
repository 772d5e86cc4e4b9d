//! Independent references for the integration suites: explicit matrices,
//! Kronecker products and a Taylor-series exponential, with no use of the
//! library's own state-vector kernels.
#![allow(dead_code)]

use mbpat::compile::CircuitInput;
use mbpat::pauli::{CliffordGate, Pauli, PauliRotation, PauliString};
pub use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(d: usize) -> Mat {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat, s: C) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, q)| r.iter().zip(q).map(|(x, y)| x + s * y).collect())
        .collect()
}

pub fn scale(a: &Mat, s: C) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

/// `a ⊗ b` with `a` on the high bits.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn pauli_1q(p: Pauli) -> Mat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => vec![vec![o, z], vec![z, o]],
        Pauli::X => vec![vec![z, o], vec![o, z]],
        Pauli::Y => vec![vec![z, -i], vec![i, z]],
        Pauli::Z => vec![vec![o, z], vec![z, -o]],
    }
}

/// Matrix of a string in the basis where bit `q` of the index is qubit `q`,
/// phase included.
pub fn pauli_matrix(p: &PauliString) -> Mat {
    let n = p.num_qubits();
    let mut m = identity(1);
    for q in (0..n).rev() {
        m = kron(&m, &pauli_1q(p.get(q)));
    }
    let ph = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.phase() as usize % 4];
    scale(&m, ph)
}

pub fn one_qubit_gate(u: [[C; 2]; 2], q: usize, n: usize) -> Mat {
    let d = 1 << n;
    let mut m = vec![vec![c(0.0, 0.0); d]; d];
    for col in 0..d {
        let b = (col >> q) & 1;
        for out in 0..2 {
            let row = (col & !(1 << q)) | (out << q);
            m[row][col] += u[out][b];
        }
    }
    m
}

pub fn gate_matrix(g: &CliffordGate, n: usize) -> Mat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match *g {
        CliffordGate::H(q) => one_qubit_gate([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]], q, n),
        CliffordGate::S(q) => one_qubit_gate([[o, z], [z, i]], q, n),
        CliffordGate::Sdg(q) => one_qubit_gate([[o, z], [z, -i]], q, n),
        CliffordGate::X(q) => one_qubit_gate([[z, o], [o, z]], q, n),
        CliffordGate::Y(q) => one_qubit_gate([[z, -i], [i, z]], q, n),
        CliffordGate::Z(q) => one_qubit_gate([[o, z], [z, -o]], q, n),
        CliffordGate::CX(a, b) => {
            let d = 1 << n;
            let mut m = vec![vec![z; d]; d];
            for col in 0..d {
                let row = if (col >> a) & 1 == 1 { col ^ (1 << b) } else { col };
                m[row][col] = o;
            }
            m
        }
        CliffordGate::CZ(a, b) => {
            let d = 1 << n;
            let mut m = vec![vec![z; d]; d];
            for col in 0..d {
                m[col][col] = if (col >> a) & 1 == 1 && (col >> b) & 1 == 1 { -o } else { o };
            }
            m
        }
    }
}

pub fn circuit_matrix(gates: &[CliffordGate], n: usize) -> Mat {
    gates.iter().fold(identity(1 << n), |acc, g| matmul(&gate_matrix(g, n), &acc))
}

/// `exp(A)` by scaling and squaring around a truncated Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let norm: f64 = a.iter().map(|r| r.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm / f64::from(1u32 << s) > 0.5 {
        s += 1;
    }
    let a = scale(a, c(1.0 / f64::from(1u32 << s), 0.0));
    let d = a.len();
    let mut term = identity(d);
    let mut sum = identity(d);
    for k in 1..30 {
        term = scale(&matmul(&term, &a), c(1.0 / k as f64, 0.0));
        sum = add(&sum, &term, c(1.0, 0.0));
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// `exp(−iθ/2·P)` through the matrix exponential.
pub fn rotation_matrix(r: &PauliRotation) -> Mat {
    expm(&scale(&pauli_matrix(r.string()), c(0.0, -r.angle() / 2.0)))
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Matrix of the whole circuit input (initial gates included).
pub fn input_matrix(input: &CircuitInput) -> Mat {
    let n = input.num_qubits;
    let mut m = circuit_matrix(&input.initial, n);
    for item in &input.items {
        let u = match item {
            mbpat::compile::CircuitItem::Rotation(r) => rotation_matrix(r),
            mbpat::compile::CircuitItem::Clifford(g) => circuit_matrix(g, n),
        };
        m = matmul(&u, &m);
    }
    m
}

pub fn overlap(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm_sqr()
}

pub fn random_string(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let ops: Vec<Pauli> = (0..n).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]).collect();
    PauliString::from_ops(&ops)
}

pub fn random_non_identity(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    loop {
        let s = random_string(n, rng);
        if !s.is_identity() {
            return s;
        }
    }
}

pub fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> PauliRotation {
    PauliRotation::new(random_non_identity(n, rng), rng.gen_range(-3.0..3.0)).unwrap()
}

pub fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> CliffordGate {
    let q = rng.gen_range(0..n);
    let kind = if n > 1 { rng.gen_range(0..8) } else { rng.gen_range(0..6) };
    match kind {
        0 => CliffordGate::H(q),
        1 => CliffordGate::S(q),
        2 => CliffordGate::Sdg(q),
        3 => CliffordGate::X(q),
        4 => CliffordGate::Y(q),
        5 => CliffordGate::Z(q),
        6 => CliffordGate::CX(q, (q + rng.gen_range(1..n)) % n),
        _ => CliffordGate::CZ(q, (q + rng.gen_range(1..n)) % n),
    }
}

pub fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<CliffordGate> {
    (0..len).map(|_| random_gate(n, rng)).collect()
}

pub fn random_amplitudes(n: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    let v: Vec<C> = (0..1 << n).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Upper-tail p-value of Pearson's chi-square for `counts` against `probs`.
/// Cells with zero expected probability must have zero counts.
pub fn chi_square_p(counts: &[u64], probs: &[f64]) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&k, &p) in counts.iter().zip(probs) {
        if p < 1e-12 {
            assert_eq!(k, 0, "outcome with zero probability was sampled");
            continue;
        }
        let e = p * total as f64;
        stat += (k as f64 - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

/// Dense state from the all-zero input through `gates`, via explicit matrices.
pub fn oracle_state(gates: &[CliffordGate], n: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    apply(&circuit_matrix(gates, n), &v)
}

/// Spread of grouped versus per-term estimates of `h` on `state` at the
/// same total shot budget, over `reps` repetitions. Grouped: every shot
/// measures all terms after one diagonalising circuit. Per-term: the budget
/// is split evenly and each term is measured on its own. Returns the two
/// empirical standard deviations.
pub fn grouped_vs_per_term(
    h: &mbpat::hamiltonian::Hamiltonian,
    state: &mbpat::dense::StateVector,
    budget: usize,
    reps: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    use mbpat::hamiltonian::diagonalize;
    use rand::distributions::{Distribution, WeightedIndex};

    let n = h.num_qubits();
    let all: Vec<usize> = (0..n).collect();
    let prepare = |strings: &[PauliString]| {
        let (gates, diag) = diagonalize(strings).unwrap();
        let mut s = state.clone();
        s.apply_circuit(&gates).unwrap();
        (WeightedIndex::new(s.distribution(&all).unwrap()).unwrap(), diag)
    };
    let value = |d: &PauliString, k: usize| {
        let parity = d.support().iter().filter(|&&q| (k >> q) & 1 == 1).count() % 2;
        let s = d.sign().unwrap();
        if parity == 1 { -s } else { s }
    };
    let strings: Vec<PauliString> = h.terms().map(|(_, p)| p.clone()).collect();
    let coeffs: Vec<f64> = h.terms().map(|(c, _)| c).collect();
    let (grouped_dist, grouped_diag) = prepare(&strings);
    let singles: Vec<_> = strings.iter().map(|s| prepare(std::slice::from_ref(s))).collect();
    let per_term_shots = budget / strings.len();

    let spread = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    };
    let mut grouped = Vec::with_capacity(reps);
    let mut per_term = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut g = 0.0;
        for _ in 0..budget {
            let k = grouped_dist.sample(rng);
            g += grouped_diag.iter().zip(&coeffs).map(|(d, c)| c * value(d, k)).sum::<f64>();
        }
        grouped.push(g / budget as f64);
        let mut t = 0.0;
        for ((dist, diag), c) in singles.iter().zip(&coeffs) {
            let mut acc = 0.0;
            for _ in 0..per_term_shots {
                acc += value(&diag[0], dist.sample(rng));
            }
            t += c * acc / per_term_shots as f64;
        }
        per_term.push(t);
    }
    (spread(&grouped), spread(&per_term))
}
