//! Pauli words with exact phase tracking.
//!
//! A word is stored as an x-mask and a z-mask with one bit per qubit plus a
//! phase exponent `k` meaning `i^k`. The single-qubit letter for bits
//! `(x, z)` is `I, X, Z, Y` for `(0,0), (1,0), (0,1), (1,1)`; `Y` is the
//! Hermitian Pauli, not `XZ`. Qubit `q` is character `q` of the dense text
//! form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Single- and two-qubit Clifford gates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    CX(usize, usize),
    CZ(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        use CliffordGate::*;
        match *self {
            H(q) | S(q) | Sdg(q) | X(q) | Y(q) | Z(q) => vec![q],
            CX(a, b) | CZ(a, b) => vec![a, b],
        }
    }

    pub fn is_entangling(&self) -> bool {
        matches!(self, CliffordGate::CX(..) | CliffordGate::CZ(..))
    }

    pub fn inverse(&self) -> CliffordGate {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    /// Checks indices against a register of `n` qubits.
    pub fn validate(&self, n: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, n });
            }
        }
        match *self {
            CliffordGate::CX(a, b) | CliffordGate::CZ(a, b) if a == b => Err(Error::SameQubit(a)),
            _ => Ok(()),
        }
    }

    /// Same gate acting on relabelled qubits.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> CliffordGate {
        use CliffordGate::*;
        match *self {
            H(q) => H(f(q)),
            S(q) => S(f(q)),
            Sdg(q) => Sdg(f(q)),
            X(q) => X(f(q)),
            Y(q) => Y(f(q)),
            Z(q) => Z(f(q)),
            CX(a, b) => CX(f(a), f(b)),
            CZ(a, b) => CZ(f(a), f(b)),
        }
    }

    /// True when the two gates commute as operators. Conservative: may
    /// return false for some commuting pairs.
    pub fn commutes_with(&self, other: &CliffordGate) -> bool {
        use CliffordGate::*;
        let qa = self.qubits();
        let qb = other.qubits();
        if qa.iter().all(|q| !qb.contains(q)) {
            return true;
        }
        let diag = |g: &CliffordGate| matches!(g, S(_) | Sdg(_) | Z(_));
        match (*self, *other) {
            (CZ(..), CZ(..)) => true,
            (CX(c1, t1), CX(c2, t2)) => c1 != t2 && c2 != t1,
            (CZ(a, b), CX(_, t)) | (CX(_, t), CZ(a, b)) => a != t && b != t,
            (CZ(..), g) | (g, CZ(..)) => diag(&g),
            (CX(c, t), g) | (g, CX(c, t)) => {
                let q = g.qubits()[0];
                (q == c && diag(&g)) || (q == t && matches!(g, X(_)))
            }
            (a, b) => {
                a == b
                    || (diag(&a) && diag(&b))
                    || matches!((a, b), (X(_), X(_)) | (Y(_), Y(_)))
            }
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CliffordGate::*;
        match *self {
            H(q) => write!(f, "H {q}"),
            S(q) => write!(f, "S {q}"),
            Sdg(q) => write!(f, "SDG {q}"),
            X(q) => write!(f, "X {q}"),
            Y(q) => write!(f, "Y {q}"),
            Z(q) => write!(f, "Z {q}"),
            CX(a, b) => write!(f, "CX {a} {b}"),
            CZ(a, b) => write!(f, "CZ {a} {b}"),
        }
    }
}

impl FromStr for CliffordGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let name = it
            .next()
            .ok_or_else(|| Error::Parse("empty gate".into()))?
            .to_ascii_uppercase();
        let args: Vec<usize> = it
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad qubit index '{t}' in '{s}'")))
            })
            .collect::<Result<_>>()?;
        let one = |f: fn(usize) -> CliffordGate| match args.as_slice() {
            [q] => Ok(f(*q)),
            _ => Err(Error::Parse(format!("'{s}' expects one qubit"))),
        };
        let two = |f: fn(usize, usize) -> CliffordGate| match args.as_slice() {
            [a, b] if a != b => Ok(f(*a, *b)),
            [a, _] => Err(Error::SameQubit(*a)),
            _ => Err(Error::Parse(format!("'{s}' expects two qubits"))),
        };
        match name.as_str() {
            "H" => one(CliffordGate::H),
            "S" => one(CliffordGate::S),
            "SDG" | "SDAG" => one(CliffordGate::Sdg),
            "X" => one(CliffordGate::X),
            "Y" => one(CliffordGate::Y),
            "Z" => one(CliffordGate::Z),
            "CX" | "CNOT" => two(CliffordGate::CX),
            "CZ" => two(CliffordGate::CZ),
            _ => Err(Error::Parse(format!("unknown gate '{name}'"))),
        }
    }
}

impl Serialize for CliffordGate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CliffordGate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const WORD: usize = 64;

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

fn popcount(v: &[u64]) -> u32 {
    v.iter().map(|w| w.count_ones()).sum()
}

/// An n-qubit Pauli word `i^phase · P_0 ⊗ … ⊗ P_{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> PauliString {
        PauliString {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            phase: 0,
        }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Result<PauliString> {
        let mut s = PauliString::identity(n);
        s.set(q, p)?;
        Ok(s)
    }

    pub fn from_ops(ops: &[Pauli]) -> PauliString {
        let mut s = PauliString::identity(ops.len());
        for (q, &p) in ops.iter().enumerate() {
            s.set_unchecked(q, p);
        }
        s
    }

    /// Builds a word from `(qubit, letter)` pairs; later pairs overwrite earlier ones.
    pub fn from_sparse(n: usize, ops: &[(usize, Pauli)]) -> Result<PauliString> {
        let mut s = PauliString::identity(n);
        for &(q, p) in ops {
            s.set(q, p)?;
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Phase exponent `k` of `i^k`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, k: u8) -> PauliString {
        self.phase = k % 4;
        self
    }

    /// `+1` or `-1` for Hermitian words, `None` for `±i`.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / WORD, q % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) -> Result<()> {
        if q >= self.n {
            return Err(Error::IndexOutOfRange { index: q, n: self.n });
        }
        self.set_unchecked(q, p);
        Ok(())
    }

    fn set_unchecked(&mut self, q: usize, p: Pauli) {
        let (w, b) = (q / WORD, q % WORD);
        let (x, z) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// True when every letter is `I` (the phase is not inspected).
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// True when no letter is `X` or `Y`.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn has_x_part(&self, q: usize) -> bool {
        matches!(self.get(q), Pauli::X | Pauli::Y)
    }

    fn y_count(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones())
            .sum()
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            Err(Error::LengthMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &PauliString) -> bool {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        acc % 2 == 0
    }

    /// Operator product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let x: Vec<u64> = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z: Vec<u64> = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let cross: Vec<u64> = self.z.iter().zip(&other.x).map(|(a, b)| a & b).collect();
        let mut out = PauliString {
            n: self.n,
            x,
            z,
            phase: 0,
        };
        let k = self.phase as i64
            + other.phase as i64
            + self.y_count() as i64
            + other.y_count() as i64
            - out.y_count() as i64
            + 2 * popcount(&cross) as i64;
        out.phase = k.rem_euclid(4) as u8;
        Ok(out)
    }

    /// `g · self · g†` with exact phase.
    pub fn conjugate(&self, gate: &CliffordGate) -> Result<PauliString> {
        gate.validate(self.n)?;
        let mut out = self.clone();
        out.conjugate_in_place(gate);
        Ok(out)
    }

    /// Conjugates by a gate sequence, first gate innermost.
    pub fn conjugate_by_circuit(&self, gates: &[CliffordGate]) -> Result<PauliString> {
        let mut out = self.clone();
        for g in gates {
            g.validate(self.n)?;
            out.conjugate_in_place(g);
        }
        Ok(out)
    }

    fn bit(&self, v: &[u64], q: usize) -> bool {
        let _ = self;
        (v[q / WORD] >> (q % WORD)) & 1 == 1
    }

    fn put(v: &mut [u64], q: usize, on: bool) {
        let (w, b) = (q / WORD, q % WORD);
        v[w] = (v[w] & !(1 << b)) | ((on as u64) << b);
    }

    pub(crate) fn conjugate_in_place(&mut self, gate: &CliffordGate) {
        // Work in the X^x Z^z form where Y = i·XZ; `k` is the phase in that form.
        let qs = gate.qubits();
        let ys = |s: &PauliString| qs.iter().filter(|&&q| s.get(q) == Pauli::Y).count() as i64;
        let mut k = self.phase as i64 + ys(self);
        let xb = |s: &PauliString, q| s.bit(&s.x, q);
        let zb = |s: &PauliString, q| s.bit(&s.z, q);
        match *gate {
            CliffordGate::H(q) => {
                let (a, b) = (xb(self, q), zb(self, q));
                Self::put(&mut self.x, q, b);
                Self::put(&mut self.z, q, a);
                k += 2 * (a && b) as i64;
            }
            CliffordGate::S(q) | CliffordGate::Sdg(q) => {
                let (a, b) = (xb(self, q), zb(self, q));
                Self::put(&mut self.z, q, a ^ b);
                if a {
                    k += if matches!(gate, CliffordGate::S(_)) { 1 } else { 3 };
                }
            }
            CliffordGate::X(q) => k += 2 * zb(self, q) as i64,
            CliffordGate::Z(q) => k += 2 * xb(self, q) as i64,
            CliffordGate::Y(q) => k += 2 * (xb(self, q) as i64 + zb(self, q) as i64),
            CliffordGate::CX(c, t) => {
                let xt = xb(self, t) ^ xb(self, c);
                let zc = zb(self, c) ^ zb(self, t);
                Self::put(&mut self.x, t, xt);
                Self::put(&mut self.z, c, zc);
            }
            CliffordGate::CZ(a, b) => {
                let (xa, xbb) = (xb(self, a), xb(self, b));
                let za = zb(self, a) ^ xbb;
                let zbb = zb(self, b) ^ xa;
                Self::put(&mut self.z, a, za);
                Self::put(&mut self.z, b, zbb);
                k += 2 * (xa && xbb) as i64;
            }
        }
        k -= ys(self);
        self.phase = k.rem_euclid(4) as u8;
    }

    /// Parses either the dense form (`"XIYZ"`, optional `+ - i -i` prefix) or
    /// the sparse form (`"X0 Y2 Z3"`, `"X0X1Y8X9"`) on `n` qubits.
    pub fn parse(text: &str, n: usize) -> Result<PauliString> {
        let t = text.trim();
        let (phase, body) = split_phase(t);
        let body = body.trim();
        let mut s = if body.chars().any(|c| c.is_ascii_digit()) {
            parse_sparse(body, n)?
        } else {
            let s = parse_dense(body)?;
            if s.n != n {
                return Err(Error::LengthMismatch(s.n, n));
            }
            s
        };
        s.phase = phase;
        Ok(s)
    }

    /// Sparse text such as `"X0 X1 Y8 X9"`; the identity prints as `"I"`.
    pub fn to_sparse(&self) -> String {
        let parts: Vec<String> = self
            .support()
            .into_iter()
            .map(|q| format!("{}{}", self.get(q).as_char(), q))
            .collect();
        let body = if parts.is_empty() {
            "I".to_string()
        } else {
            parts.join(" ")
        };
        format!("{}{}", phase_prefix(self.phase), body)
    }

    /// Restricts to the listed qubits (in the given order); the phase is kept.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set_unchecked(i, self.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Embeds into a larger register, sending qubit `i` to `targets[i]`.
    pub fn embed(&self, n: usize, targets: &[usize]) -> Result<PauliString> {
        if targets.len() != self.n {
            return Err(Error::LengthMismatch(targets.len(), self.n));
        }
        let mut out = PauliString::identity(n);
        for (i, &q) in targets.iter().enumerate() {
            out.set(q, self.get(i))?;
        }
        out.phase = self.phase;
        Ok(out)
    }
}

fn phase_prefix(k: u8) -> &'static str {
    match k {
        0 => "",
        1 => "i",
        2 => "-",
        _ => "-i",
    }
}

fn split_phase(t: &str) -> (u8, &str) {
    for (p, k) in [("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)] {
        if let Some(rest) = t.strip_prefix(p) {
            return (k, rest);
        }
    }
    (0, t)
}

fn parse_dense(body: &str) -> Result<PauliString> {
    let ops = body
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("unknown Pauli symbol '{c}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(PauliString::from_ops(&ops))
}

fn parse_sparse(body: &str, n: usize) -> Result<PauliString> {
    let mut s = PauliString::identity(n);
    let mut seen = vec![false; n];
    let chars: Vec<char> = body.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    let mut i = 0;
    while i < chars.len() {
        let p = Pauli::from_char(chars[i])
            .ok_or_else(|| Error::Parse(format!("unknown Pauli symbol '{}'", chars[i])))?;
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::Parse(format!("missing qubit index after '{}'", p.as_char())));
        }
        let q: usize = chars[start..i].iter().collect::<String>().parse().unwrap();
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, n });
        }
        if seen[q] {
            return Err(Error::Parse(format!("duplicate index {q}")));
        }
        seen[q] = true;
        s.set_unchecked(q, p);
    }
    Ok(s)
}

impl FromStr for PauliString {
    type Err = Error;

    /// Dense form only; the register size is the string length.
    fn from_str(text: &str) -> Result<Self> {
        let (phase, body) = split_phase(text.trim());
        let mut s = parse_dense(body)?;
        s.phase = phase;
        Ok(s)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(phase_prefix(self.phase))?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `exp(-i·angle/2·P)` for a Hermitian, non-identity word `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliRotation {
    string: PauliString,
    angle: f64,
}

impl PauliRotation {
    pub fn new(string: PauliString, angle: f64) -> Result<PauliRotation> {
        if string.is_identity() {
            return Err(Error::IdentityRotation);
        }
        if string.phase() != 0 {
            return Err(Error::NonHermitianString(string.to_string()));
        }
        if !angle.is_finite() {
            return Err(Error::NonFiniteAngle);
        }
        Ok(PauliRotation { string, angle })
    }

    /// Accepts a `-` sign on the word by negating the angle.
    pub fn from_signed(string: PauliString, angle: f64) -> Result<PauliRotation> {
        match string.phase() {
            0 => PauliRotation::new(string, angle),
            2 => PauliRotation::new(string.with_phase(0), -angle),
            _ => Err(Error::NonHermitianString(string.to_string())),
        }
    }

    pub fn parse(text: &str, n: usize, angle: f64) -> Result<PauliRotation> {
        PauliRotation::from_signed(PauliString::parse(text, n)?, angle)
    }

    pub fn string(&self) -> &PauliString {
        &self.string
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn num_qubits(&self) -> usize {
        self.string.num_qubits()
    }

    /// The rotation `g R g†`.
    pub fn conjugate(&self, gate: &CliffordGate) -> Result<PauliRotation> {
        PauliRotation::from_signed(self.string.conjugate(gate)?, self.angle)
    }
}
