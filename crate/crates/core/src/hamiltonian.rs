//! Weighted Pauli sums, commuting groups, and estimators from counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bits::parse_bits;
use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, Pauli, PauliString};

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    offset: f64,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    /// Builds from terms, merging duplicate strings. Term phases must be ±1;
    /// a `-` phase is folded into the coefficient.
    pub fn new(n: usize, offset: f64, terms: Vec<(f64, PauliString)>) -> Result<Hamiltonian> {
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (c, p) in terms {
            if p.num_qubits() != n {
                return Err(Error::LengthMismatch(p.num_qubits(), n));
            }
            let sign = p
                .sign()
                .ok_or_else(|| Error::NonHermitianString(p.to_string()))?;
            let p = p.with_phase(0);
            if !c.is_finite() {
                return Err(Error::Invalid("coefficient must be finite".into()));
            }
            match merged.iter_mut().find(|(_, q)| *q == p) {
                Some(t) => t.0 += sign * c,
                None => merged.push((sign * c, p)),
            }
        }
        Ok(Hamiltonian {
            n,
            offset,
            terms: merged,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &PauliString)> {
        self.terms.iter().map(|(c, p)| (*c, p))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, i: usize) -> (f64, &PauliString) {
        (self.terms[i].0, &self.terms[i].1)
    }

    /// Text format, one item per line, `#` comments:
    /// `qubits N` (needed for sparse strings unless inferable), `offset v`,
    /// and `coeff pauli` where the string is dense or sparse.
    pub fn parse(text: &str) -> Result<Hamiltonian> {
        let mut n: Option<usize> = None;
        let mut offset = 0.0;
        let mut raw: Vec<(f64, String)> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "qubits" => {
                    n = Some(rest.parse().map_err(|_| Error::Parse(format!("bad qubit count {rest:?}")))?)
                }
                "offset" => {
                    offset = rest.parse().map_err(|_| Error::Parse(format!("bad offset {rest:?}")))?
                }
                _ => {
                    let c: f64 = head
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient {head:?}")))?;
                    if rest.is_empty() {
                        return Err(Error::Parse(format!("missing Pauli string in {line:?}")));
                    }
                    raw.push((c, rest.to_string()));
                }
            }
        }
        let n = match n {
            Some(n) => n,
            None => infer_width(&raw)?,
        };
        let terms = raw
            .iter()
            .map(|(c, s)| Ok((*c, PauliString::parse(s, n)?)))
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(n, offset, terms)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\noffset {}\n", self.n, self.offset);
        for (c, p) in &self.terms {
            let _ = writeln!(s, "{c} {p}");
        }
        s
    }

    /// Greedy first-fit partition into mutually commuting groups, in term order.
    pub fn commuting_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, (_, p)) in self.terms.iter().enumerate() {
            let slot = groups
                .iter_mut()
                .find(|g| g.iter().all(|&j| self.terms[j].1.commutes_unchecked(p)));
            match slot {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        groups
    }

    /// Commuting groups with their diagonalising circuits.
    pub fn measurement_groups(&self) -> Result<Vec<MeasurementGroup>> {
        self.commuting_groups()
            .into_iter()
            .map(|idx| {
                let strings: Vec<PauliString> = idx.iter().map(|&i| self.terms[i].1.clone()).collect();
                let (gates, diagonal) = diagonalize(&strings)?;
                Ok(MeasurementGroup {
                    basis: independent_subset(&strings),
                    coefficients: idx.iter().map(|&i| self.terms[i].0).collect(),
                    terms: idx,
                    gates,
                    diagonal,
                })
            })
            .collect()
    }
}

fn infer_width(raw: &[(f64, String)]) -> Result<usize> {
    let mut width = None;
    for (_, s) in raw {
        let body = s.trim_start_matches(['+', '-', 'i']);
        let w = if body.chars().any(|c| c.is_ascii_digit()) {
            // sparse: largest index + 1
            let mut max = 0;
            let mut num = String::new();
            for ch in body.chars().chain(std::iter::once(' ')) {
                if ch.is_ascii_digit() {
                    num.push(ch);
                } else if !num.is_empty() {
                    max = max.max(num.parse::<usize>().unwrap() + 1);
                    num.clear();
                }
            }
            max
        } else {
            body.chars().filter(|c| !c.is_whitespace()).count()
        };
        width = Some(width.map_or(w, |x: usize| x.max(w)));
    }
    width.ok_or_else(|| Error::Parse("Hamiltonian has no terms and no `qubits` line".into()))
}

/// Positions of a maximal subset of `strings` that is independent as
/// symplectic vectors over GF(2); every member is a product of these up to
/// sign.
pub fn independent_subset(strings: &[PauliString]) -> Vec<usize> {
    let mut rows: Vec<Vec<bool>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for (i, s) in strings.iter().enumerate() {
        let n = s.num_qubits();
        let mut v: Vec<bool> = (0..n)
            .map(|q| s.has_x_part(q))
            .chain((0..n).map(|q| matches!(s.get(q), Pauli::Z | Pauli::Y)))
            .collect();
        for (r, &p) in rows.iter().zip(&pivots) {
            if v[p] {
                v.iter_mut().zip(r).for_each(|(a, b)| *a ^= b);
            }
        }
        if let Some(p) = v.iter().position(|&b| b) {
            rows.push(v);
            pivots.push(p);
            chosen.push(i);
        }
    }
    chosen
}

/// A commuting group: term indices, coefficients, an independent generator
/// subset, the circuit `C` with `C P C†` diagonal, and those diagonal
/// images (sign in the phase).
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementGroup {
    pub terms: Vec<usize>,
    /// Positions within `terms` of an independent generating subset.
    pub basis: Vec<usize>,
    pub coefficients: Vec<f64>,
    pub gates: Vec<CliffordGate>,
    pub diagonal: Vec<PauliString>,
}

impl MeasurementGroup {
    /// Eigenvalue of term `k` for one Z-basis shot taken after `gates`.
    pub fn eigenvalue(&self, k: usize, bits: &[u8]) -> f64 {
        let d = &self.diagonal[k];
        let parity = d.support().iter().filter(|&&q| bits[q] == 1).count() % 2;
        let sign = d.sign().unwrap_or(1.0);
        if parity == 1 {
            -sign
        } else {
            sign
        }
    }

    /// The group as a diagonal observable on the rotated register, signs
    /// folded into the coefficients.
    pub fn diagonal_observable(&self) -> Result<Hamiltonian> {
        let n = self
            .diagonal
            .first()
            .map(|d| d.num_qubits())
            .ok_or_else(|| Error::Invalid("empty group".into()))?;
        Hamiltonian::new(n, 0.0, self.coefficients.iter().copied().zip(self.diagonal.iter().cloned()).collect())
    }

    /// Group energy (no offset) and its standard error from Z-basis counts
    /// keyed by bitstrings (qubit 0 rightmost).
    pub fn estimate(&self, counts: &BTreeMap<String, u64>) -> Result<Estimate> {
        let mut total = 0u64;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for (key, &c) in counts {
            let bits = parse_bits(key)?;
            if let Some(d) = self.diagonal.first() {
                if bits.len() != d.num_qubits() {
                    return Err(Error::LengthMismatch(bits.len(), d.num_qubits()));
                }
            }
            let v: f64 = (0..self.terms.len())
                .map(|k| self.coefficients[k] * self.eigenvalue(k, &bits))
                .sum();
            total += c;
            sum += v * c as f64;
            sum_sq += v * v * c as f64;
        }
        if total == 0 {
            return Err(Error::Invalid("no shots".into()));
        }
        let n = total as f64;
        let mean = sum / n;
        let var = if total > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok(Estimate {
            value: mean,
            std_error: (var / n).sqrt(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Energy estimate from one count table per measurement group; group
/// errors add in quadrature and the offset is included.
pub fn expectation_from_counts(
    h: &Hamiltonian,
    groups: &[MeasurementGroup],
    counts: &[BTreeMap<String, u64>],
) -> Result<Estimate> {
    if groups.len() != counts.len() {
        return Err(Error::Arity {
            expected: groups.len(),
            got: counts.len(),
        });
    }
    let mut value = h.offset();
    let mut var = 0.0;
    for (g, c) in groups.iter().zip(counts) {
        let e = g.estimate(c)?;
        value += e.value;
        var += e.std_error * e.std_error;
    }
    Ok(Estimate {
        value,
        std_error: var.sqrt(),
    })
}

/// Clifford circuit `C` such that `C P C†` is a signed Z-string for every
/// input string; returns the circuit and the images. Inputs must commute
/// pairwise.
pub fn diagonalize(strings: &[PauliString]) -> Result<(Vec<CliffordGate>, Vec<PauliString>)> {
    for i in 0..strings.len() {
        for j in i + 1..strings.len() {
            if !strings[i].commutes(&strings[j])? {
                return Err(Error::NotCommuting(strings[i].to_string(), strings[j].to_string()));
            }
        }
    }
    let mut cur: Vec<PauliString> = strings.to_vec();
    let mut gates = Vec::new();
    for i in 0..cur.len() {
        let g = cur[i].clone();
        let xs: Vec<usize> = (0..g.num_qubits()).filter(|&q| g.has_x_part(q)).collect();
        let Some(&p) = xs.first() else { continue };
        let mut local = Vec::new();
        for &q in &xs[1..] {
            local.push(CliffordGate::CX(p, q));
        }
        let mut h = g.clone();
        for gate in &local {
            h.conjugate_in_place(gate);
        }
        if h.get(p) == Pauli::Y {
            local.push(CliffordGate::S(p));
            h.conjugate_in_place(&CliffordGate::S(p));
        }
        for q in h.support() {
            if q != p {
                local.push(CliffordGate::CZ(p, q));
            }
        }
        local.push(CliffordGate::H(p));
        for s in cur.iter_mut() {
            for gate in &local {
                s.conjugate_in_place(gate);
            }
        }
        gates.extend(local);
    }
    debug_assert!(cur.iter().all(|s| s.is_diagonal()));
    Ok((gates, cur))
}
