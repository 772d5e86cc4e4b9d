//! The 24-element single-qubit Clifford group modulo phase.
//!
//! An element is identified by where it sends `X` and `Z` under
//! conjugation `U P U†`. Elements are numbered in breadth-first order over
//! words in `H` and `S`, so index 0 is the identity.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::dense::{hadamard_matrix, matmul2, s_matrix, Matrix2};
use crate::error::{Error, Result};
use crate::pauli::{CliffordGate, Pauli};

/// A Pauli letter with a sign, `sign` being `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub pauli: Pauli,
    pub negative: bool,
}

impl SignedPauli {
    fn new(pauli: Pauli, negative: bool) -> SignedPauli {
        SignedPauli { pauli, negative }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalClifford(u8);

struct Table {
    images: Vec<[SignedPauli; 2]>,
    /// Shortest word in application order (first gate acts first).
    words: Vec<Vec<Gen>>,
    compose: Vec<[u8; 24]>,
    inverse: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Gen {
    H,
    S,
}

// Conjugation of a signed letter by H or S.
fn step(g: Gen, p: SignedPauli) -> SignedPauli {
    use Pauli::*;
    let (q, flip) = match (g, p.pauli) {
        (Gen::H, X) => (Z, false),
        (Gen::H, Z) => (X, false),
        (Gen::H, Y) => (Y, true),
        (Gen::S, X) => (Y, false),
        (Gen::S, Y) => (X, true),
        (Gen::S, Z) => (Z, false),
        (_, I) => (I, false),
    };
    SignedPauli::new(q, p.negative ^ flip)
}

// Image of Y = i·X·Z given the images of X and Z.
fn y_image(ix: SignedPauli, iz: SignedPauli) -> SignedPauli {
    // i·(a·A)(b·B) where A·B = i^k C for distinct letters
    let (a, b) = (ix.pauli, iz.pauli);
    let third = Pauli::from_bits(a.bits().0 ^ b.bits().0, a.bits().1 ^ b.bits().1);
    // A·B = +i C when (A,B) is cyclic in (X,Y,Z)
    let cyclic = matches!(
        (a, b),
        (Pauli::X, Pauli::Y) | (Pauli::Y, Pauli::Z) | (Pauli::Z, Pauli::X)
    );
    // i · (±i) = ∓1
    let negative = cyclic ^ ix.negative ^ iz.negative;
    SignedPauli::new(third, negative)
}

fn apply_images(imgs: &[SignedPauli; 2], p: SignedPauli) -> SignedPauli {
    let base = match p.pauli {
        Pauli::I => SignedPauli::new(Pauli::I, false),
        Pauli::X => imgs[0],
        Pauli::Z => imgs[1],
        Pauli::Y => y_image(imgs[0], imgs[1]),
    };
    SignedPauli::new(base.pauli, base.negative ^ p.negative)
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

fn build_table() -> Table {
    let id = [
        SignedPauli::new(Pauli::X, false),
        SignedPauli::new(Pauli::Z, false),
    ];
    let mut images = vec![id];
    let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
    let mut head = 0;
    while head < images.len() {
        for g in [Gen::H, Gen::S] {
            let cur = images[head];
            let next = [step(g, cur[0]), step(g, cur[1])];
            if !images.contains(&next) {
                images.push(next);
                let mut w = words[head].clone();
                w.push(g);
                words.push(w);
            }
        }
        head += 1;
    }
    assert_eq!(images.len(), 24);
    let index = |im: &[SignedPauli; 2]| images.iter().position(|x| x == im).unwrap() as u8;
    let mut compose = vec![[0u8; 24]; 24];
    for a in 0..24 {
        for b in 0..24 {
            // (a∘b)(P) = a(b(P))
            let im = [
                apply_images(&images[a], images[b][0]),
                apply_images(&images[a], images[b][1]),
            ];
            compose[a][b] = index(&im);
        }
    }
    let inverse = (0..24)
        .map(|a| (0..24u8).find(|&b| compose[a][b as usize] == 0).unwrap())
        .collect();
    Table {
        images,
        words,
        compose,
        inverse,
    }
}

impl LocalClifford {
    pub const COUNT: usize = 24;

    pub fn identity() -> LocalClifford {
        LocalClifford(0)
    }

    pub fn all() -> impl Iterator<Item = LocalClifford> {
        (0..24u8).map(LocalClifford)
    }

    pub fn from_index(i: usize) -> Option<LocalClifford> {
        (i < 24).then_some(LocalClifford(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn from_images(x: SignedPauli, z: SignedPauli) -> LocalClifford {
        let t = table();
        let i = t.images.iter().position(|im| *im == [x, z]).expect("valid images");
        LocalClifford(i as u8)
    }

    pub fn hadamard() -> LocalClifford {
        Self::from_images(SignedPauli::new(Pauli::Z, false), SignedPauli::new(Pauli::X, false))
    }

    pub fn phase() -> LocalClifford {
        Self::from_images(SignedPauli::new(Pauli::Y, false), SignedPauli::new(Pauli::Z, false))
    }

    pub fn phase_dagger() -> LocalClifford {
        Self::phase().inverse()
    }

    pub fn pauli(p: Pauli) -> LocalClifford {
        let x = SignedPauli::new(Pauli::X, matches!(p, Pauli::Y | Pauli::Z));
        let z = SignedPauli::new(Pauli::Z, matches!(p, Pauli::X | Pauli::Y));
        Self::from_images(x, z)
    }

    /// `exp(−iπX/4)`, up to phase: fixes `X`, sends `Z` to `−Y`.
    pub fn sqrt_x() -> LocalClifford {
        Self::from_images(SignedPauli::new(Pauli::X, false), SignedPauli::new(Pauli::Y, true))
    }

    /// `exp(iπZ/4)`, up to phase; equal to `S†`.
    pub fn sqrt_z() -> LocalClifford {
        Self::from_images(SignedPauli::new(Pauli::Y, true), SignedPauli::new(Pauli::Z, false))
    }

    pub fn from_gate(g: &CliffordGate) -> Option<LocalClifford> {
        Some(match g {
            CliffordGate::H(_) => Self::hadamard(),
            CliffordGate::S(_) => Self::phase(),
            CliffordGate::Sdg(_) => Self::phase_dagger(),
            CliffordGate::X(_) => Self::pauli(Pauli::X),
            CliffordGate::Y(_) => Self::pauli(Pauli::Y),
            CliffordGate::Z(_) => Self::pauli(Pauli::Z),
            _ => return None,
        })
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: LocalClifford) -> LocalClifford {
        LocalClifford(table().compose[self.index()][other.index()])
    }

    pub fn inverse(self) -> LocalClifford {
        LocalClifford(table().inverse[self.index()])
    }

    /// `U P U†` for a single letter.
    pub fn conjugate(self, p: Pauli) -> SignedPauli {
        apply_images(&table().images[self.index()], SignedPauli::new(p, false))
    }

    /// `U† P U`.
    pub fn conjugate_inverse(self, p: Pauli) -> SignedPauli {
        self.inverse().conjugate(p)
    }

    /// Member of `{I, Z, S, S†}`.
    pub fn is_diagonal(self) -> bool {
        self.conjugate(Pauli::Z) == SignedPauli::new(Pauli::Z, false)
    }

    /// Gates on qubit `q` in application order.
    pub fn gates(self, q: usize) -> Vec<CliffordGate> {
        table().words[self.index()]
            .iter()
            .map(|g| match g {
                Gen::H => CliffordGate::H(q),
                Gen::S => CliffordGate::S(q),
            })
            .collect()
    }

    pub fn matrix(self) -> Matrix2 {
        let mut m = crate::dense::pauli_matrix(Pauli::I);
        for g in &table().words[self.index()] {
            let gm = match g {
                Gen::H => hadamard_matrix(),
                Gen::S => s_matrix(),
            };
            m = matmul2(&gm, &m);
        }
        m
    }
}

impl fmt::Display for LocalClifford {
    /// Operator product, rightmost factor acts first; `I` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &table().words[self.index()];
        if w.is_empty() {
            return write!(f, "I");
        }
        for g in w.iter().rev() {
            write!(f, "{}", if *g == Gen::H { 'H' } else { 'S' })?;
        }
        Ok(())
    }
}

impl FromStr for LocalClifford {
    type Err = Error;

    /// Accepts products of `I H S X Y Z`; rightmost acts first.
    fn from_str(s: &str) -> Result<LocalClifford> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty local Clifford".into()));
        }
        let mut acc = LocalClifford::identity();
        for ch in s.chars() {
            let g = match ch {
                'I' => LocalClifford::identity(),
                'H' => LocalClifford::hadamard(),
                'S' => LocalClifford::phase(),
                'X' => LocalClifford::pauli(Pauli::X),
                'Y' => LocalClifford::pauli(Pauli::Y),
                'Z' => LocalClifford::pauli(Pauli::Z),
                _ => return Err(Error::Parse(format!("bad local Clifford {s:?}"))),
            };
            acc = acc.compose(g);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn close_up_to_phase(a: &Matrix2, b: &Matrix2) -> bool {
        // find a nonzero entry to fix the phase
        let mut ratio = None;
        for r in 0..2 {
            for c in 0..2 {
                if b[r][c].norm() > 1e-9 {
                    ratio = Some(a[r][c] / b[r][c]);
                }
            }
        }
        let Some(k) = ratio else { return false };
        (0..2).all(|r| (0..2).all(|c| (a[r][c] - k * b[r][c]).norm() < 1e-9))
    }

    #[test]
    fn composition_matches_matrices() {
        for a in LocalClifford::all() {
            for b in LocalClifford::all() {
                let m = matmul2(&a.matrix(), &b.matrix());
                assert!(close_up_to_phase(&m, &a.compose(b).matrix()));
            }
        }
    }

    #[test]
    fn images_match_matrices() {
        for u in LocalClifford::all() {
            let m = u.matrix();
            let mut dag = m;
            for r in 0..2 {
                for c in 0..2 {
                    dag[r][c] = m[c][r].conj();
                }
            }
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                let img = u.conjugate(p);
                let lhs = matmul2(&matmul2(&m, &crate::dense::pauli_matrix(p)), &dag);
                let mut rhs = crate::dense::pauli_matrix(img.pauli);
                if img.negative {
                    for row in &mut rhs {
                        for v in row {
                            *v = -*v;
                        }
                    }
                }
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((lhs[r][c] - rhs[r][c]).norm() < 1e-9, "{u} {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_subgroup_has_four_elements() {
        assert_eq!(LocalClifford::all().filter(|u| u.is_diagonal()).count(), 4);
        assert!(LocalClifford::phase().is_diagonal());
        assert!(!LocalClifford::hadamard().is_diagonal());
    }

    #[test]
    fn names_round_trip() {
        for u in LocalClifford::all() {
            assert_eq!(u.to_string().parse::<LocalClifford>().unwrap(), u);
        }
        assert_eq!("SS".parse::<LocalClifford>().unwrap(), LocalClifford::pauli(Pauli::Z));
    }

    #[test]
    fn roots_have_expected_matrices() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sx = [[C::new(r, 0.0), C::new(0.0, -r)], [C::new(0.0, -r), C::new(r, 0.0)]];
        assert!(close_up_to_phase(&LocalClifford::sqrt_x().matrix(), &sx));
        let sz = [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(0.0, -1.0)]];
        assert!(close_up_to_phase(&LocalClifford::sqrt_z().matrix(), &sz));
    }
}
