//! Clifford gate lists: scheduling, depth counts and peephole passes.

use crate::pauli::CliffordGate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CircuitStats {
    pub gate_count: usize,
    pub entangling_count: usize,
    pub cx_count: usize,
    pub cz_count: usize,
    pub entangling_depth: usize,
}

/// Commutation-aware list schedule.
///
/// Each entangling gate gets the lowest layer above every earlier gate it
/// fails to commute with that is free on its qubits; single-qubit gates sit
/// between layers. Returns the reordered gate list and the entangling layer
/// count. Every non-commuting pair keeps its order, so the product is
/// unchanged.
pub fn schedule(gates: &[CliffordGate]) -> (Vec<CliffordGate>, usize) {
    // position 2k for single-qubit gates after layer k, 2L-1 for layer L
    let mut pos = vec![0usize; gates.len()];
    let mut occupied: Vec<Vec<usize>> = Vec::new(); // qubits used per layer
    for (i, g) in gates.iter().enumerate() {
        let qs = g.qubits();
        let mut lower = 0usize;
        for j in 0..i {
            let h = &gates[j];
            if h.qubits().iter().any(|q| qs.contains(q)) && !h.commutes_with(g) {
                lower = lower.max(pos[j]);
            }
        }
        pos[i] = if g.is_entangling() {
            // smallest odd position > lower with free qubits
            let mut layer = (lower + 1) / 2 + 1;
            loop {
                if occupied.len() < layer {
                    occupied.resize(layer, Vec::new());
                }
                if qs.iter().all(|q| !occupied[layer - 1].contains(q)) {
                    break;
                }
                layer += 1;
            }
            occupied[layer - 1].extend(&qs);
            2 * layer - 1
        } else {
            lower.div_ceil(2) * 2
        };
    }
    let mut order: Vec<usize> = (0..gates.len()).collect();
    order.sort_by_key(|&i| (pos[i], i));
    let depth = occupied.iter().filter(|l| !l.is_empty()).count();
    (order.into_iter().map(|i| gates[i]).collect(), depth)
}

/// Entangling depth in the given gate order (no reordering).
pub fn entangling_depth_in_order(gates: &[CliffordGate]) -> usize {
    let mut level: std::collections::HashMap<usize, usize> = Default::default();
    let mut depth = 0;
    for g in gates.iter().filter(|g| g.is_entangling()) {
        let qs = g.qubits();
        let l = qs.iter().map(|q| level.get(q).copied().unwrap_or(0)).max().unwrap_or(0) + 1;
        for q in qs {
            level.insert(q, l);
        }
        depth = depth.max(l);
    }
    depth
}

pub fn stats(gates: &[CliffordGate]) -> CircuitStats {
    let cx = gates.iter().filter(|g| matches!(g, CliffordGate::CX(..))).count();
    let cz = gates.iter().filter(|g| matches!(g, CliffordGate::CZ(..))).count();
    CircuitStats {
        gate_count: gates.len(),
        entangling_count: cx + cz,
        cx_count: cx,
        cz_count: cz,
        entangling_depth: schedule(gates).1,
    }
}

fn cancels(a: &CliffordGate, b: &CliffordGate) -> bool {
    use CliffordGate::*;
    match (*a, *b) {
        (CZ(p, q), CZ(r, s)) => (p == r && q == s) || (p == s && q == r),
        _ => a.inverse() == *b,
    }
}

/// Removes adjacent inverse pairs, looking back across gates that commute
/// with the candidate, and rewrites `H(t) … CX(c,t)` into `CZ(c,t) … H(t)`
/// when the `H` can slide forward. Repeats until nothing changes.
pub fn peephole(gates: &[CliffordGate]) -> Vec<CliffordGate> {
    let mut cur: Vec<Option<CliffordGate>> = gates.iter().copied().map(Some).collect();
    loop {
        let mut changed = false;
        for i in 0..cur.len() {
            let Some(g) = cur[i] else { continue };
            for j in (0..i).rev() {
                let Some(h) = cur[j] else { continue };
                if cancels(&h, &g) {
                    cur[i] = None;
                    cur[j] = None;
                    changed = true;
                    break;
                }
                if let (CliffordGate::H(t), CliffordGate::CX(c, t2)) = (h, g) {
                    let clear = cur[j + 1..i].iter().flatten().all(|x| !x.qubits().contains(&t));
                    if t == t2 && clear {
                        cur[j] = None;
                        cur[i] = Some(CliffordGate::H(t));
                        cur.insert(i, Some(CliffordGate::CZ(c, t)));
                        changed = true;
                        break;
                    }
                }
                if !h.commutes_with(&g) {
                    break;
                }
            }
            if changed {
                break;
            }
        }
        if !changed {
            return cur.into_iter().flatten().collect();
        }
    }
}
