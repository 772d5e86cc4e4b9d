//! Graph-state stabilizer simulator.
//!
//! A state is `(⊗ V_v) |G⟩` where `|G⟩` is the graph state of a simple
//! undirected graph and each `V_v` is a local Clifford (VOP). Adjacency is a
//! packed bit matrix.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;

use crate::dense::{StateVector, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::local_clifford::LocalClifford;
use crate::pauli::{CliffordGate, Pauli};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphRegister {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
    vops: Vec<LocalClifford>,
}

/// Preparation circuit: `H` on every qubit, CZ layers, then VOP gates.
#[derive(Clone, Debug, PartialEq)]
pub struct PrepCircuit {
    pub gates: Vec<CliffordGate>,
    pub cz_layers: Vec<Vec<(usize, usize)>>,
    pub max_degree: usize,
}

impl PrepCircuit {
    pub fn entangling_depth(&self) -> usize {
        self.cz_layers.len()
    }
}

impl GraphRegister {
    /// `|+⟩^n`: no edges, identity VOPs.
    pub fn new_plus(n: usize) -> GraphRegister {
        let stride = n.div_ceil(64).max(1);
        GraphRegister {
            n,
            stride,
            adj: vec![0; n * stride],
            vops: vec![LocalClifford::identity(); n],
        }
    }

    /// `|0⟩^n`.
    pub fn new_zero(n: usize) -> GraphRegister {
        let mut g = GraphRegister::new_plus(n);
        g.vops.fill(LocalClifford::hadamard());
        g
    }

    /// Graph state `|G⟩` with identity VOPs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<GraphRegister> {
        let mut g = GraphRegister::new_plus(n);
        for &(a, b) in edges {
            g.check(a)?;
            g.check(b)?;
            if a == b {
                return Err(Error::SameQubit(a));
            }
            if !g.has_edge(a, b) {
                g.toggle_edge(a, b);
            }
        }
        Ok(g)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            Err(Error::IndexOutOfRange { index: q, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        (self.adj[a * self.stride + b / 64] >> (b % 64)) & 1 == 1
    }

    pub(crate) fn toggle_edge(&mut self, a: usize, b: usize) {
        self.adj[a * self.stride + b / 64] ^= 1 << (b % 64);
        self.adj[b * self.stride + a / 64] ^= 1 << (a % 64);
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.stride..(v + 1) * self.stride]
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.row(v).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in self.neighbors(a) {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn vop(&self, q: usize) -> LocalClifford {
        self.vops[q]
    }

    pub fn vops(&self) -> &[LocalClifford] {
        &self.vops
    }

    pub fn set_vop(&mut self, q: usize, v: LocalClifford) -> Result<()> {
        self.check(q)?;
        self.vops[q] = v;
        Ok(())
    }

    /// Applies `g` after the current VOP.
    pub fn apply_local(&mut self, q: usize, g: LocalClifford) -> Result<()> {
        self.check(q)?;
        self.vops[q] = g.compose(self.vops[q]);
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        match *gate {
            CliffordGate::CZ(a, b) => self.apply_cz(a, b),
            CliffordGate::CX(c, t) => {
                self.apply_local(t, LocalClifford::hadamard())?;
                self.apply_cz(c, t)?;
                self.apply_local(t, LocalClifford::hadamard())
            }
            ref g => {
                let q = g.qubits()[0];
                self.apply_local(q, LocalClifford::from_gate(g).expect("single-qubit gate"))
            }
        }
    }

    pub fn apply_circuit(&mut self, gates: &[CliffordGate]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Local complementation at `v`; the represented state is unchanged.
    pub fn local_complement(&mut self, v: usize) -> Result<()> {
        self.check(v)?;
        self.lc_unchecked(v);
        Ok(())
    }

    /// Toggles the edges inside `N(v)` without touching VOPs. This changes
    /// the state; used by graph searches that only care about the graph.
    pub fn local_complement_graph_only(&mut self, v: usize) -> Result<()> {
        self.check(v)?;
        let nb = self.neighbors(v);
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                self.toggle_edge(nb[i], nb[j]);
            }
        }
        Ok(())
    }

    fn lc_unchecked(&mut self, v: usize) {
        let nb = self.neighbors(v);
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                self.toggle_edge(nb[i], nb[j]);
            }
        }
        let (fa, fn_) = lc_factors();
        self.vops[v] = self.vops[v].compose(fa);
        for c in nb {
            self.vops[c] = self.vops[c].compose(fn_);
        }
    }

    /// Drives `vops[a]` to the identity with LCs at `a` and at a neighbour
    /// other than `avoid` (or `avoid` itself if it is the only neighbour).
    fn remove_vop(&mut self, a: usize, avoid: usize) {
        let nb = self.neighbors(a);
        let partner = nb.iter().copied().find(|&c| c != avoid).unwrap_or(avoid);
        for &mv in &remove_moves()[self.vops[a].index()] {
            if mv {
                self.lc_unchecked(a);
            } else {
                self.lc_unchecked(partner);
            }
        }
        debug_assert_eq!(self.vops[a], LocalClifford::identity());
    }

    fn has_other_neighbor(&self, a: usize, b: usize) -> bool {
        let d = self.degree(a);
        d > usize::from(self.has_edge(a, b))
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SameQubit(a));
        }
        if self.has_other_neighbor(a, b) {
            self.remove_vop(a, b);
        }
        if self.has_other_neighbor(b, a) {
            self.remove_vop(b, a);
        }
        if self.has_other_neighbor(a, b) && !self.vops[a].is_diagonal() {
            self.remove_vop(a, b);
        }
        let na = self.has_other_neighbor(a, b);
        let nb = self.has_other_neighbor(b, a);
        let edge = self.has_edge(a, b);
        let key = (self.vops[a].index(), self.vops[b].index(), edge);
        let sol = cz_table()
            .get(&key)
            .and_then(|sols| {
                sols.iter()
                    .find(|s| (!na || s.0.is_diagonal()) && (!nb || s.1.is_diagonal()))
            })
            .copied()
            .expect("CZ table covers every reduced case");
        self.vops[a] = sol.0;
        self.vops[b] = sol.1;
        if sol.2 != edge {
            self.toggle_edge(a, b);
        }
        Ok(())
    }

    /// Measures `q` in a Pauli basis. `choose(p0)` picks the outcome when it
    /// is random and receives the probability of 0. Returns the outcome and
    /// its probability; the state is left in the post-measurement state.
    fn measure_with<F>(&mut self, q: usize, basis: Pauli, choose: F) -> Result<(u8, f64)>
    where
        F: FnOnce(f64) -> Option<u8>,
    {
        self.check(q)?;
        if basis == Pauli::I {
            return Err(Error::Invalid("cannot measure in the identity basis".into()));
        }
        let mut frame = self.vops[q].conjugate_inverse(basis);
        if frame.pauli == Pauli::X {
            let nb = self.neighbors(q);
            if nb.is_empty() {
                // bare |+⟩ is an X eigenstate
                let outcome = u8::from(frame.negative);
                return match choose(if outcome == 0 { 1.0 } else { 0.0 }) {
                    Some(o) if o != outcome => Ok((o, 0.0)),
                    _ => Ok((outcome, 1.0)),
                };
            }
            self.lc_unchecked(nb[0]);
            frame = self.vops[q].conjugate_inverse(basis);
        }
        if frame.pauli == Pauli::Y {
            self.lc_unchecked(q);
            frame = self.vops[q].conjugate_inverse(basis);
        }
        debug_assert_eq!(frame.pauli, Pauli::Z);
        let Some(outcome) = choose(0.5) else {
            return Ok((0, 0.0));
        };
        let x = outcome ^ u8::from(frame.negative);
        let z = LocalClifford::pauli(Pauli::Z);
        for c in self.neighbors(q) {
            if x == 1 {
                self.vops[c] = self.vops[c].compose(z);
            }
            self.toggle_edge(q, c);
        }
        let h = LocalClifford::hadamard();
        let post = if x == 1 {
            LocalClifford::pauli(Pauli::X).compose(h)
        } else {
            h
        };
        self.vops[q] = self.vops[q].compose(post);
        Ok((outcome, 0.5))
    }

    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, q: usize, basis: Pauli, rng: &mut R) -> Result<u8> {
        let (o, _) = self.measure_with(q, basis, |p0| Some(u8::from(rng.gen::<f64>() >= p0)))?;
        Ok(o)
    }

    /// Forces `outcome`; returns its probability. A zero-probability outcome
    /// leaves the state unchanged.
    pub fn project(&mut self, q: usize, basis: Pauli, outcome: u8) -> Result<f64> {
        let mut trial = self.clone();
        let (o, p) = trial.measure_with(q, basis, |_| Some(outcome))?;
        if o == outcome && p > 0.0 {
            *self = trial;
            Ok(p)
        } else {
            Ok(0.0)
        }
    }

    /// Probability that measuring `q` in `basis` gives 0, without changing
    /// the state. Always 0, ½ or 1.
    pub fn probability_zero(&self, q: usize, basis: Pauli) -> Result<f64> {
        let mut trial = self.clone();
        let (o, p) = trial.measure_with(q, basis, |p0| Some(u8::from(p0 < 0.5)))?;
        Ok(if o == 0 { p } else { 1.0 - p })
    }

    /// One shot of measuring the listed qubits in order, on a copy.
    pub fn sample_shot<R: Rng + ?Sized>(&self, bases: &[(usize, Pauli)], rng: &mut R) -> Result<Vec<u8>> {
        let mut reg = self.clone();
        bases.iter().map(|&(q, b)| reg.measure_pauli(q, b, rng)).collect()
    }

    /// Dense statevector of the register (up to global phase).
    pub fn to_statevector(&self) -> Result<StateVector> {
        if self.n > DEFAULT_CAP {
            return Err(Error::Capacity { n: self.n, cap: DEFAULT_CAP });
        }
        let mut s = StateVector::zero(self.n)?;
        for q in 0..self.n {
            s.apply_h(q)?;
        }
        for (a, b) in self.edges() {
            s.apply_gate(&CliffordGate::CZ(a, b))?;
        }
        for q in 0..self.n {
            s.apply_matrix1(q, &self.vops[q].matrix())?;
        }
        Ok(s)
    }

    /// Sub-register on `qubits` (renumbered in the given order). Fails if an
    /// edge leaves the set, since the state would not factor.
    pub fn induced(&self, qubits: &[usize]) -> Result<GraphRegister> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &q) in qubits.iter().enumerate() {
            self.check(q)?;
            pos[q] = i;
        }
        let mut out = GraphRegister::new_plus(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.vops[i] = self.vops[q];
            for c in self.neighbors(q) {
                if pos[c] == usize::MAX {
                    return Err(Error::Invalid(format!("edge {q}-{c} leaves the sub-register")));
                }
                if i < pos[c] {
                    out.toggle_edge(i, pos[c]);
                }
            }
        }
        Ok(out)
    }

    /// Upper-triangle adjacency key, for deduplicating graphs.
    pub fn graph_key(&self) -> Vec<u64> {
        let mut key = vec![0u64; (self.n * self.n).div_ceil(64).max(1)];
        for (a, b) in self.edges() {
            let bit = a * self.n + b;
            key[bit / 64] |= 1 << (bit % 64);
        }
        key
    }

    pub fn prep_circuit(&self) -> PrepCircuit {
        let mut gates: Vec<CliffordGate> = (0..self.n).map(CliffordGate::H).collect();
        let cz_layers = edge_coloring(self.n, &self.edges(), self.max_degree());
        for layer in &cz_layers {
            gates.extend(layer.iter().map(|&(a, b)| CliffordGate::CZ(a, b)));
        }
        for q in 0..self.n {
            gates.extend(self.vops[q].gates(q));
        }
        PrepCircuit {
            gates,
            cz_layers,
            max_degree: self.max_degree(),
        }
    }

    /// Graphviz rendering; `labels` override the default `q{i}` names.
    pub fn to_dot(&self, labels: Option<&[String]>) -> String {
        let mut s = String::from("graph G {\n");
        for q in 0..self.n {
            let name = labels
                .and_then(|l| l.get(q).cloned())
                .unwrap_or_else(|| format!("q{q}"));
            let _ = writeln!(s, "  {q} [label=\"{name}\\n{}\"];", self.vops[q]);
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  {a} -- {b};");
        }
        s.push_str("}\n");
        s
    }

    /// Adjacency-list text: `n <count>`, then `v: u w …` lines and optional
    /// `vop v NAME` lines. `#` starts a comment.
    pub fn to_adjacency_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for v in 0..self.n {
            let nb: Vec<String> = self.neighbors(v).iter().map(|u| u.to_string()).collect();
            let _ = writeln!(s, "{v}: {}", nb.join(" "));
        }
        for v in 0..self.n {
            if self.vops[v] != LocalClifford::identity() {
                let _ = writeln!(s, "vop {v} {}", self.vops[v]);
            }
        }
        s
    }

    pub fn parse_adjacency_text(text: &str) -> Result<GraphRegister> {
        let mut reg: Option<GraphRegister> = None;
        let bad = |l: &str| Error::Parse(format!("bad adjacency line {l:?}"));
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n ") {
                let n: usize = rest.trim().parse().map_err(|_| bad(line))?;
                reg = Some(GraphRegister::new_plus(n));
                continue;
            }
            let g = reg
                .as_mut()
                .ok_or_else(|| Error::Parse("adjacency text must start with `n <count>`".into()))?;
            if let Some(rest) = line.strip_prefix("vop ") {
                let mut it = rest.split_whitespace();
                let v: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad(line))?;
                let name = it.next().ok_or_else(|| bad(line))?;
                g.set_vop(v, name.parse()?)?;
                continue;
            }
            let (head, tail) = line.split_once(':').ok_or_else(|| bad(line))?;
            let v: usize = head.trim().parse().map_err(|_| bad(line))?;
            g.check(v)?;
            for tok in tail.split_whitespace() {
                let u: usize = tok.parse().map_err(|_| bad(line))?;
                g.check(u)?;
                if u == v {
                    return Err(Error::SameQubit(v));
                }
                if !g.has_edge(u, v) {
                    g.toggle_edge(u, v);
                }
            }
        }
        reg.ok_or_else(|| Error::Parse("empty adjacency text".into()))
    }
}

// Right factors applied at an LC vertex and at its neighbours.
fn lc_factors() -> (LocalClifford, LocalClifford) {
    (LocalClifford::sqrt_x().inverse(), LocalClifford::sqrt_z().inverse())
}

// For each VOP, LC moves (true = at the vertex, false = at its partner)
// that reduce it to the identity.
fn remove_moves() -> &'static Vec<Vec<bool>> {
    static MOVES: OnceLock<Vec<Vec<bool>>> = OnceLock::new();
    MOVES.get_or_init(|| {
        let (fa, fn_) = lc_factors();
        let mut out = vec![None; LocalClifford::COUNT];
        out[0] = Some(Vec::new());
        // breadth-first backwards from the identity: if g∘f = h and h is
        // solved, g is solved by f then h's moves
        let mut frontier = vec![LocalClifford::identity()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for h in frontier {
                for (mv, f) in [(true, fa), (false, fn_)] {
                    let g = h.compose(f.inverse());
                    if out[g.index()].is_none() {
                        let mut w = vec![mv];
                        w.extend(out[h.index()].clone().unwrap());
                        out[g.index()] = Some(w);
                        next.push(g);
                    }
                }
            }
            frontier = next;
        }
        out.into_iter().map(|w| w.expect("LC moves generate the group")).collect()
    })
}

type CzKey = (usize, usize, bool);
type CzSolution = (LocalClifford, LocalClifford, bool);

// For every two-vertex configuration (va, vb, edge), all equivalent
// configurations after a CZ, checked against the dense simulator.
fn cz_table() -> &'static HashMap<CzKey, Vec<CzSolution>> {
    static TABLE: OnceLock<HashMap<CzKey, Vec<CzSolution>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let state = |va: LocalClifford, vb: LocalClifford, e: bool| {
            let mut g = GraphRegister::new_plus(2);
            if e {
                g.toggle_edge(0, 1);
            }
            g.vops = vec![va, vb];
            g.to_statevector().expect("two qubits")
        };
        let mut candidates = Vec::with_capacity(24 * 24 * 2);
        for va in LocalClifford::all() {
            for vb in LocalClifford::all() {
                for e in [false, true] {
                    candidates.push(((va, vb, e), state(va, vb, e)));
                }
            }
        }
        let mut table = HashMap::new();
        for ((va, vb, e), s) in &candidates {
            let mut target = s.clone();
            target.apply_gate(&CliffordGate::CZ(0, 1)).expect("valid");
            let sols: Vec<CzSolution> = candidates
                .iter()
                .filter(|(_, c)| c.fidelity(&target).map(|f| f > 1.0 - 1e-9).unwrap_or(false))
                .map(|(k, _)| *k)
                .collect();
            table.insert((va.index(), vb.index(), *e), sols);
        }
        table
    })
}

/// Colours edges so no two edges in a colour class share a vertex, using at
/// most `Δ + 1` colours. Returns the classes in colour order.
pub fn edge_coloring(n: usize, edges: &[(usize, usize)], max_degree: usize) -> Vec<Vec<(usize, usize)>> {
    if edges.is_empty() {
        return Vec::new();
    }
    let greedy = greedy_coloring(n, edges);
    let classes = if greedy.iter().copied().max().unwrap_or(0) <= max_degree {
        greedy
    } else {
        misra_gries(n, edges, max_degree + 1)
    };
    let k = classes.iter().copied().max().unwrap_or(0) + 1;
    let mut out = vec![Vec::new(); k];
    for (e, &c) in edges.iter().zip(&classes) {
        out[c].push(*e);
    }
    out.retain(|l: &Vec<(usize, usize)>| !l.is_empty());
    out
}

fn greedy_coloring(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut used: Vec<Vec<bool>> = vec![Vec::new(); n];
    edges
        .iter()
        .map(|&(a, b)| {
            let mut c = 0;
            while used[a].get(c).copied().unwrap_or(false) || used[b].get(c).copied().unwrap_or(false) {
                c += 1;
            }
            for v in [a, b] {
                if used[v].len() <= c {
                    used[v].resize(c + 1, false);
                }
                used[v][c] = true;
            }
            c
        })
        .collect()
}

fn misra_gries(n: usize, edges: &[(usize, usize)], colors: usize) -> Vec<usize> {
    // col[u][v] = colour of edge uv
    let mut col: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let free = |col: &Vec<HashMap<usize, usize>>, v: usize, c: usize| !col[v].values().any(|&x| x == c);
    let set = |col: &mut Vec<HashMap<usize, usize>>, a: usize, b: usize, c: Option<usize>| match c {
        Some(c) => {
            col[a].insert(b, c);
            col[b].insert(a, c);
        }
        None => {
            col[a].remove(&b);
            col[b].remove(&a);
        }
    };
    for &(u, v) in edges {
        // maximal fan at u starting with v
        let mut fan = vec![v];
        loop {
            let last = *fan.last().unwrap();
            let next = nbrs[u].iter().copied().find(|&w| {
                !fan.contains(&w) && col[u].get(&w).is_some_and(|&c| free(&col, last, c))
            });
            match next {
                Some(w) => fan.push(w),
                None => break,
            }
        }
        let c = (0..colors).find(|&c| free(&col, u, c)).expect("Δ+1 colours");
        let d = (0..colors)
            .find(|&d| free(&col, *fan.last().unwrap(), d))
            .expect("Δ+1 colours");
        // invert the cd path starting at u
        if c != d {
            let mut path = Vec::new();
            let (mut x, mut want) = (u, d);
            let mut prev = usize::MAX;
            while let Some((&y, _)) = col[x].iter().find(|(&y, &cc)| cc == want && y != prev) {
                path.push((x, y, want));
                prev = x;
                x = y;
                want = if want == d { c } else { d };
            }
            for &(a, b, _) in &path {
                set(&mut col, a, b, None);
            }
            for &(a, b, cc) in &path {
                set(&mut col, a, b, Some(if cc == d { c } else { d }));
            }
        }
        // shortest prefix of the fan that is still a fan and ends where d is free
        let mut j = 0;
        for k in 0..fan.len() {
            let prefix_ok = (0..k).all(|i| {
                col[u].get(&fan[i + 1]).is_some_and(|&cc| free(&col, fan[i], cc))
            });
            if !prefix_ok {
                break;
            }
            if free(&col, fan[k], d) {
                j = k;
                break;
            }
        }
        for i in 0..j {
            let cc = col[u][&fan[i + 1]];
            set(&mut col, u, fan[i + 1], None);
            set(&mut col, u, fan[i], Some(cc));
        }
        set(&mut col, u, fan[j], Some(d));
    }
    edges.iter().map(|&(a, b)| col[a][&b]).collect()
}
