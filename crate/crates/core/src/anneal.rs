//! Simulated annealing over local complementations.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphRegister;

/// Largest register the exhaustive orbit search accepts.
pub const ORBIT_MAX_QUBITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostFunction {
    EdgeCount,
    MaxDegree,
    /// `α·edges + (1−α)·max degree`, `α ∈ [0, 1]`.
    Weighted(f64),
}

impl CostFunction {
    pub fn evaluate(&self, reg: &GraphRegister) -> f64 {
        match *self {
            CostFunction::EdgeCount => reg.edge_count() as f64,
            CostFunction::MaxDegree => reg.max_degree() as f64,
            CostFunction::Weighted(a) => a * reg.edge_count() as f64 + (1.0 - a) * reg.max_degree() as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CostFunction::Weighted(a) if !(0.0..=1.0).contains(&a) => {
                Err(Error::Invalid(format!("weight {a} is outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for CostFunction {
    type Err = Error;

    /// `edges`, `degree`, or `weighted:α`.
    fn from_str(s: &str) -> Result<CostFunction> {
        let c = match s {
            "edges" | "edge_count" => CostFunction::EdgeCount,
            "degree" | "max_degree" => CostFunction::MaxDegree,
            _ => {
                let a = s
                    .strip_prefix("weighted:")
                    .and_then(|a| a.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown cost function {s:?}")))?;
                CostFunction::Weighted(a)
            }
        };
        c.validate()?;
        Ok(c)
    }
}

/// Geometric cooling `Tᵢ = T₀·coolingⁱ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t0: f64,
    pub cooling: f64,
    pub steps: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            t0: 2.0,
            cooling: 0.995,
            steps: 2000,
        }
    }
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::Invalid("initial temperature must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::Invalid("cooling factor must lie in (0, 1)".into()));
        }
        if self.steps == 0 {
            return Err(Error::Invalid("at least one step is needed".into()));
        }
        Ok(())
    }

    pub fn temperature(&self, step: usize) -> f64 {
        self.t0 * self.cooling.powi(step as i32)
    }
}

#[derive(Clone, Debug)]
pub struct AnnealResult {
    /// Best register seen; LC-equivalent to the input, VOPs included.
    pub register: GraphRegister,
    pub initial_cost: f64,
    pub best_cost: f64,
    /// Best cost after each step.
    pub trace: Vec<f64>,
    pub accepted: usize,
}

/// One annealing run: each step complements a uniformly random vertex and
/// keeps the move with probability `min(1, exp(−Δ/Tᵢ))`.
pub fn anneal<R: Rng + ?Sized>(
    reg: &GraphRegister,
    cost: CostFunction,
    schedule: &Schedule,
    rng: &mut R,
) -> Result<AnnealResult> {
    cost.validate()?;
    schedule.validate()?;
    let initial_cost = cost.evaluate(reg);
    let mut cur = reg.clone();
    let mut cur_cost = initial_cost;
    let mut best = reg.clone();
    let mut best_cost = initial_cost;
    let mut trace = Vec::with_capacity(schedule.steps);
    let mut accepted = 0;
    let n = reg.num_qubits();
    for step in 0..schedule.steps {
        if n > 0 {
            let v = rng.gen_range(0..n);
            let mut cand = cur.clone();
            cand.local_complement(v)?;
            let c = cost.evaluate(&cand);
            let t = schedule.temperature(step);
            let p = (-(c - cur_cost) / t).exp();
            if c <= cur_cost || rng.gen::<f64>() < p {
                cur = cand;
                cur_cost = c;
                accepted += 1;
                if c < best_cost {
                    best = cur.clone();
                    best_cost = c;
                }
            }
        }
        trace.push(best_cost);
    }
    Ok(AnnealResult {
        register: best,
        initial_cost,
        best_cost,
        trace,
        accepted,
    })
}

/// Independent runs in parallel; run `k` uses stream `k` of `seed`. The
/// lowest cost wins, ties going to the lowest `k`.
pub fn anneal_restarts(
    reg: &GraphRegister,
    cost: CostFunction,
    schedule: &Schedule,
    restarts: usize,
    seed: u64,
) -> Result<AnnealResult> {
    let runs: Vec<AnnealResult> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            anneal(reg, cost, schedule, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.best_cost < runs[best].best_cost {
            best = k;
        }
    }
    Ok(runs.into_iter().nth(best).expect("at least one run"))
}

/// Exact minimum of `cost` over the LC orbit of the graph, by breadth-first
/// search over graph-only complementations. Fails when the register has
/// more than [`ORBIT_MAX_QUBITS`] vertices or the orbit exceeds `max_nodes`.
pub fn lc_orbit_search(reg: &GraphRegister, cost: CostFunction, max_nodes: usize) -> Result<f64> {
    let n = reg.num_qubits();
    if n > ORBIT_MAX_QUBITS {
        return Err(Error::Capacity {
            n,
            cap: ORBIT_MAX_QUBITS,
        });
    }
    let start = GraphRegister::from_edges(n, &reg.edges())?;
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.graph_key());
    let mut best = cost.evaluate(&start);
    queue.push_back(start);
    while let Some(g) = queue.pop_front() {
        for v in 0..n {
            let mut h = g.clone();
            h.local_complement_graph_only(v)?;
            if seen.insert(h.graph_key()) {
                if seen.len() > max_nodes {
                    return Err(Error::Capacity {
                        n: seen.len(),
                        cap: max_nodes,
                    });
                }
                best = best.min(cost.evaluate(&h));
                queue.push_back(h);
            }
        }
    }
    Ok(best)
}
