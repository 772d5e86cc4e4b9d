//! Python bindings for the `mbpat` core crate.

use std::collections::BTreeMap;

use mbpat::anneal::{anneal_restarts, CostFunction, Schedule};
use mbpat::compile::{compile_input, CircuitInput, CompileOptions};
use mbpat::dense::StateVector;
use mbpat::graph::GraphRegister;
use mbpat::hamiltonian::Hamiltonian;
use mbpat::hybrid::{self, DenseBackend};
use mbpat::pattern::{CliffordPart, GraphForm, Layout};
use mbpat::pauli;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(from_py_object, module = "mbpat", frozen, eq)]
#[derive(Clone, PartialEq)]
struct PauliString(pauli::PauliString);

#[pymethods]
impl PauliString {
    /// Dense (`"XZI"`, character i is qubit i) or sparse (`"X0 Z1"`) text.
    #[new]
    fn new(text: &str, num_qubits: usize) -> PyResult<Self> {
        pauli::PauliString::parse(text, num_qubits).map(Self).map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn weight(&self) -> usize {
        self.0.weight()
    }

    fn commutes(&self, other: &PauliString) -> PyResult<bool> {
        self.0.commutes(&other.0).map_err(err)
    }

    fn __mul__(&self, other: &PauliString) -> PyResult<PauliString> {
        self.0.multiply(&other.0).map(Self).map_err(err)
    }

    fn to_sparse(&self) -> String {
        self.0.to_sparse()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliString('{}')", self.0)
    }
}

#[pyclass(from_py_object, module = "mbpat")]
#[derive(Clone)]
struct Graph(GraphRegister);

#[pymethods]
impl Graph {
    /// Graph state with identity vertex operators.
    #[new]
    fn new(num_qubits: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        GraphRegister::from_edges(num_qubits, &edges).map(Self).map_err(err)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges()
    }

    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    fn vops(&self) -> Vec<String> {
        self.0.vops().iter().map(|v| v.to_string()).collect()
    }

    fn apply_cz(&mut self, a: usize, b: usize) -> PyResult<()> {
        self.0.apply_cz(a, b).map_err(err)
    }

    fn local_complement(&mut self, v: usize) -> PyResult<()> {
        self.0.local_complement(v).map_err(err)
    }

    fn amplitudes(&self) -> PyResult<Vec<Complex64>> {
        Ok(self.0.to_statevector().map_err(err)?.amplitudes().to_vec())
    }

    fn to_dot(&self) -> String {
        self.0.to_dot(None)
    }
}

#[pyclass(from_py_object, module = "mbpat", frozen)]
#[derive(Clone)]
struct Circuit(CircuitInput);

#[pymethods]
impl Circuit {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        mbpat::io::circuit_from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        mbpat::io::circuit_to_json(&self.0)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits
    }

    /// Exact output distribution over all bitstrings, indexed by integer value.
    fn distribution(&self) -> PyResult<Vec<f64>> {
        let mut s = StateVector::zero(self.0.num_qubits).map_err(err)?;
        self.0.apply_to(&mut s).map_err(err)?;
        let all: Vec<usize> = (0..self.0.num_qubits).collect();
        s.distribution(&all).map_err(err)
    }
}

#[pyclass(from_py_object, module = "mbpat")]
#[derive(Clone)]
struct Pattern(mbpat::pattern::Pattern);

#[pymethods]
impl Pattern {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        mbpat::io::pattern_from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        mbpat::io::pattern_to_json(&self.0)
    }

    #[getter]
    fn total_qubits(&self) -> usize {
        self.0.total_qubits
    }

    #[getter]
    fn main_qubits(&self) -> usize {
        self.0.main_qubits
    }

    #[getter]
    fn is_graph_form(&self) -> bool {
        self.0.is_graph_form()
    }

    fn to_graph_form(&self) -> PyResult<Pattern> {
        self.0.to_graph_form().map(Self).map_err(err)
    }

    fn depth_report(&self) -> BTreeMap<&'static str, usize> {
        let r = self.0.depth_report();
        BTreeMap::from([
            ("entangling_layers", r.entangling_layers),
            ("cnot_count", r.cnot_count),
            ("cz_count", r.cz_count),
            ("ancilla_count", r.ancilla_count),
            ("parallel_groups", r.parallel_groups),
        ])
    }

    /// The graph-form register, if any.
    fn graph(&self) -> Option<Graph> {
        match &self.0.clifford {
            CliffordPart::Graph(g) => Some(Graph(g.register.clone())),
            CliffordPart::Circuit(_) => None,
        }
    }

    /// Largest amplitude deviation over all measurement branches.
    fn verify(&self, circuit: &Circuit) -> PyResult<f64> {
        Ok(mbpat::verify::verify_branches(&circuit.0, &self.0, None).map_err(err)?.max_deviation())
    }

    fn distribution(&self) -> PyResult<Vec<f64>> {
        mbpat::verify::pattern_distribution(&self.0).map_err(err)
    }

    #[pyo3(signature = (shots, seed=0))]
    fn sample(&self, shots: usize, seed: u64) -> PyResult<BTreeMap<String, u64>> {
        hybrid::execute(&self.0, shots, &DenseBackend::default(), seed).map_err(err)
    }

    /// Hybrid estimate of a diagonal observable: `(value, std_error)`.
    #[pyo3(signature = (hamiltonian, shots, seed=0))]
    fn expectation(&self, hamiltonian: &str, shots: usize, seed: u64) -> PyResult<(f64, f64)> {
        let h = Hamiltonian::parse(hamiltonian).map_err(err)?;
        let e = hybrid::expectation(&self.0, &h, shots, &DenseBackend::default(), seed).map_err(err)?;
        Ok((e.value, e.std_error))
    }

    /// Anneal the graph-form register; returns the new pattern and `(initial, best)` cost.
    #[pyo3(signature = (cost="edges", t0=2.0, cooling=0.995, steps=2000, restarts=1, seed=0))]
    fn anneal(
        &self,
        cost: &str,
        t0: f64,
        cooling: f64,
        steps: usize,
        restarts: usize,
        seed: u64,
    ) -> PyResult<(Pattern, f64, f64)> {
        let CliffordPart::Graph(gf) = &self.0.clifford else {
            return Err(err(mbpat::Error::NotGraphForm));
        };
        let cost: CostFunction = cost.parse().map_err(err)?;
        let r = anneal_restarts(&gf.register, cost, &Schedule { t0, cooling, steps }, restarts, seed).map_err(err)?;
        let mut p = self.0.clone();
        p.clifford = CliffordPart::Graph(GraphForm { register: r.register });
        Ok((Pattern(p), r.initial_cost, r.best_cost))
    }
}

#[pyfunction]
#[pyo3(signature = (circuit, layout="star", graph_form=false, parallel_fan=false, diagonalize_groups=false, optimize=true))]
fn compile(
    circuit: &Circuit,
    layout: &str,
    graph_form: bool,
    parallel_fan: bool,
    diagonalize_groups: bool,
    optimize: bool,
) -> PyResult<Pattern> {
    let layout: Layout = layout.parse().map_err(err)?;
    let opts = CompileOptions { parallel_fan, diagonalize_groups, optimize };
    let mut p = compile_input(&circuit.0, layout, &opts).map_err(err)?;
    if graph_form {
        p = p.to_graph_form().map_err(err)?;
    }
    Ok(Pattern(p))
}

#[pyfunction]
fn hellinger_normalized(ideal: Vec<f64>, measured: Vec<f64>) -> PyResult<f64> {
    hybrid::hellinger_normalized(&ideal, &measured).map_err(err)
}

#[pyfunction]
fn counts_to_distribution(counts: BTreeMap<String, u64>, num_qubits: usize) -> PyResult<Vec<f64>> {
    hybrid::counts_to_distribution(&counts, num_qubits).map_err(err)
}

#[pymodule]
#[pyo3(name = "mbpat")]
fn mbpat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PauliString>()?;
    m.add_class::<Graph>()?;
    m.add_class::<Circuit>()?;
    m.add_class::<Pattern>()?;
    m.add_function(wrap_pyfunction!(compile, m)?)?;
    m.add_function(wrap_pyfunction!(hellinger_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(counts_to_distribution, m)?)?;
    Ok(())
}
