//! JSON documents for circuits and patterns.

use serde::{Deserialize, Serialize};

use crate::compile::{CircuitInput, CircuitItem};
use crate::error::{Error, Result};
use crate::graph::GraphRegister;
use crate::local_clifford::LocalClifford;
use crate::pattern::{
    CliffordPart, CorrectionTerm, GraphForm, Layout, MeasurementInstruction, Pattern,
};
use crate::pauli::{CliffordGate, PauliRotation, PauliString};

pub const PATTERN_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ItemDoc {
    Rotation { pauli: String, angle: f64 },
    Clifford { gates: Vec<CliffordGate> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    num_qubits: usize,
    #[serde(default)]
    initial: Vec<CliffordGate>,
    exponentials: Vec<ItemDoc>,
}

/// Parses `{num_qubits, initial:[gate…], exponentials:[{pauli, angle} | {gates:[…]}]}`.
/// Pauli strings may be dense (`"XXYZ"`) or sparse (`"X0 Y3"`).
pub fn circuit_from_json(text: &str) -> Result<CircuitInput> {
    let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = doc.num_qubits;
    let items = doc
        .exponentials
        .into_iter()
        .map(|it| match it {
            ItemDoc::Rotation { pauli, angle } => {
                let s = PauliString::parse(&pauli, n)?;
                Ok(CircuitItem::Rotation(PauliRotation::from_signed(s, angle)?))
            }
            ItemDoc::Clifford { gates } => Ok(CircuitItem::Clifford(gates)),
        })
        .collect::<Result<Vec<_>>>()?;
    let input = CircuitInput {
        num_qubits: n,
        initial: doc.initial,
        items,
    };
    input.validate()?;
    Ok(input)
}

pub fn circuit_to_json(input: &CircuitInput) -> String {
    let doc = CircuitDoc {
        num_qubits: input.num_qubits,
        initial: input.initial.clone(),
        exponentials: input
            .items
            .iter()
            .map(|it| match it {
                CircuitItem::Rotation(r) => ItemDoc::Rotation {
                    pauli: r.string().to_string(),
                    angle: r.angle(),
                },
                CircuitItem::Clifford(g) => ItemDoc::Clifford { gates: g.clone() },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("circuit document serializes")
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    edges: Vec<(usize, usize)>,
    vops: Vec<String>,
    /// Read-out basis of each main holder, e.g. `"Z"` or `"-X"`.
    main_bases: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RotationDoc {
    pauli: PauliString,
    angle: f64,
}

#[derive(Serialize, Deserialize)]
struct PatternDoc {
    version: u32,
    main_qubits: usize,
    ancillas: usize,
    total_qubits: usize,
    layout: Layout,
    main_map: Vec<usize>,
    spare: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    clifford_gates: Option<Vec<CliffordGate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph: Option<GraphDoc>,
    measurements: Vec<MeasurementInstruction>,
    corrections: Vec<CorrectionTerm>,
    generators: Vec<RotationDoc>,
}

pub fn pattern_to_json(p: &Pattern) -> String {
    let (clifford_gates, graph) = match &p.clifford {
        CliffordPart::Circuit(g) => (Some(g.clone()), None),
        CliffordPart::Graph(gf) => {
            let main_bases = p
                .main_map
                .iter()
                .map(|&q| {
                    let (b, neg) = gf.main_basis(q);
                    format!("{}{b:?}", if neg { "-" } else { "" })
                })
                .collect();
            let reg = &gf.register;
            let g = GraphDoc {
                edges: reg.edges(),
                vops: reg.vops().iter().map(|v| v.to_string()).collect(),
                main_bases,
            };
            (None, Some(g))
        }
    };
    let doc = PatternDoc {
        version: PATTERN_VERSION,
        main_qubits: p.main_qubits,
        ancillas: p.ancilla_count(),
        total_qubits: p.total_qubits,
        layout: p.layout,
        main_map: p.main_map.clone(),
        spare: p.spare.clone(),
        clifford_gates,
        graph,
        measurements: p.measurements.clone(),
        corrections: p.corrections.clone(),
        generators: p
            .generators
            .iter()
            .map(|r| RotationDoc {
                pauli: r.string().clone(),
                angle: r.angle(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("pattern document serializes")
}

pub fn pattern_from_json(text: &str) -> Result<Pattern> {
    let doc: PatternDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.version != PATTERN_VERSION {
        return Err(Error::Parse(format!("unsupported pattern version {}", doc.version)));
    }
    let clifford = match (doc.clifford_gates, doc.graph) {
        (Some(g), None) => CliffordPart::Circuit(g),
        (None, Some(g)) => {
            let mut reg = GraphRegister::from_edges(doc.total_qubits, &g.edges)?;
            if g.vops.len() != doc.total_qubits {
                return Err(Error::LengthMismatch(g.vops.len(), doc.total_qubits));
            }
            for (q, v) in g.vops.iter().enumerate() {
                reg.set_vop(q, v.parse::<LocalClifford>()?)?;
            }
            CliffordPart::Graph(GraphForm { register: reg })
        }
        _ => {
            return Err(Error::Parse(
                "pattern needs exactly one of clifford_gates and graph".into(),
            ))
        }
    };
    let generators = doc
        .generators
        .into_iter()
        .map(|r| PauliRotation::from_signed(r.pauli, r.angle))
        .collect::<Result<Vec<_>>>()?;
    let p = Pattern {
        main_qubits: doc.main_qubits,
        total_qubits: doc.total_qubits,
        layout: doc.layout,
        main_map: doc.main_map,
        spare: doc.spare,
        clifford,
        measurements: doc.measurements,
        corrections: doc.corrections,
        generators,
    };
    p.validate()?;
    if p.ancilla_count() != doc.ancillas {
        return Err(Error::Parse(format!(
            "ancillas field says {} but {} measured qubits are ancillas",
            doc.ancillas,
            p.ancilla_count()
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile_input, CompileOptions};

    const ZZ_CIRCUIT: &str = r#"{"num_qubits": 2, "exponentials": [{"pauli": "ZZ", "angle": 0.7}]}"#;

    #[test]
    fn circuit_round_trip() {
        let c = circuit_from_json(ZZ_CIRCUIT).unwrap();
        assert_eq!(circuit_from_json(&circuit_to_json(&c)).unwrap(), c);
        let sparse = r#"{"num_qubits": 3, "initial": ["H 0"], "exponentials": [{"pauli": "X0 Z2", "angle": 1}, {"gates": ["CX 0 1"]}]}"#;
        let c = circuit_from_json(sparse).unwrap();
        assert_eq!(c.items.len(), 2);
    }

    #[test]
    fn pattern_round_trip_both_forms() {
        let c = circuit_from_json(ZZ_CIRCUIT).unwrap();
        for layout in [Layout::Star, Layout::StarAncilla] {
            let p = compile_input(&c, layout, &CompileOptions::default()).unwrap();
            assert_eq!(pattern_from_json(&pattern_to_json(&p)).unwrap(), p);
            let g = p.to_graph_form().unwrap();
            assert_eq!(pattern_from_json(&pattern_to_json(&g)).unwrap(), g);
        }
    }

    #[test]
    fn bad_documents_are_rejected() {
        assert!(circuit_from_json(r#"{"num_qubits": 2, "exponentials": [{"pauli": "ZZZ", "angle": 1}]}"#).is_err());
        let c = circuit_from_json(ZZ_CIRCUIT).unwrap();
        let p = compile_input(&c, Layout::Star, &CompileOptions::default()).unwrap();
        let text = pattern_to_json(&p).replace("\"version\": 1", "\"version\": 9");
        assert!(pattern_from_json(&text).is_err());
    }
}
