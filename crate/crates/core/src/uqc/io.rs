//! Circuit files (`.qc.json`): one JSON object on one line,
//! `{"n":1,"m":1,"gates":[{"g":"CNOT","q":[2,1]}]}`, qubits 1-based.

use serde::{Deserialize, Serialize};

use super::{build_gate_selector_uqc, Circuit, Program, UqcEntry, UqcSpec};
use crate::error::{QfheError, Result};
use crate::sim::{Gate, GateKind};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitRecord {
    n: usize,
    m: usize,
    gates: Vec<GateRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawGate")]
struct GateRecord {
    g: String,
    q: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    g: String,
    q: Vec<usize>,
}

impl TryFrom<RawGate> for GateRecord {
    type Error = String;

    // Shape checks run inside deserialization so errors carry line/column.
    fn try_from(raw: RawGate) -> std::result::Result<Self, String> {
        let kind: GateKind = raw.g.parse().map_err(|e: QfheError| e.to_string())?;
        if raw.q.len() != kind.arity() {
            return Err(format!(
                "{} takes {} qubit(s), got {}",
                raw.g,
                kind.arity(),
                raw.q.len()
            ));
        }
        if raw.q.contains(&0) {
            return Err("qubit indices are 1-based".into());
        }
        Ok(GateRecord { g: raw.g, q: raw.q })
    }
}

pub fn circuit_to_json(circuit: &Circuit) -> String {
    let record = CircuitRecord {
        n: circuit.n(),
        m: circuit.m(),
        gates: gate_records(circuit.gates()),
    };
    serde_json::to_string(&record).expect("circuit record serializes")
}

pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    let record: CircuitRecord = serde_json::from_str(text)?;
    record_to_circuit(&record)
}

fn gate_records(gates: &[Gate]) -> Vec<GateRecord> {
    gates
        .iter()
        .map(|g| GateRecord {
            g: g.kind().name().to_owned(),
            q: g.qubits().iter().map(|w| w + 1).collect(),
        })
        .collect()
}

fn record_to_circuit(record: &CircuitRecord) -> Result<Circuit> {
    let gates = record
        .gates
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let qubits: Vec<usize> = rec.q.iter().map(|w| w - 1).collect();
            let gate = rec.g.parse::<GateKind>()?.with_qubits(&qubits)?;
            gate.check(record.n + record.m).map_err(|e| {
                QfheError::parse(format!("gate {} ({gate}): {e}", i + 1))
            })?;
            Ok(gate)
        })
        .collect::<Result<Vec<_>>>()?;
    Circuit::with_gates(record.n, record.m, gates).map_err(|e| QfheError::parse(e.to_string()))
}

/// Serializes and parses back.
pub fn circuit_io_roundtrip(circuit: &Circuit) -> Result<Circuit> {
    circuit_from_json(&circuit_to_json(circuit))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProgramRecord {
    label: String,
    gates: Vec<GateRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureRecord {
    n: usize,
    menu: Vec<ProgramRecord>,
    circuit: CircuitRecord,
}

/// A gate-selector UQC as shipped on disk: the menu it was built from and
/// the compiled circuit. Menu entry `i` is selected by encoding `i` written
/// big-endian over the `m` encoding bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorFixture {
    pub n: usize,
    pub menu: Vec<Program>,
    pub circuit: Circuit,
}

impl SelectorFixture {
    pub fn build(n: usize, menu: Vec<Program>) -> Result<Self> {
        let spec = build_gate_selector_uqc(n, &menu)?;
        Ok(Self {
            n,
            menu,
            circuit: spec.circuit,
        })
    }

    /// The stored circuit paired with the family the menu describes.
    pub fn spec(&self) -> Result<UqcSpec> {
        let m = self.circuit.m();
        if self.menu.len() != 1 << m || self.circuit.n() != self.n {
            return Err(QfheError::InvalidDimensions(format!(
                "{} menu entries for a circuit with n={} m={}",
                self.menu.len(),
                self.circuit.n(),
                m
            )));
        }
        let family = self
            .menu
            .iter()
            .enumerate()
            .map(|(i, p)| UqcEntry {
                label: p.label.clone(),
                unitary: p.unitary(self.n),
                encoding: (0..m).map(|b| i >> (m - 1 - b) & 1 == 1).collect(),
            })
            .collect();
        UqcSpec::new(self.circuit.clone(), family)
    }

    pub fn to_json(&self) -> String {
        let record = FixtureRecord {
            n: self.n,
            menu: self
                .menu
                .iter()
                .map(|p| ProgramRecord {
                    label: p.label.clone(),
                    gates: gate_records(&p.gates),
                })
                .collect(),
            circuit: CircuitRecord {
                n: self.circuit.n(),
                m: self.circuit.m(),
                gates: gate_records(self.circuit.gates()),
            },
        };
        serde_json::to_string_pretty(&record).expect("fixture serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: FixtureRecord = serde_json::from_str(text)?;
        let menu = record
            .menu
            .iter()
            .map(|p| {
                let gates = p
                    .gates
                    .iter()
                    .map(|g| {
                        let qubits: Vec<usize> = g.q.iter().map(|w| w - 1).collect();
                        let gate = g.g.parse::<GateKind>()?.with_qubits(&qubits)?;
                        gate.check(record.n)?;
                        Ok(gate)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Program::new(p.label.clone(), gates))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: record.n,
            menu,
            circuit: record_to_circuit(&record.circuit)?,
        })
    }
}
