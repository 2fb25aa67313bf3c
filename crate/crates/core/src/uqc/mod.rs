//! Circuits with a data interface (`n` qubits) and an encoding interface
//! (`m` qubits), and checks that a circuit is universal for a family of
//! unitaries: `C(|d⟩ ⊗ |e_U⟩) = (U|d⟩) ⊗ |e_U⟩` for every basis string `d`.

mod io;
mod selector;

pub use io::{circuit_from_json, circuit_io_roundtrip, circuit_to_json, SelectorFixture};
pub use selector::{build_gate_selector_uqc, Program};

use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{QfheError, Result};
use crate::sim::{basis_index, equal_up_to_phase, Gate, Matrix, StateVector};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    n: usize,
    m: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Self::with_gates(n, m, Vec::new())
    }

    pub fn with_gates(n: usize, m: usize, gates: Vec<Gate>) -> Result<Self> {
        if n == 0 {
            return Err(QfheError::InvalidDimensions(
                "a circuit needs at least one data qubit".into(),
            ));
        }
        for g in &gates {
            g.check(n + m)?;
        }
        Ok(Self { n, m, gates })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.width())?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn width(&self) -> usize {
        self.n + self.m
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gate count `k`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of R gates, each of which costs one client interaction.
    pub fn r_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_clifford()).count()
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(circuit_to_json(self).as_bytes()).into()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "]")
    }
}

pub fn run_circuit(circuit: &Circuit, input: &StateVector) -> Result<StateVector> {
    if input.num_qubits() != circuit.width() {
        return Err(QfheError::DimensionMismatch {
            expected: circuit.width(),
            actual: input.num_qubits(),
        });
    }
    let mut state = input.clone();
    for g in circuit.gates() {
        state.apply_gate_mut(g)?;
    }
    Ok(state)
}

/// One member of the family a UQC claims to realize.
#[derive(Debug, Clone, PartialEq)]
pub struct UqcEntry {
    pub label: String,
    /// `2^n x 2^n`.
    pub unitary: Matrix,
    /// Classical encoding string, length `m`.
    pub encoding: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UqcSpec {
    pub circuit: Circuit,
    pub family: Vec<UqcEntry>,
}

impl UqcSpec {
    pub fn new(circuit: Circuit, family: Vec<UqcEntry>) -> Result<Self> {
        let dim = 1usize << circuit.n();
        for e in &family {
            if e.unitary.dim() != dim {
                return Err(QfheError::DimensionMismatch {
                    expected: dim,
                    actual: e.unitary.dim(),
                });
            }
            if e.encoding.len() != circuit.m() {
                return Err(QfheError::DimensionMismatch {
                    expected: circuit.m(),
                    actual: e.encoding.len(),
                });
            }
            if !e.unitary.is_unitary(1e-10) {
                return Err(QfheError::InvalidDimensions(format!(
                    "{} is not unitary",
                    e.label
                )));
            }
        }
        Ok(Self { circuit, family })
    }

    pub fn entry(&self, label: &str) -> Option<&UqcEntry> {
        self.family.iter().find(|e| e.label == label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UqcFailure {
    pub label: String,
    pub data: Vec<bool>,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UqcReport {
    pub checked: usize,
    pub failures: Vec<UqcFailure>,
}

impl UqcReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for UqcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:<10} {:>14}", "unitary", "data", "overlap")?;
        for fail in &self.failures {
            writeln!(
                f,
                "{:<16} {:<10} {:>14.12}",
                fail.label,
                bitstring(&fail.data),
                fail.overlap
            )?;
        }
        write!(
            f,
            "{} of {} (unitary, data) pairs pass",
            self.checked - self.failures.len(),
            self.checked
        )
    }
}

/// Checks the universality relation for every family member and every
/// computational-basis data string.
pub fn validate_uqc(spec: &UqcSpec, tol: f64) -> Result<UqcReport> {
    let n = spec.circuit.n();
    let mut failures = Vec::new();
    let mut checked = 0;
    for entry in &spec.family {
        let enc = StateVector::basis(&entry.encoding)?;
        for d in 0..1usize << n {
            let bits: Vec<bool> = (0..n).map(|i| d & (1 << (n - 1 - i)) != 0).collect();
            debug_assert_eq!(basis_index(&bits), d);
            let input = StateVector::basis(&bits)?.tensor(&enc)?;
            let out = run_circuit(&spec.circuit, &input)?;
            let column: Vec<_> = (0..1usize << n).map(|r| entry.unitary.get(r, d)).collect();
            let expected = StateVector::from_amplitudes(column)?.tensor(&enc)?;
            checked += 1;
            if !equal_up_to_phase(&out, &expected, tol)? {
                failures.push(UqcFailure {
                    label: entry.label.clone(),
                    data: bits,
                    overlap: out.inner(&expected)?.norm(),
                });
            }
        }
    }
    Ok(UqcReport { checked, failures })
}
