use std::fmt;
use std::str::FromStr;

use crate::error::{QfheError, Result};

/// The gate set of the scheme. Qubit indices are 0-based here; the textual
/// forms (`Display`, circuit files, transcripts) use 1-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    /// Phase gate `diag(1, i)`.
    P(usize),
    /// `diag(1, e^{iπ/4})`, the one non-Clifford gate.
    R(usize),
    Cnot { control: usize, target: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    P,
    R,
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::P,
        GateKind::R,
        GateKind::Cnot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::P => "P",
            GateKind::R => "R",
            GateKind::Cnot => "CNOT",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    /// Builds a gate of this kind from 0-based qubit indices.
    pub fn with_qubits(self, qubits: &[usize]) -> Result<Gate> {
        if qubits.len() != self.arity() {
            return Err(QfheError::parse(format!(
                "{} takes {} qubit(s), got {}",
                self.name(),
                self.arity(),
                qubits.len()
            )));
        }
        let w = qubits[0];
        Ok(match self {
            GateKind::X => Gate::X(w),
            GateKind::Y => Gate::Y(w),
            GateKind::Z => Gate::Z(w),
            GateKind::H => Gate::H(w),
            GateKind::P => Gate::P(w),
            GateKind::R => Gate::R(w),
            GateKind::Cnot => Gate::Cnot {
                control: w,
                target: qubits[1],
            },
        })
    }
}

impl FromStr for GateKind {
    type Err = QfheError;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| QfheError::parse(format!("unknown gate {s:?}")))
    }
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X(_) => GateKind::X,
            Gate::Y(_) => GateKind::Y,
            Gate::Z(_) => GateKind::Z,
            Gate::H(_) => GateKind::H,
            Gate::P(_) => GateKind::P,
            Gate::R(_) => GateKind::R,
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    /// 0-based qubits touched, control first for CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::X(w) | Gate::Y(w) | Gate::Z(w) | Gate::H(w) | Gate::P(w) | Gate::R(w) => {
                vec![w]
            }
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_clifford(&self) -> bool {
        !matches!(self, Gate::R(_))
    }

    /// Checks that the gate fits in a register of `width` qubits.
    pub fn check(&self, width: usize) -> Result<()> {
        for w in self.qubits() {
            if w >= width {
                return Err(QfheError::IndexOutOfRange { index: w, width });
            }
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(QfheError::DegenerateCnot(control));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot { control, target } => write!(f, "CNOT {}->{}", control + 1, target + 1),
            g => write!(f, "{}@{}", g.kind().name(), g.qubits()[0] + 1),
        }
    }
}
