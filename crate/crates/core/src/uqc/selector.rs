//! Gate-selector UQCs: a menu of `2^m` small programs on the data register,
//! with the `m` encoding bits choosing which program runs.
//!
//! Each program is reduced per data qubit to `X^a Z^b P^c` (up to phase).
//! The selection functions `a(e)`, `b(e)` are expanded in algebraic normal
//! form over GF(2) and `c(e)` as an integer polynomial mod 4; every monomial
//! becomes one encoding-controlled gate. Degree-1 terms compile to CNOT, CZ
//! (`H·CNOT·H`) or a controlled-P built from R gates; degree-2 terms compile
//! to a Toffoli (again R gates) or its CZ variant. Higher-degree terms and
//! doubly-controlled P are rejected.

use super::{Circuit, UqcEntry, UqcSpec};
use crate::error::{QfheError, Result};
use crate::sim::matrix::{gate_matrix, pauli_mask};
use crate::sim::{Gate, GateKind, Matrix};

/// A labelled program over the data qubits, built from X, Y, Z and P.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub label: String,
    pub gates: Vec<Gate>,
}

impl Program {
    pub fn new(label: impl Into<String>, gates: Vec<Gate>) -> Self {
        Self {
            label: label.into(),
            gates,
        }
    }

    pub fn identity() -> Self {
        Self::new("I", Vec::new())
    }

    pub(crate) fn unitary(&self, n: usize) -> Matrix {
        let mut u = Matrix::identity(1 << n);
        for g in &self.gates {
            let w = g.qubits()[0];
            let mut full = Matrix::identity(1);
            for q in 0..n {
                let factor = if q == w {
                    gate_matrix(g.kind())
                } else {
                    Matrix::identity(2)
                };
                full = full.kron(&factor);
            }
            u = &full * &u;
        }
        u
    }

    /// Per-qubit `(a, b, c)` with the program equal to `X^a Z^b P^c` on each
    /// qubit, up to global phase.
    fn canonical(&self, n: usize) -> Result<Vec<(bool, bool, bool)>> {
        let mut per_qubit = vec![Matrix::identity(2); n];
        for g in &self.gates {
            match g.kind() {
                GateKind::X | GateKind::Y | GateKind::Z | GateKind::P => {}
                _ => {
                    return Err(QfheError::UnsupportedProgram(format!(
                        "{}: gate {g} is outside {{X, Y, Z, P}}",
                        self.label
                    )))
                }
            }
            let w = g.qubits()[0];
            if w >= n {
                return Err(QfheError::UnsupportedProgram(format!(
                    "{}: gate {g} does not act on a data qubit",
                    self.label
                )));
            }
            per_qubit[w] = &gate_matrix(g.kind()) * &per_qubit[w];
        }
        per_qubit
            .iter()
            .map(|u| {
                for bits in 0..8u8 {
                    let (a, b, c) = (bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
                    let mut cand = pauli_mask(a, b);
                    if c {
                        cand = &cand * &gate_matrix(GateKind::P);
                    }
                    if u.phase_aligned_distance(&cand) < 1e-12 {
                        return Ok((a, b, c));
                    }
                }
                unreachable!("X, Z, P generate a group of X^a Z^b P^c up to phase")
            })
            .collect()
    }
}

fn cnot(control: usize, target: usize) -> Gate {
    Gate::Cnot { control, target }
}

/// `R†` as `Z·P·R` (all diagonal).
fn r_dagger(w: usize, out: &mut Vec<Gate>) {
    out.extend([Gate::Z(w), Gate::P(w), Gate::R(w)]);
}

fn toffoli(a: usize, b: usize, t: usize, out: &mut Vec<Gate>) {
    out.push(Gate::H(t));
    out.push(cnot(b, t));
    r_dagger(t, out);
    out.push(cnot(a, t));
    out.push(Gate::R(t));
    out.push(cnot(b, t));
    r_dagger(t, out);
    out.push(cnot(a, t));
    out.push(Gate::R(b));
    out.push(Gate::R(t));
    out.push(Gate::H(t));
    out.push(cnot(a, b));
    out.push(Gate::R(a));
    r_dagger(b, out);
    out.push(cnot(a, b));
}

fn controlled_p(c: usize, t: usize, out: &mut Vec<Gate>) {
    out.push(Gate::R(c));
    out.push(Gate::R(t));
    out.push(cnot(c, t));
    r_dagger(t, out);
    out.push(cnot(c, t));
}

#[derive(Clone, Copy, PartialEq)]
enum Action {
    X,
    Z,
    P,
}

/// Emits `action` on data qubit `t`, controlled on all of `controls`.
fn emit(action: Action, controls: &[usize], t: usize, out: &mut Vec<Gate>) -> Result<()> {
    match (action, controls) {
        (Action::X, []) => out.push(Gate::X(t)),
        (Action::Z, []) => out.push(Gate::Z(t)),
        (Action::P, []) => out.push(Gate::P(t)),
        (Action::X, &[c]) => out.push(cnot(c, t)),
        (Action::Z, &[c]) => out.extend([Gate::H(t), cnot(c, t), Gate::H(t)]),
        (Action::P, &[c]) => controlled_p(c, t, out),
        (Action::X, &[a, b]) => toffoli(a, b, t, out),
        (Action::Z, &[a, b]) => {
            out.push(Gate::H(t));
            toffoli(a, b, t, out);
            out.push(Gate::H(t));
        }
        _ => {
            return Err(QfheError::UnsupportedProgram(format!(
                "selection needs a {}-controlled {} on data qubit {}",
                controls.len(),
                match action {
                    Action::X => "X",
                    Action::Z => "Z",
                    Action::P => "P",
                },
                t + 1
            )))
        }
    }
    Ok(())
}

/// GF(2) Möbius transform: truth table to ANF coefficients.
fn anf_mod2(table: &[bool]) -> Vec<bool> {
    let mut coef = table.to_vec();
    let mut step = 1;
    while step < coef.len() {
        for i in 0..coef.len() {
            if i & step != 0 {
                coef[i] ^= coef[i ^ step];
            }
        }
        step <<= 1;
    }
    coef
}

/// Integer Möbius transform, reduced mod 4.
fn anf_mod4(table: &[u8]) -> Vec<u8> {
    let mut coef: Vec<i32> = table.iter().map(|&v| v as i32).collect();
    let mut step = 1;
    while step < coef.len() {
        for i in 0..coef.len() {
            if i & step != 0 {
                coef[i] -= coef[i ^ step];
            }
        }
        step <<= 1;
    }
    coef.into_iter().map(|c| c.rem_euclid(4) as u8).collect()
}

/// Encoding qubits (absolute indices) named by a monomial mask over the
/// menu index; the first encoding qubit is the index's most significant bit.
fn monomial_controls(mask: usize, n: usize, m: usize) -> Vec<usize> {
    (0..m).filter(|i| mask & (1 << (m - 1 - i)) != 0).map(|i| n + i).collect()
}

/// Builds a UQC over `n` data qubits selecting among `menu`. Encoding
/// `e` (as a big-endian integer) selects `menu[e]`.
pub fn build_gate_selector_uqc(n: usize, menu: &[Program]) -> Result<UqcSpec> {
    if menu.is_empty() || !menu.len().is_power_of_two() {
        return Err(QfheError::InvalidDimensions(format!(
            "menu length {} is not a power of two",
            menu.len()
        )));
    }
    if n == 0 {
        return Err(QfheError::InvalidDimensions("n must be at least 1".into()));
    }
    let m = menu.len().trailing_zeros() as usize;
    let canon = menu
        .iter()
        .map(|p| p.canonical(n))
        .collect::<Result<Vec<_>>>()?;

    let mut gates = Vec::new();
    for t in 0..n {
        // P part first, then Z, then X: the data qubit sees X^a Z^b P^c.
        let p_table: Vec<u8> = canon.iter().map(|c| c[t].2 as u8).collect();
        for (mask, k) in anf_mod4(&p_table).into_iter().enumerate() {
            let controls = monomial_controls(mask, n, m);
            match (k, controls.len()) {
                (0, _) => {}
                (_, 0 | 1) => {
                    // P^2 = Z
                    if k & 2 != 0 {
                        emit(Action::Z, &controls, t, &mut gates)?;
                    }
                    if k & 1 != 0 {
                        emit(Action::P, &controls, t, &mut gates)?;
                    }
                }
                (2, _) => emit(Action::Z, &controls, t, &mut gates)?,
                _ => emit(Action::P, &controls, t, &mut gates)?,
            }
        }
        for (action, pick) in [
            (Action::Z, (|c: &(bool, bool, bool)| c.1) as fn(&(bool, bool, bool)) -> bool),
            (Action::X, |c: &(bool, bool, bool)| c.0),
        ] {
            let table: Vec<bool> = canon.iter().map(|c| pick(&c[t])).collect();
            for (mask, on) in anf_mod2(&table).into_iter().enumerate() {
                if on {
                    emit(action, &monomial_controls(mask, n, m), t, &mut gates)?;
                }
            }
        }
    }

    let circuit = Circuit::with_gates(n, m, gates)?;
    let family = menu
        .iter()
        .enumerate()
        .map(|(i, p)| UqcEntry {
            label: p.label.clone(),
            unitary: p.unitary(n),
            encoding: (0..m).map(|b| i & (1 << (m - 1 - b)) != 0).collect(),
        })
        .collect();
    UqcSpec::new(circuit, family)
}
