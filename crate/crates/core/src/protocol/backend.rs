//! The shared simulation backend. Qubits cannot be split out of an entangled
//! register, so "sending a qubit" moves its custody instead; every gate goes
//! through [`Backend::apply`], which rejects gates from a non-owner.

use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;

use crate::error::{QfheError, Result};
use crate::pauli_frame::RandomBitPair;
use crate::sim::{basis_index, Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Client,
    Server,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustodyMap {
    owners: Vec<Party>,
}

impl CustodyMap {
    pub fn all(width: usize, owner: Party) -> Self {
        Self {
            owners: vec![owner; width],
        }
    }

    pub fn owner(&self, w: usize) -> Party {
        self.owners[w]
    }

    pub fn owners(&self) -> &[Party] {
        &self.owners
    }
}

#[derive(Debug)]
pub struct Backend {
    state: StateVector,
    custody: CustodyMap,
}

pub type SharedBackend = Arc<Mutex<Backend>>;

impl Backend {
    /// Loads a register with every qubit owned by `owner`.
    pub fn new(state: StateVector, owner: Party) -> Self {
        let custody = CustodyMap::all(state.num_qubits(), owner);
        Self { state, custody }
    }

    pub fn shared(self) -> SharedBackend {
        Arc::new(Mutex::new(self))
    }

    pub fn custody(&self) -> &CustodyMap {
        &self.custody
    }

    pub fn width(&self) -> usize {
        self.state.num_qubits()
    }

    fn check_owner(&self, party: Party, w: usize) -> Result<()> {
        if w >= self.width() {
            return Err(QfheError::IndexOutOfRange {
                index: w,
                width: self.width(),
            });
        }
        if self.custody.owner(w) != party {
            return Err(QfheError::CustodyViolation(format!(
                "{party:?} touched qubit {} held by {:?}",
                w + 1,
                self.custody.owner(w)
            )));
        }
        Ok(())
    }

    pub fn apply(&mut self, party: Party, gate: &Gate) -> Result<()> {
        gate.check(self.width())?;
        for w in gate.qubits() {
            self.check_owner(party, w)?;
        }
        self.state.apply_gate_mut(gate)
    }

    pub fn hand_over(&mut self, w: usize, from: Party, to: Party) -> Result<()> {
        self.check_owner(from, w)?;
        self.custody.owners[w] = to;
        Ok(())
    }

    pub fn hand_over_all(&mut self, from: Party, to: Party) -> Result<()> {
        for w in 0..self.width() {
            self.hand_over(w, from, to)?;
        }
        Ok(())
    }

    /// Read access for a party holding the whole register.
    pub fn state(&self, party: Party) -> Result<&StateVector> {
        for w in 0..self.width() {
            self.check_owner(party, w)?;
        }
        Ok(&self.state)
    }

    /// Discards the trailing `encoding.len()` qubits and prepares them
    /// afresh in `|encoding⟩`. The discarded register must be unentangled
    /// with the rest (purity within `1e-9` of one).
    pub fn reprepare_tail(&mut self, party: Party, encoding: &[bool]) -> Result<()> {
        let q = self.width();
        let m = encoding.len();
        if m == 0 {
            return Ok(());
        }
        for w in q - m..q {
            self.check_owner(party, w)?;
        }
        let n = q - m;
        let amps = self.state.amplitudes();
        let rows = 1usize << n;
        let cols = 1usize << m;
        // reduced state on the leading register: rho = M M^dagger
        let mut rho = vec![C64::new(0.0, 0.0); rows * rows];
        for r in 0..rows {
            for c in 0..rows {
                rho[r * rows + c] = (0..cols)
                    .map(|k| amps[r * cols + k] * amps[c * cols + k].conj())
                    .sum();
            }
        }
        let purity: f64 = (0..rows)
            .flat_map(|r| (0..rows).map(move |c| (r, c)))
            .map(|(r, c)| (rho[r * rows + c] * rho[c * rows + r]).re)
            .sum();
        if purity < 1.0 - 1e-9 {
            return Err(QfheError::EncodingEntangled(purity));
        }
        // the column of M with the largest weight is proportional to the
        // leading register's state
        let best = (0..cols)
            .max_by(|&a, &b| {
                let wa: f64 = (0..rows).map(|r| amps[r * cols + a].norm_sqr()).sum();
                let wb: f64 = (0..rows).map(|r| amps[r * cols + b].norm_sqr()).sum();
                wa.total_cmp(&wb)
            })
            .unwrap();
        let column: Vec<C64> = (0..rows).map(|r| amps[r * cols + best]).collect();
        let norm = column.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let target = basis_index(encoding);
        let mut fresh = vec![C64::new(0.0, 0.0); rows * cols];
        for (r, a) in column.iter().enumerate() {
            fresh[r * cols + target] = a / norm;
        }
        self.state = StateVector::from_amplitudes_with_cap(fresh, q)?;
        Ok(())
    }
}

/// The client's correction on qubit `w` after the server's R gate:
/// `X^r Z^{r'} P^{x_bit}`, with `P^{x_bit}` applied first.
pub fn client_r_step(
    backend: &mut Backend,
    w: usize,
    x_bit: bool,
    pair: RandomBitPair,
) -> Result<()> {
    backend.check_owner(Party::Client, w)?;
    if x_bit {
        backend.apply(Party::Client, &Gate::P(w))?;
    }
    if pair.r_prime {
        backend.apply(Party::Client, &Gate::Z(w))?;
    }
    if pair.r {
        backend.apply(Party::Client, &Gate::X(w))?;
    }
    Ok(())
}
