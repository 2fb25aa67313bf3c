//! Finite checks of the scheme's security and cost claims: one-time-pad
//! mixing, the Pauli-twirl privacy of the R-gate interaction, the gate/key
//! conjugation identities, and run counters.

use std::fmt;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QfheError, Result};
use crate::pauli_frame::{draw_bit, qotp_apply, update_clifford, update_r, PauliKey, RandomBitPair};
use crate::protocol::{client_r_step, Backend, EvaluationPlan, Party, Transcript};
use crate::sim::matrix::{gate_matrix, pauli_mask};
use crate::sim::{mix, partial_trace, DensityMatrix, Gate, GateKind, Matrix, StateVector};

/// Largest `n` for which [`qotp_mixing_check`] enumerates all `4^n` keys.
pub const EXHAUSTIVE_MAX_QUBITS: usize = 3;
/// Error bound for a conjugation case to pass.
pub const CONJUGATION_TOLERANCE: f64 = 1e-12;
/// 5 single-qubit gates x 4 keys, 16 CNOT keys, 16 R keys x (r, r').
pub const CONJUGATION_CASES: usize = 52;

fn bits(value: usize, len: usize) -> Vec<bool> {
    (0..len).map(|i| value >> (len - 1 - i) & 1 == 1).collect()
}

fn encrypted_density(plain: &StateVector, x: &[bool], z: &[bool]) -> Result<DensityMatrix> {
    let targets: Vec<usize> = (0..plain.num_qubits()).collect();
    Ok(qotp_apply(plain, x, z, &targets)?.density())
}

/// Max entrywise deviation of the key-averaged ciphertext from `I/2^n`,
/// averaging over all `4^n` keys.
pub fn qotp_mixing_check(n: usize, plain: &StateVector) -> Result<f64> {
    if plain.num_qubits() != n {
        return Err(QfheError::DimensionMismatch {
            expected: n,
            actual: plain.num_qubits(),
        });
    }
    if n > EXHAUSTIVE_MAX_QUBITS {
        return Err(QfheError::TooLarge(n));
    }
    let keys = 1usize << (2 * n);
    let weight = 1.0 / keys as f64;
    let mut terms = Vec::with_capacity(keys);
    for k in 0..keys {
        let all = bits(k, 2 * n);
        terms.push((weight, encrypted_density(plain, &all[..n], &all[n..])?));
    }
    Ok(mix(&terms)?.max_deviation(&DensityMatrix::maximally_mixed(n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingEstimate {
    pub samples: usize,
    pub deviation: f64,
    /// Largest per-entry standard error of the sample mean.
    pub standard_error: f64,
    /// Four standard errors: the deviation expected from sampling alone.
    pub bound: f64,
}

/// Monte-Carlo version of [`qotp_mixing_check`] with `samples` keys drawn
/// with replacement from a generator seeded with `seed`.
pub fn qotp_mixing_sampled(plain: &StateVector, samples: usize, seed: u64) -> Result<MixingEstimate> {
    if samples == 0 {
        return Err(QfheError::InvalidDimensions("need at least one sample".into()));
    }
    let n = plain.num_qubits();
    let dim = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = vec![C64::new(0.0, 0.0); dim * dim];
    let mut sum_sq = vec![0.0f64; dim * dim];
    for _ in 0..samples {
        let x: Vec<bool> = (0..n).map(|_| draw_bit(&mut rng)).collect();
        let z: Vec<bool> = (0..n).map(|_| draw_bit(&mut rng)).collect();
        let rho = encrypted_density(plain, &x, &z)?;
        for (i, v) in rho.matrix().as_slice().iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v.norm_sqr();
        }
    }
    let s = samples as f64;
    let target = DensityMatrix::maximally_mixed(n);
    let mut deviation = 0.0f64;
    let mut standard_error = 0.0f64;
    for (i, (total, sq)) in sum.iter().zip(&sum_sq).enumerate() {
        let mean = total / s;
        deviation = deviation.max((mean - target.matrix().as_slice()[i]).norm());
        let var = (sq / s - mean.norm_sqr()).max(0.0);
        standard_error = standard_error.max((var / s).sqrt());
    }
    Ok(MixingEstimate {
        samples,
        deviation,
        standard_error,
        bound: 4.0 * standard_error,
    })
}

/// The `(r, r')`-averaged reduced state of qubit `w` after the client's
/// correction with `x_bit`.
pub fn twirled_qubit(x_bit: bool, incoming: &StateVector, w: usize) -> Result<DensityMatrix> {
    let mut terms = Vec::with_capacity(4);
    for pair in RandomBitPair::all() {
        let mut b = Backend::new(incoming.clone(), Party::Client);
        client_r_step(&mut b, w, x_bit, pair)?;
        let rho = b.state(Party::Client)?.density();
        terms.push((0.25, partial_trace(&rho, &[w])?));
    }
    mix(&terms)
}

/// Max entrywise deviation of [`twirled_qubit`] from `I/2`.
pub fn interaction_privacy_check(x_bit: bool, incoming: &StateVector, w: usize) -> Result<f64> {
    Ok(twirled_qubit(x_bit, incoming, w)?.max_deviation(&DensityMatrix::maximally_mixed(1)))
}

/// Max entrywise difference between the twirled states for `x_bit = 0` and
/// `x_bit = 1`.
pub fn interaction_x_independence(incoming: &StateVector, w: usize) -> Result<f64> {
    Ok(twirled_qubit(false, incoming, w)?.max_deviation(&twirled_qubit(true, incoming, w)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugationCase {
    pub gate: String,
    pub x_in: Vec<bool>,
    pub z_in: Vec<bool>,
    /// `(r, r')` for R cases.
    pub r_pair: Option<(bool, bool)>,
    pub x_out: Vec<bool>,
    pub z_out: Vec<bool>,
    pub error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugationReport {
    pub cases: Vec<ConjugationCase>,
}

impl ConjugationReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn passed_count(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }

    pub fn max_error(&self) -> f64 {
        self.cases.iter().map(|c| c.error).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn bitstr(b: &[bool]) -> String {
    b.iter().map(|&v| if v { '1' } else { '0' }).collect()
}

impl fmt::Display for ConjugationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<6} {:>4} {:>4} {:>5} {:>5} {:>5} {:>10}  result", "gate", "x", "z", "rr'", "x'", "z'", "error")?;
        for c in &self.cases {
            let rr = match c.r_pair {
                Some((r, rp)) => format!("{}{}", r as u8, rp as u8),
                None => "-".into(),
            };
            writeln!(
                f,
                "{:<6} {:>4} {:>4} {:>5} {:>5} {:>5} {:>10.2e}  {}",
                c.gate,
                bitstr(&c.x_in),
                bitstr(&c.z_in),
                rr,
                bitstr(&c.x_out),
                bitstr(&c.z_out),
                c.error,
                if c.passed { "pass" } else { "FAIL" }
            )?;
        }
        write!(f, "{} of {} cases pass", self.passed_count(), self.cases.len())
    }
}

fn mask(key: &PauliKey) -> Matrix {
    let mut m = Matrix::identity(1);
    for w in 0..key.width() {
        m = m.kron(&pauli_mask(key.x_bit(w), key.z_bit(w)));
    }
    m
}

fn case(
    gate: &Gate,
    key: &PauliKey,
    next: &PauliKey,
    lhs: Matrix,
    rhs: Matrix,
    r_pair: Option<RandomBitPair>,
) -> ConjugationCase {
    let error = lhs.phase_aligned_distance(&rhs);
    ConjugationCase {
        gate: gate.kind().name().to_owned(),
        x_in: key.x().to_vec(),
        z_in: key.z().to_vec(),
        r_pair: r_pair.map(|p| (p.r, p.r_prime)),
        x_out: next.x().to_vec(),
        z_out: next.z().to_vec(),
        error,
        passed: error < CONJUGATION_TOLERANCE,
    }
}

/// Checks `U·X^x Z^z = X^{x'} Z^{z'}·U` up to phase for every Clifford gate
/// and key (20 single-qubit and 16 CNOT cases), and
/// `X^r Z^{r'} P^x·R·X^x Z^z = X^{x'} Z^{z'}·R` for every `(x, z, r, r')`
/// (16 cases), with `(x', z')` from the key-update rules.
pub fn conjugation_suite() -> ConjugationReport {
    let mut cases = Vec::with_capacity(CONJUGATION_CASES);
    for kind in [GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::P] {
        let gate = kind.with_qubits(&[0]).expect("single-qubit gate");
        let u = gate_matrix(kind);
        for k in 0..4 {
            let key = PauliKey::new(1, 0, vec![k & 2 != 0], vec![k & 1 != 0]).expect("key");
            let next = update_clifford(&key, &gate).expect("Clifford update");
            cases.push(case(&gate, &key, &next, &u * &mask(&key), &mask(&next) * &u, None));
        }
    }
    let cnot = Gate::Cnot {
        control: 0,
        target: 1,
    };
    let u = gate_matrix(GateKind::Cnot);
    for k in 0..16 {
        let b = bits(k, 4);
        let key = PauliKey::new(2, 0, vec![b[0], b[1]], vec![b[2], b[3]]).expect("key");
        let next = update_clifford(&key, &cnot).expect("Clifford update");
        cases.push(case(&cnot, &key, &next, &u * &mask(&key), &mask(&next) * &u, None));
    }
    let r = Gate::R(0);
    let u = gate_matrix(GateKind::R);
    for k in 0..16 {
        let b = bits(k, 4);
        let key = PauliKey::new(1, 0, vec![b[0]], vec![b[1]]).expect("key");
        let pair = RandomBitPair::new(b[2], b[3]);
        let next = update_r(&key, 0, pair).expect("R update");
        let correction = &(&pauli_mask(pair.r, pair.r_prime)
            * &if b[0] {
                gate_matrix(GateKind::P)
            } else {
                Matrix::identity(2)
            })
            * &u;
        cases.push(case(&r, &key, &next, &correction * &mask(&key), &mask(&next) * &u, Some(pair)));
    }
    ConjugationReport { cases }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexitySummary {
    pub data_qubits: usize,
    pub mask_ops: usize,
    pub max_step_xors: u32,
    pub key_xors: u64,
    pub gates: usize,
    pub expected_gates: usize,
    pub messages: usize,
    pub expected_messages: usize,
}

impl ComplexitySummary {
    pub fn masks_ok(&self) -> bool {
        self.mask_ops == self.data_qubits
    }

    pub fn xors_ok(&self) -> bool {
        self.max_step_xors <= crate::pauli_frame::MAX_XORS_PER_STEP
    }

    pub fn gates_ok(&self) -> bool {
        self.gates == self.expected_gates
    }

    pub fn messages_ok(&self) -> bool {
        self.messages == self.expected_messages
    }

    pub fn passed(&self) -> bool {
        self.masks_ok() && self.xors_ok() && self.gates_ok() && self.messages_ok()
    }
}

/// Compares a finished run's counters against the plan. Messages are
/// recounted from the transcript entries.
pub fn complexity_counters(transcript: &Transcript, plan: &EvaluationPlan) -> ComplexitySummary {
    let c = &transcript.counters;
    ComplexitySummary {
        data_qubits: plan.circuit.n(),
        mask_ops: c.mask_ops,
        max_step_xors: c.max_step_xors,
        key_xors: c.key_xors,
        gates: c.gates,
        expected_gates: plan.circuit.len() * plan.repetitions,
        messages: transcript.transfer_count(),
        expected_messages: 2 * plan.r_gates(),
    }
}
