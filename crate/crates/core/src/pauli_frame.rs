//! Classical key material: QOTP keys, the Pauli mask they describe, and the
//! per-gate key-updating rules that carry a mask through a circuit.
//!
//! A key over `n + m` qubits is a pair of bitstrings `(x, z)` describing the
//! mask `⊗_w X^{x(w)} Z^{z(w)}`. Passing a masked state through a gate `G`
//! yields `G · mask = mask' · G` (up to global phase) with `mask'` given by
//! the rules below. For `R` the server cannot commute the mask alone; the
//! client applies `X^r Z^{r'} P^{x(w)}` to the qubit and folds `(r, r')` into
//! the key.
//!
//! Storage is 0-based; the canonical text form and `Display` impls are the
//! only places qubit positions are shown to users.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{QfheError, Result};
use crate::sim::{Gate, StateVector};
use crate::uqc::Circuit;

/// Upper bound on XORs performed by any single key-update step.
pub const MAX_XORS_PER_STEP: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliKey {
    n: usize,
    m: usize,
    x: Vec<bool>,
    z: Vec<bool>,
}

/// The client's two random bits for one R-gate occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RandomBitPair {
    pub r: bool,
    pub r_prime: bool,
}

impl RandomBitPair {
    pub fn new(r: bool, r_prime: bool) -> Self {
        Self { r, r_prime }
    }

    /// Draws `r` then `r'`.
    pub fn draw<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let r = draw_bit(rng);
        let r_prime = draw_bit(rng);
        Self { r, r_prime }
    }

    pub fn all() -> [RandomBitPair; 4] {
        [
            Self::new(false, false),
            Self::new(false, true),
            Self::new(true, false),
            Self::new(true, true),
        ]
    }
}

/// One random bit: the top bit of the next `u32`.
pub(crate) fn draw_bit<R: RngCore + ?Sized>(rng: &mut R) -> bool {
    rng.next_u32() >> 31 == 1
}

impl PauliKey {
    pub fn new(n: usize, m: usize, x: Vec<bool>, z: Vec<bool>) -> Result<Self> {
        if x.len() != n + m || z.len() != n + m {
            return Err(QfheError::DimensionMismatch {
                expected: n + m,
                actual: if x.len() != n + m { x.len() } else { z.len() },
            });
        }
        Ok(Self { n, m, x, z })
    }

    pub fn zero(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            x: vec![false; n + m],
            z: vec![false; n + m],
        }
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

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn z(&self) -> &[bool] {
        &self.z
    }

    pub fn x_bit(&self, w: usize) -> bool {
        self.x[w]
    }

    pub fn z_bit(&self, w: usize) -> bool {
        self.z[w]
    }

    /// True when every encoding-register bit is zero, as for a fresh key.
    pub fn encoding_bits_clear(&self) -> bool {
        self.x[self.n..].iter().chain(&self.z[self.n..]).all(|b| !b)
    }

    /// Zeroes the encoding-register bits (used when the encoding register is
    /// re-prepared between repetitions).
    pub fn clear_encoding_bits(&mut self) {
        self.x[self.n..].iter_mut().for_each(|b| *b = false);
        self.z[self.n..].iter_mut().for_each(|b| *b = false);
    }

    fn check_index(&self, w: usize) -> Result<()> {
        if w >= self.width() {
            return Err(QfheError::IndexOutOfRange {
                index: w,
                width: self.width(),
            });
        }
        Ok(())
    }

    /// Advances the key over one gate in place and returns the number of
    /// XORs performed. `pair` must be given exactly when `gate` is `R`.
    pub(crate) fn step(&mut self, gate: &Gate, pair: Option<RandomBitPair>) -> Result<u32> {
        gate.check(self.width())?;
        let xors = match (*gate, pair) {
            (Gate::X(_) | Gate::Y(_) | Gate::Z(_), _) => 0,
            (Gate::H(w), _) => {
                std::mem::swap(&mut self.x[w], &mut self.z[w]);
                0
            }
            (Gate::P(w), _) => {
                self.z[w] ^= self.x[w];
                1
            }
            (Gate::Cnot { control, target }, _) => {
                self.z[control] ^= self.z[target];
                self.x[target] ^= self.x[control];
                2
            }
            (Gate::R(w), Some(p)) => {
                let x = self.x[w];
                self.z[w] ^= p.r_prime ^ x;
                self.x[w] = p.r ^ x;
                3
            }
            (Gate::R(_), None) => {
                return Err(QfheError::RPairCountMismatch {
                    expected: 1,
                    actual: 0,
                })
            }
        };
        Ok(xors)
    }

    pub fn to_text(&self) -> String {
        format!(
            "qfhe-key v1 n={} m={} x={} z={}",
            self.n,
            self.m,
            bits_to_hex(&self.x),
            bits_to_hex(&self.z)
        )
    }
}

impl fmt::Display for PauliKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for PauliKey {
    type Err = QfheError;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = s.split_whitespace();
        let mut expect = |word: &str| -> Result<()> {
            match fields.next() {
                Some(w) if w == word => Ok(()),
                other => Err(QfheError::parse(format!(
                    "expected {word:?} in key header, found {other:?}"
                ))),
            }
        };
        expect("qfhe-key")?;
        expect("v1")?;
        let mut field = |name: &str| -> Result<String> {
            let tok = fields
                .next()
                .ok_or_else(|| QfheError::parse(format!("missing key field {name}")))?;
            tok.strip_prefix(name)
                .and_then(|t| t.strip_prefix('='))
                .map(str::to_owned)
                .ok_or_else(|| QfheError::parse(format!("expected {name}=..., found {tok:?}")))
        };
        let n: usize = field("n")?
            .parse()
            .map_err(|e| QfheError::parse(format!("bad n: {e}")))?;
        let m: usize = field("m")?
            .parse()
            .map_err(|e| QfheError::parse(format!("bad m: {e}")))?;
        let x = hex_to_bits(&field("x")?, n + m)?;
        let z = hex_to_bits(&field("z")?, n + m)?;
        if fields.next().is_some() {
            return Err(QfheError::parse("trailing data after key"));
        }
        PauliKey::new(n, m, x, z)
    }
}

/// Packs bits four to a lowercase hex digit, first bit most significant,
/// zero-padded at the end.
fn bits_to_hex(bits: &[bool]) -> String {
    bits.chunks(4)
        .map(|chunk| {
            let v = chunk
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &b)| acc | (b as u32) << (3 - i));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<bool>> {
    if hex.len() != len.div_ceil(4) {
        return Err(QfheError::parse(format!(
            "expected {} hex digits for {len} bits, found {}",
            len.div_ceil(4),
            hex.len()
        )));
    }
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        if c.is_ascii_uppercase() {
            return Err(QfheError::parse("key hex must be lowercase"));
        }
        let v = c
            .to_digit(16)
            .ok_or_else(|| QfheError::parse(format!("invalid hex digit {c:?}")))?;
        bits.extend((0..4).map(|i| v & (1 << (3 - i)) != 0));
    }
    if bits[len..].iter().any(|&b| b) {
        return Err(QfheError::parse("nonzero padding bits in key"));
    }
    bits.truncate(len);
    Ok(bits)
}

/// Generates an encryption key: `n` random x bits, then `n` random z bits
/// (lowest index first), with the `m` encoding bits of each left at zero.
pub fn keygen<R: RngCore + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<PauliKey> {
    if n == 0 {
        return Err(QfheError::InvalidDimensions("data width n must be at least 1".into()));
    }
    let mut key = PauliKey::zero(n, m);
    for w in 0..n {
        key.x[w] = draw_bit(rng);
    }
    for w in 0..n {
        key.z[w] = draw_bit(rng);
    }
    Ok(key)
}

/// Applies `⊗_i X^{x[i]} Z^{z[i]}` to `targets[i]`. The mask squares to the
/// identity up to sign, so the same call encrypts and decrypts.
pub fn qotp_apply(
    state: &StateVector,
    x: &[bool],
    z: &[bool],
    targets: &[usize],
) -> Result<StateVector> {
    if x.len() != targets.len() || z.len() != targets.len() {
        return Err(QfheError::DimensionMismatch {
            expected: targets.len(),
            actual: x.len().max(z.len()),
        });
    }
    let mut out = state.clone();
    for ((&w, &xb), &zb) in targets.iter().zip(x).zip(z) {
        if zb {
            out.apply_gate_mut(&Gate::Z(w))?;
        }
        if xb {
            out.apply_gate_mut(&Gate::X(w))?;
        }
    }
    Ok(out)
}

/// Key after a Clifford gate.
pub fn update_clifford(key: &PauliKey, gate: &Gate) -> Result<PauliKey> {
    if !gate.is_clifford() {
        return Err(QfheError::NonClifford(gate.to_string()));
    }
    let mut next = key.clone();
    next.step(gate, None)?;
    Ok(next)
}

/// Key after an R gate on qubit `w` corrected with the client's `pair`:
/// `(x(w), z(w)) := (r ⊕ x(w), r' ⊕ x(w) ⊕ z(w))`.
pub fn update_r(key: &PauliKey, w: usize, pair: RandomBitPair) -> Result<PauliKey> {
    key.check_index(w)?;
    let mut next = key.clone();
    next.step(&Gate::R(w), Some(pair))?;
    Ok(next)
}

/// The sequence of keys produced while evaluating one circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    pub initial: PauliKey,
    /// `steps[j]` is the key after gate `j`.
    pub steps: Vec<PauliKey>,
    pub r_pairs: Vec<RandomBitPair>,
    /// XORs spent on each step.
    pub xor_counts: Vec<u32>,
}

impl KeySchedule {
    /// The decryption key (the initial key for an empty circuit).
    pub fn final_key(&self) -> &PauliKey {
        self.steps.last().unwrap_or(&self.initial)
    }

    pub fn total_xors(&self) -> u64 {
        self.xor_counts.iter().map(|&c| c as u64).sum()
    }
}

/// Folds the key-update rules over `circuit`, consuming one `r_pairs` entry
/// per R gate in execution order. Touches no quantum state.
pub fn run_key_schedule(
    ek: &PauliKey,
    circuit: &Circuit,
    r_pairs: &[RandomBitPair],
) -> Result<KeySchedule> {
    let expected = circuit.r_count();
    if r_pairs.len() != expected {
        return Err(QfheError::RPairCountMismatch {
            expected,
            actual: r_pairs.len(),
        });
    }
    if ek.n() != circuit.n() || ek.m() != circuit.m() {
        return Err(QfheError::DimensionMismatch {
            expected: circuit.width(),
            actual: ek.width(),
        });
    }
    let mut key = ek.clone();
    let mut pairs = r_pairs.iter().copied();
    let mut steps = Vec::with_capacity(circuit.len());
    let mut xor_counts = Vec::with_capacity(circuit.len());
    for gate in circuit.gates() {
        let pair = if gate.is_clifford() { None } else { pairs.next() };
        xor_counts.push(key.step(gate, pair)?);
        steps.push(key.clone());
    }
    Ok(KeySchedule {
        initial: ek.clone(),
        steps,
        r_pairs: r_pairs.to_vec(),
        xor_counts,
    })
}
