//! Dense statevector simulation over the gate set {X, Y, Z, H, P, CNOT, R}.
//!
//! Qubit 0 (written qubit 1 in circuit files) is the most significant bit of
//! the basis-state index, matching left-to-right tensor order.

mod density;
mod gate;
pub mod matrix;

pub use density::{mix, partial_trace, DensityMatrix};
pub use gate::{Gate, GateKind};
pub use matrix::Matrix;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{QfheError, Result};

/// Default ceiling on register width (4096 amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 12;

/// Hard ceiling even with an explicit override.
pub const ABSOLUTE_MAX_QUBITS: usize = 24;

pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<C64>,
}

fn check_cap(qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap.min(ABSOLUTE_MAX_QUBITS) {
        return Err(QfheError::TooManyQubits {
            qubits,
            cap: cap.min(ABSOLUTE_MAX_QUBITS),
        });
    }
    Ok(())
}

/// Bit mask of qubit `w` in a `q`-qubit basis index.
#[inline]
pub(crate) fn qubit_mask(q: usize, w: usize) -> usize {
    1 << (q - 1 - w)
}

/// Basis index of a bitstring, first bit most significant.
pub fn basis_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

impl StateVector {
    /// `|0...0⟩` on `qubits` qubits.
    pub fn zero(qubits: usize) -> Result<Self> {
        Self::zero_with_cap(qubits, DEFAULT_MAX_QUBITS)
    }

    pub fn zero_with_cap(qubits: usize, cap: usize) -> Result<Self> {
        check_cap(qubits, cap)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// Computational basis state; `bits[0]` is qubit 0.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let mut s = Self::zero(bits.len())?;
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[basis_index(bits)] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        Self::from_amplitudes_with_cap(amps, DEFAULT_MAX_QUBITS)
    }

    pub fn from_amplitudes_with_cap(amps: Vec<C64>, cap: usize) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(QfheError::InvalidDimensions(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let qubits = amps.len().trailing_zeros() as usize;
        check_cap(qubits, cap)?;
        let s = Self { qubits, amps };
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(QfheError::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Gaussian-random amplitudes, normalized (Haar-distributed).
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        check_cap(qubits, DEFAULT_MAX_QUBITS)?;
        let mut amps: Vec<C64> = (0..1usize << qubits)
            .map(|_| C64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.qubits != other.qubits {
            return Err(QfheError::DimensionMismatch {
                expected: self.qubits,
                actual: other.qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_cap(self.qubits + other.qubits, DEFAULT_MAX_QUBITS)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector {
            qubits: self.qubits + other.qubits,
            amps,
        })
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<StateVector> {
        let mut out = self.clone();
        out.apply_gate_mut(gate)?;
        Ok(out)
    }

    pub(crate) fn apply_gate_mut(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let cm = qubit_mask(self.qubits, control);
                let tm = qubit_mask(self.qubits, target);
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            g => {
                let w = g.qubits()[0];
                let m = matrix::gate_matrix(g.kind());
                self.apply_single(w, [m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)]);
            }
        }
        Ok(())
    }

    /// Applies a 2x2 matrix `[a, b, c, d]` (row-major) to qubit `w`.
    pub(crate) fn apply_single(&mut self, w: usize, m: [C64; 4]) {
        let mask = qubit_mask(self.qubits, w);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[i | mask] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    /// Multiplies by a unit scalar so the first largest-magnitude amplitude
    /// is real and positive; flushes entries below `1e-12` to zero.
    pub fn canonical_phase(&self) -> StateVector {
        let (imax, _) = self
            .amps
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bn), (i, a)| {
                if a.norm() > bn + 1e-12 {
                    (i, a.norm())
                } else {
                    (bi, bn)
                }
            });
        let pivot = self.amps[imax];
        let phase = if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let amps = self
            .amps
            .iter()
            .map(|a| {
                let v = a * phase;
                let f = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
                C64::new(f(v.re), f(v.im))
            })
            .collect();
        StateVector {
            qubits: self.qubits,
            amps,
        }
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_of(state: &StateVector) -> DensityMatrix {
    state.density()
}

/// True iff `|⟨a|b⟩| ≥ 1 − tol`.
pub fn equal_up_to_phase(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    Ok(a.inner(b)?.norm() >= 1.0 - tol)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &StateVector, b: &[C64], tol: f64) -> bool {
        a.amplitudes().iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn hadamard_on_zero() {
        let s = StateVector::zero(1).unwrap().apply_gate(&Gate::H(0)).unwrap();
        assert!(close(&s, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], 1e-15));
    }

    #[test]
    fn r_on_one_adds_eighth_turn() {
        let s = StateVector::basis(&[true])
            .unwrap()
            .apply_gate(&Gate::R(0))
            .unwrap();
        assert!(close(&s, &[c(0.0, 0.0), C64::from_polar(1.0, FRAC_PI_4)], 1e-15));
    }

    #[test]
    fn cnot_truth_table() {
        let s = StateVector::basis(&[true, false])
            .unwrap()
            .apply_gate(&Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        assert_eq!(s, StateVector::basis(&[true, true]).unwrap());
        let s = StateVector::basis(&[false, true])
            .unwrap()
            .apply_gate(&Gate::Cnot {
                control: 0,
                target: 1,
            })
            .unwrap();
        assert_eq!(s, StateVector::basis(&[false, true]).unwrap());
    }

    #[test]
    fn apply_gate_rejects_out_of_range() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::X(2)),
            Err(QfheError::IndexOutOfRange { index: 2, width: 2 })
        ));
    }

    #[test]
    fn equal_up_to_phase_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = StateVector::random(3, &mut rng).unwrap();
        let phase = C64::from_polar(1.0, 0.7);
        let rotated =
            StateVector::from_amplitudes(psi.amplitudes().iter().map(|a| a * phase).collect())
                .unwrap();
        assert!(equal_up_to_phase(&psi, &rotated, 1e-9).unwrap());

        let zero = StateVector::basis(&[false]).unwrap();
        let one = StateVector::basis(&[true]).unwrap();
        assert!(!equal_up_to_phase(&zero, &one, 1e-9).unwrap());

        let hx = zero.apply_gate(&Gate::X(0)).unwrap().apply_gate(&Gate::H(0)).unwrap();
        let zh = zero.apply_gate(&Gate::H(0)).unwrap().apply_gate(&Gate::Z(0)).unwrap();
        assert!(equal_up_to_phase(&hx, &zh, 1e-9).unwrap());

        assert!(equal_up_to_phase(&zero, &psi, 1e-9).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            StateVector::zero(13),
            Err(QfheError::TooManyQubits { qubits: 13, cap: 12 })
        ));
        assert_eq!(StateVector::zero_with_cap(13, 14).unwrap().num_qubits(), 13);
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(matches!(
            StateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(QfheError::NotNormalized(_))
        ));
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn canonical_phase_makes_pivot_positive() {
        let s = StateVector::from_amplitudes(vec![c(0.0, 0.0), c(0.0, -1.0)]).unwrap();
        assert_eq!(s.canonical_phase().amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    }

    fn arb_gate(q: usize) -> impl Strategy<Value = Gate> {
        (0usize..7, 0..q, 1..q).prop_map(move |(k, a, off)| {
            let b = (a + off) % q;
            let qs = if k == 6 { vec![a, b] } else { vec![a] };
            GateKind::ALL[k].with_qubits(&qs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(seed in any::<u64>(), gates in prop::collection::vec(arb_gate(4), 1..30)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = StateVector::random(4, &mut rng).unwrap();
            for g in &gates {
                s = s.apply_gate(g).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn gates_on_disjoint_qubits_commute(seed in any::<u64>(), k1 in 0usize..6, k2 in 0usize..6, a in 0usize..3, off in 1usize..3) {
            let b = (a + off) % 3;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = StateVector::random(3, &mut rng).unwrap();
            let g1 = GateKind::ALL[k1].with_qubits(&[a]).unwrap();
            let g2 = GateKind::ALL[k2].with_qubits(&[b]).unwrap();
            let ab = s.apply_gate(&g1).unwrap().apply_gate(&g2).unwrap();
            let ba = s.apply_gate(&g2).unwrap().apply_gate(&g1).unwrap();
            prop_assert!(close(&ab, ba.amplitudes(), 1e-13));
        }
    }
}
