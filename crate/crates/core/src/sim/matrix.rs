//! Small dense complex matrices: gate matrices, Pauli masks and the
//! phase-aligned comparison used by the conjugation checks.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::ops::Mul;

use num_complex::Complex64 as C64;

use super::gate::GateKind;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Panics if `data.len()` is not a perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Self {
        let dim = (data.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, data.len(), "matrix data is not square");
        Self { dim, data }
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: C64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.data[c * self.dim + r] = self.data[r * self.dim + c].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &Matrix) -> Self {
        let dim = self.dim * other.dim;
        let mut out = Self::zeros(dim);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                if a == ZERO {
                    continue;
                }
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        out.data[(r1 * other.dim + r2) * dim + c1 * other.dim + c2] =
                            a * other.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                self.data[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.adjoint() * self).max_abs_diff(&Matrix::identity(self.dim)) < tol
    }

    /// Entrywise distance between `self` and `other` after rotating `other`
    /// by the global phase that best aligns it with `self`.
    pub fn phase_aligned_distance(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let overlap: C64 = other
            .data
            .iter()
            .zip(&self.data)
            .map(|(b, a)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() > 1e-300 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

/// 2x2 matrix of a single-qubit gate kind, or the 4x4 CNOT with the control
/// as the more significant qubit.
pub fn gate_matrix(kind: GateKind) -> Matrix {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    match kind {
        GateKind::X => Matrix::from_row_major(vec![ZERO, ONE, ONE, ZERO]),
        GateKind::Y => Matrix::from_row_major(vec![ZERO, -I, I, ZERO]),
        GateKind::Z => Matrix::diagonal(&[ONE, -ONE]),
        GateKind::H => Matrix::from_row_major(vec![h, h, h, -h]),
        GateKind::P => Matrix::diagonal(&[ONE, I]),
        GateKind::R => Matrix::diagonal(&[ONE, C64::from_polar(1.0, FRAC_PI_4)]),
        GateKind::Cnot => {
            let mut m = Matrix::zeros(4);
            m.set(0, 0, ONE);
            m.set(1, 1, ONE);
            m.set(2, 3, ONE);
            m.set(3, 2, ONE);
            m
        }
    }
}

/// `X^x Z^z` on one qubit.
pub fn pauli_mask(x: bool, z: bool) -> Matrix {
    let mut m = Matrix::identity(2);
    if x {
        m = &m * &gate_matrix(GateKind::X);
    }
    if z {
        m = &m * &gate_matrix(GateKind::Z);
    }
    m
}
