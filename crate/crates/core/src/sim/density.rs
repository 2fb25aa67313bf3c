use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::matrix::Matrix;
use super::{qubit_mask, StateVector, NORM_TOLERANCE};
use crate::error::{QfheError, Result};

pub const PSD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    entries: Matrix,
}

impl DensityMatrix {
    /// Wraps a matrix and checks Hermiticity, unit trace and positivity.
    pub fn new(entries: Matrix) -> Result<Self> {
        let dim = entries.dim();
        if !dim.is_power_of_two() {
            return Err(QfheError::InvalidDimensions(format!(
                "density matrix dimension {dim} is not a power of two"
            )));
        }
        let dm = Self {
            qubits: dim.trailing_zeros() as usize,
            entries,
        };
        if !dm.is_hermitian(NORM_TOLERANCE) {
            return Err(QfheError::InvalidDimensions("matrix is not Hermitian".into()));
        }
        let tr = dm.trace();
        if (tr.re - 1.0).abs() > NORM_TOLERANCE || tr.im.abs() > NORM_TOLERANCE {
            return Err(QfheError::InvalidDimensions(format!("trace is {tr}")));
        }
        if dm.min_eigenvalue() < -PSD_TOLERANCE {
            return Err(QfheError::InvalidDimensions(
                "matrix is not positive semidefinite".into(),
            ));
        }
        Ok(dm)
    }

    /// `I / 2^q`.
    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1 << qubits;
        let v = C64::new(1.0 / dim as f64, 0.0);
        Self {
            qubits,
            entries: Matrix::diagonal(&vec![v; dim]),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries.get(row, col)
    }

    pub fn trace(&self) -> C64 {
        (0..self.entries.dim()).map(|i| self.entries.get(i, i)).sum()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries)
            .as_slice()
            .iter()
            .step_by(self.entries.dim() + 1)
            .map(|c| c.re)
            .sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries.max_abs_diff(&self.entries.adjoint()) < tol
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.entries.dim();
        let m = DMatrix::from_row_slice(n, n, self.entries.as_slice());
        m.symmetric_eigenvalues().iter().copied().collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        self.entries.max_abs_diff(&other.entries)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.qubits {
            return Err(QfheError::DimensionMismatch {
                expected: self.qubits,
                actual: psi.num_qubits(),
            });
        }
        let rho_psi = self.entries.apply(psi.amplitudes());
        Ok(psi
            .amplitudes()
            .iter()
            .zip(&rho_psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }
}

impl StateVector {
    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        let amps = self.amplitudes();
        let dim = amps.len();
        let mut entries = Matrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.set(r, c, amps[r] * amps[c].conj());
            }
        }
        DensityMatrix {
            qubits: self.num_qubits(),
            entries,
        }
    }
}

/// Reduced state on `keep` (in the listed order), tracing out the rest.
pub fn partial_trace(dm: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let q = dm.qubits;
    for (i, &w) in keep.iter().enumerate() {
        if w >= q {
            return Err(QfheError::IndexOutOfRange { index: w, width: q });
        }
        if keep[..i].contains(&w) {
            return Err(QfheError::InvalidDimensions(format!(
                "qubit {} listed twice",
                w + 1
            )));
        }
    }
    let traced: Vec<usize> = (0..q).filter(|w| !keep.contains(w)).collect();
    let scatter = |bits: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << (qubits.len() - 1 - i)) != 0)
            .map(|(_, &w)| qubit_mask(q, w))
            .sum()
    };
    let kdim = 1 << keep.len();
    let kept_idx: Vec<usize> = (0..kdim).map(|k| scatter(k, keep)).collect();
    let traced_idx: Vec<usize> = (0..1usize << traced.len())
        .map(|t| scatter(t, &traced))
        .collect();
    let mut entries = Matrix::zeros(kdim);
    for r in 0..kdim {
        for c in 0..kdim {
            let v: C64 = traced_idx
                .iter()
                .map(|&t| dm.entries.get(kept_idx[r] | t, kept_idx[c] | t))
                .sum();
            entries.set(r, c, v);
        }
    }
    Ok(DensityMatrix {
        qubits: keep.len(),
        entries,
    })
}

/// Convex combination of density matrices.
pub fn mix(terms: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
    let first = terms
        .first()
        .ok_or_else(|| QfheError::InvalidDimensions("empty mixture".into()))?;
    let total: f64 = terms.iter().map(|(w, _)| *w).sum();
    if terms.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(QfheError::WeightSum(total));
    }
    let dim = first.1.entries.dim();
    let mut acc = vec![C64::new(0.0, 0.0); dim * dim];
    for (w, dm) in terms {
        if dm.qubits != first.1.qubits {
            return Err(QfheError::DimensionMismatch {
                expected: first.1.qubits,
                actual: dm.qubits,
            });
        }
        for (a, e) in acc.iter_mut().zip(dm.entries.as_slice()) {
            *a += e * *w;
        }
    }
    Ok(DensityMatrix {
        qubits: first.1.qubits,
        entries: Matrix::from_row_major(acc),
    })
}
