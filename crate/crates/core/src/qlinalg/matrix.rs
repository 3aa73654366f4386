// SPDX-License-Identifier: Apache-2.0

//! Dense complex carriers: matrices, pure states and density matrices.

use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major semantics.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix, or an error for rectangular input.
    pub fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(&self.0 * factor)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.0 * v
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |(U U†)_ij - δ_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self * &self.adjoint();
        prod.max_abs_diff(&Self::identity(self.rows()))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_defect() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// Whether `self = e^{iθ} other` for some phase θ.
    pub fn equals_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        if self.0.shape() != other.0.shape() {
            return false;
        }
        let overlap = (&other.adjoint() * self).trace();
        if overlap.norm() < f64::EPSILON {
            return false;
        }
        let phase = overlap / overlap.norm();
        self.max_abs_diff(&other.scale(phase)) <= tol
    }

    /// Entries row by row.
    pub fn to_row_major(&self) -> Vec<C64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }
}

impl From<DMatrix<C64>> for ComplexMatrix {
    fn from(m: DMatrix<C64>) -> Self {
        Self(m)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

/// Normalized state vector |φ⟩ in C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(DVector<C64>);

const NORM_TOL: f64 = 1e-12;

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension {
                d: amplitudes.len(),
            });
        }
        let v = DVector::from_vec(amplitudes);
        let norm_sqr = v.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self(v))
    }

    /// Rescales arbitrary non-zero amplitudes onto the unit sphere.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension {
                d: amplitudes.len(),
            });
        }
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self(v.unscale(norm)))
    }

    /// Computational basis state |k⟩.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { d });
        }
        if k >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: k,
            });
        }
        let mut v = DVector::zeros(d);
        v[k] = ONE;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.0
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }

    /// ⟨self|M|self⟩
    pub fn expectation(&self, m: &ComplexMatrix) -> C64 {
        self.0.dotc(&m.apply(&self.0))
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        Self(&self.0 * C64::from_polar(1.0, theta))
    }

    /// Applies a unitary; the result stays normalized up to rounding.
    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        let v = u.apply(&self.0);
        let norm = v.norm();
        Self(v.unscale(norm))
    }

    /// |φ⟩⟨φ|
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * self.0.adjoint())
    }
}

/// Hermitian d×d density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    subnormalized: bool,
}

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validates Hermiticity (1e-12) and unit trace (1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self::subnormalized(matrix)?;
        let trace = rho.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        Ok(Self {
            subnormalized: false,
            ..rho
        })
    }

    /// Accepts any Hermitian matrix and marks it as possibly not trace one.
    pub fn subnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.square_dim()?;
        if d < 2 {
            return Err(Error::InvalidDimension { d });
        }
        let deviation = matrix.hermiticity_defect();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix,
            subnormalized: true,
        })
    }

    pub fn pure(state: &PureState) -> Self {
        Self {
            matrix: state.projector(),
            subnormalized: false,
        }
    }

    /// 𝟙_d / d
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { d });
        }
        Ok(Self {
            matrix: ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0)),
            subnormalized: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .as_nalgebra()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let entries: Vec<C64> = (0..6).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let m = ComplexMatrix::from_row_major(2, 3, &entries).unwrap();
        assert_eq!(m.get(0, 2), entries[2]);
        assert_eq!(m.get(1, 0), entries[3]);
        assert_eq!(m.to_row_major(), entries);
        assert!(ComplexMatrix::from_row_major(2, 2, &entries).is_err());
    }

    #[test]
    fn adjoint_is_an_involution() {
        let m = ComplexMatrix::from_fn(3, 2, |i, j| C64::new(i as f64 + 0.5, j as f64 - 2.0));
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.adjoint().rows(), 2);
    }

    #[test]
    fn state_validation() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::new(vec![ONE]).is_err());
        let s = PureState::normalized(vec![ONE, ONE]).unwrap();
        assert!((s.inner(&s).re - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
        assert!(PureState::basis(3, 3).is_err());
    }

    #[test]
    fn density_validation() {
        let bad = ComplexMatrix::from_row_major(2, 2, &[ONE, ONE, ZERO, ZERO]).unwrap();
        assert!(matches!(
            DensityMatrix::new(bad),
            Err(Error::NotHermitian { .. })
        ));
        let half = ComplexMatrix::identity(2).scale(C64::new(0.25, 0.0));
        assert!(matches!(
            DensityMatrix::new(half.clone()),
            Err(Error::BadTrace { .. })
        ));
        let sub = DensityMatrix::subnormalized(half).unwrap();
        assert!(sub.is_subnormalized());
        assert!((sub.trace() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phase_equivalence() {
        let x = ComplexMatrix::from_row_major(2, 2, &[ZERO, ONE, ONE, ZERO]).unwrap();
        let y = x.scale(C64::from_polar(1.0, 0.7));
        assert!(y.equals_up_to_phase(&x, 1e-14));
        assert!(!ComplexMatrix::identity(2).equals_up_to_phase(&x, 1e-6));
    }
}
