// SPDX-License-Identifier: Apache-2.0

//! SU(d) generators and the control parameterization U(p) = exp(-i pᵀG).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Maps an angle into `[-π, π)`. Values already in range are returned bit-for-bit.
pub fn wrap_angle(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let two_pi = 2.0 * PI;
    let w = x - two_pi * ((x + PI) / two_pi).floor();
    // rounding can land exactly on +π
    if w >= PI {
        w - two_pi
    } else {
        w
    }
}

/// Control vector p of length d²−1 (radians), stored wrapped into `[-π, π)`.
///
/// The exponential map is not 2π-periodic in p for d > 2, so wrapping bounds
/// the search space rather than identifying equivalent controls.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    d: usize,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { d });
        }
        if values.len() != d * d - 1 {
            return Err(Error::DimensionMismatch {
                expected: d * d - 1,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite parameter {bad}")));
        }
        Ok(Self {
            d,
            values: values.into_iter().map(wrap_angle).collect(),
        })
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(d, vec![0.0; d.max(2) * d.max(2) - 1])
    }

    pub fn dim_d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `f` to every component and re-wraps.
    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        Self {
            d: self.d,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(j, &v)| wrap_angle(f(j, v)))
                .collect(),
        }
    }
}

/// Generalized Gell-Mann basis of su(d), normalized to tr(g_i g_j) = 2δ_ij.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    d: usize,
    generators: Vec<ComplexMatrix>,
}

impl GeneratorSet {
    pub fn dim_d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Σ_j p_j g_j
    pub fn combine(&self, p: &ParamVector) -> Result<ComplexMatrix> {
        if p.dim_d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: p.dim_d(),
            });
        }
        let mut h = DMatrix::<C64>::zeros(self.d, self.d);
        for (g, &pj) in self.generators.iter().zip(p.values()) {
            h += g.as_nalgebra() * C64::new(pj, 0.0);
        }
        Ok(h.into())
    }

    /// Components of a traceless Hermitian matrix in this basis: tr(H g_j)/2.
    pub fn decompose(&self, h: &ComplexMatrix) -> Vec<f64> {
        self.generators
            .iter()
            .map(|g| 0.5 * (h * g).trace().re)
            .collect()
    }
}

/// Ordering: for each pair j<k the symmetric then the antisymmetric matrix,
/// followed by the d−1 diagonal generators.
pub fn su_generators(d: usize) -> Result<GeneratorSet> {
    if d < 2 {
        return Err(Error::InvalidDimension { d });
    }
    let mut generators = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = DMatrix::<C64>::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            generators.push(sym.into());

            let mut anti = DMatrix::<C64>::zeros(d, d);
            anti[(j, k)] = C64::new(0.0, -1.0);
            anti[(k, j)] = C64::new(0.0, 1.0);
            generators.push(anti.into());
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![ZERO; d];
        for entry in diag.iter_mut().take(l) {
            *entry = C64::new(norm, 0.0);
        }
        diag[l] = C64::new(-(l as f64) * norm, 0.0);
        generators.push(ComplexMatrix::diagonal(&diag));
    }
    Ok(GeneratorSet { d, generators })
}

/// U(p) = exp(-i Σ_j p_j g_j).
pub fn unitary_from_params(p: &ParamVector, gens: &GeneratorSet) -> Result<ComplexMatrix> {
    let h = gens.combine(p)?;
    Ok(exp_minus_i_hermitian(&h))
}

/// exp(-iH) for Hermitian H.
///
/// 2×2 input uses the exact Bloch form cos|h|·𝟙 − i sin|h|·ĥ·σ after removing
/// the trace; larger input goes through the Hermitian eigendecomposition.
pub fn exp_minus_i_hermitian(h: &ComplexMatrix) -> ComplexMatrix {
    let m = h.as_nalgebra();
    if m.nrows() == 2 {
        let shift = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
        let hz = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
        let hx = m[(0, 1)].re;
        let hy = -m[(0, 1)].im;
        let r = (hx * hx + hy * hy + hz * hz).sqrt();
        let (s, c) = r.sin_cos();
        // sin(r)/r → 1 as r → 0
        let k = if r > 1e-300 { s / r } else { 1.0 };
        let phase = C64::from_polar(1.0, -shift);
        let mi = C64::new(0.0, -1.0);
        let u = [
            C64::new(c, 0.0) + mi * k * hz,
            mi * k * C64::new(hx, -hy),
            mi * k * C64::new(hx, hy),
            C64::new(c, 0.0) - mi * k * hz,
        ];
        return ComplexMatrix::from_fn(2, 2, |i, j| phase * u[2 * i + j]);
    }
    let eig = m.clone().symmetric_eigen();
    let q = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|lambda| C64::from_polar(1.0, -lambda)));
    (q * phases * q.adjoint()).into()
}

/// Hermitian H with eigenvalues in (−π, π] such that exp(−iH) = W, for unitary W.
///
/// W is diagonalized through its commuting Hermitian parts A = (W+W†)/2 and
/// B = (W−W†)/2i, using the single Hermitian matrix A + cB with a generic c.
pub fn hermitian_log(w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = w.square_dim()?;
    let deviation = w.unitarity_defect();
    if deviation > 1e-9 {
        return Err(Error::NotUnitary { deviation });
    }
    let m = w.as_nalgebra();
    let a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let b = (m - m.adjoint()) * C64::new(0.0, -0.5);
    const MIX: f64 = 0.577_215_664_901_532_9;
    let eig = (a + b * C64::new(MIX, 0.0)).symmetric_eigen();
    let q = eig.eigenvectors;
    let angles: Vec<f64> = (0..d)
        .map(|k| {
            let v = q.column(k);
            let lambda = v.dotc(&(m * v));
            // W v = e^{-iθ} v
            -lambda.arg()
        })
        .collect();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        angles.iter().map(|&t| C64::new(t, 0.0)),
    ));
    Ok((&q * diag * q.adjoint()).into())
}

/// Parameters p with exp(−i pᵀG) = e^{iθ}·W for some global phase θ.
///
/// The eigenphases of W are centred to zero mean, which picks the branch with
/// small parameters for the Weyl operators used by the optimal protocol.
pub fn params_for_unitary(w: &ComplexMatrix, gens: &GeneratorSet) -> Result<ParamVector> {
    let d = w.square_dim()?;
    if d != gens.dim_d() {
        return Err(Error::DimensionMismatch {
            expected: gens.dim_d(),
            found: d,
        });
    }
    let h = hermitian_log(w)?;
    let mean = h.trace().re / d as f64;
    let traceless = &h + &ComplexMatrix::identity(d).scale(C64::new(-mean, 0.0));
    let raw = gens.decompose(&traceless);
    if let Some(&big) = raw.iter().find(|v| v.abs() >= PI) {
        return Err(Error::InvalidConfig(format!(
            "parameter {big} falls outside [-π, π) and would not survive wrapping"
        )));
    }
    ParamVector::new(d, raw)
}
