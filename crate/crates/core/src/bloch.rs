// SPDX-License-Identifier: Apache-2.0

//! Exact qubit analysis in Bloch form.
//!
//! For d = 2 every correction X_α acts on Bloch vectors as a rotation R_α with
//! `[R_α]_jk = ½ tr(X_α σ_j X_α† σ_k)`, and ξ_α(φ) = ½(1 + φᵀR_αφ). Haar
//! averages over the Bloch sphere then reduce to traces of R_α:
//!
//! * F = ½ + (γ/24) Σ_α tr R_α
//! * Δ_α = (1 − tr R_α / 3) / (2√5)
//! * C_αβ = [3 tr(R_α R_βᵀ) + 3 tr(R_α R_β) − 2 tr R_α tr R_β] / 180
//! * D = (γ/4) (Σ_αβ C_αβ)^{1/2}
//!
//! The covariance follows from the fourth moment of a uniform unit vector,
//! E[φ_i φ_j φ_k φ_l] = (δ_ij δ_kl + δ_ik δ_jl + δ_il δ_jk)/15.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{clip_to_bounds, Error, Result};
use crate::qlinalg::{su_generators, ComplexMatrix};
use crate::teleport::{average_fidelity, Channel, Protocol};

/// Largest possible Δ_α, reached by rotations through π.
pub fn max_xi_deviation() -> f64 {
    2.0 / (3.0 * 5f64.sqrt())
}

/// SO(3) image of a qubit unitary, with its angle ϑ ∈ [0, π] and unit axis n
/// such that X ∝ exp(−i ϑ/2 n·σ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochRotation {
    matrix: Matrix3<f64>,
    angle: f64,
    axis: Vector3<f64>,
}

const UNITARY_TOL: f64 = 1e-9;
const AXIS_SIN_CUTOFF: f64 = 1e-6;

impl BlochRotation {
    pub fn from_unitary(x: &ComplexMatrix) -> Result<Self> {
        let d = x.square_dim()?;
        if d != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: d,
            });
        }
        let deviation = x.unitarity_defect();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let paulis = su_generators(2)?;
        let sigma = paulis.generators();
        let xd = x.adjoint();
        let matrix = Matrix3::from_fn(|j, k| {
            let moved = &(x * &sigma[j]) * &xd;
            0.5 * (&moved * &sigma[k]).trace().re
        });
        Ok(Self::from_matrix(matrix))
    }

    fn from_matrix(matrix: Matrix3<f64>) -> Self {
        let cos = ((matrix.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        let angle = cos.acos();
        let sin = angle.sin();
        let axis = if sin.abs() >= AXIS_SIN_CUTOFF {
            // this matrix is the transpose of the active rotation
            Vector3::new(
                matrix[(1, 2)] - matrix[(2, 1)],
                matrix[(2, 0)] - matrix[(0, 2)],
                matrix[(0, 1)] - matrix[(1, 0)],
            ) / (2.0 * sin)
        } else {
            let sym = (matrix + matrix.transpose()) * 0.5;
            let eig = ((sym + Matrix3::identity()) * 0.5).symmetric_eigen();
            let top = eig.eigenvalues.imax();
            eig.eigenvectors.column(top).into_owned()
        };
        Self {
            matrix,
            angle,
            axis: axis.normalize(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    /// Rotation angle ϑ in [0, π].
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn axis(&self) -> &Vector3<f64> {
        &self.axis
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

pub fn bloch_rotation(x: &ComplexMatrix) -> Result<BlochRotation> {
    BlochRotation::from_unitary(x)
}

/// Δ_α, the Haar standard deviation of ξ_α.
pub fn xi_deviation(r: &BlochRotation) -> f64 {
    (1.0 - r.trace() / 3.0) / (2.0 * 5f64.sqrt())
}

/// C_αβ, the Haar covariance of ξ_α and ξ_β.
pub fn qubit_covariance(ra: &BlochRotation, rb: &BlochRotation) -> f64 {
    let a = ra.matrix();
    let b = rb.matrix();
    let t_abt = (a * b.transpose()).trace();
    let t_ab = (a * b).trace();
    (3.0 * t_abt + 3.0 * t_ab - 2.0 * a.trace() * b.trace()) / 180.0
}

/// ½ + (γ/24) Σ_α tr R_α.
pub fn qubit_average_fidelity(proto: &Protocol, ch: &Channel) -> Result<f64> {
    let rotations = rotations_of(proto, ch)?;
    let f = 0.5 + ch.gamma() / 24.0 * rotations.iter().map(BlochRotation::trace).sum::<f64>();
    let gamma = ch.gamma();
    clip_to_bounds("qubit average fidelity", f, 0.5 - gamma / 6.0, (1.0 + gamma) / 2.0)
}

fn rotations_of(proto: &Protocol, ch: &Channel) -> Result<Vec<BlochRotation>> {
    for d in [proto.dim_d(), ch.dim_d()] {
        if d != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: d,
            });
        }
    }
    proto
        .corrections()
        .iter()
        .map(BlochRotation::from_unitary)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitDeviationReport {
    pub f: f64,
    pub d: f64,
    pub deltas: [f64; 4],
    pub covariance: Matrix4<f64>,
}

impl QubitDeviationReport {
    /// Δ̄ = ¼ Σ_α Δ_α.
    pub fn mean_delta(&self) -> f64 {
        self.deltas.iter().sum::<f64>() / 4.0
    }
}

/// Exact F and D of a qubit protocol, with the per-α deviations and the
/// covariance matrix they come from.
pub fn qubit_deviation(proto: &Protocol, ch: &Channel) -> Result<QubitDeviationReport> {
    let rotations = rotations_of(proto, ch)?;
    let covariance = Matrix4::from_fn(|a, b| {
        let (lo, hi) = (a.min(b), a.max(b));
        qubit_covariance(&rotations[lo], &rotations[hi])
    });
    let total = covariance.sum();
    // Σ C_αβ is a variance; round-off can push it a hair below zero
    let total = clip_to_bounds("qubit deviation variance", total, 0.0, f64::INFINITY)?;
    let d = ch.gamma() / 4.0 * total.sqrt();
    let deltas = [0, 1, 2, 3].map(|a| xi_deviation(&rotations[a]));
    Ok(QubitDeviationReport {
        f: average_fidelity(proto, ch)?,
        d,
        deltas,
        covariance,
    })
}

/// Outcome of testing D ≤ (F_max − F)/√5.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// (F_max − F)/√5 − D; negative when violated.
    pub margin: f64,
}

pub fn tight_bound_check(f: f64, d: f64, ch: &Channel) -> BoundCheck {
    let f_max = (1.0 + ch.gamma()) / 2.0;
    let margin = (f_max - f) / 5f64.sqrt() - d;
    BoundCheck {
        holds: margin >= -1e-9,
        margin,
    }
}
