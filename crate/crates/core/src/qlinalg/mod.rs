// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra, SU(d) controls and Haar sampling.

mod generators;
mod haar;
mod matrix;
pub mod rng;

pub use generators::{
    exp_minus_i_hermitian, hermitian_log, params_for_unitary, su_generators,
    unitary_from_params, wrap_angle, GeneratorSet, ParamVector,
};
pub use haar::{fill_haar_amplitudes, haar_random_state, haar_random_unitary};
pub use matrix::{ComplexMatrix, DensityMatrix, PureState, C64};
pub(crate) use matrix::ZERO;
#[cfg(test)]
pub(crate) use matrix::ONE;

use crate::error::{clip_with_tol, Error, Result};

/// ⟨φ_t|ρ|φ_t⟩ for a pure target, clipped into [0, 1] at 1e-10.
pub fn state_fidelity(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: target.dim(),
        });
    }
    let f = target.expectation(rho.matrix());
    clip_with_tol("state fidelity", f.re, 0.0, 1.0, 1e-10)
}
