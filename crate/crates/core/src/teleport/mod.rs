// SPDX-License-Identifier: Apache-2.0

//! The teleportation model: isotropic channel, controls, and the closed-form
//! average fidelity F and its companions.

mod analytic;
mod channel;
mod io;
mod protocol;

use std::f64::consts::PI;

use rand::Rng as _;

pub use analytic::{
    average_fidelity, entanglement_quantity, fidelity_bounds, fidelity_of_amplitudes,
    haar_mean_xi, input_fidelity, simulate_output, FidelityBounds,
};
pub use channel::{Channel, GAMMA_BV, GAMMA_C};
pub use protocol::{correction_ops, weyl_operators, Completeness, Protocol};

use crate::error::{Error, Result};
use crate::qlinalg::{haar_random_unitary, params_for_unitary, rng::Rng, ParamVector};

/// How an [`FDReport`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

/// Average fidelity F and fidelity deviation D with provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FDReport {
    pub f: f64,
    pub d: f64,
    pub method: Method,
    /// 0 for analytic values.
    pub samples: usize,
    pub stderr_f: f64,
    pub stderr_d: f64,
}

impl FDReport {
    pub fn analytic(f: f64, d: f64) -> Result<Self> {
        let report = Self {
            f,
            d,
            method: Method::Analytic,
            samples: 0,
            stderr_f: 0.0,
            stderr_d: 0.0,
        };
        report.validate()
    }

    /// Checks 0 ≤ F ≤ 1 and 0 ≤ D ≤ 1/2.
    pub fn validate(self) -> Result<Self> {
        if !(0.0..=1.0).contains(&self.f) {
            return Err(Error::Consistency {
                quantity: "average fidelity",
                value: self.f,
                lower: 0.0,
                upper: 1.0,
            });
        }
        if !(0.0..=0.5).contains(&self.d) {
            return Err(Error::Consistency {
                quantity: "fidelity deviation",
                value: self.d,
                lower: 0.0,
                upper: 0.5,
            });
        }
        Ok(self)
    }

    /// D² ≤ F(1−F), allowing `slack` on the right-hand side.
    pub fn satisfies_variance_bound(&self, slack: f64) -> bool {
        self.d * self.d <= self.f * (1.0 - self.f) + slack
    }
}

fn uniform_params(d: usize, rng: &mut Rng) -> Result<ParamVector> {
    let values = (0..d * d - 1).map(|_| rng.random_range(-PI..PI)).collect();
    ParamVector::new(d, values)
}

/// Every control component drawn uniformly from [−π, π).
pub fn random_protocol(d: usize, rng: &mut Rng) -> Result<Protocol> {
    if d < 2 {
        return Err(Error::InvalidDimension { d });
    }
    let alice = (0..d * d).map(|_| uniform_params(d, rng)).collect::<Result<_>>()?;
    let bob = (0..d * d).map(|_| uniform_params(d, rng)).collect::<Result<_>>()?;
    Protocol::new(d, alice, bob)
}

/// U_α = 𝟙 and V_α Haar-distributed, so each X_α is Haar up to a phase.
///
/// Fails when a sampled unitary's parameters do not fit in [−π, π), which
/// cannot happen for d = 2.
pub fn haar_random_protocol(d: usize, rng: &mut Rng) -> Result<Protocol> {
    let gens = std::sync::Arc::new(crate::qlinalg::su_generators(d)?);
    let alice = vec![ParamVector::zeros(d)?; d * d];
    let bob = (0..d * d)
        .map(|_| params_for_unitary(&haar_random_unitary(d, rng)?, &gens))
        .collect::<Result<_>>()?;
    Protocol::from_params(gens, alice, bob)
}
