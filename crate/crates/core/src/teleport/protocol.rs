// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::qlinalg::{
    params_for_unitary, su_generators, unitary_from_params, ComplexMatrix, GeneratorSet,
    ParamVector, PureState, C64, ZERO,
};

use super::channel::Channel;

/// Teleportation controls: Alice's basis-defining unitaries U_α, Bob's
/// corrections V_α, and the derived X_α = V_α U_α†.
///
/// A protocol is immutable; the unitary caches are built once from the
/// parameters. Use [`Protocol::with_params`] to derive a modified copy.
#[derive(Clone, Debug)]
pub struct Protocol {
    d: usize,
    gens: Arc<GeneratorSet>,
    alice: Vec<ParamVector>,
    bob: Vec<ParamVector>,
    u: Vec<ComplexMatrix>,
    v: Vec<ComplexMatrix>,
    x: Vec<ComplexMatrix>,
    // X_α entries row-major, α-major, for the sampling hot loop
    x_flat: Vec<C64>,
}

impl Protocol {
    pub fn new(d: usize, alice: Vec<ParamVector>, bob: Vec<ParamVector>) -> Result<Self> {
        Self::from_params(Arc::new(su_generators(d)?), alice, bob)
    }

    pub fn from_params(
        gens: Arc<GeneratorSet>,
        alice: Vec<ParamVector>,
        bob: Vec<ParamVector>,
    ) -> Result<Self> {
        let d = gens.dim_d();
        let n = d * d;
        for params in [&alice, &bob] {
            if params.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: params.len(),
                });
            }
        }
        let build = |ps: &[ParamVector]| -> Result<Vec<ComplexMatrix>> {
            ps.iter().map(|p| unitary_from_params(p, &gens)).collect()
        };
        let u = build(&alice)?;
        let v = build(&bob)?;
        let x: Vec<ComplexMatrix> = v.iter().zip(&u).map(|(v, u)| v * &u.adjoint()).collect();
        let x_flat = x.iter().flat_map(|m| m.to_row_major()).collect();
        Ok(Self {
            d,
            gens,
            alice,
            bob,
            u,
            v,
            x,
            x_flat,
        })
    }

    /// Same generators, new parameters.
    pub fn with_params(&self, alice: Vec<ParamVector>, bob: Vec<ParamVector>) -> Result<Self> {
        Self::from_params(Arc::clone(&self.gens), alice, bob)
    }

    /// Alice and Bob both use the Weyl–Heisenberg operators shift^m·clock^n,
    /// α = m·d + n, so that every X_α is the identity.
    pub fn optimal(d: usize) -> Result<Self> {
        let gens = Arc::new(su_generators(d)?);
        let params = weyl_operators(d)?
            .iter()
            .map(|w| params_for_unitary(w, &gens))
            .collect::<Result<Vec<_>>>()?;
        Self::from_params(gens, params.clone(), params)
    }

    pub fn dim_d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn alice_params(&self) -> &[ParamVector] {
        &self.alice
    }

    pub fn bob_params(&self) -> &[ParamVector] {
        &self.bob
    }

    pub fn alice_unitaries(&self) -> &[ComplexMatrix] {
        &self.u
    }

    pub fn bob_unitaries(&self) -> &[ComplexMatrix] {
        &self.v
    }

    /// X_α = V_α U_α† for every α.
    pub fn corrections(&self) -> &[ComplexMatrix] {
        &self.x
    }

    /// Σ_α |tr X_α|².
    pub fn sum_trace_sq(&self) -> f64 {
        self.x.iter().map(|x| x.trace().norm_sqr()).sum()
    }

    /// Σ_α |⟨φ|X_α|φ⟩|² for raw amplitudes of length d.
    pub(crate) fn xi_sum(&self, phi: &[C64]) -> f64 {
        let d = self.d;
        debug_assert_eq!(phi.len(), d);
        let mut total = 0.0;
        for x in self.x_flat.chunks_exact(d * d) {
            let mut overlap = ZERO;
            for (i, row) in x.chunks_exact(d).enumerate() {
                let mut acc = ZERO;
                for (xij, pj) in row.iter().zip(phi) {
                    acc += xij * pj;
                }
                overlap += phi[i].conj() * acc;
            }
            total += overlap.norm_sqr();
        }
        total
    }

    /// Joint-measurement states |Ψ_α⟩ = (U_α ⊗ 𝟙)|Ψ₀⟩.
    pub fn measurement_states(&self) -> Vec<PureState> {
        let bell = PureState::new(Channel::bell_amplitudes(self.d))
            .expect("Bell state is normalized");
        let id = ComplexMatrix::identity(self.d);
        self.u.iter().map(|u| bell.evolve(&u.kron(&id))).collect()
    }

    /// Compares Σ_α |Ψ_α⟩⟨Ψ_α| with 𝟙_{d²}.
    ///
    /// Noisy controls generally break completeness; the fidelity formulas are
    /// still evaluated for such protocols, and this flag tells them apart.
    pub fn completeness(&self) -> Completeness {
        let d2 = self.d * self.d;
        let mut sum = ComplexMatrix::zeros(d2, d2);
        for psi in self.measurement_states() {
            sum = &sum + &psi.projector();
        }
        Completeness {
            deviation: sum.max_abs_diff(&ComplexMatrix::identity(d2)),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.completeness().is_complete()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Completeness {
    /// max |(Σ_α |Ψ_α⟩⟨Ψ_α| − 𝟙)_ij|
    pub deviation: f64,
}

impl Completeness {
    pub const TOL: f64 = 1e-9;

    pub fn is_complete(&self) -> bool {
        self.deviation <= Self::TOL
    }
}

/// shift^m · clock^n for α = m·d + n.
pub fn weyl_operators(d: usize) -> Result<Vec<ComplexMatrix>> {
    if d < 2 {
        return Err(Error::InvalidDimension { d });
    }
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
    let mut ops = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            // shift^m |j⟩ = |j+m⟩, clock^n |j⟩ = ω^{nj} |j⟩
            ops.push(ComplexMatrix::from_fn(d, d, |row, col| {
                if row == (col + m) % d {
                    omega((n * col) % d)
                } else {
                    ZERO
                }
            }));
        }
    }
    Ok(ops)
}

/// X_α for every α of the protocol.
pub fn correction_ops(proto: &Protocol) -> Vec<ComplexMatrix> {
    proto.corrections().to_vec()
}
