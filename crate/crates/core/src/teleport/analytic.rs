// SPDX-License-Identifier: Apache-2.0

//! Closed-form fidelity quantities of a protocol over an isotropic channel.
//!
//! With X_α = V_α U_α† and ξ_α(φ) = |⟨φ|X_α|φ⟩|², the input fidelity is
//! f(φ) = (γ/d²) Σ_α ξ_α + (1−γ)/d, and its Haar average is
//!
//! F = F_max − γ/(d+1) · (d − Σ_α |tr X_α|² / d³),  F_max = γ + (1−γ)/d.

use crate::error::{clip_to_bounds, Error, Result};
use crate::qlinalg::{ComplexMatrix, DensityMatrix, PureState, C64};

use super::channel::Channel;
use super::protocol::Protocol;

fn check_dims(proto: &Protocol, ch: &Channel) -> Result<usize> {
    if proto.dim_d() != ch.dim_d() {
        return Err(Error::DimensionMismatch {
            expected: proto.dim_d(),
            found: ch.dim_d(),
        });
    }
    Ok(proto.dim_d())
}

fn check_state(d: usize, phi: &PureState) -> Result<()> {
    if phi.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: phi.dim(),
        });
    }
    Ok(())
}

/// f(φ) for a single pure input.
pub fn input_fidelity(proto: &Protocol, ch: &Channel, phi: &PureState) -> Result<f64> {
    let d = check_dims(proto, ch)?;
    check_state(d, phi)?;
    let f = fidelity_of_amplitudes(proto, ch, phi.amplitudes());
    let gamma = ch.gamma();
    clip_to_bounds("input fidelity", f, (1.0 - gamma) / d as f64, ch.f_max())
}

/// f(φ) without validation, for sampling loops. `phi` must have length d and unit norm.
pub fn fidelity_of_amplitudes(proto: &Protocol, ch: &Channel, phi: &[C64]) -> f64 {
    let d = proto.dim_d() as f64;
    let gamma = ch.gamma();
    gamma / (d * d) * proto.xi_sum(phi) + (1.0 - gamma) / d
}

/// ρ_out = (γ/d²) Σ_α X_α ρ_φ X_α† + ((1−γ)/d) 𝟙_d.
pub fn simulate_output(proto: &Protocol, ch: &Channel, phi: &PureState) -> Result<DensityMatrix> {
    let d = check_dims(proto, ch)?;
    check_state(d, phi)?;
    let gamma = ch.gamma();
    let mut out =
        ComplexMatrix::identity(d).scale(C64::new((1.0 - gamma) / d as f64, 0.0));
    let weight = C64::new(gamma / (d * d) as f64, 0.0);
    for x in proto.corrections() {
        let moved = phi.evolve(x).projector();
        out = &out + &moved.scale(weight);
    }
    DensityMatrix::new(out)
}

/// Closed-form average fidelity F.
pub fn average_fidelity(proto: &Protocol, ch: &Channel) -> Result<f64> {
    let d = check_dims(proto, ch)? as f64;
    let gamma = ch.gamma();
    let f = ch.f_max() - gamma / (d + 1.0) * (d - proto.sum_trace_sq() / (d * d * d));
    let bounds = fidelity_bounds(ch, 0.0)?;
    clip_to_bounds("average fidelity", f, bounds.f_min, bounds.f_max)
}

/// E = (1/d²) Σ_α ⟨Φ_α|ρ_Ψ₀|Φ_α⟩ with Φ_α = (X_α ⊗ 𝟙)|Ψ₀⟩.
///
/// Equals (γ/d⁴) Σ_α |tr X_α|² + (1−γ)/d², and F = (dE + 1)/(d + 1).
pub fn entanglement_quantity(proto: &Protocol, ch: &Channel) -> Result<f64> {
    let d = check_dims(proto, ch)?;
    let rho = ch.density();
    let bell = PureState::new(Channel::bell_amplitudes(d))?;
    let id = ComplexMatrix::identity(d);
    let total: f64 = proto
        .corrections()
        .iter()
        .map(|x| {
            let phi = bell.evolve(&x.kron(&id));
            phi.expectation(rho.matrix()).re
        })
        .sum();
    let e = total / (d * d) as f64;
    let gamma = ch.gamma();
    let d2 = (d * d) as f64;
    clip_to_bounds("entanglement quantity", e, (1.0 - gamma) / d2, gamma + (1.0 - gamma) / d2)
}

/// Haar average of ξ = |⟨φ|X|φ⟩|²: (|tr X|² + d) / (d(d+1)).
pub fn haar_mean_xi(x: &ComplexMatrix) -> Result<f64> {
    let d = x.square_dim()?;
    if d < 2 {
        return Err(Error::InvalidDimension { d });
    }
    let d = d as f64;
    Ok((x.trace().norm_sqr() + d) / (d * (d + 1.0)))
}

/// Range of F over all protocols and the ceiling γ·Δ̄ on D.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityBounds {
    pub f_min: f64,
    pub f_max: f64,
    pub d_max: f64,
}

/// `mean_delta` is Δ̄, the α-average of the ξ_α deviations.
pub fn fidelity_bounds(ch: &Channel, mean_delta: f64) -> Result<FidelityBounds> {
    if mean_delta.is_nan() || mean_delta < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "mean deviation {mean_delta} must be non-negative"
        )));
    }
    let d = ch.dim_d() as f64;
    let gamma = ch.gamma();
    Ok(FidelityBounds {
        f_min: 1.0 / d - gamma / (d * (d + 1.0)),
        f_max: ch.f_max(),
        d_max: gamma * mean_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::{rng::seeded, ParamVector, ONE, ZERO};
    use crate::teleport::random_protocol;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn sigma_x_protocol() -> Protocol {
        // U_α = 𝟙, V_α = exp(-i(π/2)σ_x) = -iσ_x, so every X_α ∝ σ_x
        let zero = ParamVector::zeros(2).unwrap();
        let x = ParamVector::new(2, vec![PI / 2.0, 0.0, 0.0]).unwrap();
        Protocol::new(2, vec![zero; 4], vec![x; 4]).unwrap()
    }

    #[test]
    fn optimal_protocol_reaches_f_max() {
        for d in 2..=4 {
            let proto = Protocol::optimal(d).unwrap();
            for gamma in [0.0, 1.0 / 3.0, FRAC_1_SQRT_2, 1.0] {
                let ch = Channel::new(d, gamma).unwrap();
                let f = average_fidelity(&proto, &ch).unwrap();
                assert!((f - ch.f_max()).abs() < 1e-10);
                let phi = crate::qlinalg::haar_random_state(d, &mut seeded(d as u64)).unwrap();
                assert!((input_fidelity(&proto, &ch, &phi).unwrap() - ch.f_max()).abs() < 1e-12);
            }
        }
        let ch = Channel::new(2, FRAC_1_SQRT_2).unwrap();
        let f = average_fidelity(&Protocol::optimal(2).unwrap(), &ch).unwrap();
        assert!((f - (1.0 + FRAC_1_SQRT_2) / 2.0).abs() < 1e-12);
        assert!((f - 0.853553).abs() < 1e-6);
    }

    #[test]
    fn traceless_corrections_hit_the_lower_bound() {
        let ch = Channel::new(2, 1.0).unwrap();
        let proto = sigma_x_protocol();
        let f = average_fidelity(&proto, &ch).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 1e-12);
        let phi = PureState::basis(2, 0).unwrap();
        let direct = input_fidelity(&proto, &ch, &phi).unwrap();
        let via_state = crate::qlinalg::state_fidelity(
            &simulate_output(&proto, &ch, &phi).unwrap(),
            &phi,
        )
        .unwrap();
        assert!(direct.abs() < 1e-15);
        assert!(via_state.abs() < 1e-15);
        let e = entanglement_quantity(&proto, &ch).unwrap();
        assert!(e.abs() < 1e-15);
    }

    #[test]
    fn white_noise_channel_gives_classical_fidelity() {
        let mut rng = seeded(21);
        for d in 2..=3 {
            let ch = Channel::new(d, 0.0).unwrap();
            let proto = random_protocol(d, &mut rng).unwrap();
            let phi = crate::qlinalg::haar_random_state(d, &mut rng).unwrap();
            assert!((input_fidelity(&proto, &ch, &phi).unwrap() - 1.0 / d as f64).abs() < 1e-15);
            let out = simulate_output(&proto, &ch, &phi).unwrap();
            let mixed = DensityMatrix::maximally_mixed(d).unwrap();
            assert!(out.matrix().max_abs_diff(mixed.matrix()) < 1e-15);
            let b = fidelity_bounds(&ch, 0.3).unwrap();
            assert_eq!(b.f_min, 1.0 / d as f64);
            assert_eq!(b.f_max, 1.0 / d as f64);
            assert_eq!(b.d_max, 0.0);
        }
    }

    #[test]
    fn optimal_output_is_depolarized_input() {
        let ch = Channel::new(3, 0.4).unwrap();
        let phi = crate::qlinalg::haar_random_state(3, &mut seeded(5)).unwrap();
        let out = simulate_output(&Protocol::optimal(3).unwrap(), &ch, &phi).unwrap();
        let expected = &phi.projector().scale(C64::new(0.4, 0.0))
            + &ComplexMatrix::identity(3).scale(C64::new(0.6 / 3.0, 0.0));
        assert!(out.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn random_output_states_are_valid() {
        let mut rng = seeded(77);
        for _ in 0..50 {
            let proto = random_protocol(2, &mut rng).unwrap();
            let ch = Channel::new(2, 0.8).unwrap();
            let phi = crate::qlinalg::haar_random_state(2, &mut rng).unwrap();
            let out = simulate_output(&proto, &ch, &phi).unwrap();
            assert!((out.trace() - 1.0).abs() < 1e-10);
            assert!(out.matrix().is_hermitian(1e-10));
        }
    }

    #[test]
    fn entanglement_identity_and_bounds() {
        let mut rng = seeded(8);
        for d in 2..=4 {
            for gamma in [0.0, 0.3, 1.0] {
                let ch = Channel::new(d, gamma).unwrap();
                let proto = random_protocol(d, &mut rng).unwrap();
                let e = entanglement_quantity(&proto, &ch).unwrap();
                let d_f = d as f64;
                let closed = gamma / d_f.powi(4) * proto.sum_trace_sq() + (1.0 - gamma) / (d_f * d_f);
                assert!((e - closed).abs() < 1e-12);
                let f = average_fidelity(&proto, &ch).unwrap();
                assert!(((d_f * e + 1.0) / (d_f + 1.0) - f).abs() < 1e-12);
            }
            let ch = Channel::new(d, 0.6).unwrap();
            let e = entanglement_quantity(&Protocol::optimal(d).unwrap(), &ch).unwrap();
            assert!((e - (0.6 + 0.4 / (d * d) as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_mean_xi_examples() {
        for d in 2..=5 {
            assert!((haar_mean_xi(&ComplexMatrix::identity(d)).unwrap() - 1.0).abs() < 1e-15);
        }
        let sx = ComplexMatrix::from_row_major(2, 2, &[ZERO, ONE, ONE, ZERO]).unwrap();
        assert!((haar_mean_xi(&sx).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            haar_mean_xi(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn result_one_bounds_for_named_channels() {
        let b = fidelity_bounds(&Channel::new(2, 1.0 / 3.0).unwrap(), 0.0).unwrap();
        assert!((b.f_min - 4.0 / 9.0).abs() < 1e-15);
        assert!((b.f_max - 2.0 / 3.0).abs() < 1e-15);
        let worst = 2.0 / (3.0 * 5f64.sqrt());
        let b = fidelity_bounds(&Channel::new(2, 1.0).unwrap(), worst).unwrap();
        assert!((b.d_max - 0.298142).abs() < 1e-6);
        assert!(fidelity_bounds(&Channel::new(2, 1.0).unwrap(), -0.1).is_err());
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let proto = Protocol::optimal(2).unwrap();
        let ch3 = Channel::new(3, 1.0).unwrap();
        assert!(average_fidelity(&proto, &ch3).is_err());
        let ch2 = Channel::new(2, 1.0).unwrap();
        let phi3 = PureState::basis(3, 1).unwrap();
        assert!(input_fidelity(&proto, &ch2, &phi3).is_err());
        assert!(simulate_output(&proto, &ch2, &phi3).is_err());
    }
}
