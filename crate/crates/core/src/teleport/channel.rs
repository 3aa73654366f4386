// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};
use crate::qlinalg::{ComplexMatrix, DensityMatrix, C64};

/// Separability threshold of the isotropic qubit channel.
pub const GAMMA_C: f64 = 1.0 / 3.0;
/// CHSH-violation threshold of the isotropic qubit channel, 1/√2.
pub const GAMMA_BV: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Isotropic two-qudit resource γ|Ψ₀⟩⟨Ψ₀| + (1−γ)𝟙/d².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    d: usize,
    gamma: f64,
}

impl Channel {
    pub fn new(d: usize, gamma: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { d });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidConfig(format!(
                "channel fraction gamma = {gamma} is outside [0, 1]"
            )));
        }
        Ok(Self { d, gamma })
    }

    pub fn dim_d(&self) -> usize {
        self.d
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// γ + (1−γ)/d, the largest average fidelity this channel allows.
    pub fn f_max(&self) -> f64 {
        self.gamma + (1.0 - self.gamma) / self.d as f64
    }

    /// Maximally entangled |Ψ₀⟩ = Σ_j |jj⟩/√d as a length-d² vector.
    pub fn bell_amplitudes(d: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); d * d];
        let amp = C64::new((d as f64).sqrt().recip(), 0.0);
        for j in 0..d {
            v[j * d + j] = amp;
        }
        v
    }

    /// The d²×d² density matrix of the channel.
    pub fn density(&self) -> DensityMatrix {
        let d2 = self.d * self.d;
        let psi = Self::bell_amplitudes(self.d);
        let noise = (1.0 - self.gamma) / d2 as f64;
        let m = ComplexMatrix::from_fn(d2, d2, |i, j| {
            let entangled = psi[i] * psi[j].conj() * self.gamma;
            if i == j {
                entangled + noise
            } else {
                entangled
            }
        });
        DensityMatrix::new(m).expect("isotropic state is Hermitian with unit trace")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Channel::new(1, 0.5).is_err());
        assert!(Channel::new(2, -0.1).is_err());
        assert!(Channel::new(2, 1.1).is_err());
        assert!(Channel::new(2, f64::NAN).is_err());
        assert!(Channel::new(3, 0.0).is_ok());
    }

    #[test]
    fn pure_bell_state_at_unit_gamma() {
        let rho = Channel::new(2, 1.0).unwrap().density();
        let h = 0.5;
        for i in 0..4 {
            for j in 0..4 {
                let expected = if [0, 3].contains(&i) && [0, 3].contains(&j) { h } else { 0.0 };
                assert!((rho.matrix().get(i, j).re - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn white_noise_at_zero_gamma() {
        let rho = Channel::new(3, 0.0).unwrap().density();
        let mixed = ComplexMatrix::identity(9).scale(C64::new(1.0 / 9.0, 0.0));
        assert!(rho.matrix().max_abs_diff(&mixed) < 1e-15);
    }

    #[test]
    fn isotropic_spectrum() {
        // γ + (1−γ)/4 once, (1−γ)/4 three times
        let rho = Channel::new(2, 1.0 / 3.0).unwrap().density();
        let ev = rho.eigenvalues();
        let expected = [1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }
}
