// SPDX-License-Identifier: Apache-2.0

//! Haar-distributed states and unitaries.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, PureState, C64};
use super::rng::Rng;
use crate::error::{Error, Result};

/// Fills `out` with a Haar-random unit vector (normalized complex Gaussian).
pub fn fill_haar_amplitudes(out: &mut [C64], rng: &mut Rng) {
    let mut norm_sqr = 0.0;
    for a in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *a = C64::new(re, im);
        norm_sqr += re * re + im * im;
    }
    let inv = norm_sqr.sqrt().recip();
    for a in out.iter_mut() {
        *a *= inv;
    }
}

pub fn haar_random_state(d: usize, rng: &mut Rng) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidDimension { d });
    }
    let mut amps = vec![C64::new(0.0, 0.0); d];
    fill_haar_amplitudes(&mut amps, rng);
    PureState::normalized(amps)
}

/// Ginibre matrix → QR, with the phases of diag(R) folded back into Q.
pub fn haar_random_unitary(d: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension { d });
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::<C64>::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    Ok(q.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rng::seeded;

    #[test]
    fn seeded_samples_repeat() {
        let a = haar_random_state(3, &mut seeded(11)).unwrap();
        let b = haar_random_state(3, &mut seeded(11)).unwrap();
        assert_eq!(a, b);
        let u = haar_random_unitary(3, &mut seeded(5)).unwrap();
        let v = haar_random_unitary(3, &mut seeded(5)).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn sampled_unitaries_are_unitary() {
        let mut rng = seeded(1);
        for d in 2..=5 {
            for _ in 0..20 {
                assert!(haar_random_unitary(d, &mut rng).unwrap().unitarity_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn invalid_dimension() {
        assert!(haar_random_state(1, &mut seeded(0)).is_err());
        assert!(haar_random_unitary(0, &mut seeded(0)).is_err());
    }
}
