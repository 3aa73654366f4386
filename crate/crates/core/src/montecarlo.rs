// SPDX-License-Identifier: Apache-2.0

//! Haar-sampling estimates of F and D, operational control noise, and the
//! deterioration sweep over noise strength η.
//!
//! Samples are drawn in fixed-size batches, each from its own random stream.
//! Per-batch moments are merged pairwise in batch order, so an estimate is
//! bit-identical for any rayon thread count.

use std::f64::consts::PI;

use rand::Rng as _;
use rayon::prelude::*;

use crate::bloch::qubit_deviation;
use crate::error::{Error, Result};
use crate::qlinalg::{
    fill_haar_amplitudes,
    rng::{stream, Purpose, Rng},
    ParamVector, C64,
};
use crate::teleport::{average_fidelity, fidelity_of_amplitudes, Channel, FDReport, Method, Protocol};

/// Sampling budget for [`mc_estimate_fd`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MCConfig {
    pub samples: usize,
    pub seed: u64,
    /// Samples per random stream.
    pub batch: usize,
}

impl MCConfig {
    pub const MIN_SAMPLES: usize = 100;
    pub const DEFAULT_BATCH: usize = 4096;

    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        Self {
            samples,
            seed,
            batch: Self::DEFAULT_BATCH,
        }
        .validate()
    }

    pub fn with_batch(self, batch: usize) -> Result<Self> {
        Self { batch, ..self }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        if self.samples < Self::MIN_SAMPLES {
            return Err(Error::InvalidConfig(format!(
                "Monte-Carlo needs at least {} samples, got {}",
                Self::MIN_SAMPLES,
                self.samples
            )));
        }
        if self.batch == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        Ok(self)
    }
}

/// Additive control noise p → p + ηε with ε uniform on [−π, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    eta: f64,
}

impl NoiseModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidConfig(format!("eta must lie in [0, 1], got {eta}")));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Streaming central moments up to fourth order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n0 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t = delta * dn * n0;
        self.mean += dn;
        self.m4 += t * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t;
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self {
            n: self.n + other.n,
            mean: self.mean + delta * nb / n,
            m2,
            m3,
            m4,
        }
    }

    /// Merges a slice as a balanced binary tree in index order.
    pub fn merge_all(parts: &[Self]) -> Self {
        match parts.len() {
            0 => Self::default(),
            1 => parts[0],
            n => Self::merge_all(&parts[..n / 2]).merge(&Self::merge_all(&parts[n / 2..])),
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance, the plug-in E[x²] − E[x]².
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.m2 / self.n as f64).max(0.0)
        }
    }

    /// Variance with Bessel's correction.
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Fourth central moment.
    pub fn fourth(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m4 / self.n as f64
        }
    }
}

/// Haar-sampled F and D with standard errors.
///
/// stderr_D follows from the delta method on D̂² = m̂₂:
/// Var(m̂₂) ≈ (m₄ − m₂²)/N, so stderr_D ≈ √((m₄ − m₂²)/N) / (2D̂).
pub fn mc_estimate_fd(proto: &Protocol, ch: &Channel, cfg: &MCConfig) -> Result<FDReport> {
    let cfg = cfg.validate()?;
    let d = proto.dim_d();
    if ch.dim_d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: ch.dim_d(),
        });
    }
    let lo = (1.0 - ch.gamma()) / d as f64;
    let hi = ch.f_max();
    let batches = cfg.samples.div_ceil(cfg.batch);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = cfg.batch.min(cfg.samples - b * cfg.batch);
            let mut rng = stream(cfg.seed, Purpose::MonteCarloBatch, b as u64);
            let mut phi = vec![C64::new(0.0, 0.0); d];
            let mut m = Moments::default();
            for _ in 0..len {
                fill_haar_amplitudes(&mut phi, &mut rng);
                m.push(fidelity_of_amplitudes(proto, ch, &phi).clamp(lo, hi));
            }
            m
        })
        .collect();
    let total = Moments::merge_all(&parts);
    let n = total.count() as f64;
    let var = total.variance();
    let dev = var.sqrt();
    let stderr_d = if dev > 0.0 {
        ((total.fourth() - var * var).max(0.0) / n).sqrt() / (2.0 * dev)
    } else {
        0.0
    };
    FDReport {
        f: total.mean(),
        d: dev,
        method: Method::MonteCarlo,
        samples: cfg.samples,
        stderr_f: (total.sample_variance() / n).sqrt(),
        stderr_d,
    }
    .validate()
}

fn perturb_params(p: &ParamVector, eta: f64, rng: &mut Rng) -> ParamVector {
    p.map(|_, v| {
        let eps: f64 = rng.random_range(-PI..PI);
        if eta == 0.0 {
            v
        } else {
            v + eta * eps
        }
    })
}

pub(crate) fn perturb_vectors(ps: &[ParamVector], noise: &NoiseModel, rng: &mut Rng) -> Vec<ParamVector> {
    ps.iter().map(|p| perturb_params(p, noise.eta(), rng)).collect()
}

/// Adds independent noise ηε to every component of all 2d² control vectors,
/// Alice's first, then Bob's.
pub fn perturb_protocol(proto: &Protocol, noise: &NoiseModel, rng: &mut Rng) -> Result<Protocol> {
    let alice = perturb_vectors(proto.alice_params(), noise, rng);
    let bob = perturb_vectors(proto.bob_params(), noise, rng);
    proto.with_params(alice, bob)
}

/// Mean and spread of (F, D) over noisy copies of the optimal protocol at one η.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeteriorationRow {
    pub eta: f64,
    pub mean_f: f64,
    pub std_f: f64,
    pub mean_d: f64,
    pub std_d: f64,
    pub trials: usize,
    pub seed: u64,
}

impl DeteriorationRow {
    pub const CSV_HEADER: &'static str = "eta,mean_F,std_F,mean_D,std_D,trials,seed";

    pub fn csv_record(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.eta, self.mean_f, self.std_f, self.mean_d, self.std_d, self.trials, self.seed
        )
    }
}

/// F and D of one noisy trial. D is exact for qubits and sampled otherwise.
fn noisy_trial(
    optimal: &Protocol,
    ch: &Channel,
    noise: &NoiseModel,
    cfg: &MCConfig,
    rng: &mut Rng,
) -> Result<(f64, f64)> {
    let noisy = perturb_protocol(optimal, noise, rng)?;
    let f = average_fidelity(&noisy, ch)?;
    let d = if ch.dim_d() == 2 {
        qubit_deviation(&noisy, ch)?.d
    } else {
        let mc = MCConfig {
            seed: rng.random(),
            ..*cfg
        };
        mc_estimate_fd(&noisy, ch, &mc)?.d
    };
    Ok((f, d))
}

/// For each η, perturbs the optimal protocol `trials` times and reports the
/// mean and sample standard deviation of F and D.
///
/// Trial k of grid point j draws from its own stream, so rows are
/// reproducible from `cfg.seed` alone.
pub fn deterioration_experiment(
    ch: &Channel,
    eta_grid: &[f64],
    trials: usize,
    cfg: &MCConfig,
) -> Result<Vec<DeteriorationRow>> {
    let cfg = cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    if eta_grid.is_empty() {
        return Err(Error::InvalidConfig("empty eta grid".into()));
    }
    let optimal = Protocol::optimal(ch.dim_d())?;
    eta_grid
        .iter()
        .enumerate()
        .map(|(j, &eta)| {
            let noise = NoiseModel::new(eta)?;
            let results = (0..trials)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream(cfg.seed, Purpose::Trial, ((j as u64) << 24) | k as u64);
                    noisy_trial(&optimal, ch, &noise, &cfg, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let (mut fs, mut ds) = (Moments::default(), Moments::default());
            for (f, d) in results {
                fs.push(f);
                ds.push(d);
            }
            Ok(DeteriorationRow {
                eta,
                mean_f: fs.mean(),
                std_f: fs.sample_variance().sqrt(),
                mean_d: ds.mean(),
                std_d: ds.sample_variance().sqrt(),
                trials,
                seed: cfg.seed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::qubit_deviation;
    use crate::qlinalg::rng::seeded;
    use crate::teleport::{haar_random_protocol, random_protocol};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn sigma_x_protocol() -> Protocol {
        let zero = ParamVector::zeros(2).unwrap();
        let x = ParamVector::new(2, vec![FRAC_PI_2, 0.0, 0.0]).unwrap();
        Protocol::new(2, vec![zero; 4], vec![x; 4]).unwrap()
    }

    fn naive_moments(xs: &[f64]) -> (f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>();
        (mean, c(2), c(3), c(4))
    }

    proptest! {
        #[test]
        fn merged_moments_match_direct_sums(
            xs in proptest::collection::vec(-3.0f64..3.0, 2..200),
            split in 1usize..8,
        ) {
            let chunk = xs.len().div_ceil(split).max(1);
            let parts: Vec<Moments> = xs
                .chunks(chunk)
                .map(|c| {
                    let mut m = Moments::default();
                    c.iter().for_each(|&x| m.push(x));
                    m
                })
                .collect();
            let merged = Moments::merge_all(&parts);
            let (mean, m2, m3, m4) = naive_moments(&xs);
            prop_assert_eq!(merged.n as usize, xs.len());
            prop_assert!((merged.mean - mean).abs() < 1e-12);
            prop_assert!((merged.m2 - m2).abs() < 1e-9 * (1.0 + m2));
            prop_assert!((merged.m3 - m3).abs() < 1e-9 * (1.0 + m2.powf(1.5)));
            prop_assert!((merged.m4 - m4).abs() < 1e-9 * (1.0 + m4));
        }

        #[test]
        fn zero_noise_leaves_params_bitwise_equal(seed in any::<u64>()) {
            let proto = random_protocol(2, &mut seeded(seed)).unwrap();
            let noise = NoiseModel::new(0.0).unwrap();
            let same = perturb_protocol(&proto, &noise, &mut seeded(seed ^ 1)).unwrap();
            for (a, b) in proto.alice_params().iter().zip(same.alice_params()) {
                prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
            for (a, b) in proto.bob_params().iter().zip(same.bob_params()) {
                prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(MCConfig::new(99, 0).is_err());
        assert!(MCConfig::new(100, 0).is_ok());
        assert!(MCConfig::new(100, 0).unwrap().with_batch(0).is_err());
        assert!(NoiseModel::new(1.1).is_err());
        assert!(NoiseModel::new(-0.1).is_err());
        assert!(NoiseModel::new(f64::NAN).is_err());
    }

    #[test]
    fn optimal_protocol_is_exact() {
        let ch = Channel::new(2, 1.0).unwrap();
        let cfg = MCConfig::new(10_000, 1).unwrap();
        let rep = mc_estimate_fd(&Protocol::optimal(2).unwrap(), &ch, &cfg).unwrap();
        assert!((rep.f - 1.0).abs() < 1e-12);
        assert!(rep.d < 1e-6);
        assert_eq!(rep.samples, 10_000);
        assert_eq!(rep.method, Method::MonteCarlo);
    }

    #[test]
    fn traceless_corrections_give_one_third() {
        let ch = Channel::new(2, 1.0).unwrap();
        let cfg = MCConfig::new(100_000, 2).unwrap();
        let rep = mc_estimate_fd(&sigma_x_protocol(), &ch, &cfg).unwrap();
        assert!((rep.f - 1.0 / 3.0).abs() <= 4.0 * rep.stderr_f, "{rep:?}");
    }

    #[test]
    fn random_qubit_protocols_agree_with_closed_forms() {
        let mut rng = seeded(3);
        let ch = Channel::new(2, 0.8).unwrap();
        for k in 0..5 {
            let proto = random_protocol(2, &mut rng).unwrap();
            let cfg = MCConfig::new(100_000, 100 + k).unwrap();
            let rep = mc_estimate_fd(&proto, &ch, &cfg).unwrap();
            let f = average_fidelity(&proto, &ch).unwrap();
            let d = qubit_deviation(&proto, &ch).unwrap().d;
            assert!((rep.f - f).abs() <= 4.0 * rep.stderr_f, "{rep:?} vs {f}");
            assert!((rep.d - d).abs() <= 4.0 * rep.stderr_d, "{rep:?} vs {d}");
            assert!(rep.satisfies_variance_bound(4.0 * rep.stderr_f));
        }
    }

    #[test]
    fn stderr_shrinks_as_inverse_root_n() {
        let proto = random_protocol(2, &mut seeded(5)).unwrap();
        let ch = Channel::new(2, 1.0).unwrap();
        let se: Vec<f64> = [1_000, 10_000, 100_000]
            .iter()
            .map(|&n| mc_estimate_fd(&proto, &ch, &MCConfig::new(n, 9).unwrap()).unwrap().stderr_f)
            .collect();
        for w in se.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "{se:?}");
        }
    }

    #[test]
    fn estimate_is_independent_of_thread_count() {
        let proto = random_protocol(3, &mut seeded(6)).unwrap();
        let ch = Channel::new(3, 0.9).unwrap();
        let cfg = MCConfig::new(20_000, 7).unwrap().with_batch(1000).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_estimate_fd(&proto, &ch, &cfg).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.f.to_bits(), b.f.to_bits());
        assert_eq!(a.d.to_bits(), b.d.to_bits());
        assert_eq!(a.stderr_d.to_bits(), b.stderr_d.to_bits());
    }

    #[test]
    fn batch_size_only_changes_the_stream_layout() {
        let proto = random_protocol(2, &mut seeded(8)).unwrap();
        let ch = Channel::new(2, 1.0).unwrap();
        let a = mc_estimate_fd(&proto, &ch, &MCConfig::new(50_000, 1).unwrap()).unwrap();
        let b = mc_estimate_fd(&proto, &ch, &MCConfig::new(50_000, 1).unwrap().with_batch(333).unwrap())
            .unwrap();
        let se = a.stderr_f.hypot(b.stderr_f);
        assert!((a.f - b.f).abs() <= 4.0 * se);
    }

    #[test]
    fn perturbation_is_reproducible() {
        let proto = Protocol::optimal(2).unwrap();
        let noise = NoiseModel::new(1.0).unwrap();
        let a = perturb_protocol(&proto, &noise, &mut seeded(10)).unwrap();
        let b = perturb_protocol(&proto, &noise, &mut seeded(10)).unwrap();
        assert_eq!(a.alice_params(), b.alice_params());
        assert_eq!(a.bob_params(), b.bob_params());
        assert_ne!(a.alice_params(), proto.alice_params());
    }

    #[test]
    fn perturbation_variance_matches_uniform_law() {
        let zero = ParamVector::zeros(2).unwrap();
        let proto = Protocol::new(2, vec![zero.clone(); 4], vec![zero; 4]).unwrap();
        let eta = 0.5;
        let noise = NoiseModel::new(eta).unwrap();
        let mut rng = seeded(11);
        let mut m = Moments::default();
        while m.count() < 10_000 {
            let noisy = perturb_protocol(&proto, &noise, &mut rng).unwrap();
            for p in noisy.alice_params().iter().chain(noisy.bob_params()) {
                p.values().iter().for_each(|&v| m.push(v));
            }
        }
        let expected = eta * eta * PI * PI / 3.0;
        assert!((m.sample_variance() / expected - 1.0).abs() < 0.05);
    }

    #[test]
    fn haar_controls_average_to_one_half() {
        let ch = Channel::new(2, 1.0).unwrap();
        let mut rng = seeded(12);
        let mut m = Moments::default();
        for _ in 0..20_000 {
            m.push(average_fidelity(&haar_random_protocol(2, &mut rng).unwrap(), &ch).unwrap());
        }
        let se = (m.sample_variance() / m.count() as f64).sqrt();
        assert!((m.mean() - 0.5).abs() <= 2.0 * se, "{} ± {se}", m.mean());
    }

    /// exp(−i p·σ) is the unit quaternion (cos|p|, −sin|p| p̂), and
    /// tr(V U†) = 2 (scalar part of q_v q̄_u) = 2 q_v·q_u.
    fn quaternion_trace(u: [f64; 3], v: [f64; 3]) -> f64 {
        let quat = |p: [f64; 3]| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            let s = if r > 0.0 { r.sin() / r } else { 1.0 };
            [r.cos(), s * p[0], s * p[1], s * p[2]]
        };
        let (a, b) = (quat(u), quat(v));
        2.0 * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])
    }

    #[test]
    fn uniform_controls_average_above_one_half() {
        let mut rng = seeded(13);
        let mut draw = || [0; 3].map(|_| rng.random_range(-PI..PI));
        let mut oracle = Moments::default();
        for _ in 0..400_000 {
            oracle.push(quaternion_trace(draw(), draw()).powi(2));
        }
        // F = 1/3 + E|tr X|²/6 at d = 2, γ = 1
        let f_oracle = 1.0 / 3.0 + oracle.mean() / 6.0;
        let se_oracle = (oracle.sample_variance() / oracle.count() as f64).sqrt() / 6.0;
        assert!((f_oracle - 0.6158).abs() < 0.002, "{f_oracle}");

        let ch = Channel::new(2, 1.0).unwrap();
        let mut lib = Moments::default();
        let mut rng = seeded(14);
        for _ in 0..20_000 {
            lib.push(average_fidelity(&random_protocol(2, &mut rng).unwrap(), &ch).unwrap());
        }
        let se_lib = (lib.sample_variance() / lib.count() as f64).sqrt();
        assert!((lib.mean() - f_oracle).abs() <= 4.0 * se_lib.hypot(se_oracle));
    }

    #[test]
    fn quaternion_oracle_matches_generator_exponential() {
        let mut rng = seeded(15);
        let ch = Channel::new(2, 1.0).unwrap();
        for _ in 0..20 {
            let proto = random_protocol(2, &mut rng).unwrap();
            let arr = |p: &ParamVector| [p.values()[0], p.values()[1], p.values()[2]];
            let sum: f64 = proto
                .alice_params()
                .iter()
                .zip(proto.bob_params())
                .map(|(u, v)| quaternion_trace(arr(u), arr(v)).powi(2))
                .sum();
            let f = 1.0 / 3.0 + sum / 24.0;
            assert!((average_fidelity(&proto, &ch).unwrap() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_noise_row_is_ideal() {
        for gamma in [1.0, 0.5] {
            let ch = Channel::new(2, gamma).unwrap();
            let cfg = MCConfig::new(1000, 3).unwrap();
            let rows = deterioration_experiment(&ch, &[0.0], 20, &cfg).unwrap();
            assert!((rows[0].mean_f - ch.f_max()).abs() < 1e-12);
            assert!(rows[0].mean_d < 1e-9);
            assert!(rows[0].std_f < 1e-12);
        }
    }

    #[test]
    fn deterioration_is_monotone_in_eta() {
        let ch = Channel::new(2, 1.0).unwrap();
        let cfg = MCConfig::new(1000, 17).unwrap();
        // exp(−i p·σ) has period π along each axis, so F bottoms out near
        // η ≈ 0.45 and climbs back to the uniform-control value by η = 1
        let grid = [0.0, 0.08, 0.16, 0.24, 0.32, 0.4];
        let trials = 300;
        let rows = deterioration_experiment(&ch, &grid, trials, &cfg).unwrap();
        let se = |s: f64| s / (trials as f64).sqrt();
        for w in rows.windows(2) {
            let tol_f = 2.0 * se(w[0].std_f).hypot(se(w[1].std_f));
            let tol_d = 2.0 * se(w[0].std_d).hypot(se(w[1].std_d));
            assert!(w[1].mean_f <= w[0].mean_f + tol_f, "{rows:?}");
            assert!(w[1].mean_d >= w[0].mean_d - tol_d, "{rows:?}");
        }
    }

    #[test]
    fn full_noise_matches_uniform_controls() {
        let ch = Channel::new(2, 1.0).unwrap();
        let cfg = MCConfig::new(1000, 19).unwrap();
        let trials = 2000;
        let rows = deterioration_experiment(&ch, &[0.45, 1.0], trials, &cfg).unwrap();
        let se = rows[1].std_f / (trials as f64).sqrt();
        assert!((rows[1].mean_f - 0.6158).abs() <= 4.0 * se + 0.002, "{rows:?}");
        assert!(rows[0].mean_f < rows[1].mean_f);
    }

    #[test]
    fn qutrit_deterioration_uses_sampled_deviation() {
        let ch = Channel::new(3, 1.0).unwrap();
        let cfg = MCConfig::new(2000, 4).unwrap();
        let rows = deterioration_experiment(&ch, &[0.0, 0.3], 4, &cfg).unwrap();
        assert!(rows[0].mean_d < 1e-6);
        assert!(rows[1].mean_d > 0.0 && rows[1].mean_f < 1.0);
    }

    #[test]
    fn deterioration_rows_are_reproducible_and_formatted() {
        let ch = Channel::new(2, 1.0).unwrap();
        let cfg = MCConfig::new(1000, 5).unwrap();
        let a = deterioration_experiment(&ch, &[0.5], 10, &cfg).unwrap();
        let b = deterioration_experiment(&ch, &[0.5], 10, &cfg).unwrap();
        assert_eq!(a, b);
        let rec = a[0].csv_record();
        assert_eq!(rec.split(',').count(), DeteriorationRow::CSV_HEADER.split(',').count());
        assert!(rec.starts_with("0.5,") && rec.ends_with(",10,5"));
        assert!(deterioration_experiment(&ch, &[], 10, &cfg).is_err());
        assert!(deterioration_experiment(&ch, &[1.5], 10, &cfg).is_err());
    }
}
