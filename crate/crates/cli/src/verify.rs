// SPDX-License-Identifier: Apache-2.0

//! The invariant and bound suites behind `qtele verify`.
//!
//! Every check reduces to a non-negative error value compared against a
//! bound, base tolerance × `--tol-scale`; a check passes when value ≤ bound.
//! The sweep row count is bookkeeping and ignores the scale.

use qudit_teleport::bloch::{qubit_deviation, tight_bound_check};
use qudit_teleport::montecarlo::{deterioration_experiment, mc_estimate_fd, perturb_protocol, MCConfig, NoiseModel};
use qudit_teleport::qlinalg::rng::{stream, Purpose, Rng};
use qudit_teleport::qlinalg::{fill_haar_amplitudes, haar_random_unitary, PureState, C64};
use qudit_teleport::stabilizer::{evolve, init_population, DEConfig};
use qudit_teleport::teleport::{
    average_fidelity, entanglement_quantity, fidelity_bounds, haar_mean_xi, haar_random_protocol, random_protocol,
    Channel, Protocol, GAMMA_BV, GAMMA_C,
};
use qudit_teleport::Result;

use crate::args::VerifyArgs;
use crate::output::{emit, CliError, Table};

const GAMMA_GRID: [f64; 4] = [0.0, GAMMA_C, GAMMA_BV, 1.0];

pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }

    fn record(&self) -> String {
        let status = if self.passed() { "pass" } else { "fail" };
        format!("{},{status},{},{}", self.name, self.value, self.bound)
    }
}

struct Suite<'a> {
    args: &'a VerifyArgs,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn rng(&self, index: u64) -> Rng {
        stream(self.args.seed, Purpose::Verify, index)
    }

    /// A negative scale yields a negative bound even for zero base
    /// tolerances, so every tolerance check fails.
    fn tol(&self, base: f64) -> f64 {
        let s = self.args.tol_scale;
        if s < 0.0 {
            base * s + s
        } else {
            base * s
        }
    }

    fn add(&mut self, name: impl Into<String>, value: f64, base_tol: f64) {
        let bound = self.tol(base_tol);
        self.checks.push(Check::new(name, value, bound));
    }

    fn optimal(&mut self) -> Result<()> {
        let (mut f_err, mut d_err, mut completeness) = (0f64, 0f64, 0f64);
        for d in 2..=4 {
            let proto = Protocol::optimal(d)?;
            completeness = completeness.max(proto.completeness().deviation);
            for gamma in GAMMA_GRID {
                let ch = Channel::new(d, gamma)?;
                f_err = f_err.max((average_fidelity(&proto, &ch)? - ch.f_max()).abs());
                if d == 2 {
                    d_err = d_err.max(qubit_deviation(&proto, &ch)?.d);
                }
            }
        }
        self.add("optimal_fidelity_exact", f_err, 1e-10);
        self.add("optimal_qubit_deviation_zero", d_err, 1e-12);
        self.add("optimal_measurement_complete", completeness, 1e-9);
        Ok(())
    }

    /// F through the entanglement quantity E stays inside the F range, and
    /// agrees with the direct closed form.
    fn fidelity_range_sweep(&mut self) -> Result<()> {
        let d = self.args.channel.d;
        let n = self.args.trials;
        let mut rng = self.rng(1);
        let protocols = (0..n).map(|_| random_protocol(d, &mut rng)).collect::<Result<Vec<_>>>()?;
        for gamma in GAMMA_GRID {
            let ch = Channel::new(d, gamma)?;
            let bounds = fidelity_bounds(&ch, 0.0)?;
            let (mut outside, mut mismatch) = (0f64, 0f64);
            for proto in &protocols {
                let e = entanglement_quantity(proto, &ch)?;
                let f = (d as f64 * e + 1.0) / (d as f64 + 1.0);
                outside = outside.max(bounds.f_min - f).max(f - bounds.f_max);
                mismatch = mismatch.max((f - average_fidelity(proto, &ch)?).abs());
            }
            self.add(format!("fidelity_range[gamma={gamma:.6}]"), outside.max(0.0), 1e-12);
            self.add(format!("entanglement_route[gamma={gamma:.6}]"), mismatch, 1e-12);
        }
        let rows = GAMMA_GRID.len() * n;
        // bookkeeping: γ-grid × protocols evaluated
        self.checks.push(Check::new("fidelity_range_sweep_count", rows as f64, rows as f64));
        Ok(())
    }

    fn qubit_bounds(&mut self) -> Result<()> {
        let mut rng = self.rng(2);
        let (mut tight, mut ceiling, mut cov, mut var) = (0f64, 0f64, 0f64, 0f64);
        for _ in 0..self.args.trials {
            let proto = random_protocol(2, &mut rng)?;
            for gamma in [GAMMA_C, GAMMA_BV, 1.0] {
                let ch = Channel::new(2, gamma)?;
                let rep = qubit_deviation(&proto, &ch)?;
                tight = tight.max(-tight_bound_check(rep.f, rep.d, &ch).margin);
                ceiling = ceiling.max(rep.d - fidelity_bounds(&ch, rep.mean_delta())?.d_max);
                for a in 0..4 {
                    for b in 0..4 {
                        let p = rep.deltas[a] * rep.deltas[b];
                        let c = rep.covariance[(a, b)];
                        cov = cov.max(c - p).max(-0.5 * p - c);
                    }
                }
                var = var.max(rep.d * rep.d - rep.f * (1.0 - rep.f));
            }
        }
        self.add("qubit_tight_bound", tight.max(0.0), 1e-9);
        self.add("qubit_deviation_ceiling", ceiling.max(0.0), 1e-9);
        self.add("qubit_covariance_bounds", cov.max(0.0), 1e-12);
        self.add("qubit_variance_bound", var.max(0.0), 1e-12);
        Ok(())
    }

    fn monte_carlo(&mut self) -> Result<()> {
        let d = self.args.channel.d;
        let gamma = self.args.channel.gamma().unwrap_or(1.0);
        let ch = Channel::new(d, gamma)?;
        let mut rng = self.rng(3);
        let (mut z, mut var) = (0f64, 0f64);
        for k in 0..5 {
            let proto = random_protocol(d, &mut rng)?;
            let cfg = MCConfig::new(self.args.mc_samples, self.args.seed.wrapping_add(k))?;
            let rep = mc_estimate_fd(&proto, &ch, &cfg)?;
            if rep.stderr_f > 0.0 {
                z = z.max((rep.f - average_fidelity(&proto, &ch)?).abs() / rep.stderr_f);
            }
            let slack = 4.0 * rep.stderr_f.max(rep.stderr_d);
            var = var.max(rep.d * rep.d - rep.f * (1.0 - rep.f) - slack);
        }
        self.add("mc_fidelity_oracle_z", z, 4.0);
        self.add("mc_variance_bound", var.max(0.0), 1e-12);

        let proto = random_protocol(2, &mut rng)?;
        let qubit = Channel::new(2, 1.0)?;
        let mut se = Vec::new();
        for n in [1_000, 10_000, 100_000] {
            se.push(mc_estimate_fd(&proto, &qubit, &MCConfig::new(n, self.args.seed)?)?.stderr_f);
        }
        let scaling = se
            .windows(2)
            .map(|w| (w[0] / w[1] / 10f64.sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        self.add("mc_stderr_inverse_sqrt_n", scaling, 0.2);
        Ok(())
    }

    fn schur(&mut self) -> Result<()> {
        let mut rng = self.rng(4);
        let mut z = 0f64;
        for d in [2usize, 3] {
            for _ in 0..5 {
                let x = haar_random_unitary(d, &mut rng)?;
                let mut phi = vec![C64::new(0.0, 0.0); d];
                let n = self.args.mc_samples.max(100);
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..n {
                    fill_haar_amplitudes(&mut phi, &mut rng);
                    let xi = PureState::new(phi.clone())?.expectation(&x).norm_sqr();
                    s += xi;
                    s2 += xi * xi;
                }
                let nf = n as f64;
                let mean = s / nf;
                let se = ((s2 / nf - mean * mean).max(0.0) / nf).sqrt();
                if se > 0.0 {
                    z = z.max((mean - haar_mean_xi(&x)?).abs() / se);
                }
            }
        }
        self.add("schur_integral_z", z, 4.0);
        Ok(())
    }

    fn noise_and_baseline(&mut self) -> Result<()> {
        let mut rng = self.rng(5);
        let proto = random_protocol(2, &mut rng)?;
        let same = perturb_protocol(&proto, &NoiseModel::new(0.0)?, &mut rng)?;
        let changed = proto
            .alice_params()
            .iter()
            .chain(proto.bob_params())
            .zip(same.alice_params().iter().chain(same.bob_params()))
            .flat_map(|(a, b)| a.values().iter().zip(b.values()))
            .filter(|(x, y)| x.to_bits() != y.to_bits())
            .count();
        self.add("zero_noise_identity", changed as f64, 0.0);

        let ch = Channel::new(2, 1.0)?;
        let n = self.args.trials.max(2);
        let fs = (0..n)
            .map(|_| average_fidelity(&haar_random_protocol(2, &mut rng)?, &ch))
            .collect::<Result<Vec<_>>>()?;
        let mean = fs.iter().sum::<f64>() / n as f64;
        let sd = (fs.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        self.add("haar_baseline_half_z", (mean - 0.5).abs() / (sd / (n as f64).sqrt()), 2.0);

        // F falls and D rises while the noise stays within one period of the controls
        let trials = 300;
        let grid = [0.0, 0.08, 0.16, 0.24, 0.32, 0.4];
        let rows = deterioration_experiment(&ch, &grid, trials, &MCConfig::new(1000, self.args.seed)?)?;
        let se = |s: f64| s / (trials as f64).sqrt();
        let mut worst = 0f64;
        for w in rows.windows(2) {
            let tol_f = 2.0 * se(w[0].std_f).hypot(se(w[1].std_f));
            let tol_d = 2.0 * se(w[0].std_d).hypot(se(w[1].std_d));
            worst = worst.max(w[1].mean_f - w[0].mean_f - tol_f);
            worst = worst.max(w[0].mean_d - w[1].mean_d - tol_d);
        }
        self.add("deterioration_monotone", worst.max(0.0), 0.0);
        Ok(())
    }

    fn evolution(&mut self) -> Result<()> {
        let ch = Channel::new(2, 1.0)?;
        let cfg = DEConfig {
            n_pop: 20,
            iterations: 100,
            seed: self.args.seed,
            ..DEConfig::default()
        };
        let mut rng = self.rng(6);
        let mut pop = init_population(&ch, &cfg, &mut rng)?;
        let trace = evolve(&mut pop, &cfg, &mut rng)?;
        let drop = trace
            .records
            .windows(2)
            .map(|w| w[0].best_f - w[1].best_f)
            .fold(0.0, f64::max);
        self.add("de_best_non_decreasing", drop, 0.0);
        let bound = trace
            .records
            .iter()
            .map(|r| -tight_bound_check(r.best_f, r.best_d.unwrap_or(0.0), &ch).margin)
            .fold(0.0, f64::max);
        self.add("de_deviation_follows_fidelity", bound, 1e-9);
        Ok(())
    }
}

pub fn checks(args: &VerifyArgs) -> Result<Vec<Check>> {
    let mut suite = Suite {
        args,
        checks: Vec::new(),
    };
    suite.optimal()?;
    suite.fidelity_range_sweep()?;
    suite.qubit_bounds()?;
    suite.monte_carlo()?;
    suite.schur()?;
    suite.noise_and_baseline()?;
    suite.evolution()?;
    Ok(suite.checks)
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    if args.trials < 2 {
        return Err(CliError::Config("verify needs at least 2 trials".into()));
    }
    if !args.tol_scale.is_finite() {
        return Err(CliError::Config("--tol-scale must be finite".into()));
    }
    let gamma = args.channel.gamma().unwrap_or(1.0);
    Channel::new(args.channel.d, gamma)?;
    let checks = checks(args)?;
    let mut table = Table::new("check_name,status,value,bound", "verify");
    table.extend(checks.iter().map(Check::record));
    table
        .config("d", args.channel.d)
        .config("gamma", gamma)
        .config("trials", args.trials)
        .config("mc_samples", args.mc_samples)
        .config("tol_scale", args.tol_scale)
        .config("seed", args.seed);
    emit(&table.render(), args.output.out.as_deref())?;
    match checks.iter().filter(|c| !c.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}
