// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qudit_teleport::teleport::{GAMMA_BV, GAMMA_C};

pub const DESK_TRIALS: usize = 1_000;
pub const FULL_TRIALS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "qtele", version, about = "Noisy qudit teleportation experiments")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant and bound suites and report each check.
    Verify(VerifyArgs),
    /// Average F and D of the optimal protocol under control noise, per η.
    Deteriorate(DeteriorateArgs),
    /// Differential-evolution recovery from random controls.
    Recover(RecoverArgs),
    /// Differential evolution with periodic control shocks.
    Stabilize(StabilizeArgs),
    /// Evaluate a protocol file analytically and by sampling.
    Replay(ReplayArgs),
    /// Write the optimal protocol, optionally perturbed, as a protocol file.
    Protocol(ProtocolArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GammaName {
    /// 1/3, the separability edge
    C,
    /// 1/√2, the CHSH-violation edge
    Bv,
    /// 1, the noiseless channel
    One,
}

impl GammaName {
    pub fn value(self) -> f64 {
        match self {
            GammaName::C => GAMMA_C,
            GammaName::Bv => GAMMA_BV,
            GammaName::One => 1.0,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ChannelArgs {
    /// Qudit dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Entangled fraction γ of the isotropic channel.
    #[arg(long, conflicts_with = "gamma_name")]
    pub gamma: Option<f64>,
    /// Named channel strength.
    #[arg(long, value_enum)]
    pub gamma_name: Option<GammaName>,
}

impl ChannelArgs {
    pub fn gamma(&self) -> Option<f64> {
        self.gamma.or(self.gamma_name.map(GammaName::value))
    }
}

#[derive(Clone, Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct DeArgs {
    #[arg(long, default_value_t = 100)]
    pub npop: usize,
    #[arg(long, default_value_t = 0.5)]
    pub weight: f64,
    #[arg(long, default_value_t = 0.1)]
    pub crossover: f64,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Random protocols per sweep.
    #[arg(long, default_value_t = DESK_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 20_000)]
    pub mc_samples: usize,
    /// Multiplies every tolerance; a negative value makes every tolerance check fail.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tol_scale: f64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct DeteriorateArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Single noise strength.
    #[arg(long, conflicts_with = "eta_grid")]
    pub eta: Option<f64>,
    /// Evenly spaced grid `start:stop:count`, endpoints included.
    #[arg(long)]
    pub eta_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Samples for the sampled D at d > 2.
    #[arg(long, default_value_t = 10_000)]
    pub mc_samples: usize,
    /// Full-scale run with 10⁴ trials.
    #[arg(long)]
    pub paper_scale: bool,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct RecoverArgs {
    /// Without --gamma or --gamma-name, runs γ = 1/3, 1/√2 and 1.
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub de: DeArgs,
    /// Independent runs per γ.
    #[arg(long, default_value_t = 50)]
    pub repeats: usize,
    /// Full-scale run with 10⁴ runs per γ.
    #[arg(long)]
    pub paper_scale: bool,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct StabilizeArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub de: DeArgs,
    /// Generations between shocks: 10 or 50.
    #[arg(long, default_value_t = 50)]
    pub shock_period: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Shock periods to run; overrides --iters.
    #[arg(long, default_value_t = 22)]
    pub cycles: usize,
    #[arg(long, default_value_t = 20)]
    pub repeats: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct ReplayArgs {
    /// Protocol file written by `qtele protocol`.
    pub protocol: PathBuf,
    /// γ of the channel; the dimension comes from the file.
    #[arg(long, conflicts_with = "gamma_name")]
    pub gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub gamma_name: Option<GammaName>,
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Control noise applied to the optimal protocol.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `start:stop:count` into `count` evenly spaced points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("eta grid must look like start:stop:count, got {spec:?}"));
    };
    let a: f64 = a.parse().map_err(|e| format!("bad grid start {a:?}: {e}"))?;
    let b: f64 = b.parse().map_err(|e| format!("bad grid stop {b:?}: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("bad grid count {n:?}: {e}"))?;
    match n {
        0 => Err("eta grid needs at least one point".into()),
        1 => Ok(vec![a]),
        _ => Ok((0..n)
            .map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect()),
    }
}
