// SPDX-License-Identifier: Apache-2.0

//! Differential-evolution recovery of teleportation controls.
//!
//! A candidate is the full control set: d² parameter vectors for Alice's U_α
//! followed by d² for Bob's V_α. Fitness is the closed-form average fidelity
//! F and nothing else. Each generation builds every trial from the current
//! population (DE/rand/1 with binomial crossover), evaluates the trials, then
//! replaces each parent whose trial is at least as fit.

use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;

use crate::bloch::qubit_deviation;
use crate::error::{Error, Result};
use crate::montecarlo::{perturb_vectors, NoiseModel};
use crate::qlinalg::{
    rng::{stream, Purpose, Rng},
    su_generators, GeneratorSet, ParamVector,
};
use crate::teleport::{average_fidelity, Channel, Protocol, GAMMA_BV, GAMMA_C};

/// Differential-evolution hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DEConfig {
    pub n_pop: usize,
    /// Differential weight W.
    pub weight: f64,
    /// Crossover rate C_r.
    pub crossover: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for DEConfig {
    fn default() -> Self {
        Self {
            n_pop: 100,
            weight: 0.5,
            crossover: 0.1,
            iterations: 1000,
            seed: 0,
        }
    }
}

impl DEConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pop < 4 {
            return Err(Error::InvalidConfig(format!(
                "population needs at least 4 members, got {}",
                self.n_pop
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::InvalidConfig(format!(
                "crossover rate must lie in [0, 1], got {}",
                self.crossover
            )));
        }
        if !self.weight.is_finite() {
            return Err(Error::InvalidConfig("differential weight must be finite".into()));
        }
        Ok(())
    }
}

/// Maps genomes to protocols and scores them.
#[derive(Clone, Debug)]
pub struct Objective {
    gens: Arc<GeneratorSet>,
    ch: Channel,
}

impl Objective {
    pub fn new(ch: Channel) -> Result<Self> {
        Ok(Self {
            gens: Arc::new(su_generators(ch.dim_d())?),
            ch,
        })
    }

    pub fn channel(&self) -> &Channel {
        &self.ch
    }

    pub fn dim_d(&self) -> usize {
        self.ch.dim_d()
    }

    /// Number of parameter vectors in a genome, 2d².
    pub fn genome_len(&self) -> usize {
        2 * self.dim_d() * self.dim_d()
    }

    pub fn protocol(&self, genome: &[ParamVector]) -> Result<Protocol> {
        if genome.len() != self.genome_len() {
            return Err(Error::DimensionMismatch {
                expected: self.genome_len(),
                found: genome.len(),
            });
        }
        let (alice, bob) = genome.split_at(genome.len() / 2);
        Protocol::from_params(Arc::clone(&self.gens), alice.to_vec(), bob.to_vec())
    }

    pub fn fitness(&self, genome: &[ParamVector]) -> Result<f64> {
        average_fidelity(&self.protocol(genome)?, &self.ch)
    }

    /// Exact D for qubits; `None` for d > 2, where no closed form exists.
    pub fn deviation(&self, genome: &[ParamVector]) -> Result<Option<f64>> {
        if self.dim_d() != 2 {
            return Ok(None);
        }
        Ok(Some(qubit_deviation(&self.protocol(genome)?, &self.ch)?.d))
    }
}

/// A genome together with its fitness.
///
/// Candidates are immutable; any new genome goes through
/// [`Candidate::evaluate`], so the stored fitness always matches.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    genome: Vec<ParamVector>,
    fitness: f64,
}

impl Candidate {
    pub fn evaluate(genome: Vec<ParamVector>, objective: &Objective) -> Result<Self> {
        let fitness = objective.fitness(&genome)?;
        Ok(Self { genome, fitness })
    }

    pub fn from_protocol(proto: &Protocol, objective: &Objective) -> Result<Self> {
        let genome = proto
            .alice_params()
            .iter()
            .chain(proto.bob_params())
            .cloned()
            .collect();
        Self::evaluate(genome, objective)
    }

    pub fn genome(&self) -> &[ParamVector] {
        &self.genome
    }

    pub fn fitness(&self) -> f64 {
        self.fitness
    }
}

/// Current members and the fittest candidate seen so far.
#[derive(Clone, Debug)]
pub struct Population {
    objective: Objective,
    members: Vec<Candidate>,
    best: Candidate,
    best_d: Option<f64>,
}

impl Population {
    pub fn new(objective: Objective, members: Vec<Candidate>) -> Result<Self> {
        if members.len() < 4 {
            return Err(Error::InvalidConfig(format!(
                "population needs at least 4 members, got {}",
                members.len()
            )));
        }
        let best = fittest(&members).clone();
        let best_d = objective.deviation(best.genome())?;
        Ok(Self {
            objective,
            members,
            best,
            best_d,
        })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> &Candidate {
        &self.best
    }

    /// D of the best candidate, exact for qubits.
    pub fn best_deviation(&self) -> Option<f64> {
        self.best_d
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(Candidate::fitness).sum::<f64>() / self.members.len() as f64
    }

    fn refresh_best(&mut self) -> Result<()> {
        let top = fittest(&self.members);
        if top.fitness() > self.best.fitness() {
            self.best = top.clone();
            self.best_d = self.objective.deviation(self.best.genome())?;
        }
        Ok(())
    }
}

// first of the fittest, so ties resolve by index
fn fittest(members: &[Candidate]) -> &Candidate {
    members
        .iter()
        .reduce(|a, b| if b.fitness() > a.fitness() { b } else { a })
        .expect("population is never empty")
}

fn random_genome(objective: &Objective, rng: &mut Rng) -> Result<Vec<ParamVector>> {
    let d = objective.dim_d();
    (0..objective.genome_len())
        .map(|_| {
            let values = (0..d * d - 1)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            ParamVector::new(d, values)
        })
        .collect()
}

/// N_pop candidates with every component uniform on [−π, π).
pub fn init_population(ch: &Channel, cfg: &DEConfig, rng: &mut Rng) -> Result<Population> {
    cfg.validate()?;
    let objective = Objective::new(*ch)?;
    let genomes = (0..cfg.n_pop)
        .map(|_| random_genome(&objective, rng))
        .collect::<Result<Vec<_>>>()?;
    let members = evaluate_all(genomes, &objective)?;
    Population::new(objective, members)
}

fn evaluate_all(genomes: Vec<Vec<ParamVector>>, objective: &Objective) -> Result<Vec<Candidate>> {
    genomes
        .into_par_iter()
        .map(|g| Candidate::evaluate(g, objective))
        .collect()
}

/// ν = p_a + W (p_b − p_c), component-wise, wrapped to [−π, π).
pub fn mutant_vector(pa: &ParamVector, pb: &ParamVector, pc: &ParamVector, weight: f64) -> Result<ParamVector> {
    let values = pa
        .values()
        .iter()
        .zip(pb.values())
        .zip(pc.values())
        .map(|((a, b), c)| a + weight * (b - c))
        .collect();
    ParamVector::new(pa.dim_d(), values)
}

/// Three mutually distinct indices in 0..n, all different from `target`.
fn partners(n: usize, target: usize, rng: &mut Rng) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        picked[k] = loop {
            let c = rng.random_range(0..n);
            if c != target && !picked[..k].contains(&c) {
                break c;
            }
        };
    }
    picked
}

/// Mutant genome for member `target`; one partner triple serves all 2d²
/// sub-vectors.
pub fn mutate(pop: &Population, target: usize, cfg: &DEConfig, rng: &mut Rng) -> Result<Vec<ParamVector>> {
    let n = pop.len();
    if n < 4 || target >= n {
        return Err(Error::InvalidConfig(format!(
            "mutation needs target < n_pop and n_pop ≥ 4, got target {target} of {n}"
        )));
    }
    let [a, b, c] = partners(n, target, rng);
    let m = pop.members();
    m[a].genome()
        .iter()
        .zip(m[b].genome())
        .zip(m[c].genome())
        .map(|((pa, pb), pc)| mutant_vector(pa, pb, pc, cfg.weight))
        .collect()
}

/// Keeps the parent component when R_j > C_r, takes the mutant's otherwise.
pub fn crossover(
    parent: &[ParamVector],
    mutant: &[ParamVector],
    cfg: &DEConfig,
    rng: &mut Rng,
) -> Result<Vec<ParamVector>> {
    if parent.len() != mutant.len() {
        return Err(Error::DimensionMismatch {
            expected: parent.len(),
            found: mutant.len(),
        });
    }
    parent
        .iter()
        .zip(mutant)
        .map(|(p, v)| {
            if p.len() != v.len() {
                return Err(Error::DimensionMismatch {
                    expected: p.len(),
                    found: v.len(),
                });
            }
            Ok(p.map(|j, pj| {
                let r: f64 = rng.random();
                if r > cfg.crossover {
                    pj
                } else {
                    v.values()[j]
                }
            }))
        })
        .collect()
}

/// The trial wins ties.
pub fn select(parent: Candidate, trial: Candidate) -> Candidate {
    if trial.fitness() >= parent.fitness() {
        trial
    } else {
        parent
    }
}

/// One generation: all trials are built from the current members, then
/// evaluated, then selected.
pub fn step(pop: &mut Population, cfg: &DEConfig, rng: &mut Rng) -> Result<()> {
    let trials = (0..pop.len())
        .map(|i| {
            let mutant = mutate(pop, i, cfg, rng)?;
            crossover(pop.members()[i].genome(), &mutant, cfg, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let trials = evaluate_all(trials, pop.objective())?;
    let parents = std::mem::take(&mut pop.members);
    pop.members = parents.into_iter().zip(trials).map(|(p, t)| select(p, t)).collect();
    pop.refresh_best()
}

/// Population state after one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationRecord {
    pub iteration: usize,
    pub best_f: f64,
    pub best_d: Option<f64>,
    pub mean_f: f64,
    pub shock: bool,
    /// Best and mean F just before a shock, when one was applied.
    pub pre_shock: Option<(f64, f64)>,
}

impl GenerationRecord {
    fn of(pop: &Population, iteration: usize) -> Self {
        Self {
            iteration,
            best_f: pop.best().fitness(),
            best_d: pop.best_deviation(),
            mean_f: pop.mean_fitness(),
            shock: false,
            pre_shock: None,
        }
    }
}

/// Generation-by-generation history of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionTrace {
    pub records: Vec<GenerationRecord>,
    /// First iteration whose best F is within [`STALL_TOL`] of the best F
    /// [`STALL_WINDOW`] iterations earlier.
    pub converged_at: Option<usize>,
}

pub const STALL_TOL: f64 = 1e-6;
pub const STALL_WINDOW: usize = 100;

impl EvolutionTrace {
    fn new(records: Vec<GenerationRecord>) -> Self {
        let converged_at = records
            .windows(STALL_WINDOW + 1)
            .find(|w| w[STALL_WINDOW].best_f - w[0].best_f <= STALL_TOL)
            .map(|w| w[STALL_WINDOW].iteration);
        Self {
            records,
            converged_at,
        }
    }

    pub fn last(&self) -> &GenerationRecord {
        self.records.last().expect("a trace holds the initial state")
    }
}

/// Runs `cfg.iterations` generations. Record 0 is the initial population.
pub fn evolve(pop: &mut Population, cfg: &DEConfig, rng: &mut Rng) -> Result<EvolutionTrace> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.iterations + 1);
    records.push(GenerationRecord::of(pop, 0));
    for t in 1..=cfg.iterations {
        step(pop, cfg, rng)?;
        records.push(GenerationRecord::of(pop, t));
    }
    Ok(EvolutionTrace::new(records))
}

/// The three channel strengths of the recovery study: separability edge,
/// CHSH-violation edge, and the noiseless channel.
pub fn recovery_gammas() -> [f64; 3] {
    [GAMMA_C, GAMMA_BV, 1.0]
}

/// Independent runs at one channel, with per-iteration means.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoverySeries {
    pub gamma: f64,
    pub runs: Vec<EvolutionTrace>,
}

impl RecoverySeries {
    /// Best F averaged over runs at each iteration.
    pub fn mean_best_f(&self) -> Vec<f64> {
        self.mean_of(|r| r.best_f)
    }

    /// Best-candidate D averaged over runs; NaN for d > 2.
    pub fn mean_best_d(&self) -> Vec<f64> {
        self.mean_of(|r| r.best_d.unwrap_or(f64::NAN))
    }

    fn mean_of(&self, field: impl Fn(&GenerationRecord) -> f64) -> Vec<f64> {
        let len = self.runs.iter().map(|r| r.records.len()).min().unwrap_or(0);
        let n = self.runs.len() as f64;
        (0..len)
            .map(|t| self.runs.iter().map(|r| field(&r.records[t])).sum::<f64>() / n)
            .collect()
    }
}

fn run_index(group: usize, run: usize) -> u64 {
    ((group as u64) << 24) | run as u64
}

/// `repeats` independent evolutions from random populations for every channel.
pub fn recover_experiment(channels: &[Channel], cfg: &DEConfig, repeats: usize) -> Result<Vec<RecoverySeries>> {
    cfg.validate()?;
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be positive".into()));
    }
    channels
        .iter()
        .enumerate()
        .map(|(g, ch)| {
            let runs = (0..repeats)
                .into_par_iter()
                .map(|r| {
                    let mut rng = stream(cfg.seed, Purpose::Evolution, run_index(g, r));
                    let mut pop = init_population(ch, cfg, &mut rng)?;
                    evolve(&mut pop, cfg, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RecoverySeries {
                gamma: ch.gamma(),
                runs,
            })
        })
        .collect()
}

/// Perturbs every member and the best-so-far candidate.
fn shock(pop: &mut Population, noise: &NoiseModel, rng: &mut Rng) -> Result<()> {
    let objective = pop.objective.clone();
    let genomes: Vec<_> = pop.members.iter().map(|c| perturb_vectors(c.genome(), noise, rng)).collect();
    let best_genome = perturb_vectors(pop.best.genome(), noise, rng);
    pop.members = evaluate_all(genomes, &objective)?;
    pop.best = Candidate::evaluate(best_genome, &objective)?;
    pop.best_d = objective.deviation(pop.best.genome())?;
    pop.refresh_best()
}

/// Evolution interrupted by control noise every `period` generations.
///
/// Runs `cycles · period` generations. After generation t with t a multiple
/// of `period` (except the last), every control is perturbed; that record
/// carries the post-shock state and the pre-shock best and mean F. Shocks
/// draw from their own stream, so η = 0 reproduces [`evolve`] exactly.
pub fn realtime_stabilization(
    ch: &Channel,
    cfg: &DEConfig,
    period: usize,
    noise: &NoiseModel,
    cycles: usize,
    repeats: usize,
) -> Result<Vec<EvolutionTrace>> {
    cfg.validate()?;
    if period == 0 || cycles == 0 || repeats == 0 {
        return Err(Error::InvalidConfig(
            "period, cycles and repeats must be positive".into(),
        ));
    }
    let total = period * cycles;
    let run_cfg = DEConfig {
        iterations: total,
        ..*cfg
    };
    (0..repeats)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(cfg.seed, Purpose::Evolution, run_index(0, r));
            let mut shocks = stream(cfg.seed, Purpose::Shock, run_index(0, r));
            let mut pop = init_population(ch, &run_cfg, &mut rng)?;
            let mut records = Vec::with_capacity(total + 1);
            records.push(GenerationRecord::of(&pop, 0));
            for t in 1..=total {
                step(&mut pop, &run_cfg, &mut rng)?;
                if t % period == 0 && t < total {
                    let pre = (pop.best().fitness(), pop.mean_fitness());
                    shock(&mut pop, noise, &mut shocks)?;
                    let mut rec = GenerationRecord::of(&pop, t);
                    rec.shock = true;
                    rec.pre_shock = Some(pre);
                    records.push(rec);
                } else {
                    records.push(GenerationRecord::of(&pop, t));
                }
            }
            Ok(EvolutionTrace::new(records))
        })
        .collect()
}

pub const TRACE_CSV_HEADER: &str = "run_id,iteration,best_F,best_D,shock_flag,gamma,seed";

/// One CSV line per record: `run_id,iteration,best_F,best_D,shock_flag,gamma,seed`.
/// best_D is left empty when unavailable.
pub fn trace_csv_records(run_id: usize, trace: &EvolutionTrace, gamma: f64, seed: u64) -> Vec<String> {
    trace
        .records
        .iter()
        .map(|r| {
            let d = r.best_d.map(|d| d.to_string()).unwrap_or_default();
            format!(
                "{run_id},{},{},{d},{},{gamma},{seed}",
                r.iteration,
                r.best_f,
                u8::from(r.shock)
            )
        })
        .collect()
}
