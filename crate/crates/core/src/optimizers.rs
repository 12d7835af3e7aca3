//! Candidate generation, acceptance and the iteration loops of the
//! standard Bat Algorithm (BA) and the Modified Bat Algorithm (MBA).
//!
//! One iteration visits the bats in index order. Each bat proposes a
//! candidate from the incumbent snapshot taken at the start of the
//! iteration; with probability `1 - r_i` the proposal is replaced by a
//! random walk around that snapshot's best position. The candidate is
//! evaluated, put through the loudness-gated acceptance test, and after
//! all bats have moved the incumbent is refreshed from the population.
//!
//! Random draws per bat, in order: frequency beta, pulse gate, walk
//! offsets (only when the walk fires), objective noise (F7 only),
//! loudness gate.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::benchmarks::{self, ObjectiveSpec};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::swarm::{
    init_swarm, update_incumbent, AcceptanceMode, AlgoParams, BatState, Bounds, IncumbentBest,
    SwarmState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "BA")]
    Ba,
    #[serde(rename = "MBA")]
    Mba,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ba => "BA",
            Algorithm::Mba => "MBA",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BA" => Ok(Algorithm::Ba),
            "MBA" => Ok(Algorithm::Mba),
            other => Err(Error::InvalidParameter {
                name: "algorithm",
                reason: format!("unknown algorithm `{other}` (BA | MBA)"),
            }),
        }
    }
}

/// A proposed move: clamped position plus the velocity and frequency that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub frequency: f64,
}

fn check_same_dim(bat: &BatState, incumbent: &IncumbentBest) -> Result<()> {
    let d = bat.position.len();
    for len in [bat.velocity.len(), incumbent.x_star.len(), incumbent.v_star.len()] {
        if len != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: len,
            });
        }
    }
    Ok(())
}

/// Standard BA move with a given frequency, before clamping:
/// `v' = v + (x - x*) f`, `x' = x + v'`.
pub fn ba_step(bat: &BatState, incumbent: &IncumbentBest, frequency: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_same_dim(bat, incumbent)?;
    let velocity: Vec<f64> = bat
        .velocity
        .iter()
        .zip(&bat.position)
        .zip(&incumbent.x_star)
        .map(|((&v, &x), &xs)| v + (x - xs) * frequency)
        .collect();
    let position = bat.position.iter().zip(&velocity).map(|(&x, &v)| x + v).collect();
    Ok((velocity, position))
}

/// MBA move with a given frequency, before clamping:
/// `v' = v f - v* f* + (x - x*) f*`, `x' = x* + v' f*`.
pub fn mba_step(bat: &BatState, incumbent: &IncumbentBest, frequency: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_same_dim(bat, incumbent)?;
    let f_star = incumbent.f_star;
    let velocity: Vec<f64> = (0..bat.position.len())
        .map(|j| {
            bat.velocity[j] * frequency - incumbent.v_star[j] * f_star
                + (bat.position[j] - incumbent.x_star[j]) * f_star
        })
        .collect();
    let position = incumbent
        .x_star
        .iter()
        .zip(&velocity)
        .map(|(&xs, &v)| xs + v * f_star)
        .collect();
    Ok((velocity, position))
}

fn finish_candidate(
    (velocity, mut position): (Vec<f64>, Vec<f64>),
    frequency: f64,
    bounds: &Bounds,
) -> Result<Candidate> {
    if position.len() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            got: position.len(),
        });
    }
    bounds.clamp_in_place(&mut position);
    Ok(Candidate {
        position,
        velocity,
        frequency,
    })
}

pub fn ba_candidate_with_frequency(
    bat: &BatState,
    incumbent: &IncumbentBest,
    frequency: f64,
    bounds: &Bounds,
) -> Result<Candidate> {
    finish_candidate(ba_step(bat, incumbent, frequency)?, frequency, bounds)
}

pub fn mba_candidate_with_frequency(
    bat: &BatState,
    incumbent: &IncumbentBest,
    frequency: f64,
    bounds: &Bounds,
) -> Result<Candidate> {
    finish_candidate(mba_step(bat, incumbent, frequency)?, frequency, bounds)
}

/// BA candidate with a freshly drawn frequency. The bat is not modified.
pub fn ba_candidate(
    bat: &BatState,
    incumbent: &IncumbentBest,
    params: &AlgoParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Candidate> {
    let frequency = params.draw_frequency(rng);
    ba_candidate_with_frequency(bat, incumbent, frequency, bounds)
}

/// MBA candidate with a freshly drawn frequency. The bat is not modified.
pub fn mba_candidate(
    bat: &BatState,
    incumbent: &IncumbentBest,
    params: &AlgoParams,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> Result<Candidate> {
    let frequency = params.draw_frequency(rng);
    mba_candidate_with_frequency(bat, incumbent, frequency, bounds)
}

/// `clamp(x* + eps * mean_loudness)` for explicit offsets `eps`.
pub fn local_walk_with(x_star: &[f64], mean_loudness: f64, eps: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    if eps.len() != x_star.len() {
        return Err(Error::DimensionMismatch {
            expected: x_star.len(),
            got: eps.len(),
        });
    }
    let walked: Vec<f64> = x_star
        .iter()
        .zip(eps)
        .map(|(&x, &e)| x + e * mean_loudness)
        .collect();
    bounds.clamp(&walked)
}

/// Random walk around `x_star`, each offset uniform in `[-1, 1)` and scaled
/// by the population's mean loudness.
pub fn local_walk(x_star: &[f64], mean_loudness: f64, bounds: &Bounds, rng: &mut RngStream) -> Result<Vec<f64>> {
    let eps: Vec<f64> = (0..x_star.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
    local_walk_with(x_star, mean_loudness, &eps, bounds)
}

/// Pulse rate after an acceptance at iteration `t`.
pub fn pulse_rate_at(base_pulse_rate: f64, gamma: f64, t: usize) -> f64 {
    base_pulse_rate * (1.0 - (-gamma * t as f64).exp())
}

/// Acceptance with an explicit loudness draw `u` in `[0, 1)`.
///
/// Accepts iff `u < A_i` and the candidate beats the incumbent
/// (paper-literal) or the bat itself (self-improvement). On acceptance the
/// bat takes the candidate, its loudness decays by `alpha`, its pulse rate
/// is reset from the base rate at iteration `t`, and for MBA an improving
/// candidate also replaces the incumbent.
#[allow(clippy::too_many_arguments)]
pub fn acceptance_with_draw(
    bat: &mut BatState,
    candidate: Candidate,
    candidate_fitness: f64,
    incumbent: &mut IncumbentBest,
    algorithm: Algorithm,
    params: &AlgoParams,
    u: f64,
    t: usize,
) -> bool {
    let threshold = match params.acceptance_mode {
        AcceptanceMode::PaperLiteral => incumbent.fitness_star,
        AcceptanceMode::SelfImprovement => bat.fitness,
    };
    if !(u < bat.loudness && candidate_fitness < threshold) {
        return false;
    }
    bat.position = candidate.position;
    bat.velocity = candidate.velocity;
    bat.frequency = candidate.frequency;
    bat.fitness = candidate_fitness;
    bat.loudness *= params.alpha;
    bat.pulse_rate = pulse_rate_at(bat.base_pulse_rate, params.gamma, t);
    bat.acceptance_count += 1;
    if algorithm == Algorithm::Mba && candidate_fitness < incumbent.fitness_star {
        *incumbent = IncumbentBest::from_bat(bat);
    }
    true
}

#[allow(clippy::too_many_arguments)]
pub fn acceptance_step(
    bat: &mut BatState,
    candidate: Candidate,
    candidate_fitness: f64,
    incumbent: &mut IncumbentBest,
    algorithm: Algorithm,
    params: &AlgoParams,
    rng: &mut RngStream,
    t: usize,
) -> bool {
    let u = rng.unit();
    acceptance_with_draw(bat, candidate, candidate_fitness, incumbent, algorithm, params, u, t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub objective: String,
    /// Only for scalable objectives; `None` takes the registry default.
    pub dimension: Option<usize>,
    pub population: usize,
    pub iterations: usize,
    pub seed: u64,
    pub params: AlgoParams,
    pub record_diversity: bool,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, objective: impl Into<String>) -> Self {
        Self {
            algorithm,
            objective: objective.into(),
            dimension: None,
            population: 30,
            iterations: 500,
            seed: 0,
            params: AlgoParams::default(),
            record_diversity: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidParameter {
                name: "iterations",
                reason: "must be at least 1".into(),
            });
        }
        if self.population < 2 {
            return Err(Error::PopulationTooSmall(self.population));
        }
        self.params.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub objective: String,
    pub seed: u64,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Incumbent fitness after each iteration.
    pub history: Vec<f64>,
    pub diversity_history: Option<Vec<f64>>,
    pub wall_time_seconds: f64,
}

/// Column order of [`RunResult::write_csv`].
pub const HISTORY_CSV_HEADER: &str = "t,best_fitness,div";

impl RunResult {
    /// One row per iteration: `t,best_fitness,div` with `t` starting at 1
    /// and `div` empty when diversity was not recorded. Wall time is not
    /// written, so identical runs give identical bytes.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{HISTORY_CSV_HEADER}")?;
        for (i, fit) in self.history.iter().enumerate() {
            match &self.diversity_history {
                Some(div) => writeln!(out, "{},{:e},{:e}", i + 1, fit, div[i])?,
                None => writeln!(out, "{},{:e},", i + 1, fit)?,
            }
        }
        Ok(())
    }

    /// True when both runs produced bit-identical trajectories, ignoring
    /// wall time.
    pub fn same_trajectory(&self, other: &RunResult) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        self.algorithm == other.algorithm
            && self.objective == other.objective
            && self.seed == other.seed
            && bits(&self.best_position) == bits(&other.best_position)
            && self.best_fitness.to_bits() == other.best_fitness.to_bits()
            && bits(&self.history) == bits(&other.history)
            && self.diversity_history.as_deref().map(bits) == other.diversity_history.as_deref().map(bits)
    }
}

/// Stepwise driver for one seeded run.
pub struct Optimizer {
    algorithm: Algorithm,
    params: AlgoParams,
    objective: ObjectiveSpec,
    rng: RngStream,
    swarm: SwarmState,
    iterations: usize,
    seed: u64,
    history: Vec<f64>,
    diversity: Option<Vec<f64>>,
    started: Instant,
}

impl Optimizer {
    pub fn new(config: &RunConfig, objective: ObjectiveSpec) -> Result<Self> {
        config.validate()?;
        let started = Instant::now();
        let mut rng = RngStream::from_seed(config.seed);
        let swarm = init_swarm(&objective, config.population, &config.params, &mut rng)?;
        Ok(Self {
            algorithm: config.algorithm,
            params: config.params.clone(),
            objective,
            rng,
            swarm,
            iterations: config.iterations,
            seed: config.seed,
            history: Vec::with_capacity(config.iterations),
            diversity: config
                .record_diversity
                .then(|| Vec::with_capacity(config.iterations)),
            started,
        })
    }

    pub fn swarm(&self) -> &SwarmState {
        &self.swarm
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn is_done(&self) -> bool {
        self.swarm.iteration >= self.iterations
    }

    /// Runs one full iteration over all bats.
    pub fn step(&mut self) -> Result<()> {
        let t = self.swarm.iteration + 1;
        let snapshot = self.swarm.best.clone();
        let mean_loudness = self.swarm.mean_loudness();
        let bounds = self.objective.bounds().clone();

        for i in 0..self.swarm.bats.len() {
            let bat = &self.swarm.bats[i];
            let mut candidate = match self.algorithm {
                Algorithm::Ba => ba_candidate(bat, &snapshot, &self.params, &bounds, &mut self.rng)?,
                Algorithm::Mba => mba_candidate(bat, &snapshot, &self.params, &bounds, &mut self.rng)?,
            };
            if self.rng.unit() > bat.pulse_rate {
                candidate.position = local_walk(&snapshot.x_star, mean_loudness, &bounds, &mut self.rng)?;
            }
            let fitness = self.objective.evaluate(&candidate.position, &mut self.rng)?;
            if !fitness.is_finite() {
                return Err(Error::NonFiniteFitness {
                    objective: self.objective.name().to_string(),
                    iteration: t,
                    bat: i,
                    value: fitness,
                });
            }
            acceptance_step(
                &mut self.swarm.bats[i],
                candidate,
                fitness,
                &mut self.swarm.best,
                self.algorithm,
                &self.params,
                &mut self.rng,
                t,
            );
        }

        update_incumbent(&mut self.swarm);
        self.swarm.iteration = t;
        self.history.push(self.swarm.best.fitness_star);
        if let Some(div) = self.diversity.as_mut() {
            div.push(analysis::diversity(&self.swarm.positions())?);
        }
        Ok(())
    }

    pub fn finish(self) -> RunResult {
        RunResult {
            algorithm: self.algorithm,
            objective: self.objective.name().to_string(),
            seed: self.seed,
            best_position: self.swarm.best.x_star,
            best_fitness: self.swarm.best.fitness_star,
            history: self.history,
            diversity_history: self.diversity,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        }
    }

    pub fn run_to_end(mut self) -> Result<RunResult> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(self.finish())
    }
}

/// Runs `config` against an explicit objective.
pub fn run_objective(config: &RunConfig, objective: ObjectiveSpec) -> Result<RunResult> {
    Optimizer::new(config, objective)?.run_to_end()
}

/// Runs `config` against the named objective from the standard suite.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    let objective = benchmarks::lookup(&config.objective, config.dimension)?;
    run_objective(config, objective)
}
