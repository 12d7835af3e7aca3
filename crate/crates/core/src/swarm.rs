//! Shared swarm state: bounds, algorithm parameters, bats and the
//! incumbent best record. Fitness is minimized everywhere.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Axis-aligned box `lower[j] < upper[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::InvalidParameter {
                name: "bounds",
                reason: "dimension must be at least 1".into(),
            });
        }
        let bounds = Self { lower, upper };
        bounds.validate()?;
        Ok(bounds)
    }

    /// The same interval `[low, high]` on every one of `dim` axes.
    pub fn uniform(dim: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(vec![low; dim], vec![high; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lower.len(),
                got: self.upper.len(),
            });
        }
        for (index, (&lower, &upper)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lower.is_finite() && upper.is_finite() && lower < upper) {
                return Err(Error::InvalidBounds {
                    index,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.check(x).is_ok()
    }

    /// Errors on a wrong length or the first coordinate outside the box.
    pub fn check(&self, x: &[f64]) -> Result<()> {
        self.check_dim(x)?;
        for (index, ((&value, &lower), &upper)) in
            x.iter().zip(&self.lower).zip(&self.upper).enumerate()
        {
            if !(lower <= value && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn clamp(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = x.to_vec();
        self.clamp_in_place(&mut out);
        Ok(out)
    }

    /// Caller guarantees `x.len() == self.dim()`.
    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        for ((value, &lower), &upper) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *value = upper.min(lower.max(*value));
        }
    }

    /// Uniform point in the box, one draw per axis in index order.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lower, &upper)| rng.uniform(lower, upper))
            .collect()
    }
}

/// Coordinate-wise clamp of `x` into `bounds`.
pub fn clamp_to_bounds(x: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    bounds.clamp(x)
}

/// Frequency `f_min + (f_max - f_min) * beta` for `beta` in `[0, 1]`.
pub fn draw_frequency(beta: f64, f_min: f64, f_max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("{beta} outside [0, 1]"),
        });
    }
    if !(f_min < f_max) {
        return Err(Error::InvalidParameter {
            name: "f_min",
            reason: format!("f_min {f_min} must be < f_max {f_max}"),
        });
    }
    Ok(f_min + (f_max - f_min) * beta)
}

/// Which fitness a candidate must beat to be accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptanceMode {
    /// Candidate must beat the incumbent best.
    #[default]
    PaperLiteral,
    /// Candidate must beat the bat's own current fitness.
    SelfImprovement,
}

impl fmt::Display for AcceptanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AcceptanceMode::PaperLiteral => "paper-literal",
            AcceptanceMode::SelfImprovement => "self-improvement",
        })
    }
}

impl FromStr for AcceptanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(AcceptanceMode::PaperLiteral),
            "self-improvement" => Ok(AcceptanceMode::SelfImprovement),
            other => Err(Error::InvalidParameter {
                name: "acceptance_mode",
                reason: format!("unknown mode `{other}` (paper-literal | self-improvement)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    #[default]
    Clamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub f_min: f64,
    pub f_max: f64,
    /// Loudness decay factor.
    pub alpha: f64,
    /// Pulse-rate growth constant.
    pub gamma: f64,
    pub loudness_init_range: (f64, f64),
    pub pulse_init_range: (f64, f64),
    pub acceptance_mode: AcceptanceMode,
    pub boundary_mode: BoundaryMode,
}

impl Default for AlgoParams {
    fn default() -> Self {
        Self {
            f_min: 0.0,
            f_max: 2.0,
            alpha: 0.9,
            gamma: 0.9,
            loudness_init_range: (1.0, 2.0),
            pulse_init_range: (0.0, 1.0),
            acceptance_mode: AcceptanceMode::PaperLiteral,
            boundary_mode: BoundaryMode::Clamp,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.f_min.is_finite() && self.f_max.is_finite() && self.f_min < self.f_max) {
            return bad("f_min", format!("need f_min < f_max, got {} and {}", self.f_min, self.f_max));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", format!("{} outside (0, 1]", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma", format!("{} must be > 0", self.gamma));
        }
        let (lo, hi) = self.loudness_init_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad("loudness_init_range", format!("need 0 < low <= high, got ({lo}, {hi})"));
        }
        let (lo, hi) = self.pulse_init_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return bad("pulse_init_range", format!("need 0 <= low <= high <= 1, got ({lo}, {hi})"));
        }
        Ok(())
    }

    pub(crate) fn draw_frequency(&self, rng: &mut RngStream) -> f64 {
        let beta = rng.unit();
        self.f_min + (self.f_max - self.f_min) * beta
    }
}

/// One search agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub frequency: f64,
    pub loudness: f64,
    pub initial_loudness: f64,
    pub pulse_rate: f64,
    pub base_pulse_rate: f64,
    pub acceptance_count: u64,
    pub fitness: f64,
}

/// Best solution seen so far, with the frequency and velocity of the bat
/// that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncumbentBest {
    pub x_star: Vec<f64>,
    pub fitness_star: f64,
    pub f_star: f64,
    pub v_star: Vec<f64>,
}

impl IncumbentBest {
    pub fn from_bat(bat: &BatState) -> Self {
        Self {
            x_star: bat.position.clone(),
            fitness_star: bat.fitness,
            f_star: bat.frequency,
            v_star: bat.velocity.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    pub bats: Vec<BatState>,
    pub best: IncumbentBest,
    pub iteration: usize,
}

impl SwarmState {
    /// Index of the lowest-fitness bat; the lowest index wins ties.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, bat) in self.bats.iter().enumerate().skip(1) {
            if bat.fitness < self.bats[best].fitness {
                best = i;
            }
        }
        best
    }

    pub fn mean_loudness(&self) -> f64 {
        self.bats.iter().map(|b| b.loudness).sum::<f64>() / self.bats.len() as f64
    }

    pub fn positions(&self) -> Vec<&[f64]> {
        self.bats.iter().map(|b| b.position.as_slice()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("swarm state serializes")
    }
}

/// Creates `n` bats uniformly inside the objective's bounds.
///
/// Per bat, draws are consumed in this order: position axes, frequency
/// beta, loudness, base pulse rate, then whatever the objective draws.
pub fn init_swarm(
    objective: &ObjectiveSpec,
    n: usize,
    params: &AlgoParams,
    rng: &mut RngStream,
) -> Result<SwarmState> {
    if n < 2 {
        return Err(Error::PopulationTooSmall(n));
    }
    params.validate()?;
    let bounds = objective.bounds();
    bounds.validate()?;
    let dim = objective.dimension();
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dimension",
            reason: "objective dimension must be at least 1".into(),
        });
    }

    let mut bats = Vec::with_capacity(n);
    for i in 0..n {
        let position = bounds.sample(rng);
        let frequency = params.draw_frequency(rng);
        let (a_lo, a_hi) = params.loudness_init_range;
        let loudness = rng.uniform(a_lo, a_hi);
        let (r_lo, r_hi) = params.pulse_init_range;
        let base_pulse_rate = rng.uniform(r_lo, r_hi);
        let fitness = objective.evaluate(&position, rng)?;
        if !fitness.is_finite() {
            return Err(Error::NonFiniteFitness {
                objective: objective.name().to_string(),
                iteration: 0,
                bat: i,
                value: fitness,
            });
        }
        bats.push(BatState {
            position,
            velocity: vec![0.0; dim],
            frequency,
            loudness,
            initial_loudness: loudness,
            pulse_rate: base_pulse_rate,
            base_pulse_rate,
            acceptance_count: 0,
            fitness,
        });
    }

    let mut swarm = SwarmState {
        best: IncumbentBest::from_bat(&bats[0]),
        bats,
        iteration: 0,
    };
    let best = swarm.best_index();
    swarm.best = IncumbentBest::from_bat(&swarm.bats[best]);
    Ok(swarm)
}

/// Replaces the incumbent with the best bat if that bat is strictly
/// better. Returns whether the incumbent changed.
pub fn update_incumbent(swarm: &mut SwarmState) -> bool {
    let best = swarm.best_index();
    if swarm.bats[best].fitness < swarm.best.fitness_star {
        swarm.best = IncumbentBest::from_bat(&swarm.bats[best]);
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;

    fn bat(fitness: f64, x: f64) -> BatState {
        BatState {
            position: vec![x],
            velocity: vec![x * 0.5],
            frequency: x.abs(),
            loudness: 1.0,
            initial_loudness: 1.0,
            pulse_rate: 0.5,
            base_pulse_rate: 0.5,
            acceptance_count: 0,
            fitness,
        }
    }

    fn swarm_with(fitnesses: &[f64], star: f64) -> SwarmState {
        let bats: Vec<_> = fitnesses
            .iter()
            .enumerate()
            .map(|(i, &f)| bat(f, i as f64 + 1.0))
            .collect();
        SwarmState {
            best: IncumbentBest {
                x_star: vec![0.0],
                fitness_star: star,
                f_star: 0.0,
                v_star: vec![0.0],
            },
            bats,
            iteration: 0,
        }
    }

    #[test]
    fn frequency_endpoints_and_midpoint() {
        assert_eq!(draw_frequency(0.0, 0.0, 2.0).unwrap(), 0.0);
        assert_eq!(draw_frequency(1.0, 0.0, 2.0).unwrap(), 2.0);
        assert_eq!(draw_frequency(0.5, 0.0, 2.0).unwrap(), 1.0);
        assert!(draw_frequency(1.5, 0.0, 2.0).is_err());
        assert!(draw_frequency(-0.1, 0.0, 2.0).is_err());
        assert!(draw_frequency(0.5, 2.0, 2.0).is_err());
    }

    #[test]
    fn frequency_is_affine_on_dyadic_grid() {
        for k in 0..=64 {
            let beta = k as f64 / 64.0;
            for &(a, b) in &[(0.0, 2.0), (-1.0, 3.0), (0.25, 0.5)] {
                assert_eq!(draw_frequency(beta, a, b).unwrap(), a + (b - a) * beta);
            }
        }
    }

    #[test]
    fn clamp_examples() {
        let b = Bounds::uniform(2, -100.0, 100.0).unwrap();
        assert_eq!(clamp_to_bounds(&[150.0, -150.0], &b).unwrap(), vec![100.0, -100.0]);
        assert_eq!(clamp_to_bounds(&[0.0, 0.0], &b).unwrap(), vec![0.0, 0.0]);
        assert_eq!(clamp_to_bounds(&[100.0, -100.0], &b).unwrap(), vec![100.0, -100.0]);
        assert!(matches!(
            clamp_to_bounds(&[0.0], &b),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn bounds_reject_inverted_or_flat_intervals() {
        assert!(Bounds::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Bounds::new(vec![2.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn init_small_sphere() {
        let sphere = benchmarks::lookup("F1", Some(2)).unwrap();
        let mut rng = RngStream::from_seed(7);
        let swarm = init_swarm(&sphere, 3, &AlgoParams::default(), &mut rng).unwrap();
        assert_eq!(swarm.bats.len(), 3);
        assert_eq!(swarm.iteration, 0);
        let min = swarm
            .bats
            .iter()
            .map(|b| b.fitness)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(swarm.best.fitness_star, min);
        for b in &swarm.bats {
            assert!(sphere.bounds().contains(&b.position));
            assert!(b.velocity.iter().all(|&v| v == 0.0));
            assert!((0.0..=2.0).contains(&b.frequency));
            assert!((1.0..2.0).contains(&b.loudness));
            assert_eq!(b.pulse_rate, b.base_pulse_rate);
        }
    }

    #[test]
    fn init_rejects_single_bat() {
        let sphere = benchmarks::lookup("F1", Some(2)).unwrap();
        let mut rng = RngStream::from_seed(7);
        let err = init_swarm(&sphere, 1, &AlgoParams::default(), &mut rng).unwrap_err();
        assert!(err.to_string().contains("population too small"));
    }

    #[test]
    fn init_is_deterministic() {
        let sphere = benchmarks::lookup("F1", Some(30)).unwrap();
        let a = init_swarm(&sphere, 30, &AlgoParams::default(), &mut RngStream::from_seed(42)).unwrap();
        let b = init_swarm(&sphere, 30, &AlgoParams::default(), &mut RngStream::from_seed(42)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn incumbent_takes_strictly_better_bat() {
        let mut s = swarm_with(&[2.0, 3.0, 0.5], 1.0);
        assert!(update_incumbent(&mut s));
        assert_eq!(s.best.fitness_star, 0.5);
        assert_eq!(s.best.x_star, s.bats[2].position);
        assert_eq!(s.best.f_star, s.bats[2].frequency);
        assert_eq!(s.best.v_star, s.bats[2].velocity);
    }

    #[test]
    fn incumbent_unchanged_without_improvement() {
        let mut s = swarm_with(&[2.0, 3.0, 1.5], 1.0);
        let before = s.best.clone();
        assert!(!update_incumbent(&mut s));
        assert_eq!(s.best, before);
    }

    #[test]
    fn incumbent_tie_goes_to_lower_index() {
        let mut s = swarm_with(&[2.0, 0.25, 0.25], 1.0);
        update_incumbent(&mut s);
        assert_eq!(s.best.x_star, s.bats[1].position);
    }
}
