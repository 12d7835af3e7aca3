//! The classical 23-function benchmark suite.
//!
//! F1–F7 are unimodal, F8–F23 multimodal. F1–F13 scale to any dimension
//! (default 30); F14–F23 have a fixed dimension. F7 adds uniform `[0, 1)`
//! noise drawn from the caller's stream and is the only stochastic entry.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::swarm::Bounds;

pub type EvalFn = Arc<dyn Fn(&[f64], &mut RngStream) -> f64 + Send + Sync>;

/// A named objective over a box, with its optimum when known.
#[derive(Clone)]
pub struct ObjectiveSpec {
    name: String,
    bounds: Bounds,
    eval: EvalFn,
    known_min: Option<f64>,
    known_argmin: Option<Vec<f64>>,
    stochastic: bool,
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("known_min", &self.known_min)
            .field("stochastic", &self.stochastic)
            .finish_non_exhaustive()
    }
}

impl ObjectiveSpec {
    pub fn new<F>(name: impl Into<String>, bounds: Bounds, eval: F) -> Self
    where
        F: Fn(&[f64], &mut RngStream) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            bounds,
            eval: Arc::new(eval),
            known_min: None,
            known_argmin: None,
            stochastic: false,
        }
    }

    /// Convenience for objectives that never touch the random stream.
    pub fn deterministic<F>(name: impl Into<String>, bounds: Bounds, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, bounds, move |x, _| eval(x))
    }

    pub fn with_known_min(mut self, value: f64) -> Self {
        self.known_min = Some(value);
        self
    }

    pub fn with_known_argmin(mut self, x: Vec<f64>) -> Self {
        self.known_argmin = Some(x);
        self
    }

    pub fn stochastic(mut self) -> Self {
        self.stochastic = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn known_min(&self) -> Option<f64> {
        self.known_min
    }

    pub fn known_argmin(&self) -> Option<&[f64]> {
        self.known_argmin.as_deref()
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    /// Evaluates at `x`, which must have the right length and lie inside
    /// the bounds. Deterministic objectives leave `rng` untouched.
    pub fn evaluate(&self, x: &[f64], rng: &mut RngStream) -> Result<f64> {
        self.bounds.check(x)?;
        Ok((self.eval)(x, rng))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionRule {
    Fixed(usize),
    Scalable { default: usize },
}

impl fmt::Display for DimensionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimensionRule::Fixed(d) => write!(f, "fixed {d}"),
            DimensionRule::Scalable { default } => write!(f, "scalable (default {default})"),
        }
    }
}

type Builder = Arc<dyn Fn(usize) -> ObjectiveSpec + Send + Sync>;

/// Registry entry: a name, an alias and a builder taking the dimension.
#[derive(Clone)]
pub struct Entry {
    pub name: String,
    pub alias: String,
    pub rule: DimensionRule,
    build: Builder,
}

impl Entry {
    pub fn new<F>(name: &str, alias: &str, rule: DimensionRule, build: F) -> Self
    where
        F: Fn(usize) -> ObjectiveSpec + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            alias: alias.to_string(),
            rule,
            build: Arc::new(build),
        }
    }

    pub fn default_spec(&self) -> ObjectiveSpec {
        match self.rule {
            DimensionRule::Fixed(d) | DimensionRule::Scalable { default: d } => (self.build)(d),
        }
    }
}

/// Open set of objectives; the standard suite is preloaded by
/// [`Registry::standard`] and more can be added with [`Registry::register`].
#[derive(Clone, Default)]
pub struct Registry {
    entries: Vec<Entry>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut reg = Self::empty();
        for entry in standard_entries() {
            reg.register(entry);
        }
        reg
    }

    /// Adds an entry, replacing any previous one with the same name.
    pub fn register(&mut self, entry: Entry) {
        self.entries.retain(|e| !e.name.eq_ignore_ascii_case(&entry.name));
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn find(&self, name: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name) || e.alias.eq_ignore_ascii_case(name))
    }

    pub fn lookup(&self, name: &str, dimension: Option<usize>) -> Result<ObjectiveSpec> {
        let entry = self
            .find(name)
            .ok_or_else(|| Error::UnknownObjective(name.to_string()))?;
        match (entry.rule, dimension) {
            (DimensionRule::Fixed(_), Some(_)) => Err(Error::FixedDimension(entry.name.clone())),
            (DimensionRule::Scalable { .. }, Some(0)) => Err(Error::InvalidParameter {
                name: "dimension",
                reason: "must be at least 1".into(),
            }),
            (DimensionRule::Scalable { .. }, Some(d)) => Ok((entry.build)(d)),
            (_, None) => Ok(entry.default_spec()),
        }
    }
}

/// Looks `name` up in the standard suite. `name` may be the `F`-index or
/// the alias, case-insensitive.
pub fn lookup(name: &str, dimension: Option<usize>) -> Result<ObjectiveSpec> {
    Registry::standard().lookup(name, dimension)
}

fn boxed(d: usize, lo: f64, hi: f64) -> Bounds {
    Bounds::uniform(d, lo, hi).expect("static bounds are valid")
}

fn scalable<F>(name: &str, alias: &str, build: F) -> Entry
where
    F: Fn(usize) -> ObjectiveSpec + Send + Sync + 'static,
{
    Entry::new(name, alias, DimensionRule::Scalable { default: 30 }, build)
}

fn fixed<F>(name: &str, alias: &str, d: usize, build: F) -> Entry
where
    F: Fn(usize) -> ObjectiveSpec + Send + Sync + 'static,
{
    Entry::new(name, alias, DimensionRule::Fixed(d), build)
}

/// Location of the Schwefel 2.26 minimum on each axis.
pub const SCHWEFEL_ARGMIN: f64 = 420.968_746_359_982;

fn standard_entries() -> Vec<Entry> {
    vec![
        scalable("F1", "sphere", |d| {
            ObjectiveSpec::deterministic("F1", boxed(d, -100.0, 100.0), sphere)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F2", "schwefel_2_22", |d| {
            ObjectiveSpec::deterministic("F2", boxed(d, -10.0, 10.0), schwefel_2_22)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F3", "schwefel_1_2", |d| {
            ObjectiveSpec::deterministic("F3", boxed(d, -100.0, 100.0), schwefel_1_2)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F4", "schwefel_2_21", |d| {
            ObjectiveSpec::deterministic("F4", boxed(d, -100.0, 100.0), schwefel_2_21)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F5", "rosenbrock", |d| {
            ObjectiveSpec::deterministic("F5", boxed(d, -30.0, 30.0), rosenbrock)
                .with_known_min(0.0)
                .with_known_argmin(vec![1.0; d])
        }),
        scalable("F6", "step", |d| {
            ObjectiveSpec::deterministic("F6", boxed(d, -100.0, 100.0), step)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F7", "quartic_noise", |d| {
            ObjectiveSpec::new("F7", boxed(d, -1.28, 1.28), |x, rng| quartic(x, rng.unit()))
                .stochastic()
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F8", "schwefel_2_26", |d| {
            let argmin = vec![SCHWEFEL_ARGMIN; d];
            let min = schwefel_2_26(&argmin);
            ObjectiveSpec::deterministic("F8", boxed(d, -500.0, 500.0), schwefel_2_26)
                .with_known_min(min)
                .with_known_argmin(argmin)
        }),
        scalable("F9", "rastrigin", |d| {
            ObjectiveSpec::deterministic("F9", boxed(d, -5.12, 5.12), rastrigin)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F10", "ackley", |d| {
            ObjectiveSpec::deterministic("F10", boxed(d, -32.0, 32.0), ackley)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F11", "griewank", |d| {
            ObjectiveSpec::deterministic("F11", boxed(d, -600.0, 600.0), griewank)
                .with_known_min(0.0)
                .with_known_argmin(vec![0.0; d])
        }),
        scalable("F12", "penalized_1", |d| {
            ObjectiveSpec::deterministic("F12", boxed(d, -50.0, 50.0), penalized_1)
                .with_known_min(0.0)
                .with_known_argmin(vec![-1.0; d])
        }),
        scalable("F13", "penalized_2", |d| {
            ObjectiveSpec::deterministic("F13", boxed(d, -50.0, 50.0), penalized_2)
                .with_known_min(0.0)
                .with_known_argmin(vec![1.0; d])
        }),
        fixed("F14", "shekel_foxholes", 2, |d| {
            ObjectiveSpec::deterministic("F14", boxed(d, -65.536, 65.536), shekel_foxholes)
                .with_known_min(0.998_003_837_794_45)
                .with_known_argmin(vec![-31.978_335_306_762_744, -31.978_330_858_510_354])
        }),
        fixed("F15", "kowalik", 4, |d| {
            ObjectiveSpec::deterministic("F15", boxed(d, -5.0, 5.0), kowalik)
                .with_known_min(3.074_859_878_056_051e-4)
                .with_known_argmin(vec![
                    0.192_833_453_042_748_13,
                    0.190_836_240_275_970_35,
                    0.123_117_299_075_980_03,
                    0.135_765_990_339_844_66,
                ])
        }),
        fixed("F16", "six_hump_camel", 2, |d| {
            ObjectiveSpec::deterministic("F16", boxed(d, -5.0, 5.0), six_hump_camel)
                .with_known_min(-1.031_628_453_489_877_6)
                .with_known_argmin(vec![0.089_842_016_529_270_98, -0.712_656_401_380_720_2])
        }),
        fixed("F17", "branin", 2, |_| {
            let bounds = Bounds::new(vec![-5.0, 0.0], vec![10.0, 15.0]).expect("static bounds");
            ObjectiveSpec::deterministic("F17", bounds, branin)
                .with_known_min(0.397_887_357_729_738_16)
                .with_known_argmin(vec![PI, 2.275])
        }),
        fixed("F18", "goldstein_price", 2, |d| {
            ObjectiveSpec::deterministic("F18", boxed(d, -2.0, 2.0), goldstein_price)
                .with_known_min(3.0)
                .with_known_argmin(vec![0.0, -1.0])
        }),
        fixed("F19", "hartmann_3", 3, |d| {
            ObjectiveSpec::deterministic("F19", boxed(d, 0.0, 1.0), hartmann_3)
                .with_known_min(-3.862_782_147_820_755_4)
                .with_known_argmin(vec![
                    0.114_614_327_869_381_44,
                    0.555_648_849_854_593_4,
                    0.852_546_952_926_669_5,
                ])
        }),
        fixed("F20", "hartmann_6", 6, |d| {
            ObjectiveSpec::deterministic("F20", boxed(d, 0.0, 1.0), hartmann_6)
                .with_known_min(-3.321_995_171_584_241)
                .with_known_argmin(vec![
                    0.201_707_610_426_689_67,
                    0.146_780_953_521_309_27,
                    0.476_744_852_136_898_77,
                    0.275_342_389_929_457_8,
                    0.311_651_875_549_326_83,
                    0.657_275_168_357_007_7,
                ])
        }),
        fixed("F21", "shekel_5", 4, |d| {
            ObjectiveSpec::deterministic("F21", boxed(d, 0.0, 10.0), |x| shekel(x, 5))
                .with_known_min(-10.153_199_679_058_229)
                .with_known_argmin(vec![
                    4.000_037_152_376_549,
                    4.000_133_278_657_566,
                    4.000_037_151_057_555,
                    4.000_133_277_090_425,
                ])
        }),
        fixed("F22", "shekel_7", 4, |d| {
            ObjectiveSpec::deterministic("F22", boxed(d, 0.0, 10.0), |x| shekel(x, 7))
                .with_known_min(-10.402_940_566_818_662)
                .with_known_argmin(vec![
                    4.000_572_914_277_084,
                    4.000_689_366_040_889,
                    3.999_489_710_793_844_7,
                    3.999_606_160_006_792_3,
                ])
        }),
        fixed("F23", "shekel_10", 4, |d| {
            ObjectiveSpec::deterministic("F23", boxed(d, 0.0, 10.0), |x| shekel(x, 10))
                .with_known_min(-10.536_409_816_692_046)
                .with_known_argmin(vec![
                    4.000_746_533_201_553,
                    4.000_592_934_538_832,
                    3.999_663_397_220_255_8,
                    3.999_509_801_285_225_5,
                ])
        }),
    ]
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn schwefel_2_22(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v.abs()).sum();
    let prod: f64 = x.iter().map(|v| v.abs()).product();
    sum + prod
}

pub fn schwefel_1_2(x: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for v in x {
        prefix += v;
        total += prefix * prefix;
    }
    total
}

pub fn schwefel_2_21(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn step(x: &[f64]) -> f64 {
    x.iter().map(|v| (v + 0.5).floor().powi(2)).sum()
}

/// Weighted quartic plus an additive `noise` term.
pub fn quartic(x: &[f64], noise: f64) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4))
        .sum::<f64>()
        + noise
}

pub fn schwefel_2_26(x: &[f64]) -> f64 {
    x.iter().map(|v| -v * v.abs().sqrt().sin()).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

fn penalty(v: f64, a: f64, k: f64, m: i32) -> f64 {
    if v > a {
        k * (v - a).powi(m)
    } else if v < -a {
        k * (-v - a).powi(m)
    } else {
        0.0
    }
}

pub fn penalized_1(x: &[f64]) -> f64 {
    let d = x.len();
    let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
    let mut s = 10.0 * (PI * y[0]).sin().powi(2);
    for i in 0..d - 1 {
        s += (y[i] - 1.0).powi(2) * (1.0 + 10.0 * (PI * y[i + 1]).sin().powi(2));
    }
    s += (y[d - 1] - 1.0).powi(2);
    PI / d as f64 * s + x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum::<f64>()
}

pub fn penalized_2(x: &[f64]) -> f64 {
    let d = x.len();
    let mut s = (3.0 * PI * x[0]).sin().powi(2);
    for i in 0..d - 1 {
        s += (x[i] - 1.0).powi(2) * (1.0 + (3.0 * PI * x[i + 1]).sin().powi(2));
    }
    s += (x[d - 1] - 1.0).powi(2) * (1.0 + (2.0 * PI * x[d - 1]).sin().powi(2));
    0.1 * s + x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum::<f64>()
}

const FOXHOLE_GRID: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

pub fn shekel_foxholes(x: &[f64]) -> f64 {
    let mut s = 1.0 / 500.0;
    for j in 0..25 {
        let a0 = FOXHOLE_GRID[j % 5];
        let a1 = FOXHOLE_GRID[j / 5];
        s += 1.0 / ((j + 1) as f64 + (x[0] - a0).powi(6) + (x[1] - a1).powi(6));
    }
    1.0 / s
}

const KOWALIK_A: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.16, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];
const KOWALIK_B_INV: [f64; 11] = [0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0];

pub fn kowalik(x: &[f64]) -> f64 {
    KOWALIK_A
        .iter()
        .zip(KOWALIK_B_INV)
        .map(|(&a, b_inv)| {
            let b = 1.0 / b_inv;
            let model = x[0] * (b * b + x[1] * b) / (b * b + x[2] * b + x[3]);
            (a - model).powi(2)
        })
        .sum()
}

pub fn six_hump_camel(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    4.0 * a * a - 2.1 * a.powi(4) + a.powi(6) / 3.0 + a * b - 4.0 * b * b + 4.0 * b.powi(4)
}

pub fn branin(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (b - 5.1 / (4.0 * PI * PI) * a * a + 5.0 / PI * a - 6.0).powi(2)
        + 10.0 * (1.0 - 1.0 / (8.0 * PI)) * a.cos()
        + 10.0
}

pub fn goldstein_price(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let p = 1.0
        + (a + b + 1.0).powi(2)
            * (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
    let q = 30.0
        + (2.0 * a - 3.0 * b).powi(2)
            * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
    p * q
}

const HARTMANN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN3_A: [[f64; 3]; 4] = [
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
];
const HARTMANN3_P: [[f64; 3]; 4] = [
    [0.3689, 0.117, 0.2673],
    [0.4699, 0.4387, 0.747],
    [0.1091, 0.8732, 0.5547],
    [0.03815, 0.5743, 0.8828],
];
const HARTMANN6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1415, 0.3522, 0.2883, 0.3047, 0.665],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

fn hartmann<const D: usize>(x: &[f64], a: &[[f64; D]; 4], p: &[[f64; D]; 4]) -> f64 {
    -(0..4)
        .map(|i| {
            let inner: f64 = (0..D).map(|j| a[i][j] * (x[j] - p[i][j]).powi(2)).sum();
            HARTMANN_C[i] * (-inner).exp()
        })
        .sum::<f64>()
}

pub fn hartmann_3(x: &[f64]) -> f64 {
    hartmann(x, &HARTMANN3_A, &HARTMANN3_P)
}

pub fn hartmann_6(x: &[f64]) -> f64 {
    hartmann(x, &HARTMANN6_A, &HARTMANN6_P)
}

const SHEKEL_A: [[f64; 4]; 10] = [
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
    [8.0, 1.0, 8.0, 1.0],
    [6.0, 2.0, 6.0, 2.0],
    [7.0, 3.6, 7.0, 3.6],
];
const SHEKEL_C: [f64; 10] = [0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5];

/// Shekel with the first `m` of the ten standard foxholes.
pub fn shekel(x: &[f64], m: usize) -> f64 {
    -(0..m)
        .map(|i| {
            let d2: f64 = (0..4).map(|j| (x[j] - SHEKEL_A[i][j]).powi(2)).sum();
            1.0 / (d2 + SHEKEL_C[i])
        })
        .sum::<f64>()
}
