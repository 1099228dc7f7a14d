//! Synthetic networks and a Monte Carlo harness for empirical size and power.
//!
//! Settings (a)–(c) plant a reciprocity, same-sender or sender-receiver effect
//! of size c² in an otherwise noisy network; the example settings produce
//! degenerate and non-degenerate estimators for the diagnostic.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{test_effect, Branch, TestConfig, DEFAULT_ALPHA, DEFAULT_C};
use crate::network::{DirectedWeightedNetwork, EffectKind};
use crate::par;
use crate::rng::{replicate_seed, stream, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    /// e_ij = a_i + b_j + c·γ_(ij) + ε_ij; η₂ = c²
    #[serde(rename = "a")]
    A,
    /// e_ij = c·a_i + ε_ij; η₃ = c²
    #[serde(rename = "b")]
    B,
    /// e_ij = c(a_i − d)(a_j − d) + ε_ij; null c = d = 1, alternative d = 0
    #[serde(rename = "c")]
    C,
    /// e_ij = X_i + X_(ij) + ε_ij; sender-receiver estimator degenerate
    #[serde(rename = "example_4_1_i")]
    Example41i,
    /// e_ij = X_i(X_j − 1/2) + ε_ij; sender-receiver estimator non-degenerate
    #[serde(rename = "example_4_1_ii")]
    Example41ii,
    /// e_ij = X_(ij) + ε_ij; reciprocity estimator degenerate
    #[serde(rename = "example_5_1_i")]
    Example51i,
    /// e_ij = X_i − X_j + √2·X_(ij) + ε_ij; reciprocity estimator non-degenerate
    #[serde(rename = "example_5_1_ii")]
    Example51ii,
}

impl Setting {
    /// The effect each setting was built to exercise.
    pub fn default_effect(self) -> EffectKind {
        match self {
            Setting::A | Setting::Example51i | Setting::Example51ii => EffectKind::Reciprocity,
            Setting::B => EffectKind::SameSender,
            Setting::C | Setting::Example41i | Setting::Example41ii => EffectKind::SenderReceiver,
        }
    }

    pub fn is_example(self) -> bool {
        !matches!(self, Setting::A | Setting::B | Setting::C)
    }

    fn code(self) -> &'static str {
        match self {
            Setting::A => "a",
            Setting::B => "b",
            Setting::C => "c",
            Setting::Example41i => "example_4_1_i",
            Setting::Example41ii => "example_4_1_ii",
            Setting::Example51i => "example_5_1_i",
            Setting::Example51ii => "example_5_1_ii",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "a" => Ok(Setting::A),
            "b" => Ok(Setting::B),
            "c" => Ok(Setting::C),
            "example41i" | "ex41i" => Ok(Setting::Example41i),
            "example41ii" | "ex41ii" => Ok(Setting::Example41ii),
            "example51i" | "ex51i" => Ok(Setting::Example51i),
            "example51ii" | "ex51ii" => Ok(Setting::Example51ii),
            _ => Err(Error::InvalidSpec(format!("unknown setting '{s}'"))),
        }
    }
}

/// Law of the latent variables in settings (a)–(c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatentConfig {
    /// a, b, γ ~ N(1, 1) and ε ~ N(0, 1)
    Normal,
    /// a, b, γ, ε ~ Poisson(1)
    Poisson,
}

impl FromStr for LatentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(LatentConfig::Normal),
            "poisson" => Ok(LatentConfig::Poisson),
            other => Err(Error::InvalidSpec(format!("unknown config '{other}'"))),
        }
    }
}

/// Parameters of one generated network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub setting: Setting,
    pub config: LatentConfig,
    pub n: usize,
    /// Signal strength c² under the alternative; ignored under the null and
    /// by the example settings.
    pub c_squared: f64,
    pub null_case: bool,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidSpec(format!("n must be at least 4, got {}", self.n)));
        }
        if !(self.c_squared >= 0.0 && self.c_squared.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "c² must be nonnegative, got {}",
                self.c_squared
            )));
        }
        if self.setting.is_example() && self.config == LatentConfig::Poisson {
            return Err(Error::InvalidSpec(format!(
                "setting {} uses normal latents only",
                self.setting
            )));
        }
        Ok(())
    }

    /// Population value of the setting's target effect (0 under the null).
    /// Defined for settings (a)–(c).
    pub fn population_effect(&self) -> Option<f64> {
        if self.setting.is_example() {
            return None;
        }
        if self.null_case {
            return Some(0.0);
        }
        // Var(γ) = Var(a) = 1 and E[a²] − E[a]² = 1 under both laws
        Some(self.c_squared)
    }
}

enum Latent {
    Normal(Normal<f64>),
    Poisson(Poisson<f64>),
}

impl Latent {
    fn factor(config: LatentConfig) -> Self {
        match config {
            LatentConfig::Normal => Latent::Normal(Normal::new(1.0, 1.0).expect("valid normal")),
            LatentConfig::Poisson => Latent::Poisson(Poisson::new(1.0).expect("valid poisson")),
        }
    }

    fn noise(config: LatentConfig) -> Self {
        match config {
            LatentConfig::Normal => Latent::Normal(Normal::new(0.0, 1.0).expect("valid normal")),
            LatentConfig::Poisson => Latent::Poisson(Poisson::new(1.0).expect("valid poisson")),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Latent::Normal(d) => d.sample(rng),
            Latent::Poisson(d) => d.sample(rng),
        }
    }

    fn draw_vec(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.draw(rng)).collect()
    }
}

/// Symmetric dyad-level latent γ_(ij) = γ_(ji), drawn for i < j in row-major order.
fn symmetric_latent(law: &Latent, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = law.draw(rng);
            g[i * n + j] = v;
            g[j * n + i] = v;
        }
    }
    g
}

/// Generates one network. Each latent block draws from its own stream of
/// `seed`, so the same seed always yields the same network.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<DirectedWeightedNetwork> {
    spec.validate()?;
    let n = spec.n;
    let factor = Latent::factor(spec.config);
    let noise_law = Latent::noise(spec.config);
    let sender = factor.draw_vec(&mut stream_rng(seed, stream::SENDER_LATENT), n);
    let mut noise_rng = stream_rng(seed, stream::NOISE);
    let c = if spec.null_case { 0.0 } else { spec.c_squared.sqrt() };

    let mut noise = || noise_law.draw(&mut noise_rng);
    match spec.setting {
        Setting::A => {
            let receiver = factor.draw_vec(&mut stream_rng(seed, stream::RECEIVER_LATENT), n);
            let gamma = symmetric_latent(&factor, &mut stream_rng(seed, stream::DYAD_LATENT), n);
            DirectedWeightedNetwork::from_fn(n, |i, j| sender[i] + receiver[j] + c * gamma[i * n + j] + noise())
        }
        Setting::B => DirectedWeightedNetwork::from_fn(n, |i, _| c * sender[i] + noise()),
        Setting::C => {
            let (scale, shift) = if spec.null_case { (1.0, 1.0) } else { (c, 0.0) };
            DirectedWeightedNetwork::from_fn(n, |i, j| scale * (sender[i] - shift) * (sender[j] - shift) + noise())
        }
        Setting::Example41i => {
            let dyad = symmetric_latent(&factor, &mut stream_rng(seed, stream::DYAD_LATENT), n);
            DirectedWeightedNetwork::from_fn(n, |i, j| sender[i] + dyad[i * n + j] + noise())
        }
        Setting::Example41ii => DirectedWeightedNetwork::from_fn(n, |i, j| sender[i] * (sender[j] - 0.5) + noise()),
        Setting::Example51i => {
            let dyad = symmetric_latent(&factor, &mut stream_rng(seed, stream::DYAD_LATENT), n);
            DirectedWeightedNetwork::from_fn(n, |i, j| dyad[i * n + j] + noise())
        }
        Setting::Example51ii => {
            let dyad = symmetric_latent(&factor, &mut stream_rng(seed, stream::DYAD_LATENT), n);
            DirectedWeightedNetwork::from_fn(n, |i, j| {
                sender[i] - sender[j] + std::f64::consts::SQRT_2 * dyad[i * n + j] + noise()
            })
        }
    }
}

/// A full Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub generator: GeneratorSpec,
    pub reps: usize,
    pub effect: EffectKind,
    pub alpha: f64,
    pub lambda: f64,
    pub c_constant: f64,
    pub master_seed: u64,
}

impl SimulationSpec {
    /// Spec with the setting's own effect and α = 0.05, λ = 1, C = 1.
    pub fn new(setting: Setting, config: LatentConfig, n: usize, c_squared: f64, null_case: bool, reps: usize) -> Self {
        SimulationSpec {
            generator: GeneratorSpec {
                setting,
                config,
                n,
                c_squared,
                null_case,
            },
            reps,
            effect: setting.default_effect(),
            alpha: DEFAULT_ALPHA,
            lambda: 1.0,
            c_constant: DEFAULT_C,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.reps == 0 {
            return Err(Error::InvalidSpec("reps must be at least 1".into()));
        }
        self.test_config(0).validate()
    }

    fn test_config(&self, seed: u64) -> TestConfig {
        TestConfig {
            alpha: self.alpha,
            lambda: self.lambda,
            seed,
            c_constant: self.c_constant,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCounts {
    pub reduced: usize,
    pub studentized_complete: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    /// Rejections over replicates that produced a statistic.
    pub rejection_rate: f64,
    pub rejections: usize,
    pub reps: usize,
    /// √(rate(1 − rate)/valid replicates)
    pub standard_error: f64,
    pub branch_counts: BranchCounts,
    /// Replicates whose variance estimate was zero; excluded from the rate.
    pub zero_variance: usize,
    /// Per-replicate test statistics in replicate order (NaN where undefined).
    pub statistics: Vec<f64>,
}

/// Outcome of replicate `index`; depends only on (spec, index).
fn run_replicate(spec: &SimulationSpec, index: u64) -> Result<Option<(bool, Branch, f64)>> {
    let seed = replicate_seed(spec.master_seed, index);
    let net = generate(&spec.generator, seed)?;
    match test_effect(&net, spec.effect, &spec.test_config(seed)) {
        Ok(report) => Ok(Some((report.reject, report.branch, report.statistic))),
        Err(Error::ZeroVariance(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Runs `reps` independent replicates and tallies rejections.
pub fn monte_carlo(spec: &SimulationSpec) -> Result<MonteCarloSummary> {
    spec.validate()?;
    let outcomes = par::map_indexed(spec.reps, |r| run_replicate(spec, r as u64))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut branch_counts = BranchCounts::default();
    let mut rejections = 0;
    let mut zero_variance = 0;
    let mut statistics = Vec::with_capacity(outcomes.len());
    for outcome in &outcomes {
        match outcome {
            Some((reject, branch, stat)) => {
                rejections += usize::from(*reject);
                match branch {
                    Branch::Reduced => branch_counts.reduced += 1,
                    Branch::StudentizedComplete => branch_counts.studentized_complete += 1,
                }
                statistics.push(*stat);
            }
            None => {
                zero_variance += 1;
                statistics.push(f64::NAN);
            }
        }
    }
    let valid = spec.reps - zero_variance;
    let rate = if valid > 0 {
        rejections as f64 / valid as f64
    } else {
        0.0
    };
    let standard_error = if valid > 0 {
        (rate * (1.0 - rate) / valid as f64).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloSummary {
        rejection_rate: rate,
        rejections,
        reps: spec.reps,
        standard_error,
        branch_counts,
        zero_variance,
        statistics,
    })
}
