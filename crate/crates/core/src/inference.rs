//! Hypothesis tests for H₀: η_ℓ = 0.
//!
//! Same-sender and same-receiver estimators are always degenerate under the
//! null and are tested with reduced moments. Reciprocity and sender-receiver
//! estimators may go either way, so a degeneracy diagnostic picks between
//! the studentized complete test and the reduced test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    check_lambda, complete_from_summaries, reduced_estimate, sample_quadruples, xi_squared_hat, EffectEstimate,
    EstimateMethod, QuadrupleSample,
};
use crate::network::{DirectedWeightedNetwork, EffectKind};
use crate::normal;
use crate::par;

/// Standard deviations at or below this fraction of the mean squared weight
/// are treated as zero.
const ZERO_SPREAD: f64 = 1e-10;

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_LAMBDA: f64 = 1.2;
pub const DEFAULT_C: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Degenerate,
    NonDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyDiagnosis {
    pub effect: EffectKind,
    pub n: usize,
    pub xi_squared: f64,
    /// C·n^{-1/2}·(ln n)^{1/2}
    pub threshold: f64,
    pub c_constant: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Reduced,
    StudentizedComplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub effect: EffectKind,
    pub n: usize,
    pub alpha: f64,
    pub branch: Branch,
    pub statistic: f64,
    /// Two-sided, or the Z-average combination of two-sided p-values.
    pub p_value: f64,
    pub reject: bool,
    /// Standard deviation used for studentization (ξ̂ or σ̂_J).
    pub std_error_scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsample_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<DegeneracyDiagnosis>,
    pub estimate: EffectEstimate,
}

/// Parameters shared by the test entry points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub seed: u64,
    pub c_constant: f64,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            alpha: DEFAULT_ALPHA,
            lambda: DEFAULT_LAMBDA,
            seed: 0,
            c_constant: DEFAULT_C,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_lambda(self.lambda)?;
        check_c(self.c_constant)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "diagnostic constant must be positive, got {c}"
        )));
    }
    Ok(())
}

/// Degeneracy threshold C·√(ln n / n).
pub fn degeneracy_threshold(n: usize, c: f64) -> f64 {
    let n = n as f64;
    c * (n.ln() / n).sqrt()
}

pub fn diagnose_degeneracy(net: &DirectedWeightedNetwork, effect: EffectKind, c: f64) -> Result<DegeneracyDiagnosis> {
    check_c(c)?;
    let xi_squared = xi_squared_hat(net, effect)?;
    let threshold = degeneracy_threshold(net.n(), c);
    Ok(DegeneracyDiagnosis {
        effect,
        n: net.n(),
        xi_squared,
        threshold,
        c_constant: c,
        verdict: if xi_squared > threshold {
            Verdict::NonDegenerate
        } else {
            Verdict::Degenerate
        },
    })
}

fn mean_squared_weight(net: &DirectedWeightedNetwork) -> f64 {
    let n = net.n() as f64;
    net.as_slice().iter().map(|w| w * w).sum::<f64>() / (n * (n - 1.0))
}

fn sample_squared_weight(net: &DirectedWeightedNetwork, sample: &QuadrupleSample) -> f64 {
    let mut acc = 0.0;
    for q in sample.tuples() {
        for &a in q {
            for &b in q {
                let w = net.weight(a, b);
                acc += w * w;
            }
        }
    }
    acc / (12 * sample.len()) as f64
}

/// NaN spreads count as zero.
fn is_zero_spread(sd: f64, mean_sq_weight: f64) -> bool {
    sd.is_nan() || sd <= ZERO_SPREAD * mean_sq_weight
}

/// Rejects when |√n·η̂_{ℓ,n}/ξ̂_{ℓ,1}| exceeds the normal critical value.
pub fn studentized_complete_test(net: &DirectedWeightedNetwork, effect: EffectKind, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let xi_squared = xi_squared_hat(net, effect)?;
    studentized_with(net, effect, alpha, xi_squared, None)
}

fn studentized_with(
    net: &DirectedWeightedNetwork,
    effect: EffectKind,
    alpha: f64,
    xi_squared: f64,
    diagnosis: Option<DegeneracyDiagnosis>,
) -> Result<TestReport> {
    let xi = xi_squared.sqrt();
    if is_zero_spread(xi, mean_squared_weight(net)) {
        return Err(Error::ZeroVariance("studentized complete test"));
    }
    let estimate = complete_from_summaries(&net.summaries(), effect);
    let statistic = (net.n() as f64).sqrt() * estimate.value / xi;
    let p_value = normal::two_sided_p(statistic);
    Ok(TestReport {
        effect,
        n: net.n(),
        alpha,
        branch: Branch::StudentizedComplete,
        statistic,
        p_value,
        reject: p_value < alpha,
        std_error_scale: xi,
        lambda: None,
        seed: None,
        subsample_size: None,
        repeats: None,
        diagnosis,
        estimate,
    })
}

/// Rejects when |√m·η̂_{ℓ,J}/σ̂_{ℓ,J}| exceeds the normal critical value, with
/// m = round(n^λ) quadruples drawn from `seed`.
pub fn reduced_test(
    net: &DirectedWeightedNetwork,
    effect: EffectKind,
    alpha: f64,
    lambda: f64,
    seed: u64,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    net.require_nodes(4)?;
    let sample = sample_quadruples(net.n(), lambda, seed)?;
    let moment = reduced_estimate(net, effect, &sample)?;
    if is_zero_spread(moment.sigma_hat_j, sample_squared_weight(net, &sample)) {
        return Err(Error::ZeroVariance("reduced test"));
    }
    let statistic = (moment.m as f64).sqrt() * moment.eta_hat_j / moment.sigma_hat_j;
    let p_value = normal::two_sided_p(statistic);
    Ok(TestReport {
        effect,
        n: net.n(),
        alpha,
        branch: Branch::Reduced,
        statistic,
        p_value,
        reject: p_value < alpha,
        std_error_scale: moment.sigma_hat_j,
        lambda: Some(lambda),
        seed: Some(seed),
        subsample_size: Some(moment.m),
        repeats: None,
        diagnosis: None,
        estimate: EffectEstimate {
            effect,
            value: moment.eta_hat_j,
            method: EstimateMethod::Reduced,
        },
    })
}

/// Full test pipeline for one effect.
///
/// Same-sender and same-receiver go straight to the reduced test. Reciprocity
/// and sender-receiver are diagnosed first: non-degenerate estimators get
/// the studentized complete test, degenerate ones the reduced test. The
/// diagnosis is attached to the report in both cases.
pub fn test_effect(net: &DirectedWeightedNetwork, effect: EffectKind, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    net.require_nodes(4)?;
    if !effect.has_diagnostic() {
        return reduced_test(net, effect, config.alpha, config.lambda, config.seed);
    }
    let diagnosis = diagnose_degeneracy(net, effect, config.c_constant)?;
    match diagnosis.verdict {
        Verdict::NonDegenerate => studentized_with(net, effect, config.alpha, diagnosis.xi_squared, Some(diagnosis)),
        Verdict::Degenerate => {
            let mut report = reduced_test(net, effect, config.alpha, config.lambda, config.seed)?;
            report.diagnosis = Some(diagnosis);
            Ok(report)
        }
    }
}

/// [`test_effect`] with `repeats` independent subsamples on the reduced
/// branch, seeded `config.seed, config.seed + 1, …` and combined with the
/// Z-average. The studentized branch does not subsample, so `repeats` has
/// no effect there.
pub fn test_effect_repeated(
    net: &DirectedWeightedNetwork,
    effect: EffectKind,
    config: &TestConfig,
    repeats: usize,
) -> Result<TestReport> {
    if repeats <= 1 {
        if repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        return test_effect(net, effect, config);
    }
    config.validate()?;
    net.require_nodes(4)?;
    let seeds = consecutive_seeds(config.seed, repeats);
    if !effect.has_diagnostic() {
        return aggregated_reduced_test(net, effect, config.alpha, config.lambda, &seeds);
    }
    let diagnosis = diagnose_degeneracy(net, effect, config.c_constant)?;
    match diagnosis.verdict {
        Verdict::NonDegenerate => studentized_with(net, effect, config.alpha, diagnosis.xi_squared, Some(diagnosis)),
        Verdict::Degenerate => {
            let mut report = aggregated_reduced_test(net, effect, config.alpha, config.lambda, &seeds)?;
            report.diagnosis = Some(diagnosis);
            Ok(report)
        }
    }
}

/// Z-average combination: mean of Φ⁻¹(1 − p_k), converted back to an upper
/// tail probability. Valid under arbitrary dependence between the inputs.
pub fn combine_p_values(p_values: &[f64]) -> Result<f64> {
    if p_values.is_empty() {
        return Err(Error::EmptyInput("p-values"));
    }
    if let Some(bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("p-value {bad} outside [0, 1]")));
    }
    let mean_z = p_values
        .iter()
        .map(|&p| normal::upper_quantile(p.max(normal::P_FLOOR)))
        .sum::<f64>()
        / p_values.len() as f64;
    Ok(normal::upper_tail(mean_z).clamp(normal::P_FLOOR, 1.0))
}

/// Seeds `seed, seed+1, …` for `k` repeated subsamples.
pub fn consecutive_seeds(seed: u64, k: usize) -> Vec<u64> {
    (0..k as u64).map(|i| seed.wrapping_add(i)).collect()
}

/// Runs one reduced test per seed and combines their p-values with the
/// Z-average. With a single seed this is exactly [`reduced_test`].
pub fn aggregated_reduced_test(
    net: &DirectedWeightedNetwork,
    effect: EffectKind,
    alpha: f64,
    lambda: f64,
    seeds: &[u64],
) -> Result<TestReport> {
    match seeds {
        [] => Err(Error::EmptyInput("seeds")),
        [seed] => reduced_test(net, effect, alpha, lambda, *seed),
        _ => {
            check_alpha(alpha)?;
            let reports = par::map_slice(seeds, |&s| reduced_test(net, effect, alpha, lambda, s))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let p_values: Vec<f64> = reports.iter().map(|r| r.p_value).collect();
            let p_value = combine_p_values(&p_values)?;
            let k = reports.len() as f64;
            let mean_z = p_values
                .iter()
                .map(|&p| normal::upper_quantile(p.max(normal::P_FLOOR)))
                .sum::<f64>()
                / k;
            let first = &reports[0];
            Ok(TestReport {
                statistic: mean_z,
                p_value,
                reject: p_value < alpha,
                std_error_scale: reports.iter().map(|r| r.std_error_scale).sum::<f64>() / k,
                repeats: Some(reports.len()),
                estimate: EffectEstimate {
                    effect,
                    value: reports.iter().map(|r| r.estimate.value).sum::<f64>() / k,
                    method: EstimateMethod::Reduced,
                },
                ..first.clone()
            })
        }
    }
}

/// Node-level empirical effects, for exploratory plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeEffects {
    pub reciprocity: f64,
    pub same_sender: f64,
    pub same_receiver: f64,
    pub sender_receiver: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEffects {
    pub nodes: Vec<NodeEffects>,
}

/// Local effects of every node, with weights centred at the global edge mean.
pub fn local_effects(net: &DirectedWeightedNetwork) -> Result<LocalEffects> {
    net.require_nodes(3)?;
    let n = net.n();
    let mu = crate::estimators::mean_edge(net);
    let mut out_sum = vec![0.0; n];
    let mut out_sq = vec![0.0; n];
    let mut in_sum = vec![0.0; n];
    let mut in_sq = vec![0.0; n];
    let mut recip = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = net.weight(i, j) - mu;
            out_sum[i] += d;
            out_sq[i] += d * d;
            in_sum[j] += d;
            in_sq[j] += d * d;
            if j > i {
                let p = d * (net.weight(j, i) - mu);
                recip[i] += p;
                recip[j] += p;
            }
        }
    }
    let nf = n as f64;
    let ordered_pairs = (nf - 1.0) * (nf - 2.0);
    let nodes = (0..n)
        .map(|i| NodeEffects {
            reciprocity: recip[i] / (nf - 1.0),
            same_sender: (out_sum[i] * out_sum[i] - out_sq[i]) / ordered_pairs,
            same_receiver: (in_sum[i] * in_sum[i] - in_sq[i]) / ordered_pairs,
            sender_receiver: (in_sum[i] * out_sum[i] - recip[i]) / ordered_pairs,
        })
        .collect();
    Ok(LocalEffects { nodes })
}
