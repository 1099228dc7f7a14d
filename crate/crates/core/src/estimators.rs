//! Complete and reduced effect estimators, node-level projections and the
//! degeneracy statistics built from them.
//!
//! Complete estimators are accumulated in O(n²) from row/column summaries
//! instead of enumerating pairs and triples. Reduced estimators average the
//! quadruple kernel ψ over a with-replacement subsample of quadruples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{psi, TupleView};
use crate::network::{DirectedWeightedNetwork, EffectKind, RowColSummaries};
use crate::par;
use crate::rng::{stream, stream_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Complete,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub effect: EffectKind,
    pub value: f64,
    pub method: EstimateMethod,
}

/// Subsampled quadruple estimate with its standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedMoment {
    pub effect: EffectKind,
    pub eta_hat_j: f64,
    pub sigma_hat_j: f64,
    pub lambda: f64,
    pub m: usize,
    pub seed: u64,
}

/// m quadruples drawn uniformly with replacement from all C(n,4).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrupleSample {
    n: usize,
    lambda: f64,
    seed: u64,
    tuples: Vec<[usize; 4]>,
}

impl QuadrupleSample {
    /// Wraps an explicit list of quadruples (each checked for distinct,
    /// in-range indices).
    pub fn from_tuples(n: usize, tuples: Vec<[usize; 4]>) -> Result<Self> {
        if n < 4 {
            return Err(Error::TooFewNodes { required: 4, actual: n });
        }
        if tuples.is_empty() {
            return Err(Error::EmptyInput("quadruple sample"));
        }
        for q in &tuples {
            let distinct = (0..4).all(|a| (a + 1..4).all(|b| q[a] != q[b]));
            if !distinct || q.iter().any(|&i| i >= n) {
                return Err(Error::InvalidTuple { indices: q.to_vec(), n });
            }
        }
        let lambda = (tuples.len() as f64).ln() / (n as f64).ln();
        Ok(QuadrupleSample {
            n,
            lambda,
            seed: 0,
            tuples,
        })
    }

    /// Every quadruple i<j<k<l exactly once.
    pub fn all(n: usize) -> Result<Self> {
        let mut tuples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        tuples.push([i, j, k, l]);
                    }
                }
            }
        }
        Self::from_tuples(n, tuples)
    }

    pub fn tuples(&self) -> &[[usize; 4]] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Subsample size round(n^λ).
pub fn subsample_size(n: usize, lambda: f64) -> usize {
    ((n as f64).powf(lambda).round() as usize).max(1)
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(1.0..2.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [1, 2), got {lambda}"
        )));
    }
    Ok(())
}

/// Mean of all n(n−1) off-diagonal weights.
pub fn mean_edge(net: &DirectedWeightedNetwork) -> f64 {
    let n = net.n() as f64;
    net.as_slice().iter().sum::<f64>() / (n * (n - 1.0))
}

fn mean_edge_from(s: &RowColSummaries) -> f64 {
    let n = s.out_sum.len() as f64;
    s.total() / (n * (n - 1.0))
}

/// Complete estimator η̂_{ℓ,n}: kernel mean over all pairs or triples minus
/// the squared edge mean.
pub fn complete_estimate(net: &DirectedWeightedNetwork, effect: EffectKind) -> Result<EffectEstimate> {
    net.require_nodes(3)?;
    Ok(complete_from_summaries(&net.summaries(), effect))
}

pub(crate) fn complete_from_summaries(s: &RowColSummaries, effect: EffectKind) -> EffectEstimate {
    let n = s.out_sum.len() as f64;
    let triples = n * (n - 1.0) * (n - 2.0) / 6.0;
    let pairs = n * (n - 1.0) / 2.0;
    let kernel_mean = match effect {
        EffectKind::Reciprocity => s.recip.iter().sum::<f64>() / 2.0 / pairs,
        EffectKind::SameSender => s.out_sum.iter().zip(&s.out_sq).map(|(r, q)| r * r - q).sum::<f64>() / 6.0 / triples,
        EffectKind::SameReceiver => s.in_sum.iter().zip(&s.in_sq).map(|(c, q)| c * c - q).sum::<f64>() / 6.0 / triples,
        EffectKind::SenderReceiver => {
            (0..s.out_sum.len())
                .map(|b| s.in_sum[b] * s.out_sum[b] - s.recip[b])
                .sum::<f64>()
                / 6.0
                / triples
        }
    };
    let mu = mean_edge_from(s);
    EffectEstimate {
        effect,
        value: kernel_mean - mu * mu,
        method: EstimateMethod::Complete,
    }
}

/// Draws round(n^λ) quadruples uniformly with replacement.
///
/// Each quadruple is drawn by rejection: four uniform indices, redrawn on
/// any collision.
pub fn sample_quadruples(n: usize, lambda: f64, seed: u64) -> Result<QuadrupleSample> {
    if n < 4 {
        return Err(Error::TooFewNodes { required: 4, actual: n });
    }
    check_lambda(lambda)?;
    let m = subsample_size(n, lambda);
    let mut rng = stream_rng(seed, stream::QUADRUPLES);
    let mut tuples = Vec::with_capacity(m);
    while tuples.len() < m {
        let q = [
            rng.random_range(0..n),
            rng.random_range(0..n),
            rng.random_range(0..n),
            rng.random_range(0..n),
        ];
        if q[0] != q[1] && q[0] != q[2] && q[0] != q[3] && q[1] != q[2] && q[1] != q[3] && q[2] != q[3] {
            tuples.push(q);
        }
    }
    Ok(QuadrupleSample {
        n,
        lambda,
        seed,
        tuples,
    })
}

/// Mean and (1/m-normalised) standard deviation of ψ over the sample.
pub fn reduced_estimate(
    net: &DirectedWeightedNetwork,
    effect: EffectKind,
    sample: &QuadrupleSample,
) -> Result<ReducedMoment> {
    net.require_nodes(4)?;
    if sample.n() != net.n() {
        return Err(Error::InvalidParameter(format!(
            "sample drawn for n = {} but network has n = {}",
            sample.n(),
            net.n()
        )));
    }
    let values = par::map_slice(sample.tuples(), |&q| psi(effect, &TupleView::new_unchecked(net, q)));
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
    Ok(ReducedMoment {
        effect,
        eta_hat_j: mean,
        sigma_hat_j: var.sqrt(),
        lambda: sample.lambda(),
        m: values.len(),
        seed: sample.seed(),
    })
}

/// ĝ₁,₁: per-node mean of h₁ over incident pairs, centred by the global
/// pair mean.
pub fn g11_hat(net: &DirectedWeightedNetwork) -> Vec<f64> {
    g11_from(&net.summaries())
}

fn g11_from(s: &RowColSummaries) -> Vec<f64> {
    let n = s.out_sum.len() as f64;
    let mu = mean_edge_from(s);
    s.out_sum
        .iter()
        .zip(&s.in_sum)
        .map(|(r, c)| (r + c) / (2.0 * (n - 1.0)) - mu)
        .collect()
}

/// ĝ₂,₁: as ĝ₁,₁ with the reciprocal product h₂.
pub fn g21_hat(net: &DirectedWeightedNetwork) -> Vec<f64> {
    g21_from(&net.summaries())
}

fn g21_from(s: &RowColSummaries) -> Vec<f64> {
    let n = s.out_sum.len() as f64;
    let global = s.recip.iter().sum::<f64>() / 2.0 / (n * (n - 1.0) / 2.0);
    s.recip.iter().map(|t| t / (n - 1.0) - global).collect()
}

/// ĝ₅,₁: per-node mean of h₅ over the triples containing the node, centred
/// by the global triple mean. O(n²).
pub fn g51_hat(net: &DirectedWeightedNetwork) -> Result<Vec<f64>> {
    net.require_nodes(3)?;
    Ok(g51_from(net, &net.summaries()))
}

fn g51_from(net: &DirectedWeightedNetwork, s: &RowColSummaries) -> Vec<f64> {
    let n = net.n();
    // out_path[i] = Σ_b e_ib r_b, in_path[i] = Σ_b e_bi c_b
    let mut out_path = vec![0.0; n];
    let mut in_path = vec![0.0; n];
    for b in 0..n {
        let row = net.row(b);
        let mut acc = 0.0;
        for (i, &w) in row.iter().enumerate() {
            acc += w * s.out_sum[i];
            in_path[i] += w * s.in_sum[b];
        }
        out_path[b] = acc;
    }
    let nf = n as f64;
    let per_node = (nf - 1.0) * (nf - 2.0) / 2.0;
    let triples = nf * (nf - 1.0) * (nf - 2.0) / 6.0;
    let global = (0..n).map(|b| s.in_sum[b] * s.out_sum[b] - s.recip[b]).sum::<f64>() / 6.0 / triples;
    (0..n)
        .map(|i| {
            // paths through i as middle, start and end node
            let middle = s.in_sum[i] * s.out_sum[i] - s.recip[i];
            let start = out_path[i] - s.recip[i];
            let end = in_path[i] - s.recip[i];
            (middle + start + end) / 6.0 / per_node - global
        })
        .collect()
}

/// ξ̂²_{ℓ,1}, the estimated variance of the first-order projection of η̂_{ℓ,n}.
/// Defined only for reciprocity and sender-receiver.
pub fn xi_squared_hat(net: &DirectedWeightedNetwork, effect: EffectKind) -> Result<f64> {
    net.require_nodes(3)?;
    let s = net.summaries();
    let mu = mean_edge_from(&s);
    let g11 = g11_from(&s);
    let (scale, g) = match effect {
        EffectKind::Reciprocity => (2.0, g21_from(&s)),
        EffectKind::SenderReceiver => (3.0, g51_from(net, &s)),
        other => return Err(Error::UnsupportedEffect(other)),
    };
    let n = net.n() as f64;
    Ok(g.iter()
        .zip(&g11)
        .map(|(gl, g1)| {
            let v = scale * gl - 4.0 * mu * g1;
            v * v
        })
        .sum::<f64>()
        / n)
}
