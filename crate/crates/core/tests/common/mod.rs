//! Brute-force oracles shared by the integration tests. Everything here is
//! written straight from the definitions, without the row/column summaries
//! or the unordered-sum expansions used by the library.
#![allow(dead_code)]

use netfx::{DirectedWeightedNetwork, EffectKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random network with a mix of continuous and integer weights.
pub fn random_network(n: usize, seed: u64) -> DirectedWeightedNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let integer = seed.is_multiple_of(2);
    DirectedWeightedNetwork::from_fn(n, |_, _| {
        if integer {
            rng.random_range(-3i32..=6) as f64
        } else {
            rng.random_range(-2.0..3.0)
        }
    })
    .unwrap()
}

pub fn naive_mean_edge(net: &DirectedWeightedNetwork) -> f64 {
    let n = net.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += net.weight(i, j);
            }
        }
    }
    acc / (n * (n - 1)) as f64
}

/// Complete estimator from the covariance definition: mean product over
/// every ordered edge pair of the effect's shape, minus the squared mean.
pub fn naive_complete(net: &DirectedWeightedNetwork, effect: EffectKind) -> f64 {
    let n = net.n();
    let e = |a: usize, b: usize| net.weight(a, b);
    let mut acc = 0.0;
    let mut count = 0usize;
    if effect == EffectKind::Reciprocity {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += e(i, j) * e(j, i);
                    count += 1;
                }
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    acc += match effect {
                        EffectKind::SameSender => e(i, j) * e(i, k),
                        EffectKind::SameReceiver => e(j, i) * e(k, i),
                        EffectKind::SenderReceiver => e(i, j) * e(j, k),
                        EffectKind::Reciprocity => unreachable!(),
                    };
                    count += 1;
                }
            }
        }
    }
    let mu = naive_mean_edge(net);
    acc / count as f64 - mu * mu
}

fn permutations3(t: [usize; 3]) -> [[usize; 3]; 6] {
    let [a, b, c] = t;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

/// h₅ by enumerating the six orderings.
pub fn naive_h5(net: &DirectedWeightedNetwork, t: [usize; 3]) -> f64 {
    permutations3(t)
        .iter()
        .map(|&[a, b, c]| net.weight(a, b) * net.weight(b, c))
        .sum::<f64>()
        / 6.0
}

/// ĝ₅,₁ by enumerating all triples containing each node.
pub fn naive_g51(net: &DirectedWeightedNetwork) -> Vec<f64> {
    let n = net.n();
    let mut total = 0.0;
    let mut per = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let h = naive_h5(net, [i, j, k]);
                total += h;
                per[i] += h;
                per[j] += h;
                per[k] += h;
            }
        }
    }
    let nf = n as f64;
    let global = total / (nf * (nf - 1.0) * (nf - 2.0) / 6.0);
    per.iter()
        .map(|p| p / ((nf - 1.0) * (nf - 2.0) / 2.0) - global)
        .collect()
}

/// Local effects as [reciprocity, same-sender, same-receiver, sender-receiver]
/// per node, by direct double loops.
pub fn naive_local(net: &DirectedWeightedNetwork) -> Vec<[f64; 4]> {
    let n = net.n();
    let mu = naive_mean_edge(net);
    let d = |a: usize, b: usize| net.weight(a, b) - mu;
    (0..n)
        .map(|i| {
            let mut rec = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                rec += d(i, j) * d(j, i);
            }
            let (mut ss, mut sr, mut rs) = (0.0, 0.0, 0.0);
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != i && k != j) {
                    ss += d(i, j) * d(i, k);
                    sr += d(j, i) * d(k, i);
                    rs += d(j, i) * d(i, k);
                }
            }
            let pairs = ((n - 1) * (n - 2)) as f64;
            [rec / (n - 1) as f64, ss / pairs, sr / pairs, rs / pairs]
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-3)
}

/// Kolmogorov–Smirnov distance between a sample and the standard normal.
pub fn ks_to_normal(sample: &[f64]) -> f64 {
    let mut xs: Vec<f64> = sample.iter().copied().filter(|x| x.is_finite()).collect();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = netfx::normal::cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}
