//! Acceptance suite. Runs every criterion in order, prints one line each and
//! exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{ks_to_normal, naive_complete, naive_g51, naive_local, random_network, rel_close};
use netfx::{
    complete_estimate, diagnose_degeneracy, g11_hat, g21_hat, g51_hat, generate, local_effects, monte_carlo, psi,
    reduced_test, xi_squared_hat, DirectedWeightedNetwork, EffectKind, GeneratorSpec, LatentConfig, QuadrupleSample,
    Setting, SimulationSpec, TupleView, Verdict,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn small_networks(count: u64, offset: u64) -> impl Iterator<Item = DirectedWeightedNetwork> {
    (0..count).map(move |k| random_network(5 + (k % 5) as usize, offset + k))
}

fn psi_identity() -> Outcome {
    let (worst, elapsed) = timed(|| {
        let mut worst = 0.0f64;
        for net in small_networks(50, 1000) {
            let all = QuadrupleSample::all(net.n()).unwrap();
            for effect in EffectKind::ALL {
                let mean = all
                    .tuples()
                    .iter()
                    .map(|&q| psi(effect, &TupleView::new(&net, q).unwrap()))
                    .sum::<f64>()
                    / all.len() as f64;
                let exact = complete_estimate(&net, effect).unwrap().value;
                worst = worst.max((mean - exact).abs() / mean.abs().max(exact.abs()).max(1e-3));
            }
        }
        worst
    });
    Outcome::new(
        worst <= 1e-9 && elapsed < Duration::from_secs(5),
        format!("max rel err {worst:.2e}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn closed_form_vs_brute_force() -> Outcome {
    let (ok, elapsed) = timed(|| {
        let mut ok = true;
        for net in small_networks(50, 2000) {
            for effect in EffectKind::ALL {
                ok &= rel_close(
                    complete_estimate(&net, effect).unwrap().value,
                    naive_complete(&net, effect),
                    1e-10,
                );
            }
            for (a, b) in g51_hat(&net).unwrap().iter().zip(naive_g51(&net)) {
                ok &= rel_close(*a, b, 1e-10);
            }
            let fast = local_effects(&net).unwrap();
            for (f, s) in fast.nodes.iter().zip(naive_local(&net)) {
                let got = [f.reciprocity, f.same_sender, f.same_receiver, f.sender_receiver];
                ok &= got.iter().zip(s).all(|(a, b)| rel_close(*a, b, 1e-10));
            }
        }
        ok
    });
    Outcome::new(
        ok && elapsed < Duration::from_secs(5),
        format!(
            "{}, {:.2}s",
            if ok { "all match" } else { "mismatch" },
            elapsed.as_secs_f64()
        ),
    )
}

fn rate(setting: Setting, n: usize, c2: f64, null: bool, lambda: f64, reps: usize, seed: u64) -> f64 {
    let mut spec = SimulationSpec::new(setting, LatentConfig::Normal, n, c2, null, reps);
    spec.lambda = lambda;
    spec.master_seed = seed;
    monte_carlo(&spec).unwrap().rejection_rate
}

fn type_one_error() -> Outcome {
    let (rates, elapsed) = timed(|| {
        [(Setting::A, 0.048), (Setting::B, 0.050), (Setting::C, 0.047)]
            .map(|(s, target)| (s, target, rate(s, 100, 1.0, true, 1.0, 1000, 31)))
    });
    let pass = rates.iter().all(|(_, t, r)| (r - t).abs() <= 0.02) && elapsed < Duration::from_secs(600);
    let detail = rates
        .iter()
        .map(|(s, t, r)| format!("({s}) {r:.3} vs {t}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(pass, format!("{detail}, {:.1}s", elapsed.as_secs_f64()))
}

fn power() -> Outcome {
    let b = rate(Setting::B, 100, 0.2, false, 1.0, 1000, 41);
    let a = rate(Setting::A, 100, 1.0, false, 1.0, 1000, 42);
    let c = rate(Setting::C, 100, 0.5, false, 1.0, 1000, 43);
    Outcome::new(
        (b - 0.953).abs() <= 0.03 && a >= 0.97 && c >= 0.99,
        format!("(b) {b:.3} vs 0.953, (a) {a:.3} >= 0.97, (c) {c:.3} >= 0.99"),
    )
}

fn lambda_tradeoff() -> Outcome {
    let targets = [(1.0, 0.144), (1.2, 0.232), (1.6, 0.727)];
    let rates: Vec<f64> = targets
        .iter()
        .map(|&(lambda, _)| rate(Setting::B, 50, 0.05, false, lambda, 1000, 51))
        .collect();
    let close = targets.iter().zip(&rates).all(|((_, t), r)| (r - t).abs() <= 0.04);
    let monotone = rates.windows(2).all(|w| w[0] < w[1]);
    let detail = targets
        .iter()
        .zip(&rates)
        .map(|((l, t), r)| format!("λ={l}: {r:.3} vs {t}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(close && monotone, detail)
}

fn null_normality() -> Outcome {
    let mut spec = SimulationSpec::new(Setting::B, LatentConfig::Normal, 100, 1.0, true, 2000);
    spec.master_seed = 61;
    let stats = monte_carlo(&spec).unwrap().statistics;
    let d = ks_to_normal(&stats);
    Outcome::new(d < 0.06, format!("KS {d:.4} over {} statistics", stats.len()))
}

fn degeneracy_diagnosis() -> Outcome {
    let cases = [
        (Setting::Example41i, Verdict::Degenerate),
        (Setting::Example41ii, Verdict::NonDegenerate),
        (Setting::Example51i, Verdict::Degenerate),
        (Setting::Example51ii, Verdict::NonDegenerate),
    ];
    let shares: Vec<f64> = cases
        .iter()
        .map(|&(setting, expected)| {
            let spec = GeneratorSpec {
                setting,
                config: LatentConfig::Normal,
                n: 200,
                c_squared: 0.0,
                null_case: false,
            };
            let hits = (0..200u64)
                .filter(|&r| {
                    let net = generate(&spec, netfx::rng::replicate_seed(71, r)).unwrap();
                    diagnose_degeneracy(&net, setting.default_effect(), 1.0)
                        .unwrap()
                        .verdict
                        == expected
                })
                .count();
            hits as f64 / 200.0
        })
        .collect();
    let detail = cases
        .iter()
        .zip(&shares)
        .map(|((s, _), p)| format!("{s}: {p:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome::new(shares.iter().all(|&p| p >= 0.95), detail)
}

fn consistency() -> Outcome {
    let spec = GeneratorSpec {
        setting: Setting::B,
        config: LatentConfig::Normal,
        n: 400,
        c_squared: 1.0,
        null_case: false,
    };
    let mean = (0..100u64)
        .map(|r| {
            let net = generate(&spec, netfx::rng::replicate_seed(81, r)).unwrap();
            complete_estimate(&net, EffectKind::SameSender).unwrap().value
        })
        .sum::<f64>()
        / 100.0;
    Outcome::new((mean - 1.0).abs() <= 0.05, format!("mean η̂₃ {mean:.4} vs 1"))
}

fn uniform_network(n: usize, seed: u64) -> DirectedWeightedNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DirectedWeightedNetwork::from_fn(n, |_, _| rng.random::<f64>()).unwrap()
}

fn performance() -> Outcome {
    let net = uniform_network(5000, 91);
    let (_, complete) = timed(|| {
        for effect in EffectKind::ALL {
            std::hint::black_box(complete_estimate(&net, effect).unwrap());
        }
        std::hint::black_box(xi_squared_hat(&net, EffectKind::Reciprocity).unwrap());
        std::hint::black_box(xi_squared_hat(&net, EffectKind::SenderReceiver).unwrap());
    });
    drop(net);
    let net = uniform_network(10_000, 92);
    let (report, reduced) = timed(|| reduced_test(&net, EffectKind::SameSender, 0.05, 1.2, 7).unwrap());
    Outcome::new(
        complete < Duration::from_secs(5) && reduced < Duration::from_secs(2),
        format!(
            "n=5000 complete+diagnostics {:.2}s, n=10^4 reduced (m={}) {:.2}s",
            complete.as_secs_f64(),
            report.subsample_size.unwrap_or(0),
            reduced.as_secs_f64()
        ),
    )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut failures = Vec::new();
    for case in 0..200u64 {
        let n = rng.random_range(5..=14);
        let net = random_network(n, 5000 + case);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let moved = net.permuted(&perm).unwrap();
        let t = net.transpose();
        let value = |g: &DirectedWeightedNetwork, e| complete_estimate(g, e).unwrap().value;

        if !EffectKind::ALL.iter().all(|&e| close(value(&net, e), value(&moved, e)))
            || ![EffectKind::Reciprocity, EffectKind::SenderReceiver]
                .iter()
                .all(|&e| close(xi_squared_hat(&net, e).unwrap(), xi_squared_hat(&moved, e).unwrap()))
        {
            failures.push("relabeling");
        }
        if !(close(value(&t, EffectKind::SameSender), value(&net, EffectKind::SameReceiver))
            && close(value(&t, EffectKind::Reciprocity), value(&net, EffectKind::Reciprocity))
            && close(
                value(&t, EffectKind::SenderReceiver),
                value(&net, EffectKind::SenderReceiver),
            ))
        {
            failures.push("transpose");
        }

        let seed = rng.random::<u64>();
        let k = rng.random_range(0.1..10.0);
        let scaled = net.scaled(k).unwrap();
        for e in EffectKind::ALL {
            let (a, b) = match (
                reduced_test(&net, e, 0.05, 1.5, seed),
                reduced_test(&scaled, e, 0.05, 1.5, seed),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if !rel_close(a.statistic, b.statistic, 1e-8) {
                failures.push("scale invariance");
            }
            if reduced_test(&net, e, 0.05, 1.5, seed).ok() != Some(a) {
                failures.push("determinism");
            }
        }

        let scale = 1.0 + net.as_slice().iter().map(|w| w * w).sum::<f64>();
        if ![g11_hat(&net), g21_hat(&net), g51_hat(&net).unwrap()]
            .iter()
            .all(|g| g.iter().sum::<f64>().abs() <= 1e-9 * scale)
        {
            failures.push("centering");
        }
    }
    failures.dedup();
    Outcome::new(
        failures.is_empty(),
        if failures.is_empty() {
            "200 random networks".to_string()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("psi-average identity", psi_identity),
        ("closed form vs brute force", closed_form_vs_brute_force),
        ("type-I error, n=100", type_one_error),
        ("power, n=100", power),
        ("lambda trade-off, n=50", lambda_tradeoff),
        ("null normality", null_normality),
        ("degeneracy diagnosis", degeneracy_diagnosis),
        ("consistency, n=400", consistency),
        ("performance", performance),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        failed += usize::from(!outcome.pass);
        println!(
            "[{}] {:>2} {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            k + 1,
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
