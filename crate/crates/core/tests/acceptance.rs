//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p submax --test acceptance`. Exits non-zero when any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use submax::matroid::independent_sets;
use submax::*;

const EPS: f64 = 0.05;
const TOL: f64 = 1e-9;

/// One algorithm run kept for the replay check.
struct Run {
    inst: InstanceFile,
    algorithm: Algorithm,
    config: RunConfig,
    record: RunRecord,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run_all(corpus: &[InstanceFile], algorithm: Algorithm, config: RunConfig) -> Vec<Run> {
    corpus
        .par_iter()
        .map(|inst| {
            let record = run_one(inst, algorithm, &config)
                .unwrap_or_else(|e| panic!("{algorithm} on {}: {e}", inst.metadata.name));
            Run {
                inst: inst.clone(),
                algorithm,
                config,
                record,
            }
        })
        .collect()
}

fn opt(inst: &InstanceFile) -> f64 {
    let f = inst.oracle().unwrap();
    brute_force_opt(&f, &inst.feasibility().unwrap())
        .unwrap()
        .map_or(0.0, |(_, v)| v)
}

fn k_of(inst: &InstanceFile) -> usize {
    match &inst.constraints {
        Constraints::Matroids { matroids } => matroids.len(),
        Constraints::Knapsacks { capacities, .. } => capacities.len(),
        _ => 1,
    }
}

/// Ratio checks for every run; returns (passes, worst ratio minus threshold).
fn ratios(runs: &[Run], threshold: impl Fn(&InstanceFile) -> f64 + Sync) -> (usize, f64) {
    let reports: Vec<RatioReport> = runs
        .par_iter()
        .map(|r| {
            RatioReport::new(r.record.value, opt(&r.inst), threshold(&r.inst), TOL)
                .with_origin(r.record.fingerprint.clone(), r.record.seed)
        })
        .collect();
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("ratio failure: {}", serde_json::to_string(r).unwrap());
    }
    let margin = reports
        .iter()
        .map(|r| r.ratio - r.threshold)
        .fold(f64::INFINITY, f64::min);
    (reports.iter().filter(|r| r.pass).count(), margin)
}

fn random_corpus(
    count: usize,
    seed0: u64,
    constraint: RandomConstraint,
    pick: impl Fn(usize) -> (RandomFunction, usize, usize),
) -> Vec<InstanceFile> {
    (0..count)
        .map(|i| {
            let (function, n, k) = pick(i);
            gen_random(&RandomSpec::new(function, constraint, n, k, seed0 + i as u64)).unwrap()
        })
        .collect()
}

fn criterion_1(runs: &mut Vec<Run>) -> Outcome {
    let start = Instant::now();
    let kinds = [
        RandomFunction::CutUndirected,
        RandomFunction::CutDirected,
        RandomFunction::Coverage,
        RandomFunction::Facility,
    ];
    let corpus = random_corpus(240, 1000, RandomConstraint::Mixed, |i| {
        (kinds[i % 4], 6 + i % 7, 1 + (i / 7) % 2)
    });
    let config = RunConfig {
        epsilon: EPS,
        ..RunConfig::default()
    };
    let mut done = run_all(&corpus, Algorithm::AlgorithmA, config);
    let (pass, margin) = ratios(&done, |inst| {
        let k = k_of(inst) as f64;
        k / ((1.0 + EPS) * (k + 1.0).powi(2))
    });
    let secs = start.elapsed().as_secs_f64();
    runs.append(&mut done);
    outcome(
        pass == corpus.len() && secs < 300.0,
        format!(
            "{pass}/{} instances meet k/((1+e)(k+1)^2), worst margin {margin:.4}, {secs:.1}s",
            corpus.len()
        ),
    )
}

fn criterion_2(runs: &[Run]) -> Outcome {
    let mut outputs = 0;
    let mut failed = 0;
    let mut checked = 0;
    for r in runs.iter().filter(|r| r.algorithm == Algorithm::AlgorithmA) {
        let k = k_of(&r.inst);
        let certs = &r.record.certificates;
        if certs.len() != k + 1 {
            failed += 1;
        }
        for c in certs {
            outputs += 1;
            checked += c.certificate.checked;
            if !c.certificate.pass {
                failed += 1;
                eprintln!(
                    "certificate failure: {} {}",
                    r.record.instance,
                    serde_json::to_string(c).unwrap()
                );
            }
        }
    }
    outcome(
        failed == 0 && outputs > 0,
        format!("{outputs} local optima certified, {checked} comparison sets, {failed} failures"),
    )
}

fn criterion_3(runs: &mut Vec<Run>) -> Outcome {
    let corpus = random_corpus(100, 3000, RandomConstraint::Mixed, |i| {
        (RandomFunction::CutUndirected, 6 + i % 7, 1 + i % 2)
    });
    let mut done = run_all(
        &corpus,
        Algorithm::Symmetric,
        RunConfig {
            epsilon: EPS,
            ..RunConfig::default()
        },
    );
    let (pass, margin) = ratios(&done, |inst| 1.0 / ((1.0 + EPS) * (k_of(inst) as f64 + 2.0)));
    runs.append(&mut done);
    outcome(
        pass == corpus.len(),
        format!(
            "{pass}/{} undirected cuts meet 1/((1+e)(k+2)), worst margin {margin:.4}",
            corpus.len()
        ),
    )
}

fn criterion_4(runs: &mut Vec<Run>) -> Outcome {
    let k = 2.0;
    let mut total = 0;
    let mut pass = 0;
    let mut certs = 0;
    let mut cert_fail = 0;
    let mut margin = f64::INFINITY;
    for p in [2usize, 3] {
        let config = RunConfig {
            epsilon: EPS,
            p: Some(p),
            ..RunConfig::default()
        };
        let monotone = random_corpus(25, 4000 + 100 * p as u64, RandomConstraint::Partition, |i| {
            (RandomFunction::Coverage, 6 + i % 5, 2)
        });
        let general = random_corpus(25, 4500 + 100 * p as u64, RandomConstraint::Partition, |i| {
            (
                [
                    RandomFunction::CutUndirected,
                    RandomFunction::CutDirected,
                    RandomFunction::Facility,
                ][i % 3],
                6 + i % 5,
                2,
            )
        });
        let pf = p as f64;
        let mut a = run_all(&monotone, Algorithm::PartitionMonotone, config);
        let (ok, m) = ratios(&a, |_| (1.0 - 1.0 / pf) / k);
        (pass, margin) = (pass + ok, margin.min(m));
        let mut b = run_all(&general, Algorithm::Partition, config);
        let (ok, m) = ratios(&b, |_| (k - 1.0) / ((1.0 + 1.0 / (pf - 1.0)) * k * k));
        (pass, margin) = (pass + ok, margin.min(m));
        total += a.len() + b.len();
        for r in a.iter().chain(&b) {
            certs += r.record.certificates.len();
            cert_fail += r.record.certificates.iter().filter(|c| !c.certificate.pass).count();
            if r.record.certificates.is_empty() {
                cert_fail += 1;
            }
        }
        runs.append(&mut a);
        runs.append(&mut b);
    }
    outcome(
        pass == total && cert_fail == 0,
        format!("{pass}/{total} runs meet their bound (worst margin {margin:.4}), {certs} partition certificates, {cert_fail} failures"),
    )
}

fn criterion_5(runs: &mut Vec<Run>) -> Outcome {
    let mut ok = true;
    let mut seen = Vec::new();
    for (k, p) in [(1, 2), (2, 2), (2, 5)] {
        let inst = gen_greedy_tight(k, p).unwrap();
        let mut done = run_all(std::slice::from_ref(&inst), Algorithm::Greedy, RunConfig::default());
        let greedy = done[0].record.value;
        let best = opt(&inst);
        ok &= greedy == (p + 1) as f64 && best == (p * (k + 1) + 1) as f64;
        seen.push(format!("(k={k},p={p}): greedy {greedy}, opt {best}"));
        runs.append(&mut done);
    }
    outcome(ok, seen.join("; "))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> FractionalPoint {
    FractionalPoint::new((0..n).map(|_| rng.random_range(0.0..=1.0)).collect()).unwrap()
}

fn criterion_6() -> Outcome {
    let kinds = [
        RandomFunction::CutUndirected,
        RandomFunction::CutDirected,
        RandomFunction::Coverage,
        RandomFunction::Facility,
        RandomFunction::Modular,
    ];

    // F agrees with f on indicators
    let mut indicator_ok = true;
    for (i, &kind) in kinds.iter().enumerate() {
        for n in [1, 5, 9, 12] {
            let f = gen_random(&RandomSpec::new(kind, RandomConstraint::Uniform, n, 1, 6000 + i as u64))
                .unwrap()
                .oracle()
                .unwrap();
            for s in (0..1u64 << n).map(ElementSet::from_bits) {
                indicator_ok &= eval_exact(&f, &FractionalPoint::indicator(n, s)).unwrap() == f.compute(s).unwrap();
            }
        }
    }

    // second differences
    let n = 8;
    let mut worst: f64 = f64::NEG_INFINITY;
    for inst_id in 0..20u64 {
        let f = gen_random(&RandomSpec::new(
            kinds[inst_id as usize % 5],
            RandomConstraint::Uniform,
            n,
            1,
            6100 + inst_id,
        ))
        .unwrap()
        .oracle()
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6200 + inst_id);
        for _ in 0..500 {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let d: f64 = rng.random_range(1e-3..=0.5);
            let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
            y[i] = rng.random_range(0.0..=1.0 - d);
            y[j] = rng.random_range(0.0..=1.0 - d);
            let at = |di: f64, dj: f64| {
                let mut z = y.clone();
                z[i] += di;
                z[j] += dj;
                eval_exact(&f, &FractionalPoint::new(z).unwrap()).unwrap()
            };
            worst = worst.max(at(d, d) - at(d, 0.0) - at(0.0, d) + at(0.0, 0.0));
        }
    }

    // lifted functions stay submodular
    let mut lifted = 0;
    let mut lift_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(6300);
    for t in 0..24usize {
        let n = 2 + t % 5;
        let f = gen_random(&RandomSpec::new(
            kinds[t % 5],
            RandomConstraint::Uniform,
            n,
            1,
            6400 + t as u64,
        ))
        .unwrap()
        .oracle()
        .unwrap();
        let mut mult: Vec<u32> = (0..n).map(|_| rng.random_range(1..=4)).collect();
        while mult.iter().sum::<u32>() > 12 {
            let i = mult.iter().position(|&m| m > 1).unwrap();
            mult[i] -= 1;
        }
        let g = lift_scaled(&f, &mult).unwrap();
        lift_ok &= validate_submodular(g.oracle()).unwrap().submodular;
        lifted += 1;
    }

    // Monte Carlo grand mean
    let f = gen_random(&RandomSpec::new(
        RandomFunction::Coverage,
        RandomConstraint::Uniform,
        10,
        1,
        6500,
    ))
    .unwrap()
    .oracle()
    .unwrap();
    let y = random_point(&mut ChaCha8Rng::seed_from_u64(6501), 10);
    let exact = eval_exact(&f, &y).unwrap();
    let estimates: Vec<McEstimate> = (0..200).map(|seed| eval_mc(&f, &y, 1000, seed).unwrap()).collect();
    let grand = estimates.iter().map(|e| e.mean).sum::<f64>() / 200.0;
    let pooled = estimates.iter().map(|e| e.stderr.powi(2)).sum::<f64>().sqrt() / 200.0;
    let z = (grand - exact).abs() / pooled;

    outcome(
        indicator_ok && worst <= 1e-9 && lift_ok && z <= 4.0,
        format!(
            "indicators exact: {indicator_ok}; max second difference {worst:.2e} over 10000 probes; \
             {lifted} lifts submodular: {lift_ok}; MC grand mean off by {z:.2} pooled stderr"
        ),
    )
}

fn knapsack_corpus(count: usize, seed0: u64, sizes: &[usize]) -> Vec<InstanceFile> {
    let kinds = [
        RandomFunction::CutUndirected,
        RandomFunction::Coverage,
        RandomFunction::Facility,
        RandomFunction::Modular,
        RandomFunction::CutDirected,
    ];
    random_corpus(count, seed0, RandomConstraint::Knapsack, |i| {
        (kinds[i % 5], sizes[i % sizes.len()], 1 + i % 2)
    })
}

fn criterion_7() -> Outcome {
    let corpus = knapsack_corpus(50, 7000, &[3, 4, 5, 6]);
    let cfg = FracSearchConfig {
        zeta: Some(0.1),
        ..FracSearchConfig::default()
    };
    let results: Vec<(bool, bool, f64, usize)> = corpus
        .par_iter()
        .map(|inst| {
            let f = inst.oracle().unwrap();
            let ks = inst.knapsacks().unwrap();
            let sol = solve_fractional(&f, &ks, &cfg).unwrap();
            let mut certified = true;
            let mut checked = 0;
            for run in [&sol.first, &sol.second] {
                let c = certify_fractional_lemma(&f, &run.point, &ks, run.epsilon, &[]).unwrap();
                if !c.pass {
                    eprintln!("fractional certificate failure on {}: {c:?}", inst.metadata.name);
                }
                certified &= c.pass;
                checked += c.checked;
            }
            let best = opt(inst);
            let ratio = if best > 0.0 { sol.value / best } else { 1.0 };
            (certified, sol.value >= (0.25 - 0.15) * best - TOL, ratio, checked)
        })
        .collect();
    let certified = results.iter().filter(|r| r.0).count();
    let bounded = results.iter().filter(|r| r.1).count();
    let worst = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let checked: usize = results.iter().map(|r| r.3).sum();
    outcome(
        certified == corpus.len() && bounded == corpus.len(),
        format!(
            "{certified}/{} certified over {checked} integral points; {bounded}/{} with F >= 0.1 OPT (worst ratio {worst:.3})",
            corpus.len(),
            corpus.len()
        ),
    )
}

/// Light-only system: `n` elements with weights in `[δ/2, δ)` per knapsack
/// and a uniform point scaled so the heaviest knapsack is exactly full.
fn light_system(rng: &mut ChaCha8Rng, n: usize, k: usize, delta: f64) -> (KnapsackSystem, FractionalPoint) {
    let weights: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.random_range(delta / 2.0..delta)).collect())
        .collect();
    let heaviest = weights.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let x = FractionalPoint::new(vec![(1.0 / heaviest).min(1.0); n]).unwrap();
    (KnapsackSystem::new(weights).unwrap(), x)
}

fn criterion_8(runs: &mut Vec<Run>) -> Outcome {
    // feasibility of the full algorithm over 10^4 seeded trials
    let corpus = knapsack_corpus(50, 8000, &[4, 5, 6, 7, 8]);
    let configs: Vec<RunConfig> = (0..200)
        .map(|seed| RunConfig {
            zeta: Some(0.1),
            delta: Some(0.3),
            trials: 1,
            seed,
            ..RunConfig::default()
        })
        .collect();
    let mut done: Vec<Run> = corpus
        .par_iter()
        .flat_map_iter(|inst| configs.iter().map(move |&c| (inst, c)))
        .map(|(inst, config)| {
            let record = run_one(inst, Algorithm::Knapsack, &config).unwrap();
            Run {
                inst: inst.clone(),
                algorithm: Algorithm::Knapsack,
                config,
                record,
            }
        })
        .collect();
    let feasible = done
        .iter()
        .filter(|r| r.inst.knapsacks().unwrap().is_feasible(r.record.solution))
        .count();
    let light = done
        .iter()
        .filter(|r| r.record.notes.last().is_some_and(|s| s == "light"))
        .count();
    let trials = done.len();
    runs.append(&mut done);

    // overflow concentration on light-only systems
    let mut conc_ok = true;
    let mut freqs = Vec::new();
    for (k, eta, n) in [(1usize, 8.0, 48usize), (2, 16.0, 64)] {
        let cfg = FracSearchConfig {
            eta,
            ..FracSearchConfig::default()
        };
        let (c, delta, eps) = (cfg.c(), cfg.delta_heavy(k), cfg.eps_round(k));
        for rep in 0..3u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(8100 + 10 * k as u64 + rep);
            let (ks, x) = light_system(&mut rng, n, k, delta);
            assert!(classify_heavy_light(&ks, delta).unwrap().0.is_empty());
            let f = build_modular(vec![1.0; n]).unwrap();
            let report = randomized_round(&f, &x, &ks, eps, 10_000, 8200 + rep).unwrap();
            let mut prev = f64::INFINITY;
            for a in [1.0, 2.0] {
                let freq = report.overflow_frequency(a);
                let bound = k as f64 * (-c * a * (k * k) as f64).exp();
                let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / 10_000.0).sqrt();
                conc_ok &= freq <= bound + 3.0 * sigma && freq <= prev;
                prev = freq;
                freqs.push(format!("{freq:.4}<={bound:.4}"));
            }
        }
    }

    // mean single draw against F(x) on desk instances whose weights are all below 0.1
    let kinds = [
        RandomFunction::CutUndirected,
        RandomFunction::Coverage,
        RandomFunction::Facility,
        RandomFunction::Modular,
        RandomFunction::CutDirected,
    ];
    let means: Vec<(f64, f64)> = (0..20u64)
        .into_par_iter()
        .map(|i| {
            let n = 10 + (i % 3) as usize;
            let k = 1 + (i % 2) as usize;
            let f = gen_random(&RandomSpec::new(
                kinds[i as usize % 5],
                RandomConstraint::Uniform,
                n,
                1,
                8300 + i,
            ))
            .unwrap()
            .oracle()
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(8350 + i);
            let weights = (0..k)
                .map(|_| (0..n).map(|_| rng.random_range(0.02..0.1)).collect())
                .collect();
            let ks = KnapsackSystem::new(weights).unwrap();
            assert!(classify_heavy_light(&ks, 0.1).unwrap().0.is_empty());
            let cfg = FracSearchConfig {
                zeta: Some(0.1),
                ..FracSearchConfig::default()
            };
            let sol = solve_fractional(&f, &ks, &cfg).unwrap();
            let fx = eval_exact(&f, &sol.point).unwrap();
            let report = randomized_round(&f, &sol.point, &ks, 0.1, 1000, 8400).unwrap();
            (report.mean_value(), fx)
        })
        .collect();
    let mean_ok = means.iter().all(|&(m, fx)| m >= 0.5 * fx - TOL);
    let worst = means
        .iter()
        .map(|&(m, fx)| if fx > 0.0 { m / fx } else { 1.0 })
        .fold(f64::INFINITY, f64::min);

    outcome(
        feasible == trials && trials >= 10_000 && conc_ok && mean_ok,
        format!(
            "{feasible}/{trials} outputs feasible ({light} from rounding); overflow {}; mean draw >= 0.5 F(x) on {}/{} (worst {worst:.3})",
            freqs.join(" "),
            means.iter().filter(|&&(m, fx)| m >= 0.5 * fx - TOL).count(),
            means.len()
        ),
    )
}

fn criterion_9(runs: &mut Vec<Run>) -> Outcome {
    let config = RunConfig {
        epsilon: EPS,
        ..RunConfig::default()
    };
    let third = 1.0 / 3.0 / (1.0 + EPS) - 0.02;
    let sixth = 1.0 / 6.0 / (1.0 + EPS) - 0.02;

    let symmetric = random_corpus(50, 9000, RandomConstraint::Base, |i| {
        (RandomFunction::CutUndirected, 6 + i % 7, 1)
    });
    let mut swap = run_all(&symmetric, Algorithm::SwapBase, config);
    let (swap_pass, swap_margin) = ratios(&swap, |_| third);

    let kinds = [
        RandomFunction::CutDirected,
        RandomFunction::Coverage,
        RandomFunction::Facility,
        RandomFunction::CutUndirected,
        RandomFunction::Modular,
    ];
    let mut two_corpus = random_corpus(50, 9100, RandomConstraint::Base, |i| (kinds[i % 5], 4 + i % 9, 1));
    let counter = gen_base_counterexample(3, 5).unwrap();
    two_corpus.push(counter.clone());
    let mut two = run_all(&two_corpus, Algorithm::TwoBase, config);
    let (two_pass, two_margin) = ratios(&two, |_| sixth);

    // V is a swap local optimum with ratio 1/5
    let f = counter.oracle().unwrap();
    let bc = BaseConstraint::new(counter.matroids().unwrap().remove(0));
    let v = ElementSet::from_ids(3..6);
    let from_v = swap_base_search_from(&f, &bc, v, &config.search()).unwrap();
    let v_ratio = from_v.value / opt(&counter);
    let v_ok = from_v.moves.is_empty() && from_v.solution == v && v_ratio < 0.25;

    let mut card = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        for n in [4, 7, 10] {
            let base = gen_random(&RandomSpec::new(
                *kind,
                RandomConstraint::Cardinality,
                n,
                1,
                9200 + 10 * i as u64 + n as u64,
            ))
            .unwrap();
            for c in 0..=n {
                let mut inst = InstanceFile::new(
                    n,
                    base.function.clone(),
                    Constraints::Cardinality { c },
                    format!("{}-c{c}", base.metadata.name),
                )
                .unwrap();
                inst.metadata.seed = base.metadata.seed;
                card.push(inst);
            }
        }
    }
    let mut exact = run_all(&card, Algorithm::ExactCardinality, config);
    let (card_pass, card_margin) = ratios(&exact, |_| sixth);

    let ok = swap_pass == swap.len() && two_pass == two.len() && v_ok && card_pass == exact.len();
    let detail = format!(
        "swap {swap_pass}/{} (margin {swap_margin:.3}); two-base {two_pass}/{} (margin {two_margin:.3}); \
         V swap-optimal: {} at ratio {v_ratio:.3}; exact cardinality {card_pass}/{} (margin {card_margin:.3})",
        swap.len(),
        two.len(),
        from_v.moves.is_empty(),
        exact.len()
    );
    runs.append(&mut swap);
    runs.append(&mut two);
    runs.append(&mut exact);
    outcome(ok, detail)
}

fn random_matroid(rng: &mut ChaCha8Rng, kind: usize) -> MatroidOracle {
    let n = rng.random_range(4..=10);
    let graphic = |rng: &mut ChaCha8Rng, n: usize| {
        let vertices = rng.random_range(2..=6);
        let edges = (0..n)
            .map(|_| (rng.random_range(0..vertices), rng.random_range(0..vertices)))
            .collect();
        MatroidOracle::graphic(vertices, edges).unwrap()
    };
    match kind {
        0 => MatroidOracle::uniform(n, rng.random_range(0..=n)).unwrap(),
        1 => {
            let parts = rng.random_range(1..=4);
            let part_of = (0..n).map(|_| rng.random_range(0..parts)).collect();
            MatroidOracle::partition(part_of, (0..parts).map(|_| rng.random_range(0..=3)).collect()).unwrap()
        }
        2 => graphic(rng, n),
        _ => {
            let n = n.min(7);
            let g = graphic(rng, n);
            MatroidOracle::explicit(n, independent_sets(&g).collect()).unwrap()
        }
    }
}

/// A random independent set, maximal when `maximal`.
fn random_independent(rng: &mut ChaCha8Rng, m: &MatroidOracle, maximal: bool) -> ElementSet {
    let mut order: Vec<usize> = m.ground().iter().collect();
    order.shuffle(rng);
    let mut s = ElementSet::EMPTY;
    for e in order {
        if (maximal || rng.random_bool(0.6)) && m.is_independent(s.with(e)) {
            s.insert(e);
        }
    }
    s
}

fn criterion_10(runs: &[Run]) -> Outcome {
    let mut searches = 0;
    let mut over = 0;
    let mut most = 0;
    for r in runs {
        let cfg = r.config.search();
        let bound = cfg.move_bound(r.inst.n);
        let counts: &[usize] = match r.algorithm {
            Algorithm::AlgorithmA | Algorithm::Symmetric | Algorithm::ProcedureB => &r.record.moves,
            // the second candidate is the delete/exchange search on V \ S1
            Algorithm::TwoBase => &r.record.moves[1..2],
            _ => &[],
        };
        for &m in counts {
            searches += 1;
            most = most.max(m);
            if m > bound {
                over += 1;
            }
        }
    }

    let mut pairs = 0;
    let mut broken = 0;
    let mut bijections = 0;
    for t in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + t);
        let m = random_matroid(&mut rng, (t % 4) as usize);
        let equal = t % 2 == 0;
        let i = random_independent(&mut rng, &m, equal);
        let j = random_independent(&mut rng, &m, equal);
        let map = exchange_map(&m, i, j).unwrap();
        pairs += 1;
        let mut ok = map.satisfies(&m, i, j);
        if i.len() == j.len() {
            ok &= map.is_bijection();
            bijections += 1;
        }
        if !ok {
            broken += 1;
            eprintln!("exchange map failure: seed {t}, I = {i}, J = {j}");
        }
    }
    outcome(
        over == 0 && searches > 0 && broken == 0,
        format!(
            "{searches} searches within the move bound (most moves {most}, {over} over); \
             {}/{pairs} exchange maps valid, {bijections} equal-size pairs bijective",
            pairs - broken
        ),
    )
}

fn criterion_11(runs: &[Run]) -> Outcome {
    let mismatched: Vec<&str> = runs
        .par_iter()
        .filter(|r| {
            let again = run_one(&r.inst, r.algorithm, &r.config).unwrap();
            again.fingerprint != r.inst.fingerprint() || again.replay_bytes() != r.record.replay_bytes()
        })
        .map(|r| r.record.instance.as_str())
        .collect();
    for m in &mismatched {
        eprintln!("replay mismatch: {m}");
    }
    outcome(
        mismatched.is_empty(),
        format!(
            "{}/{} records replay byte-identically",
            runs.len() - mismatched.len(),
            runs.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut runs = Vec::new();
    let mut results = Vec::new();
    let mut report = |id: usize, name: &str, o: Outcome| {
        println!(
            "criterion {id:>2} {} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push(o.pass);
    };
    report(1, "k-matroid guarantee", criterion_1(&mut runs));
    report(2, "local optimum certificates", criterion_2(&runs));
    report(3, "symmetric guarantee", criterion_3(&mut runs));
    report(4, "partition matroids", criterion_4(&mut runs));
    report(5, "greedy tight example", criterion_5(&mut runs));
    report(6, "multilinear extension", criterion_6());
    report(7, "fractional certificate", criterion_7());
    report(8, "rounding", criterion_8(&mut runs));
    report(9, "matroid bases", criterion_9(&mut runs));
    report(10, "complexity accounting", criterion_10(&runs));
    report(11, "determinism", criterion_11(&runs));
    if results.iter().all(|&p| p) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
