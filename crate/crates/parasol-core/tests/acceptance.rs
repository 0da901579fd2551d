//! Acceptance suite: one test per acceptance criterion, each printing a
//! single `criterion N (<name>): PASS|FAIL — details` line (run with
//! `--nocapture` to see the lines as they complete).
//!
//! The tests are serialized through a mutex so that the wall-clock limits
//! attached to several criteria are measured without interference from
//! sibling tests.

use std::sync::Mutex;
use std::time::Instant;

use statrs::distribution::{ContinuousCDF, Normal};

use parasol_core::bench::{bench_proposal_cost, log_log_slope};
use parasol_core::benchmarks::{
    default_duration_sigma, halfnormal_duration, hartmann18, hartmann6, BenchmarkError,
    Objective, ObjectiveModel,
};
use parasol_core::experiment::{run_experiment, ExperimentConfig};
use parasol_core::parzen::ParzenEstimator;
use parasol_core::proposer::{
    propose, propose_classic_tpe, split, success_probability, Observation, ObservationSet,
    ProposerConfig,
};
use parasol_core::rng::{stream, RandomStream, StreamId};
use parasol_core::simulator::{run, SimConfig, Trace};
use parasol_core::space::{ParamDomain, Point, SearchSpace};
use parasol_core::Sampler;

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(n: usize, name: &str, pass: bool, details: &str) {
    println!(
        "criterion {n} ({name}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
}

const SQRT_2PI: f64 = 2.5066282746310002;

/// Independent density oracle: direct summation over every mixture
/// component, no windowing, no shared code with the library's evaluation
/// path beyond the fitted kernels themselves.
fn direct_density(est: &ParzenEstimator, coords: &[f64]) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..coords.len())
        .map(|k| {
            est.dim_kernels(k)
                .iter()
                .map(|kern| {
                    let z = (coords[k] - kern.center) / kern.bandwidth;
                    let mass = normal.cdf((kern.high - kern.center) / kern.bandwidth)
                        - normal.cdf((kern.low - kern.center) / kern.bandwidth);
                    kern.weight * (-0.5 * z * z).exp() / (kern.bandwidth * mass * SQRT_2PI)
                })
                .sum::<f64>()
        })
        .product()
}

#[test]
fn criterion_1_success_probability_matches_naive_oracle() {
    let _serial = serial();
    let started = Instant::now();
    let mut rng = stream(1001, StreamId::Proposal);
    let mut max_rel: f64 = 0.0;
    let mut max_eq_dev: f64 = 0.0;
    for fit_idx in 0..100 {
        let d = 1 + fit_idx % 3;
        let space = SearchSpace::unit_box(d).unwrap();
        let n = 20 + (fit_idx * 3) % 20;
        let gamma = 0.05 + 0.4 * (fit_idx as f64 / 99.0);
        let observations: Vec<Observation> = (0..n)
            .map(|_| {
                let p = space.sample_uniform(&mut rng);
                let y = p.coords().iter().map(|c| (c - 0.4).abs()).sum();
                Observation::new(p, y).unwrap()
            })
            .collect();
        let parts = split(&observations, gamma).unwrap();
        let below: Vec<Point> = parts.below.iter().map(|o| o.x().clone()).collect();
        let above: Vec<Point> = parts.above.iter().map(|o| o.x().clone()).collect();
        let l = ParzenEstimator::fit(&below, &space).unwrap();
        let g = ParzenEstimator::fit(&above, &space).unwrap();
        let q = space.sample_uniform(&mut rng);

        let ours = success_probability(
            l.log_pdf(&q).unwrap(),
            g.log_pdf(&q).unwrap(),
            gamma,
        );
        let l_val = direct_density(&l, q.coords());
        let g_val = direct_density(&g, q.coords());
        let naive = gamma * l_val / (gamma * l_val + (1.0 - gamma) * g_val);
        max_rel = max_rel.max(((ours - naive) / naive).abs());

        let ll = l.log_pdf(&q).unwrap();
        max_eq_dev = max_eq_dev.max((success_probability(ll, ll, gamma) - gamma).abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = max_rel <= 1e-9 && max_eq_dev <= 1e-12 && elapsed < 5.0;
    report(
        1,
        "success-probability oracle",
        pass,
        &format!(
            "max rel err {max_rel:.2e} (tol 1e-9), equal-density dev {max_eq_dev:.2e} (tol 1e-12), {elapsed:.2} s (limit 5 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_fitted_densities_are_normalized() {
    let _serial = serial();
    let started = Instant::now();
    let mut rng = stream(2002, StreamId::Proposal);
    let mut worst: f64 = 0.0;
    for fit_idx in 0..50 {
        let d = 1 + fit_idx % 2;
        let dims: Vec<ParamDomain> = (0..d)
            .map(|k| {
                use rand::Rng;
                let low: f64 = rng.random_range(-10.0..10.0);
                let width: f64 = rng.random_range(0.1..20.0);
                ParamDomain::continuous(format!("q{k}"), low, low + width).unwrap()
            })
            .collect();
        let space = SearchSpace::new(dims).unwrap();
        let n = 1 + (fit_idx * 7) % 50;
        let points: Vec<Point> = if fit_idx % 5 == 4 {
            // Duplicated interior point: bandwidths collapse to the clip
            // floor, the hardest case for normalization.
            let anchor = space.sample_uniform(&mut rng);
            vec![anchor; n]
        } else {
            (0..n).map(|_| space.sample_uniform(&mut rng)).collect()
        };
        let est = ParzenEstimator::fit(&points, &space).unwrap();
        for (k, dim) in space.dims().iter().enumerate() {
            let cells = 2048;
            let h = dim.width() / cells as f64;
            let integral: f64 = (0..cells)
                .map(|i| {
                    let x = dim.low() + (i as f64 + 0.5) * h;
                    est.dim_log_pdf(k, x).exp() * h
                })
                .sum();
            worst = worst.max((integral - 1.0).abs());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst <= 1e-3 && elapsed < 10.0;
    report(
        2,
        "density normalization",
        pass,
        &format!("worst |integral - 1| = {worst:.2e} over 50 fits (tol 1e-3), {elapsed:.2} s (limit 10 s)"),
    );
    assert!(pass);
}

/// The fixed 1-d fixture for the rejection-sampling distribution check and
/// its fitted good/bad densities.
fn rejection_fixture() -> (ObservationSet, SearchSpace, ProposerConfig) {
    let space = SearchSpace::unit_box(1).unwrap();
    let mut history = ObservationSet::new();
    for i in 0..30 {
        let x = (i as f64 + 0.5) / 30.0;
        history.push(Observation::new(Point::new(vec![x]), (x - 0.3).abs()).unwrap());
    }
    let config = ProposerConfig {
        gamma: 0.1,
        n_startup: 10,
        max_rejection_attempts: 1000,
        n_candidates_classic: 24,
    };
    (history, space, config)
}

#[test]
fn criterion_3_rejection_sampling_reproduces_the_target_distribution() {
    let _serial = serial();
    let started = Instant::now();
    let (history, space, config) = rejection_fixture();

    // Quadrature-normalized target: p(x) ∝ success probability under the
    // fixture's fitted density pair, integrated per bin.
    let parts = split(history.as_slice(), config.gamma).unwrap();
    let below: Vec<Point> = parts.below.iter().map(|o| o.x().clone()).collect();
    let above: Vec<Point> = parts.above.iter().map(|o| o.x().clone()).collect();
    let l = ParzenEstimator::fit(&below, &space).unwrap();
    let g = ParzenEstimator::fit(&above, &space).unwrap();
    let bins = 50;
    let sub = 64;
    let mut target = vec![0.0f64; bins];
    for (b, mass) in target.iter_mut().enumerate() {
        let lo = b as f64 / bins as f64;
        let h = 1.0 / (bins * sub) as f64;
        *mass = (0..sub)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * h;
                success_probability(
                    l.dim_log_pdf(0, x),
                    g.dim_log_pdf(0, x),
                    config.gamma,
                ) * h
            })
            .sum();
    }
    let total: f64 = target.iter().sum();
    for mass in &mut target {
        *mass /= total;
    }

    let samples = 50_000;
    let mut worst_tv: f64 = 0.0;
    for seed in 0..5u64 {
        let mut rng = stream(3000 + seed, StreamId::Proposal);
        let mut counts = vec![0usize; bins];
        for _ in 0..samples {
            let p = propose(&history, &space, &config, &mut rng).unwrap();
            let bin = ((p.coords()[0] * bins as f64) as usize).min(bins - 1);
            counts[bin] += 1;
        }
        let tv: f64 = 0.5
            * counts
                .iter()
                .zip(&target)
                .map(|(&c, &t)| (c as f64 / samples as f64 - t).abs())
                .sum::<f64>();
        worst_tv = worst_tv.max(tv);
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst_tv <= 0.02 && elapsed < 30.0;
    report(
        3,
        "rejection sampler distribution",
        pass,
        &format!(
            "worst TV over 5 seeds = {worst_tv:.4} with {samples} samples in {bins} bins (tol 0.02), {elapsed:.2} s (limit 30 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_halfnormal_durations_have_unit_mean() {
    let _serial = serial();
    let started = Instant::now();
    let sigma = default_duration_sigma();
    let mut rng = stream(4004, StreamId::Duration);
    let n = 1_000_000;
    let mut sum = 0.0;
    let mut all_nonneg = true;
    for _ in 0..n {
        let draw = halfnormal_duration(sigma, &mut rng);
        all_nonneg &= draw >= 0.0;
        sum += draw;
    }
    let mean = sum / n as f64;
    let elapsed = started.elapsed().as_secs_f64();
    let pass = (0.99..=1.01).contains(&mean) && all_nonneg && elapsed < 5.0;
    report(
        4,
        "half-normal duration model",
        pass,
        &format!(
            "mean of 1e6 draws = {mean:.5} (must be in [0.99, 1.01]), all non-negative: {all_nonneg}, {elapsed:.2} s (limit 5 s)"
        ),
    );
    assert!(pass);
}

/// Constant-duration objective for exact-schedule checks.
struct UnitDuration {
    space: SearchSpace,
}

impl ObjectiveModel for UnitDuration {
    fn space(&self) -> &SearchSpace {
        &self.space
    }
    fn evaluate(&self, p: &Point) -> Result<f64, BenchmarkError> {
        Ok(p.coords().iter().sum())
    }
    fn duration(&self, _p: &Point, _rng: &mut RandomStream) -> Result<f64, BenchmarkError> {
        Ok(1.0)
    }
}

fn schedule_invariants(trace: &Trace, workers: usize, budget: f64) -> Result<(), String> {
    let records = trace.records();
    for pair in records.windows(2) {
        let ord = pair[0]
            .t_end
            .total_cmp(&pair[1].t_end)
            .then(pair[0].worker.cmp(&pair[1].worker));
        if !ord.is_lt() {
            return Err("records not in completion order".to_string());
        }
    }
    for r in records {
        if r.worker >= workers || r.t_start >= budget || r.t_end > budget || r.t_end < r.t_start {
            return Err(format!(
                "bad record: worker {} [{}, {}] budget {budget}",
                r.worker, r.t_start, r.t_end
            ));
        }
    }
    for w in 0..workers {
        let mut mine: Vec<_> = records.iter().filter(|r| r.worker == w).collect();
        mine.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        if let Some(first) = mine.first() {
            if first.t_start != 0.0 {
                return Err(format!("worker {w} first dispatch at {}", first.t_start));
            }
        }
        for pair in mine.windows(2) {
            if pair[0].t_end != pair[1].t_start {
                return Err(format!("idle gap on worker {w}"));
            }
        }
    }
    for r in records {
        let mid = 0.5 * (r.t_start + r.t_end);
        let active = records
            .iter()
            .filter(|o| o.t_start <= mid && mid < o.t_end)
            .count();
        if active > workers {
            return Err(format!("{active} evaluations in flight at t = {mid}"));
        }
    }
    Ok(())
}

#[test]
fn criterion_5_simulator_schedules_are_exact_and_reproducible() {
    let _serial = serial();
    let started = Instant::now();
    let mut failures: Vec<String> = Vec::new();

    // (a) One worker is exactly a sequential optimization loop.
    {
        let objective = Objective::hartmann6();
        let sampler = Sampler::AsyncTpe(ProposerConfig::default());
        let config = SimConfig {
            workers: 1,
            budget: 25.0,
            seed: 505,
            measure_overhead: false,
        };
        let trace = run(&objective, &sampler, &config).unwrap();
        let mut prop_rng = stream(505, StreamId::Proposal);
        let mut dur_rng = stream(505, StreamId::Duration);
        let mut history = ObservationSet::new();
        let mut t = 0.0;
        let mut expected: Vec<(Point, f64, f64, f64)> = Vec::new();
        while t < config.budget {
            let x = sampler
                .propose(&history, objective.space(), &mut prop_rng)
                .unwrap();
            let y = Objective::evaluate(&objective, &x).unwrap();
            let dur = Objective::duration(&objective, &x, &mut dur_rng).unwrap();
            let end = t + dur;
            if end > config.budget {
                break;
            }
            history.push(Observation::new(x.clone(), y).unwrap());
            expected.push((x, y, t, end));
            t = end;
        }
        let matches = trace.records().len() == expected.len()
            && trace.records().iter().zip(&expected).all(|(r, e)| {
                r.x.coords() == e.0.coords() && r.y == e.1 && r.t_start == e.2 && r.t_end == e.3
            });
        if !matches {
            failures.push(format!(
                "W=1 trace diverges from the sequential loop ({} vs {} trials)",
                trace.records().len(),
                expected.len()
            ));
        }
    }

    // (b) Constant durations give the exact 40-trial lockstep schedule.
    {
        let objective = UnitDuration {
            space: SearchSpace::unit_box(2).unwrap(),
        };
        let config = SimConfig {
            workers: 4,
            budget: 10.0,
            seed: 99,
            measure_overhead: false,
        };
        let trace = run(&objective, &Sampler::Random, &config).unwrap();
        let exact = trace.records().len() == 40
            && trace.records().iter().enumerate().all(|(i, r)| {
                r.worker == i % 4
                    && r.t_start == (i / 4) as f64
                    && r.t_end == (i / 4 + 1) as f64
                    && r.trial_index == i
            });
        if !exact {
            failures.push(format!(
                "constant-duration schedule wrong ({} trials)",
                trace.records().len()
            ));
        }
    }

    // (c) Reruns emit byte-identical trace files.
    {
        let objective = Objective::hartmann18();
        let sampler = Sampler::AsyncTpe(ProposerConfig::default());
        let config = SimConfig {
            workers: 4,
            budget: 15.0,
            seed: 2024,
            measure_overhead: false,
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        run(&objective, &sampler, &config)
            .unwrap()
            .write_csv(&mut a)
            .unwrap();
        run(&objective, &sampler, &config)
            .unwrap()
            .write_csv(&mut b)
            .unwrap();
        if a != b {
            failures.push("rerun trace files differ".to_string());
        }
        if a.is_empty() {
            failures.push("empty trace file".to_string());
        }
    }

    // (d) Schedule invariants on 20 randomized configurations.
    {
        use rand::Rng;
        let mut meta = stream(5005, StreamId::Proposal);
        let objective = Objective::hartmann6();
        for case in 0..20 {
            let workers = meta.random_range(1..=5);
            let budget: f64 = meta.random_range(3.0..15.0);
            let seed: u64 = meta.random();
            let sampler = if case % 2 == 0 {
                Sampler::Random
            } else {
                Sampler::AsyncTpe(ProposerConfig::default())
            };
            let config = SimConfig {
                workers,
                budget,
                seed,
                measure_overhead: false,
            };
            let trace = run(&objective, &sampler, &config).unwrap();
            if let Err(problem) = schedule_invariants(&trace, workers, budget) {
                failures.push(format!("random config {case}: {problem}"));
            }
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    let pass = failures.is_empty() && elapsed < 30.0;
    report(
        5,
        "simulator correctness",
        pass,
        &format!(
            "sequential equivalence, 40-trial exact schedule, byte-identical reruns, 20 random-config invariants; {}; {elapsed:.2} s (limit 30 s)",
            if failures.is_empty() {
                "no violations".to_string()
            } else {
                failures.join(" | ")
            }
        ),
    );
    assert!(pass, "{failures:?}");
}

#[test]
fn criterion_6_hartmann18_study_orders_the_samplers() {
    let _serial = serial();
    let started = Instant::now();
    let base = ExperimentConfig {
        objective: "hartmann18".to_string(),
        sampler: "async-tpe".to_string(),
        workers: 4,
        budget: 500.0,
        trials: 10,
        gamma: 0.1,
        seed: 1,
        measure_overhead: false,
        out: None,
    };
    let tpe = run_experiment(&base).unwrap();
    let random = run_experiment(&ExperimentConfig {
        sampler: "random".to_string(),
        ..base.clone()
    })
    .unwrap();
    let study_wall = started.elapsed().as_secs_f64();

    fn finals(result: &parasol_core::experiment::ExperimentResult) -> Vec<f64> {
        result
            .trials
            .iter()
            .map(|t| t.curve.final_value().expect("every trial completes work"))
            .collect()
    }
    fn mean_se(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt() / n.sqrt())
    }
    let (tpe_mean, tpe_se) = mean_se(&finals(&tpe));
    let (rand_mean, rand_se) = mean_se(&finals(&random));
    let gap = rand_mean - tpe_mean;
    let pooled = (tpe_se * tpe_se + rand_se * rand_se).sqrt();
    let ordered = tpe_mean < rand_mean;
    let separated = gap > 2.0 * pooled;

    // Qualitative cross-check against GP Thompson sampling at a reduced
    // scale with real proposal overhead charged to the schedule: the full
    // 500-second study is out of reach for a per-proposal GP refit, which
    // is itself the point being illustrated.
    let reduced = ExperimentConfig {
        sampler: "parallel-ts".to_string(),
        budget: 40.0,
        trials: 2,
        measure_overhead: true,
        ..base.clone()
    };
    let ts_started = Instant::now();
    let ts = run_experiment(&reduced).unwrap();
    let ts_wall = ts_started.elapsed().as_secs_f64();
    let tpe_reduced = run_experiment(&ExperimentConfig {
        sampler: "async-tpe".to_string(),
        ..reduced.clone()
    })
    .unwrap();
    let k_star = ts
        .trials
        .iter()
        .chain(&tpe_reduced.trials)
        .map(|t| t.curve.len())
        .min()
        .unwrap_or(0);
    let ts_completions: Vec<usize> = ts.trials.iter().map(|t| t.curve.len()).collect();
    let tpe_completions: Vec<usize> = tpe_reduced.trials.iter().map(|t| t.curve.len()).collect();
    let axis_mean = |result: &parasol_core::experiment::ExperimentResult,
                     f: &dyn Fn(&parasol_core::simulator::StepCurve) -> Option<f64>|
     -> f64 {
        let vals: Vec<f64> = result.trials.iter().filter_map(|t| f(&t.curve)).collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let ts_at_k = axis_mean(&ts, &|c| c.value_after_evals(k_star));
    let tpe_at_k = axis_mean(&tpe_reduced, &|c| c.value_after_evals(k_star));
    let ts_at_t = axis_mean(&ts, &|c| c.value_at(40.0));
    let tpe_at_t = axis_mean(&tpe_reduced, &|c| c.value_at(40.0));
    println!(
        "criterion 6 note — per-evaluation axis (reduced study, budget 40 s with measured \
         proposal overhead): mean best after {k_star} evaluations: parallel-ts {ts_at_k:.3}, \
         async-tpe {tpe_at_k:.3}"
    );
    println!(
        "criterion 6 note — per-second axis (same study): mean best at t = 40 s: parallel-ts \
         {ts_at_t:.3} over {ts_completions:?} completions, async-tpe {tpe_at_t:.3} over \
         {tpe_completions:?} completions; parallel-ts proposal overhead consumed most of its \
         budget ({ts_wall:.0} s wall for 2 trials)"
    );

    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let wall_ok = study_wall < 300.0;
    // The 5-minute target assumes the trials actually run concurrently; on
    // fewer than 4 cores the measurement is reported but not binding.
    let wall_binding = cores >= 4;
    let ts_reported = k_star > 0;
    let pass = ordered && separated && ts_reported && (wall_ok || !wall_binding);
    report(
        6,
        "hartmann18 study ordering",
        pass,
        &format!(
            "async-tpe mean final {tpe_mean:.3} (se {tpe_se:.3}) vs random {rand_mean:.3} (se {rand_se:.3}), \
             gap {gap:.3} > 2×pooled se {:.3}: {separated}; study wall {study_wall:.0} s vs 300 s target \
             ({}; {cores} cores)",
            2.0 * pooled,
            if wall_ok {
                "met".to_string()
            } else if wall_binding {
                "MISSED".to_string()
            } else {
                "not binding below 4 cores".to_string()
            }
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_proposal_cost_scaling_separates_the_samplers() {
    let _serial = serial();
    let started = Instant::now();
    let objective = Objective::hartmann18();
    let tpe_points = bench_proposal_cost(
        &Sampler::AsyncTpe(ProposerConfig::default()),
        &objective,
        &[200, 400, 800, 1600],
        3,
        77,
    )
    .unwrap();
    let tpe_slope = log_log_slope(&tpe_points);
    let ts_points = bench_proposal_cost(
        &Sampler::ParallelTs(Default::default()),
        &objective,
        &[200, 400, 800],
        3,
        78,
    )
    .unwrap();
    let ts_slope = log_log_slope(&ts_points);
    let elapsed = started.elapsed().as_secs_f64();
    let fmt = |points: &[parasol_core::bench::BenchPoint]| -> String {
        points
            .iter()
            .map(|p| format!("{}:{:.3}s", p.n_obs, p.seconds))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let pass = tpe_slope <= 1.3 && ts_slope >= 2.0 && elapsed < 600.0;
    report(
        7,
        "proposal cost scaling",
        pass,
        &format!(
            "async-tpe slope {tpe_slope:.2} (≤ 1.3) over [{}]; parallel-ts slope {ts_slope:.2} (≥ 2.0) over [{}]; {elapsed:.0} s (limit 600 s)",
            fmt(&tpe_points),
            fmt(&ts_points)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_sampled_proposals_are_more_diverse_than_argmax_proposals() {
    let _serial = serial();
    let started = Instant::now();
    // Peaked-l fixture: the three best points huddle together, so the
    // good-tail density is a spike. The argmax rule should return
    // near-identical points; the sampling rule should not.
    let space = SearchSpace::unit_box(2).unwrap();
    let mut history = ObservationSet::new();
    for (i, offset) in [(0.0, 0.0), (0.002, -0.002), (-0.002, 0.002)].iter().enumerate() {
        history.push(
            Observation::new(
                Point::new(vec![0.3 + offset.0, 0.7 + offset.1]),
                i as f64 * 1e-3,
            )
            .unwrap(),
        );
    }
    let mut filler = stream(808, StreamId::Proposal);
    for i in 0..27 {
        let p = space.sample_uniform(&mut filler);
        history.push(Observation::new(p, 1.0 + i as f64).unwrap());
    }
    let config = ProposerConfig::default();

    let mean_pairwise = |points: &[Point]| -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let dist: f64 = points[i]
                    .coords()
                    .iter()
                    .zip(points[j].coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                total += dist;
                count += 1;
            }
        }
        total / count as f64
    };

    let mut rng = stream(81, StreamId::Proposal);
    let sampled: Vec<Point> = (0..100)
        .map(|_| propose(&history, &space, &config, &mut rng).unwrap())
        .collect();
    let mut rng = stream(81, StreamId::Proposal);
    let argmaxed: Vec<Point> = (0..100)
        .map(|_| propose_classic_tpe(&history, &space, &config, &mut rng).unwrap())
        .collect();
    let sampled_diversity = mean_pairwise(&sampled);
    let argmax_diversity = mean_pairwise(&argmaxed);
    let elapsed = started.elapsed().as_secs_f64();
    let pass = sampled_diversity > argmax_diversity && elapsed < 10.0;
    report(
        8,
        "proposal diversity",
        pass,
        &format!(
            "mean pairwise distance: sampling rule {sampled_diversity:.4} vs argmax rule {argmax_diversity:.4}, {elapsed:.2} s (limit 10 s)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_benchmark_functions_match_independent_oracles() {
    let _serial = serial();
    let started = Instant::now();

    // Independent oracle with transposed table layout and reversed
    // accumulation order.
    const A_T: [[f64; 4]; 6] = [
        [10.0, 0.05, 3.0, 17.0],
        [3.0, 10.0, 3.5, 8.0],
        [17.0, 17.0, 1.7, 0.05],
        [3.5, 0.1, 10.0, 10.0],
        [1.7, 8.0, 17.0, 0.1],
        [8.0, 14.0, 8.0, 14.0],
    ];
    const P_T: [[f64; 4]; 6] = [
        [0.1312, 0.2329, 0.2348, 0.4047],
        [0.1696, 0.4135, 0.1451, 0.8828],
        [0.5569, 0.8307, 0.3522, 0.8732],
        [0.0124, 0.3736, 0.2883, 0.5743],
        [0.8283, 0.1004, 0.3047, 0.1091],
        [0.5886, 0.9991, 0.665, 0.0381],
    ];
    const ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
    let oracle6 = |x: &[f64]| -> f64 {
        let mut outer = 0.0;
        for i in (0..4).rev() {
            let mut inner = 0.0;
            for j in (0..6).rev() {
                let d = x[j] - P_T[j][i];
                inner += A_T[j][i] * d * d;
            }
            outer -= ALPHA[i] * (-inner).exp();
        }
        outer
    };

    let mut rng = stream(9009, StreamId::Proposal);
    let space6 = SearchSpace::unit_box(6).unwrap();
    let mut max_rel: f64 = 0.0;
    for _ in 0..1000 {
        let p = space6.sample_uniform(&mut rng);
        let ours = hartmann6(p.coords()).unwrap();
        let reference = oracle6(p.coords());
        max_rel = max_rel.max(((ours - reference) / reference).abs());
    }

    const ARGMIN6: [f64; 6] = [
        0.20168952, 0.15001069, 0.47687398, 0.27533243, 0.31165162, 0.65730054,
    ];
    let triple: Vec<f64> = ARGMIN6.repeat(3);
    let minimum = hartmann18(&triple).unwrap();
    let min_dev = (minimum - (-9.96711)).abs();

    let space18 = SearchSpace::unit_box(18).unwrap();
    let mut symmetric = true;
    for _ in 0..20 {
        let p = space18.sample_uniform(&mut rng);
        let x = p.coords();
        let mut swapped = Vec::with_capacity(18);
        swapped.extend_from_slice(&x[12..18]);
        swapped.extend_from_slice(&x[0..6]);
        swapped.extend_from_slice(&x[6..12]);
        let v = hartmann18(x).unwrap();
        let w = hartmann18(&swapped).unwrap();
        // Permuting blocks permutes the order of three additions, so the
        // identity holds up to rounding, not bitwise.
        symmetric &= ((v - w) / v).abs() <= 1e-12;
    }

    let elapsed = started.elapsed().as_secs_f64();
    let pass = max_rel <= 1e-12 && min_dev <= 1e-4 && symmetric && elapsed < 5.0;
    report(
        9,
        "benchmark fidelity",
        pass,
        &format!(
            "hartmann6 max rel err {max_rel:.2e} over 1000 points (tol 1e-12); hartmann18 minimum {minimum:.6} within {min_dev:.2e} of -9.96711 (tol 1e-4); block permutation symmetry: {symmetric}; {elapsed:.2} s (limit 5 s)"
        ),
    );
    assert!(pass);
}
