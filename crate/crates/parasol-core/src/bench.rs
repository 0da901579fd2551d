//! Wall-clock cost of proposals as the observation history grows.
//!
//! A sampler's per-iteration cost determines how far it scales: a strategy
//! that is brilliant at 100 observations but cubic in their number stops
//! being usable long before a cheap one does. This module measures that
//! directly: build a synthetic history of `n` completed observations
//! (uniform points scored by an objective), then time full proposal calls —
//! which include any model refit the sampler performs — at each history
//! size, taking the median over repetitions.
//!
//! [`log_log_slope`] summarizes a measurement series as the least-squares
//! slope of `ln(seconds)` against `ln(n)`: ~1 means linear cost per
//! proposal, ~3 cubic, and so on.

use std::time::Instant;

use thiserror::Error;

use crate::benchmarks::{BenchmarkError, ObjectiveModel};
use crate::proposer::{Observation, ObservationSet, ProposerError};
use crate::rng::{stream, StreamId};
use crate::sampler::{Sampler, SamplerError};

/// Errors from cost benchmarking.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least one history size is required")]
    EmptySizes,
    #[error("reps must be at least 1")]
    ZeroReps,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Proposer(#[from] ProposerError),
}

/// Median proposal cost at one history size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchPoint {
    pub n_obs: usize,
    pub seconds: f64,
}

/// Doubling history sizes starting at 100, capped by `max_n`.
pub fn geometric_sizes(max_n: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut n = 100;
    while n <= max_n {
        sizes.push(n);
        n *= 2;
    }
    sizes
}

/// Time proposals against synthetic histories of each requested size.
///
/// The history for size `n` is the first `n` elements of one shared
/// sequence of uniformly drawn points scored by `objective`, so larger
/// sizes extend smaller ones the way a real run would. Each measurement is
/// the median of `reps` timed proposal calls (model refits included); a
/// single untimed warmup call precedes the measurements.
pub fn bench_proposal_cost<O: ObjectiveModel>(
    sampler: &Sampler,
    objective: &O,
    sizes: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchPoint>, BenchError> {
    if sizes.is_empty() {
        return Err(BenchError::EmptySizes);
    }
    if reps == 0 {
        return Err(BenchError::ZeroReps);
    }
    let space = objective.space();
    let max_n = *sizes.iter().max().expect("sizes non-empty");
    let mut history_rng = stream(seed, StreamId::Bench);
    let mut pool = Vec::with_capacity(max_n);
    for _ in 0..max_n {
        let x = space.sample_uniform(&mut history_rng);
        let y = objective.evaluate(&x)?;
        pool.push(Observation::new(x, y)?);
    }

    let mut proposal_rng = stream(seed, StreamId::Proposal);
    let warmup: ObservationSet = pool[..sizes[0].min(max_n)].to_vec().into();
    sampler.propose(&warmup, space, &mut proposal_rng)?;

    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let history: ObservationSet = pool[..n.min(max_n)].to_vec().into();
        let mut times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let started = Instant::now();
            sampler.propose(&history, space, &mut proposal_rng)?;
            times.push(started.elapsed().as_secs_f64());
        }
        points.push(BenchPoint {
            n_obs: n,
            seconds: median(&mut times),
        });
    }
    Ok(points)
}

/// Least-squares slope of `ln(seconds)` against `ln(n_obs)`.
pub fn log_log_slope(points: &[BenchPoint]) -> f64 {
    let n = points.len() as f64;
    let us: Vec<f64> = points.iter().map(|p| (p.n_obs as f64).ln()).collect();
    let vs: Vec<f64> = points.iter().map(|p| p.seconds.ln()).collect();
    let u_mean = us.iter().sum::<f64>() / n;
    let v_mean = vs.iter().sum::<f64>() / n;
    let cov: f64 = us
        .iter()
        .zip(&vs)
        .map(|(u, v)| (u - u_mean) * (v - v_mean))
        .sum();
    let var: f64 = us.iter().map(|u| (u - u_mean) * (u - u_mean)).sum();
    cov / var
}

fn median(times: &mut [f64]) -> f64 {
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    }
}
