//! Deterministic discrete-event simulation of asynchronous workers.
//!
//! `W` workers share one observation history. Each worker repeatedly asks
//! the sampler for a point (seeing only evaluations that have *completed*),
//! evaluates it for a stochastic duration, and reports the result; nothing
//! ever blocks on a slower worker. The simulator reproduces this with a
//! completion-event queue and a simulated clock:
//!
//! * all workers dispatch their first trial at `t = 0` in worker order;
//! * events fire in order of completion time, ties broken by worker id;
//! * on completion the observation joins the shared history and the worker
//!   immediately dispatches its next trial — if and only if the clock is
//!   still strictly below the budget;
//! * a trial completes (and is recorded) only when its end time is within
//!   the budget; trials still in flight when the budget expires are dropped.
//!
//! Proposals take zero simulated time by default, isolating sampler
//! *quality* from sampler *cost*. With [`SimConfig::measure_overhead`] the
//! wall-clock time of each proposal call is added to the proposing worker's
//! schedule instead, so expensive samplers complete fewer evaluations in
//! the same budget — at the price of traces that are no longer
//! reproducible.
//!
//! Two random streams drive a run, both derived from the run seed: one for
//! proposals, one for durations. Their draws interleave per dispatch in a
//! fixed order (proposal first, duration second), so any two runs with the
//! same seed and configuration produce bit-identical traces.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;
use std::time::Instant;

use thiserror::Error;

use crate::benchmarks::{BenchmarkError, ObjectiveModel};
use crate::proposer::{Observation, ObservationSet};
use crate::rng::{stream, RandomStream, StreamId};
use crate::sampler::{Sampler, SamplerError};
use crate::space::{Point, SearchSpace};

/// Errors from simulation runs.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("budget must be positive and finite, got {0}")]
    InvalidBudget(f64),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error("objective returned a non-finite value {value} for a valid point")]
    NonFiniteObjective { value: f64 },
}

/// Simulation shape: worker count, time budget, seed, and overhead mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub workers: usize,
    /// Simulated time horizon (same unit as evaluation durations).
    pub budget: f64,
    pub seed: u64,
    /// Charge real proposal wall-time to the simulated schedule.
    pub measure_overhead: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            workers: 4,
            budget: 500.0,
            seed: 0,
            measure_overhead: false,
        }
    }
}

/// One completed evaluation, in completion order within a [`Trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Dispatch sequence number (0-based), *not* completion rank.
    pub trial_index: usize,
    pub worker: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub y: f64,
    /// Internal (un-externalized) coordinates.
    pub x: Point,
    /// Completed observations visible when this trial was proposed.
    pub n_obs_at_dispatch: usize,
}

/// The completed trials of one simulation run, in completion order.
#[derive(Debug, Clone)]
pub struct Trace {
    records: Vec<TrialRecord>,
    space: SearchSpace,
    workers: usize,
    budget: f64,
}

impl Trace {
    /// Completed trials ordered by completion time (ties by worker id).
    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Write the trace as CSV: `trial_index,worker,t_start,t_end,y,best_y`
    /// followed by one externalized coordinate column per dimension. Rows
    /// are in completion order and `best_y` is the running minimum, so it
    /// never increases down the file.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<(), csv::Error> {
        let mut writer = csv::Writer::from_writer(sink);
        let mut header = vec![
            "trial_index".to_string(),
            "worker".to_string(),
            "t_start".to_string(),
            "t_end".to_string(),
            "y".to_string(),
            "best_y".to_string(),
        ];
        header.extend(self.space.dims().iter().map(|d| d.name().to_string()));
        writer.write_record(&header)?;
        let mut best = f64::INFINITY;
        for record in &self.records {
            best = best.min(record.y);
            let mut row = vec![
                record.trial_index.to_string(),
                record.worker.to_string(),
                record.t_start.to_string(),
                record.t_end.to_string(),
                record.y.to_string(),
                best.to_string(),
            ];
            row.extend(self.space.externalize(&record.x).iter().map(f64::to_string));
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Best-so-far objective value as a right-continuous step function of time.
///
/// The curve has one knot per completed trial; it is undefined before the
/// first completion (`value_at` returns `None` there, rather than inventing
/// a value).
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl StepCurve {
    /// Number of completions.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Best value at time `t`, i.e. the best among completions with
    /// `t_end <= t`.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let idx = self.times.partition_point(|&u| u <= t);
        if idx == 0 {
            None
        } else {
            Some(self.values[idx - 1])
        }
    }

    /// Best value after the first `k` completions (1-based).
    pub fn value_after_evals(&self, k: usize) -> Option<f64> {
        if k == 0 || k > self.values.len() {
            None
        } else {
            Some(self.values[k - 1])
        }
    }

    /// Best value after all completions.
    pub fn final_value(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Completion times of the knots.
    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Reduce a trace to its best-so-far step curve.
pub fn best_so_far(trace: &Trace) -> StepCurve {
    let mut times = Vec::with_capacity(trace.records.len());
    let mut values = Vec::with_capacity(trace.records.len());
    let mut best = f64::INFINITY;
    for record in &trace.records {
        best = best.min(record.y);
        times.push(record.t_end);
        values.push(best);
    }
    StepCurve { times, values }
}

/// A scheduled completion. Ordered by completion time with worker id as the
/// tie-break, which fixes the completion order of simultaneous events.
#[derive(Debug, Clone)]
struct Event {
    t_end: f64,
    worker: usize,
    t_start: f64,
    trial_index: usize,
    x: Point,
    y: f64,
    n_obs_at_dispatch: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.t_end.total_cmp(&other.t_end).is_eq() && self.worker == other.worker
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.t_end
            .total_cmp(&other.t_end)
            .then(self.worker.cmp(&other.worker))
    }
}

/// Run one simulated study and return its trace.
pub fn run<O: ObjectiveModel>(
    objective: &O,
    sampler: &Sampler,
    config: &SimConfig,
) -> Result<Trace, SimError> {
    if config.workers == 0 {
        return Err(SimError::NoWorkers);
    }
    if !(config.budget > 0.0 && config.budget.is_finite()) {
        return Err(SimError::InvalidBudget(config.budget));
    }
    let space = objective.space();
    let mut proposal_rng = stream(config.seed, StreamId::Proposal);
    let mut duration_rng = stream(config.seed, StreamId::Duration);
    let mut history = ObservationSet::new();
    let mut queue: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    let mut next_trial_index = 0;

    let dispatch = |worker: usize,
                        now: f64,
                        history: &ObservationSet,
                        queue: &mut BinaryHeap<Reverse<Event>>,
                        proposal_rng: &mut RandomStream,
                        duration_rng: &mut RandomStream,
                        next_trial_index: &mut usize|
     -> Result<(), SimError> {
        let proposed_at = Instant::now();
        let x = sampler.propose(history, space, proposal_rng)?;
        let overhead = if config.measure_overhead {
            proposed_at.elapsed().as_secs_f64()
        } else {
            0.0
        };
        let y = objective.evaluate(&x)?;
        if !y.is_finite() {
            return Err(SimError::NonFiniteObjective { value: y });
        }
        let duration = objective.duration(&x, duration_rng)?;
        let t_start = now + overhead;
        queue.push(Reverse(Event {
            t_end: t_start + duration,
            worker,
            t_start,
            trial_index: *next_trial_index,
            x,
            y,
            n_obs_at_dispatch: history.len(),
        }));
        *next_trial_index += 1;
        Ok(())
    };

    for worker in 0..config.workers {
        dispatch(
            worker,
            0.0,
            &history,
            &mut queue,
            &mut proposal_rng,
            &mut duration_rng,
            &mut next_trial_index,
        )?;
    }

    let mut records = Vec::new();
    while let Some(Reverse(event)) = queue.pop() {
        if event.t_end > config.budget {
            // The queue is ordered by completion time: everything left is
            // also past the budget, i.e. still in flight at the horizon.
            break;
        }
        let now = event.t_end;
        history.push(
            Observation::new(event.x.clone(), event.y).expect("y checked finite at dispatch"),
        );
        records.push(TrialRecord {
            trial_index: event.trial_index,
            worker: event.worker,
            t_start: event.t_start,
            t_end: event.t_end,
            y: event.y,
            x: event.x,
            n_obs_at_dispatch: event.n_obs_at_dispatch,
        });
        if now < config.budget {
            dispatch(
                event.worker,
                now,
                &history,
                &mut queue,
                &mut proposal_rng,
                &mut duration_rng,
                &mut next_trial_index,
            )?;
        }
    }

    Ok(Trace {
        records,
        space: space.clone(),
        workers: config.workers,
        budget: config.budget,
    })
}
