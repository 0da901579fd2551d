//! Probabilistic proposals from a two-density observation model.
//!
//! The proposal rule splits completed observations at the γ-quantile of the
//! objective, fits one density to the good tail (`l`, objectives below the
//! split) and one to the rest (`g`), and treats
//!
//! ```text
//! p(x) = γ·l(x) / (γ·l(x) + (1 − γ)·g(x))
//! ```
//!
//! as the probability that evaluating `x` beats the split value. New points
//! are drawn by rejection sampling: uniform candidates are accepted with
//! probability `p(x)`, so accepted points are distributed ∝ p rather than at
//! its argmax. This keeps concurrent workers from piling onto one mode while
//! still favoring regions the good-tail model likes.
//!
//! [`propose_classic_tpe`] implements the deterministic alternative for
//! comparison: sample a small candidate batch from `l` and keep the best
//! ratio `l/g`.

use rand::Rng;
use thiserror::Error;

use crate::parzen::{ParzenError, ParzenEstimator};
use crate::rng::RandomStream;
use crate::space::{Point, SearchSpace};

/// Errors from observation handling and proposal generation.
#[derive(Debug, Error)]
pub enum ProposerError {
    #[error("objective value must be finite, got {0}")]
    NonFiniteObjective(f64),
    #[error("gamma must lie strictly inside (0, 1), got {0}")]
    InvalidGamma(f64),
    #[error("{0} must be at least 1")]
    ZeroBudget(&'static str),
    #[error("cannot split an empty observation list")]
    NoObservations,
    #[error(transparent)]
    Parzen(#[from] ParzenError),
}

/// One completed evaluation: a point and its finite objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    x: Point,
    y: f64,
}

impl Observation {
    pub fn new(x: Point, y: f64) -> Result<Self, ProposerError> {
        if !y.is_finite() {
            return Err(ProposerError::NonFiniteObjective(y));
        }
        Ok(Observation { x, y })
    }

    pub fn x(&self) -> &Point {
        &self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Append-only history of completed evaluations, shared by all workers.
///
/// Insertion order is preserved and meaningful: ties in the objective are
/// broken by arrival when splitting.
#[derive(Debug, Clone, Default)]
pub struct ObservationSet {
    observations: Vec<Observation>,
}

impl ObservationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, obs: Observation) {
        self.observations.push(obs);
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn as_slice(&self) -> &[Observation] {
        &self.observations
    }

    pub fn iter(&self) -> impl Iterator<Item = &Observation> {
        self.observations.iter()
    }

    /// Smallest objective value seen so far.
    pub fn best_y(&self) -> Option<f64> {
        self.observations
            .iter()
            .map(Observation::y)
            .min_by(f64::total_cmp)
    }
}

impl From<Vec<Observation>> for ObservationSet {
    fn from(observations: Vec<Observation>) -> Self {
        ObservationSet { observations }
    }
}

/// Tuning knobs for the proposal rules.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposerConfig {
    /// Quantile separating the good tail from the rest.
    pub gamma: f64,
    /// Proposals are uniform until this many observations have completed.
    pub n_startup: usize,
    /// Rejection-sampling attempt cap; on exhaustion the best-probability
    /// candidate seen is returned.
    pub max_rejection_attempts: usize,
    /// Candidate batch size for the classic ratio-maximizing rule.
    pub n_candidates_classic: usize,
}

impl Default for ProposerConfig {
    fn default() -> Self {
        ProposerConfig {
            gamma: 0.1,
            n_startup: 10,
            max_rejection_attempts: 1000,
            n_candidates_classic: 24,
        }
    }
}

impl ProposerConfig {
    pub fn validate(&self) -> Result<(), ProposerError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(ProposerError::InvalidGamma(self.gamma));
        }
        if self.max_rejection_attempts == 0 {
            return Err(ProposerError::ZeroBudget("max_rejection_attempts"));
        }
        if self.n_candidates_classic == 0 {
            return Err(ProposerError::ZeroBudget("n_candidates_classic"));
        }
        Ok(())
    }
}

/// Observations partitioned at the γ-quantile of the objective.
#[derive(Debug, Clone)]
pub struct GammaSplit {
    /// The `max(1, ⌈γ·n⌉)` observations with the smallest objectives.
    pub below: Vec<Observation>,
    /// Everything else, possibly empty.
    pub above: Vec<Observation>,
    /// Smallest objective in `above`; `+∞` when `above` is empty.
    pub y_star: f64,
    pub gamma: f64,
}

/// Partition `observations` at the γ-quantile.
///
/// Sorting is by objective ascending and stable, so equal objectives keep
/// their arrival order. The good side always contains at least one point.
pub fn split(observations: &[Observation], gamma: f64) -> Result<GammaSplit, ProposerError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ProposerError::InvalidGamma(gamma));
    }
    let n = observations.len();
    if n == 0 {
        return Err(ProposerError::NoObservations);
    }
    let mut sorted: Vec<Observation> = observations.to_vec();
    sorted.sort_by(|a, b| a.y.total_cmp(&b.y));
    let n_below = ((gamma * n as f64).ceil() as usize).max(1);
    let above = sorted.split_off(n_below.min(n));
    let y_star = above.first().map_or(f64::INFINITY, Observation::y);
    Ok(GammaSplit {
        below: sorted,
        above,
        y_star,
        gamma,
    })
}

/// Probability that a point with good-tail log-density `log_l` and
/// complement log-density `log_g` improves on the split value:
/// `γ·l / (γ·l + (1 − γ)·g)`, evaluated in log space so extreme density
/// ratios saturate to 0 or 1 instead of producing NaN.
pub fn success_probability(log_l: f64, log_g: f64, gamma: f64) -> f64 {
    1.0 / (1.0 + ((log_g - log_l) + ((1.0 - gamma) / gamma).ln()).exp())
}

/// The fitted good/bad density pair for one proposal round.
struct DensityPair {
    l: ParzenEstimator,
    g: ParzenEstimator,
}

fn fit_pair(
    observations: &ObservationSet,
    space: &SearchSpace,
    gamma: f64,
) -> Result<Option<DensityPair>, ProposerError> {
    let parts = split(observations.as_slice(), gamma)?;
    if parts.above.is_empty() {
        return Ok(None);
    }
    let below: Vec<Point> = parts.below.iter().map(|o| o.x.clone()).collect();
    let above: Vec<Point> = parts.above.iter().map(|o| o.x.clone()).collect();
    Ok(Some(DensityPair {
        l: ParzenEstimator::fit(&below, space)?,
        g: ParzenEstimator::fit(&above, space)?,
    }))
}

/// Draw the next point to evaluate by rejection sampling from the success
/// probability.
///
/// Until `n_startup` observations exist (or while the split leaves the bad
/// side empty) proposals are uniform. Otherwise the candidate/threshold
/// pairs for all `max_rejection_attempts` rounds are drawn up front — one
/// uniform candidate followed by one acceptance uniform per round, a fixed
/// stream layout independent of where acceptance lands — and candidates are
/// then screened in order. The first candidate whose threshold falls below
/// its success probability wins; if none does, the candidate with the
/// highest success probability is returned.
///
/// Only completed observations participate; in-flight evaluations are
/// invisible to the model. Diversity across concurrent proposals comes from
/// the sampling itself, not from conditioning on pending points.
pub fn propose(
    observations: &ObservationSet,
    space: &SearchSpace,
    config: &ProposerConfig,
    rng: &mut RandomStream,
) -> Result<Point, ProposerError> {
    config.validate()?;
    if observations.len() < config.n_startup.max(1) {
        return Ok(space.sample_uniform(rng));
    }
    let Some(pair) = fit_pair(observations, space, config.gamma)? else {
        return Ok(space.sample_uniform(rng));
    };
    let draws: Vec<(Point, f64)> = (0..config.max_rejection_attempts)
        .map(|_| (space.sample_uniform(rng), rng.random()))
        .collect();
    let mut best: Option<(f64, usize)> = None;
    for (i, (candidate, threshold)) in draws.iter().enumerate() {
        let p = success_probability(
            pair.l.log_pdf_unchecked(candidate.coords()),
            pair.g.log_pdf_unchecked(candidate.coords()),
            config.gamma,
        );
        if *threshold < p {
            return Ok(candidate.clone());
        }
        if best.map_or(true, |(bp, _)| p > bp) {
            best = Some((p, i));
        }
    }
    let (_, idx) = best.expect("max_rejection_attempts >= 1");
    Ok(draws[idx].0.clone())
}

/// Classic ratio-maximizing proposal: sample `n_candidates_classic` points
/// from the good-tail density and return the one maximizing `l/g`.
///
/// Startup and empty-bad-side handling match [`propose`]. Being an argmax,
/// this rule returns near-identical points when called repeatedly on the
/// same history, which is exactly the failure mode the rejection rule
/// avoids.
pub fn propose_classic_tpe(
    observations: &ObservationSet,
    space: &SearchSpace,
    config: &ProposerConfig,
    rng: &mut RandomStream,
) -> Result<Point, ProposerError> {
    config.validate()?;
    if observations.len() < config.n_startup.max(1) {
        return Ok(space.sample_uniform(rng));
    }
    let Some(pair) = fit_pair(observations, space, config.gamma)? else {
        return Ok(space.sample_uniform(rng));
    };
    let mut best: Option<(f64, Point)> = None;
    for _ in 0..config.n_candidates_classic {
        let candidate = pair.l.sample(rng);
        let ratio = pair.l.log_pdf_unchecked(candidate.coords())
            - pair.g.log_pdf_unchecked(candidate.coords());
        if best.as_ref().map_or(true, |(br, _)| ratio > *br) {
            best = Some((ratio, candidate));
        }
    }
    Ok(best.expect("n_candidates_classic >= 1").1)
}
