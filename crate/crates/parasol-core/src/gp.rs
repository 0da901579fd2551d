//! Gaussian-process Thompson sampling and uniform random search baselines.
//!
//! The GP baseline models standardized objectives with a squared-exponential
//! kernel carrying one bandwidth per dimension plus signal and noise scales:
//!
//! ```text
//! k(x, x') = scale² · exp(−½ Σ_k (x_k − x'_k)² / ℓ_k²) + noise² · 1[x = x']
//! ```
//!
//! Hyperparameters are refit from scratch at every proposal by maximizing
//! the log marginal likelihood with a bounded coordinate search in log
//! space: a handful of restarts, each running golden-section line searches
//! over one hyperparameter at a time and accepting only improvements.
//!
//! A proposal is one Thompson draw: sample the joint posterior at a large
//! uniform candidate set and return the candidate whose sampled value is
//! smallest. Sampling (rather than minimizing the posterior mean) is what
//! keeps concurrent workers from being handed the same point.

use ndarray::{Array1, Array2};
use ndarray_linalg::{cholesky::*, triangular::*};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::fastexp::exp_in_place;
use crate::proposer::Observation;
use crate::rng::RandomStream;
use crate::space::{Point, SearchSpace, SpaceError};

/// Errors from GP fitting and proposal generation.
#[derive(Debug, Error)]
pub enum GpError {
    #[error("fitting a GP requires at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveHyperparameter { name: &'static str, value: f64 },
    #[error("expected {expected} bandwidths, got {got}")]
    WrongBandwidthCount { expected: usize, got: usize },
    #[error("candidate batch must not be empty")]
    NoCandidates,
    #[error("covariance factorization failed even with maximum jitter")]
    Factorization,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Budget knobs for the likelihood maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    /// Independent optimizer restarts; the first uses fixed mid-range
    /// hyperparameters, the rest start log-uniform inside the bounds.
    pub n_starts: usize,
    /// Coordinate line searches per restart (cycling through bandwidths,
    /// then signal scale, then noise scale).
    pub n_line_searches: usize,
    /// Log-likelihood evaluations per line search.
    pub n_evals_per_search: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            n_starts: 4,
            n_line_searches: 50,
            n_evals_per_search: 10,
        }
    }
}

/// Diagonal jitter escalation used whenever a Cholesky factorization fails.
const JITTERS: [f64; 5] = [0.0, 1e-10, 1e-8, 1e-6, 1e-4];

/// Acquisition candidate count for iteration `j` in `d` dimensions:
/// `⌊max(2000, min(5, d) · √(min(j, 1000)))⌋`. The √ term tops out near 160,
/// so the floor of 2000 is what this returns in practice.
pub fn n_acq(d: usize, j: usize) -> usize {
    let dynamic = (5.0f64).min(d as f64) * ((j as f64).min(1000.0)).sqrt();
    (2000.0f64).max(dynamic).floor() as usize
}

/// Uniform random search: every proposal is an independent uniform draw.
pub fn propose_random(space: &SearchSpace, rng: &mut RandomStream) -> Point {
    space.sample_uniform(rng)
}

/// A fitted GP posterior over standardized objective values.
#[derive(Debug, Clone)]
pub struct GpModel {
    space: SearchSpace,
    x: Vec<Point>,
    y_mean: f64,
    y_std: f64,
    bandwidths: Vec<f64>,
    scale: f64,
    noise: f64,
    chol: Array2<f64>,
    alpha: Array1<f64>,
    lml: f64,
}

impl GpModel {
    /// Build a model with explicit hyperparameters (no fitting): factorize
    /// the kernel matrix once and cache everything proposals need.
    pub fn with_hyperparameters(
        observations: &[Observation],
        space: &SearchSpace,
        bandwidths: Vec<f64>,
        scale: f64,
        noise: f64,
    ) -> Result<GpModel, GpError> {
        let n = observations.len();
        if n < 2 {
            return Err(GpError::TooFewObservations(n));
        }
        if bandwidths.len() != space.d() {
            return Err(GpError::WrongBandwidthCount {
                expected: space.d(),
                got: bandwidths.len(),
            });
        }
        for (name, value) in [("scale", scale), ("noise", noise)]
            .into_iter()
            .chain(bandwidths.iter().map(|&b| ("bandwidth", b)))
        {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GpError::NonPositiveHyperparameter { name, value });
            }
        }
        let x: Vec<Point> = observations.iter().map(|o| o.x().clone()).collect();
        for p in &x {
            space.validate(p)?;
        }
        let raw_y: Vec<f64> = observations.iter().map(Observation::y).collect();
        let y_mean = raw_y.iter().sum::<f64>() / n as f64;
        let var = raw_y.iter().map(|y| (y - y_mean) * (y - y_mean)).sum::<f64>() / n as f64;
        let y_std = if var.sqrt() > 0.0 { var.sqrt() } else { 1.0 };
        let ys = Array1::from_iter(raw_y.iter().map(|y| (y - y_mean) / y_std));

        let dists = pairwise_sq_dists(&x, &x, space.d());
        let (chol, alpha, lml) = factorize(&dists, n, &bandwidths, scale, noise, &ys)
            .ok_or(GpError::Factorization)?;
        Ok(GpModel {
            space: space.clone(),
            x,
            y_mean,
            y_std,
            bandwidths,
            scale,
            noise,
            chol,
            alpha,
            lml,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn n_obs(&self) -> usize {
        self.x.len()
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Log marginal likelihood of the standardized targets under the fitted
    /// hyperparameters.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    /// Posterior mean at `p`, on the original objective scale.
    pub fn posterior_mean(&self, p: &Point) -> Result<f64, GpError> {
        self.space.validate(p)?;
        let k_star = self.cross_kernel(std::slice::from_ref(p));
        let mean_std = k_star.t().dot(&self.alpha)[0];
        Ok(self.y_mean + self.y_std * mean_std)
    }

    /// Kernel block between training inputs and `points` (no noise term).
    fn cross_kernel(&self, points: &[Point]) -> Array2<f64> {
        let dists = pairwise_sq_dists(&self.x, points, self.space.d());
        kernel_matrix(
            &dists,
            self.x.len(),
            points.len(),
            &self.bandwidths,
            self.scale,
        )
    }
}

/// Fit kernel hyperparameters by restarted coordinate ascent on the log
/// marginal likelihood and return the model at the best point found.
///
/// Search space (all log-scale): bandwidth `ℓ_k ∈ [0.01·w_k, 10·w_k]` where
/// `w_k` is the domain width, signal scale `∈ [1e-3, 1e3]`, noise scale
/// `∈ [1e-8, 1]` — the targets are standardized before fitting, so these
/// ranges cover everything from near-interpolation to pure noise. A restart
/// ends early once a full cycle over all coordinates accepts no move; the
/// searches are deterministic given the current point, so further cycles
/// could not accept one either.
pub fn fit_gp(
    observations: &[Observation],
    space: &SearchSpace,
    config: &GpConfig,
    rng: &mut RandomStream,
) -> Result<GpModel, GpError> {
    let n = observations.len();
    if n < 2 {
        return Err(GpError::TooFewObservations(n));
    }
    let x: Vec<Point> = observations.iter().map(|o| o.x().clone()).collect();
    for p in &x {
        space.validate(p)?;
    }
    let raw_y: Vec<f64> = observations.iter().map(Observation::y).collect();
    let y_mean = raw_y.iter().sum::<f64>() / n as f64;
    let var = raw_y.iter().map(|y| (y - y_mean) * (y - y_mean)).sum::<f64>() / n as f64;
    let y_std = if var.sqrt() > 0.0 { var.sqrt() } else { 1.0 };
    let ys = Array1::from_iter(raw_y.iter().map(|y| (y - y_mean) / y_std));

    let d = space.d();
    let dists = pairwise_sq_dists(&x, &x, d);
    let (lo, hi): (Vec<f64>, Vec<f64>) = {
        let mut lo = Vec::with_capacity(d + 2);
        let mut hi = Vec::with_capacity(d + 2);
        for dim in space.dims() {
            lo.push((0.01 * dim.width()).ln());
            hi.push((10.0 * dim.width()).ln());
        }
        lo.push((1e-3f64).ln());
        hi.push((1e3f64).ln());
        lo.push((1e-8f64).ln());
        hi.push(0.0);
        (lo, hi)
    };
    let n_params = d + 2;

    let eval = |theta: &[f64]| -> f64 {
        let bandwidths: Vec<f64> = theta[..d].iter().map(|t| t.exp()).collect();
        let scale = theta[d].exp();
        let noise = theta[d + 1].exp();
        match factorize(&dists, n, &bandwidths, scale, noise, &ys) {
            Some((_, _, lml)) => lml,
            None => f64::NEG_INFINITY,
        }
    };

    let mut best_theta: Option<(Vec<f64>, f64)> = None;
    for start in 0..config.n_starts.max(1) {
        let mut theta: Vec<f64> = if start == 0 {
            let mut t: Vec<f64> = space.dims().iter().map(|dim| (0.5 * dim.width()).ln()).collect();
            t.push(0.0); // scale 1 on standardized targets
            t.push((1e-3f64).ln());
            t
        } else {
            (0..n_params)
                .map(|c| rng.random_range(lo[c]..=hi[c]))
                .collect()
        };
        let mut current = eval(&theta);
        let mut searches = 0;
        'restart: loop {
            let mut accepted_in_cycle = false;
            for c in 0..n_params {
                if searches == config.n_line_searches {
                    break 'restart;
                }
                searches += 1;
                let (v, value) = golden_section_max(
                    |v| {
                        let mut probe = theta.clone();
                        probe[c] = v;
                        eval(&probe)
                    },
                    lo[c],
                    hi[c],
                    config.n_evals_per_search,
                );
                if value > current {
                    theta[c] = v;
                    current = value;
                    accepted_in_cycle = true;
                }
            }
            if !accepted_in_cycle {
                break;
            }
        }
        if best_theta.as_ref().map_or(true, |(_, b)| current > *b) {
            best_theta = Some((theta, current));
        }
    }

    let (theta, lml) = best_theta.expect("at least one start");
    if !lml.is_finite() {
        return Err(GpError::Factorization);
    }
    let bandwidths: Vec<f64> = theta[..d].iter().map(|t| t.exp()).collect();
    GpModel::with_hyperparameters(observations, space, bandwidths, theta[d].exp(), theta[d + 1].exp())
}

/// One Thompson draw: sample the joint posterior at `n_candidates` uniform
/// points and return the candidate with the smallest sampled value.
///
/// Stream layout: all candidate coordinates are drawn first, then the
/// standard-normal vector for the posterior sample.
pub fn thompson_propose(
    model: &GpModel,
    n_candidates: usize,
    rng: &mut RandomStream,
) -> Result<Point, GpError> {
    if n_candidates == 0 {
        return Err(GpError::NoCandidates);
    }
    let candidates: Vec<Point> = (0..n_candidates)
        .map(|_| model.space.sample_uniform(rng))
        .collect();
    let z = Array1::from_iter((0..n_candidates).map(|_| rng.sample::<f64, _>(StandardNormal)));

    let k_star = model.cross_kernel(&candidates);
    let a = model
        .chol
        .solve_triangular(UPLO::Lower, Diag::NonUnit, &k_star)
        .map_err(|_| GpError::Factorization)?;
    let mu = k_star.t().dot(&model.alpha);

    let d = model.space.d();
    let cand_dists = pairwise_sq_dists(&candidates, &candidates, d);
    let mut v = kernel_matrix(
        &cand_dists,
        n_candidates,
        n_candidates,
        &model.bandwidths,
        model.scale,
    );
    v -= &a.t().dot(&a);
    let l_v = chol_with_jitter(&v).ok_or(GpError::Factorization)?;
    let sample = mu + l_v.dot(&z);

    let idx = sample
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .map(|(i, _)| i)
        .expect("n_candidates >= 1");
    Ok(candidates[idx].clone())
}

/// Per-dimension squared-distance blocks between two point sets, flattened
/// row-major `(len(xa), len(xb))`; the kernel builders combine them with
/// bandwidth weights without touching the points again.
fn pairwise_sq_dists(xa: &[Point], xb: &[Point], d: usize) -> Vec<Vec<f64>> {
    let mut dists = vec![vec![0.0; xa.len() * xb.len()]; d];
    for (k, dk) in dists.iter_mut().enumerate() {
        let mut idx = 0;
        for pa in xa {
            let va = pa.coords()[k];
            for pb in xb {
                let diff = va - pb.coords()[k];
                dk[idx] = diff * diff;
                idx += 1;
            }
        }
    }
    dists
}

/// Noise-free kernel block from cached squared distances.
fn kernel_matrix(
    dists: &[Vec<f64>],
    n_rows: usize,
    n_cols: usize,
    bandwidths: &[f64],
    scale: f64,
) -> Array2<f64> {
    let mut t = vec![0.0f64; n_rows * n_cols];
    for (dk, &b) in dists.iter().zip(bandwidths) {
        let w = 0.5 / (b * b);
        for (ti, &sq) in t.iter_mut().zip(dk) {
            *ti += w * sq;
        }
    }
    // Exponents below −700 underflow to zero anyway; clamping keeps the
    // argument inside the fast exp's valid range.
    let sf2 = scale * scale;
    for v in &mut t {
        *v = (-*v).max(-700.0);
    }
    exp_in_place(&mut t);
    for v in &mut t {
        *v *= sf2;
    }
    Array2::from_shape_vec((n_rows, n_cols), t).expect("shape matches construction")
}

/// Cholesky of `k` with diagonal jitter escalation; `None` if even the
/// largest jitter fails.
fn chol_with_jitter(k: &Array2<f64>) -> Option<Array2<f64>> {
    for jitter in JITTERS {
        let mut kj = k.clone();
        if jitter > 0.0 {
            for i in 0..kj.nrows() {
                kj[[i, i]] += jitter;
            }
        }
        if let Ok(l) = kj.cholesky(UPLO::Lower) {
            return Some(l);
        }
    }
    None
}

/// Factorize the training covariance and solve for `α = K⁻¹ y`; returns the
/// Cholesky factor, `α`, and the log marginal likelihood.
fn factorize(
    dists: &[Vec<f64>],
    n: usize,
    bandwidths: &[f64],
    scale: f64,
    noise: f64,
    ys: &Array1<f64>,
) -> Option<(Array2<f64>, Array1<f64>, f64)> {
    let mut k = kernel_matrix(dists, n, n, bandwidths, scale);
    let sn2 = noise * noise;
    for i in 0..n {
        k[[i, i]] += sn2;
    }
    let l = chol_with_jitter(&k)?;
    let rhs = ys.view().insert_axis(ndarray::Axis(1));
    let v = l
        .solve_triangular(UPLO::Lower, Diag::NonUnit, &rhs.to_owned())
        .ok()?;
    let alpha2 = l
        .t()
        .to_owned()
        .solve_triangular(UPLO::Upper, Diag::NonUnit, &v)
        .ok()?;
    let alpha = alpha2.index_axis(ndarray::Axis(1), 0).to_owned();
    let quad = ys.dot(&alpha);
    let log_det: f64 = l.diag().iter().map(|v| v.ln()).sum();
    let lml = -0.5 * quad - log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
    Some((l, alpha, lml))
}

/// Golden-section search for a maximum of `f` on `[lo, hi]` using exactly
/// `n_evals` evaluations; returns the best point evaluated.
fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, n_evals: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut bx, mut bf) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 2..n_evals.max(2) {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            if f1 > bf {
                bf = f1;
                bx = x1;
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            if f2 > bf {
                bf = f2;
                bx = x2;
            }
        }
    }
    (bx, bf)
}
