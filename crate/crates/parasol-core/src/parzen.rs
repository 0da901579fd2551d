//! Product-form kernel density estimation over a search space.
//!
//! A [`ParzenEstimator`] models a density on a box domain as an independent
//! product of one-dimensional mixtures. Each dimension gets one truncated
//! Gaussian per observation, centered at the observed coordinate, plus a
//! single wide "prior" kernel at the domain midpoint whose bandwidth equals
//! the domain width. All `n + 1` components share the weight `1/(n+1)`.
//!
//! The prior component guarantees strictly positive density everywhere in
//! the domain, which the rejection sampler upstream depends on: the
//! acceptance probability must never be exactly zero.
//!
//! Bandwidths follow a Scott-style rule with a spike guard: per dimension,
//! `b = s · n^(-1/5)` (sample standard deviation `s`), except that a single
//! observation gets the full domain width; the result is clipped to
//! `[1e-3 · width, width]`, so duplicated observations degrade to the clip
//! floor instead of a zero-width spike.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use std::cell::RefCell;
use thiserror::Error;

use crate::fastexp::exp_in_place;
use crate::rng::RandomStream;
use crate::space::{Point, SearchSpace, SpaceError};

const SQRT_2PI: f64 = 2.5066282746310002;
/// Bandwidth clip floor, as a fraction of the domain width.
const CLIP_FLOOR: f64 = 1e-3;

/// Errors from estimator construction.
#[derive(Debug, Error)]
pub enum ParzenError {
    #[error("cannot fit a density estimator to an empty point list")]
    EmptyFit,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// One truncated-Gaussian mixture component.
#[derive(Debug, Clone)]
pub struct Kernel1D {
    /// Gaussian location; always inside the truncation interval.
    pub center: f64,
    /// Gaussian scale before truncation.
    pub bandwidth: f64,
    /// Mixture weight.
    pub weight: f64,
    /// Truncation interval (the dimension's domain).
    pub low: f64,
    pub high: f64,
}

impl Kernel1D {
    /// Probability mass of the untruncated Gaussian inside `[low, high]`;
    /// the truncated density divides by this, strictly positive by
    /// construction (the center lies inside the interval).
    fn mass(&self) -> f64 {
        let n = Normal::new(0.0, 1.0).unwrap();
        n.cdf((self.high - self.center) / self.bandwidth)
            - n.cdf((self.low - self.center) / self.bandwidth)
    }
}

/// Packed per-dimension evaluation layout: observation kernels sorted by
/// center so density queries touch only the centers within the window that
/// can contribute above the relative error floor.
#[derive(Debug, Clone)]
struct DimEval {
    /// Observation centers, ascending.
    centers: Vec<f64>,
    /// `ln(weight) - ln(bandwidth · mass · √2π)` per sorted center.
    log_coefs: Vec<f64>,
    inv_band: f64,
    /// Half-width of the contribution window around a query point.
    window: f64,
    prior_center: f64,
    prior_inv_band: f64,
    prior_log_coef: f64,
}

impl DimEval {
    /// Log-density of this dimension's mixture at `x` (in-domain).
    ///
    /// Observation kernels outside `x ± window` are skipped; the window is
    /// sized in `fit` so the skipped mass is below 1e-11 of the total, far
    /// inside every tolerance used by callers. No max-shift is needed:
    /// window plus clip floor bound all exponents to a safe range.
    fn log_pdf(&self, x: f64) -> f64 {
        let lo = self.centers.partition_point(|&c| c < x - self.window);
        let hi = self.centers.partition_point(|&c| c <= x + self.window);
        let obs_sum = SCRATCH.with_borrow_mut(|scratch| {
            scratch.resize(hi - lo, 0.0);
            let t = &mut scratch[..hi - lo];
            let centers = &self.centers[lo..hi];
            let coefs = &self.log_coefs[lo..hi];
            for i in 0..t.len() {
                let z = (x - centers[i]) * self.inv_band;
                t[i] = coefs[i] - 0.5 * z * z;
            }
            exp_in_place(t);
            t.iter().sum::<f64>()
        });
        let zp = (x - self.prior_center) * self.prior_inv_band;
        let prior = (self.prior_log_coef - 0.5 * zp * zp).exp();
        (obs_sum + prior).ln()
    }
}

thread_local! {
    static SCRATCH: RefCell<Vec<f64>> = const { RefCell::new(Vec::new()) };
}

/// A fitted product density over a search space.
#[derive(Debug, Clone)]
pub struct ParzenEstimator {
    space: SearchSpace,
    /// Per dimension: one kernel per observation (insertion order), prior last.
    kernels: Vec<Vec<Kernel1D>>,
    evals: Vec<DimEval>,
    n_obs: usize,
}

impl ParzenEstimator {
    /// Fit a product estimator to `points`.
    ///
    /// Every dimension receives `points.len() + 1` equally weighted
    /// components: one per observation and the domain-wide prior.
    pub fn fit(points: &[Point], space: &SearchSpace) -> Result<Self, ParzenError> {
        if points.is_empty() {
            return Err(ParzenError::EmptyFit);
        }
        for p in points {
            space.validate(p)?;
        }
        let n = points.len();
        let weight = 1.0 / (n as f64 + 1.0);
        let mut kernels = Vec::with_capacity(space.d());
        let mut evals = Vec::with_capacity(space.d());
        for (k, dim) in space.dims().iter().enumerate() {
            let width = dim.width();
            let band = clipped_bandwidth(points.iter().map(|p| p.coords()[k]), n, width);
            let mut dim_kernels: Vec<Kernel1D> = points
                .iter()
                .map(|p| Kernel1D {
                    center: p.coords()[k],
                    bandwidth: band,
                    weight,
                    low: dim.low(),
                    high: dim.high(),
                })
                .collect();
            let prior = Kernel1D {
                center: dim.low() + 0.5 * width,
                bandwidth: width,
                weight,
                low: dim.low(),
                high: dim.high(),
            };

            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| dim_kernels[a].center.total_cmp(&dim_kernels[b].center));
            let centers: Vec<f64> = order.iter().map(|&i| dim_kernels[i].center).collect();
            let log_w = -((n + 1) as f64).ln();
            let log_coefs: Vec<f64> = order
                .iter()
                .map(|&i| {
                    let kern = &dim_kernels[i];
                    log_w - (kern.bandwidth * kern.mass() * SQRT_2PI).ln()
                })
                .collect();
            // Window radius: make the skipped tail mass at most 1e-11 of the
            // total. The prior term alone bounds the total from below, and
            // coefficients vary by at most ln(width/band) plus a small mass
            // correction, which gives the margin terms below.
            let z_cut = (2.0 * (((n + 1) as f64 * 1e11).ln() + (width / band).ln() + 0.25)).sqrt();
            let prior_log_coef = log_w - (prior.bandwidth * prior.mass() * SQRT_2PI).ln();
            evals.push(DimEval {
                centers,
                log_coefs,
                inv_band: 1.0 / band,
                window: z_cut * band,
                prior_center: prior.center,
                prior_inv_band: 1.0 / prior.bandwidth,
                prior_log_coef,
            });
            dim_kernels.push(prior);
            kernels.push(dim_kernels);
        }
        Ok(ParzenEstimator {
            space: space.clone(),
            kernels,
            evals,
            n_obs: n,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    /// Number of observations the estimator was fitted to.
    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    /// The mixture components of one dimension, observation kernels in
    /// insertion order followed by the prior kernel.
    pub fn dim_kernels(&self, dim: usize) -> &[Kernel1D] {
        &self.kernels[dim]
    }

    /// Log-density of the full product estimator at `p`.
    pub fn log_pdf(&self, p: &Point) -> Result<f64, SpaceError> {
        self.space.validate(p)?;
        Ok(self.log_pdf_unchecked(p.coords()))
    }

    /// Log-density of a single dimension's mixture at `x`, which must lie in
    /// that dimension's domain.
    pub fn dim_log_pdf(&self, dim: usize, x: f64) -> f64 {
        debug_assert!(x >= self.space.dims()[dim].low() && x <= self.space.dims()[dim].high());
        self.evals[dim].log_pdf(x)
    }

    /// As [`log_pdf`](Self::log_pdf) but skipping bounds validation; used in
    /// proposal loops where candidates are drawn in-domain by construction.
    pub(crate) fn log_pdf_unchecked(&self, coords: &[f64]) -> f64 {
        self.evals
            .iter()
            .zip(coords)
            .map(|(e, &x)| e.log_pdf(x))
            .sum()
    }

    /// Draw one point from the estimator: per dimension, pick a component
    /// uniformly (all weights are equal) and sample its truncated Gaussian by
    /// inverse CDF.
    pub fn sample(&self, rng: &mut RandomStream) -> Point {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let coords = self
            .kernels
            .iter()
            .map(|dim_kernels| {
                let kern = &dim_kernels[rng.random_range(0..dim_kernels.len())];
                let z_lo = (kern.low - kern.center) / kern.bandwidth;
                let z_hi = (kern.high - kern.center) / kern.bandwidth;
                let (c_lo, c_hi) = (normal.cdf(z_lo), normal.cdf(z_hi));
                let u: f64 = rng.random();
                let z = normal.inverse_cdf(c_lo + u * (c_hi - c_lo));
                (kern.center + kern.bandwidth * z).clamp(kern.low, kern.high)
            })
            .collect();
        Point::new(coords)
    }
}

/// Scott-style bandwidth with the spike guard described in the module docs.
fn clipped_bandwidth(coords: impl Iterator<Item = f64>, n: usize, width: f64) -> f64 {
    let raw = if n < 2 {
        width
    } else {
        let xs: Vec<f64> = coords.collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
        var.sqrt() * (n as f64).powf(-0.2)
    };
    raw.clamp(CLIP_FLOOR * width, width)
}
