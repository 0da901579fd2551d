//! Asynchronous black-box optimization at desk scale.
//!
//! This crate implements a sampler family for minimizing expensive black-box
//! functions with many parallel workers, together with everything needed to
//! study it reproducibly:
//!
//! * [`space`] — bounded box search spaces with continuous and
//!   integer-rounded dimensions,
//! * [`parzen`] — per-dimension truncated-Gaussian kernel density estimators
//!   composed into product densities,
//! * [`proposer`] — the probabilistic proposal rule: split observations at the
//!   γ-quantile, model the good/bad sets with two density estimators, and draw
//!   new points by rejection sampling from the success probability
//!   `γ·l(x) / (γ·l(x) + (1−γ)·g(x))`, plus the classic ratio-maximizing TPE
//!   rule for contrast,
//! * [`gp`] — a Gaussian-process Thompson-sampling baseline (ARD squared
//!   exponential kernel, likelihood-fit hyperparameters) and uniform random
//!   search,
//! * [`benchmarks`] — Hartmann-family objectives and a synthetic MLP-tuning
//!   surrogate, each with a stochastic evaluation-duration model,
//! * [`simulator`] — a deterministic discrete-event model of `W` asynchronous
//!   workers sharing one observation history,
//! * [`experiment`] — a batch runner that repeats simulations over seeds and
//!   aggregates best-so-far curves to mean ± standard error CSVs,
//! * [`bench`] — wall-clock measurement of proposal cost as the observation
//!   count grows.
//!
//! All randomness flows through explicitly seeded, named streams
//! ([`rng`]), so every simulation and experiment is bit-reproducible.

pub mod bench;
pub mod benchmarks;
pub mod experiment;
mod fastexp;
pub mod gp;
pub mod parzen;
pub mod proposer;
pub mod rng;
pub mod sampler;
pub mod simulator;
pub mod space;

pub use proposer::{Observation, ObservationSet};
pub use sampler::Sampler;
pub use space::{ParamDomain, ParamKind, Point, SearchSpace};
