//! Benchmark objectives with stochastic evaluation durations.
//!
//! Every objective couples a deterministic scalar function on a box domain
//! with a duration model: evaluating a point "costs" a half-normally
//! distributed amount of simulated time, so asynchronous workers finish out
//! of order even though objective values themselves are reproducible.
//!
//! Provided objectives:
//!
//! * `hartmann6` — the classic 6-dimensional Hartmann function on `[0,1]^6`,
//!   four Gaussian lobes, global minimum ≈ −3.32237,
//! * `hartmann18` — three independent Hartmann-6 blocks summed, on
//!   `[0,1]^18`, global minimum ≈ −9.96710,
//! * `mlp-surrogate` — a synthetic stand-in for tuning a two-hidden-layer
//!   MLP: six hyperparameters on realistic ranges, objective shaped like a
//!   validation error in `[0,1]`, and a duration that grows with the hidden
//!   layer widths.

use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::rng::RandomStream;
use crate::space::{ParamDomain, Point, SearchSpace, SpaceError};

/// Errors from objective construction and evaluation.
#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("expected {expected} coordinates, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutOfUnitBox { index: usize, value: f64 },
    #[error("unknown objective '{0}'; valid names: hartmann18, hartmann6, mlp-surrogate")]
    UnknownObjective(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

const ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.665],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

/// Magnitude of the Hartmann-6 global minimum; used to rescale the MLP
/// surrogate onto a validation-error-like `[0, 1]` range.
const HARTMANN6_DEPTH: f64 = 3.3223680114155121;

/// The 6-dimensional Hartmann function on the unit box (minimization).
pub fn hartmann6(x: &[f64]) -> Result<f64, BenchmarkError> {
    check_unit_box(x, 6)?;
    Ok(hartmann6_unchecked(x))
}

/// Sum of three independent Hartmann-6 blocks on `[0,1]^18` (minimization).
pub fn hartmann18(x: &[f64]) -> Result<f64, BenchmarkError> {
    check_unit_box(x, 18)?;
    Ok(x.chunks_exact(6).map(hartmann6_unchecked).sum())
}

fn check_unit_box(x: &[f64], expected: usize) -> Result<(), BenchmarkError> {
    if x.len() != expected {
        return Err(BenchmarkError::WrongDimension {
            expected,
            got: x.len(),
        });
    }
    for (index, &value) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(BenchmarkError::OutOfUnitBox { index, value });
        }
    }
    Ok(())
}

fn hartmann6_unchecked(x: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        let mut inner = 0.0;
        for j in 0..6 {
            let d = x[j] - P[i][j];
            inner += A[i][j] * d * d;
        }
        sum -= ALPHA[i] * (-inner).exp();
    }
    sum
}

/// Scale of the half-normal duration model that makes the mean evaluation
/// time exactly 1: `√(π/2)`, since a half-normal with scale σ has mean
/// `σ·√(2/π)`.
pub fn default_duration_sigma() -> f64 {
    (std::f64::consts::PI / 2.0).sqrt()
}

/// Draw an evaluation duration: the absolute value of a centered Gaussian
/// with scale `sigma`. Always non-negative.
pub fn halfnormal_duration(sigma: f64, rng: &mut RandomStream) -> f64 {
    let normal = Normal::new(0.0, sigma).expect("sigma must be positive and finite");
    normal.sample(rng).abs()
}

/// What the simulator needs from an objective: a domain, a deterministic
/// value, and a stochastic duration. Implemented by [`Objective`]; tests
/// implement it directly to pin durations.
pub trait ObjectiveModel {
    fn space(&self) -> &SearchSpace;
    fn evaluate(&self, p: &Point) -> Result<f64, BenchmarkError>;
    fn duration(&self, p: &Point, rng: &mut RandomStream) -> Result<f64, BenchmarkError>;
}

impl ObjectiveModel for Objective {
    fn space(&self) -> &SearchSpace {
        Objective::space(self)
    }

    fn evaluate(&self, p: &Point) -> Result<f64, BenchmarkError> {
        Objective::evaluate(self, p)
    }

    fn duration(&self, p: &Point, rng: &mut RandomStream) -> Result<f64, BenchmarkError> {
        Objective::duration(self, p, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ObjectiveKind {
    Hartmann6,
    Hartmann18,
    MlpSurrogate,
}

/// A benchmark objective: a named search space, a deterministic evaluation,
/// and a stochastic duration model.
#[derive(Debug, Clone)]
pub struct Objective {
    name: &'static str,
    space: SearchSpace,
    kind: ObjectiveKind,
}

impl Objective {
    pub fn hartmann6() -> Objective {
        Objective {
            name: "hartmann6",
            space: SearchSpace::unit_box(6).unwrap(),
            kind: ObjectiveKind::Hartmann6,
        }
    }

    pub fn hartmann18() -> Objective {
        Objective {
            name: "hartmann18",
            space: SearchSpace::unit_box(18).unwrap(),
            kind: ObjectiveKind::Hartmann18,
        }
    }

    /// Synthetic MLP-tuning surrogate.
    ///
    /// The space mirrors a two-hidden-layer MLP tuning problem: learning
    /// rate, momentum, two integer layer widths, and two dropout rates. The
    /// objective normalizes the externalized parameters onto the unit box
    /// and evaluates a rescaled Hartmann-6, giving a smooth multimodal
    /// "validation error" in `[0, 1]` (0 at the optimum). Duration scales
    /// linearly with the total hidden width, so big networks are slow —
    /// matching how real training cost behaves.
    pub fn mlp_surrogate() -> Objective {
        let dims = vec![
            ParamDomain::continuous("learning_rate", 1e-3, 0.2).unwrap(),
            ParamDomain::continuous("momentum", 0.8, 0.99).unwrap(),
            ParamDomain::integer("hidden1", 50.0, 500.0).unwrap(),
            ParamDomain::integer("hidden2", 50.0, 500.0).unwrap(),
            ParamDomain::continuous("dropout1", 0.0, 0.8).unwrap(),
            ParamDomain::continuous("dropout2", 0.0, 0.8).unwrap(),
        ];
        Objective {
            name: "mlp-surrogate",
            space: SearchSpace::new(dims).unwrap(),
            kind: ObjectiveKind::MlpSurrogate,
        }
    }

    /// Look an objective up by its CLI/config name.
    pub fn from_name(name: &str) -> Result<Objective, BenchmarkError> {
        match name {
            "hartmann6" => Ok(Objective::hartmann6()),
            "hartmann18" => Ok(Objective::hartmann18()),
            "mlp-surrogate" => Ok(Objective::mlp_surrogate()),
            other => Err(BenchmarkError::UnknownObjective(other.to_string())),
        }
    }

    /// All recognized objective names.
    pub fn names() -> [&'static str; 3] {
        ["hartmann18", "hartmann6", "mlp-surrogate"]
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    /// Deterministic objective value at `p`. Integer dimensions are rounded
    /// (half away from zero) before the underlying function sees them.
    pub fn evaluate(&self, p: &Point) -> Result<f64, BenchmarkError> {
        self.space.validate(p)?;
        let ext = self.space.externalize(p);
        match self.kind {
            ObjectiveKind::Hartmann6 => hartmann6(&ext),
            ObjectiveKind::Hartmann18 => hartmann18(&ext),
            ObjectiveKind::MlpSurrogate => {
                let u: Vec<f64> = self
                    .space
                    .dims()
                    .iter()
                    .zip(&ext)
                    .map(|(dim, &v)| (v - dim.low()) / dim.width())
                    .collect();
                Ok(1.0 + hartmann6(&u)? / HARTMANN6_DEPTH)
            }
        }
    }

    /// Draw a simulated evaluation duration for `p`.
    ///
    /// Hartmann objectives cost a plain half-normal with mean 1. The MLP
    /// surrogate multiplies that by `(hidden1 + hidden2) / 1000`, so mean
    /// cost ranges from 0.1 (both layers at 50) to 1.0 (both at 500).
    pub fn duration(&self, p: &Point, rng: &mut RandomStream) -> Result<f64, BenchmarkError> {
        self.space.validate(p)?;
        let base = halfnormal_duration(default_duration_sigma(), rng);
        match self.kind {
            ObjectiveKind::Hartmann6 | ObjectiveKind::Hartmann18 => Ok(base),
            ObjectiveKind::MlpSurrogate => {
                let ext = self.space.externalize(p);
                Ok(base * (ext[2] + ext[3]) / 1000.0)
            }
        }
    }
}
