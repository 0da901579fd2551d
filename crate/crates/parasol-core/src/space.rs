//! Bounded box search spaces.
//!
//! A [`SearchSpace`] is an ordered list of named, bounded dimensions. Every
//! dimension is represented internally as a continuous interval; dimensions
//! declared [`ParamKind::IntegerRounded`] are rounded only when a point is
//! handed to an objective function (see [`SearchSpace::externalize`]), never
//! inside the samplers themselves.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RandomStream;

/// Errors from space construction and point validation.
#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("search space must have at least one dimension")]
    Empty,
    #[error("duplicate dimension name `{0}`")]
    DuplicateName(String),
    #[error("dimension `{name}`: bounds must be finite with low < high, got [{low}, {high}]")]
    InvalidBounds { name: String, low: f64, high: f64 },
    #[error("point has {got} coordinates, space has {want} dimensions")]
    ShapeMismatch { got: usize, want: usize },
    #[error("coordinate {value} of dimension `{name}` is outside [{low}, {high}]")]
    OutOfBounds {
        name: String,
        value: f64,
        low: f64,
        high: f64,
    },
}

/// How a dimension's values are presented to objective functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    /// Passed through unchanged.
    Continuous,
    /// Rounded half-away-from-zero to the nearest integer at evaluation time.
    IntegerRounded,
}

/// One named, bounded dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawDomain", into = "RawDomain")]
pub struct ParamDomain {
    name: String,
    low: f64,
    high: f64,
    kind: ParamKind,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    name: String,
    low: f64,
    high: f64,
    #[serde(default = "default_kind")]
    kind: ParamKind,
}

fn default_kind() -> ParamKind {
    ParamKind::Continuous
}

impl TryFrom<RawDomain> for ParamDomain {
    type Error = SpaceError;
    fn try_from(raw: RawDomain) -> Result<Self, SpaceError> {
        ParamDomain::new(raw.name, raw.low, raw.high, raw.kind)
    }
}

impl From<ParamDomain> for RawDomain {
    fn from(d: ParamDomain) -> RawDomain {
        RawDomain {
            name: d.name,
            low: d.low,
            high: d.high,
            kind: d.kind,
        }
    }
}

impl ParamDomain {
    /// A validated dimension; bounds must be finite with `low < high`.
    pub fn new(
        name: impl Into<String>,
        low: f64,
        high: f64,
        kind: ParamKind,
    ) -> Result<Self, SpaceError> {
        let name = name.into();
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(SpaceError::InvalidBounds { name, low, high });
        }
        Ok(ParamDomain {
            name,
            low,
            high,
            kind,
        })
    }

    /// Shorthand for a continuous dimension.
    pub fn continuous(name: impl Into<String>, low: f64, high: f64) -> Result<Self, SpaceError> {
        Self::new(name, low, high, ParamKind::Continuous)
    }

    /// Shorthand for an integer-rounded dimension.
    pub fn integer(name: impl Into<String>, low: f64, high: f64) -> Result<Self, SpaceError> {
        Self::new(name, low, high, ParamKind::IntegerRounded)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }
}

/// A point in a search space: one continuous coordinate per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

/// An ordered collection of dimensions forming a box domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<ParamDomain>", into = "Vec<ParamDomain>")]
pub struct SearchSpace {
    dims: Vec<ParamDomain>,
}

impl TryFrom<Vec<ParamDomain>> for SearchSpace {
    type Error = SpaceError;
    fn try_from(dims: Vec<ParamDomain>) -> Result<Self, SpaceError> {
        SearchSpace::new(dims)
    }
}

impl From<SearchSpace> for Vec<ParamDomain> {
    fn from(s: SearchSpace) -> Vec<ParamDomain> {
        s.dims
    }
}

impl SearchSpace {
    /// A validated space: at least one dimension, names unique.
    pub fn new(dims: Vec<ParamDomain>) -> Result<Self, SpaceError> {
        if dims.is_empty() {
            return Err(SpaceError::Empty);
        }
        for (i, d) in dims.iter().enumerate() {
            if dims[..i].iter().any(|o| o.name == d.name) {
                return Err(SpaceError::DuplicateName(d.name.clone()));
            }
        }
        Ok(SearchSpace { dims })
    }

    /// The unit box `[0,1]^d` with dimensions named `x1..xd`.
    pub fn unit_box(d: usize) -> Result<Self, SpaceError> {
        let dims = (1..=d)
            .map(|k| ParamDomain::continuous(format!("x{k}"), 0.0, 1.0))
            .collect::<Result<Vec<_>, _>>()?;
        SearchSpace::new(dims)
    }

    pub fn dims(&self) -> &[ParamDomain] {
        &self.dims
    }

    /// Dimension count.
    pub fn d(&self) -> usize {
        self.dims.len()
    }

    /// Check that `p` has the right arity and every coordinate is in bounds;
    /// returns the point untouched on success.
    pub fn validate<'p>(&self, p: &'p Point) -> Result<&'p Point, SpaceError> {
        if p.len() != self.d() {
            return Err(SpaceError::ShapeMismatch {
                got: p.len(),
                want: self.d(),
            });
        }
        for (dim, &v) in self.dims.iter().zip(p.coords()) {
            if !(v >= dim.low && v <= dim.high) {
                return Err(SpaceError::OutOfBounds {
                    name: dim.name.clone(),
                    value: v,
                    low: dim.low,
                    high: dim.high,
                });
            }
        }
        Ok(p)
    }

    /// Draw each coordinate independently and uniformly from its interval.
    pub fn sample_uniform(&self, rng: &mut RandomStream) -> Point {
        let coords = self
            .dims
            .iter()
            .map(|dim| rng.random_range(dim.low..=dim.high))
            .collect();
        Point::new(coords)
    }

    /// Map an internal (continuous) point to the coordinates seen by
    /// objective functions: continuous dimensions pass through bit-identical,
    /// integer-rounded dimensions are rounded half-away-from-zero.
    pub fn externalize(&self, p: &Point) -> Vec<f64> {
        self.dims
            .iter()
            .zip(p.coords())
            .map(|(dim, &v)| match dim.kind {
                ParamKind::Continuous => v,
                ParamKind::IntegerRounded => v.round(),
            })
            .collect()
    }
}
