//! Uniform grids on the two halves of the interface problem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs at least {min} interior nodes, got {got}")]
    TooCoarse { min: usize, got: usize },
    #[error("expected {expected} node values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("grids differ: {0}")]
    Incompatible(String),
}

/// Which half of the interval the grid lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interval {
    /// `(-1, 0)`, the wave region.
    Wave,
    /// `(0, 1)`, the heat region.
    Heat,
}

impl Interval {
    pub fn start(self) -> f64 {
        match self {
            Interval::Wave => -1.0,
            Interval::Heat => 0.0,
        }
    }

    pub fn end(self) -> f64 {
        self.start() + 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadratureRule {
    /// Composite Simpson, with a closing 3/8 panel when the interval count is odd.
    Simpson,
}

/// Quadrature weights on `intervals + 1` uniform nodes of spacing `h`.
pub fn simpson_weights(intervals: usize, h: f64) -> Vec<f64> {
    assert!(intervals >= 2, "Simpson weights need at least two intervals");
    let mut w = vec![0.0; intervals + 1];
    let simpson_end = if intervals % 2 == 0 { intervals } else { intervals - 3 };
    let mut j = 0;
    while j < simpson_end {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
        j += 2;
    }
    if simpson_end < intervals {
        let c = 3.0 * h / 8.0;
        w[simpson_end] += c;
        w[simpson_end + 1] += 3.0 * c;
        w[simpson_end + 2] += 3.0 * c;
        w[simpson_end + 3] += c;
    }
    w
}

/// Complex values on the uniform nodes of one interval, endpoints included.
///
/// `n` counts interior nodes, so the spacing is `1 / (n + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub interval: Interval,
    pub n: usize,
    pub values: Vec<Complex64>,
    pub quadrature: QuadratureRule,
}

impl GridFunction {
    pub const MIN_INTERIOR: usize = 2;

    pub fn new(interval: Interval, n: usize, values: Vec<Complex64>) -> Result<Self, GridError> {
        if n < Self::MIN_INTERIOR {
            return Err(GridError::TooCoarse {
                min: Self::MIN_INTERIOR,
                got: n,
            });
        }
        if values.len() != n + 2 {
            return Err(GridError::LengthMismatch {
                expected: n + 2,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(GridError::NonFinite(i));
        }
        Ok(GridFunction {
            interval,
            n,
            values,
            quadrature: QuadratureRule::Simpson,
        })
    }

    pub fn zeros(interval: Interval, n: usize) -> Result<Self, GridError> {
        Self::new(interval, n, vec![Complex64::new(0.0, 0.0); n + 2])
    }

    pub fn from_fn(
        interval: Interval,
        n: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, GridError> {
        let v = node_positions(interval, n).into_iter().map(f).collect();
        Self::new(interval, n, v)
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n + 1) as f64
    }

    pub fn intervals(&self) -> usize {
        self.n + 1
    }

    pub fn nodes(&self) -> Vec<f64> {
        node_positions(self.interval, self.n)
    }

    pub fn weights(&self) -> Vec<f64> {
        match self.quadrature {
            QuadratureRule::Simpson => simpson_weights(self.intervals(), self.h()),
        }
    }

    pub fn first(&self) -> Complex64 {
        self.values[0]
    }

    pub fn last(&self) -> Complex64 {
        *self.values.last().expect("grid is never empty")
    }

    /// Value at the interface `x = 0`.
    pub fn at_interface(&self) -> Complex64 {
        match self.interval {
            Interval::Wave => self.last(),
            Interval::Heat => self.first(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.weights()
            .iter()
            .zip(&self.values)
            .map(|(w, z)| w * z.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &GridFunction) -> Result<Complex64, GridError> {
        self.check_compatible(other)?;
        Ok(self
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| a * b.conj() * *w)
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Second-order finite-difference derivative: centered inside, one-sided
    /// three-point stencils at the endpoints.
    pub fn derivative_fd(&self) -> GridFunction {
        let v = &self.values;
        let m = v.len();
        let inv = 1.0 / self.h();
        let mut d = Vec::with_capacity(m);
        d.push((v[0] * -3.0 + v[1] * 4.0 - v[2]) * (0.5 * inv));
        for j in 1..m - 1 {
            d.push((v[j + 1] - v[j - 1]) * (0.5 * inv));
        }
        d.push((v[m - 1] * 3.0 - v[m - 2] * 4.0 + v[m - 3]) * (0.5 * inv));
        GridFunction {
            values: d,
            ..self.clone()
        }
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> GridFunction {
        let values = self
            .nodes()
            .into_iter()
            .zip(&self.values)
            .map(|(x, &z)| f(x, z))
            .collect();
        GridFunction {
            values,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        self.map(|_, z| z * c)
    }

    pub fn axpy(&self, c: Complex64, other: &GridFunction) -> Result<GridFunction, GridError> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b * c)
            .collect();
        Ok(GridFunction {
            values,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction, GridError> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<(), GridError> {
        if self.interval != other.interval || self.n != other.n {
            return Err(GridError::Incompatible(format!(
                "{:?}/{} vs {:?}/{}",
                self.interval, self.n, other.interval, other.n
            )));
        }
        Ok(())
    }
}

pub fn node_positions(interval: Interval, n: usize) -> Vec<f64> {
    let h = 1.0 / (n + 1) as f64;
    let a = interval.start();
    (0..n + 2)
        .map(|j| if j == n + 1 { interval.end() } else { a + j as f64 * h })
        .collect()
}
