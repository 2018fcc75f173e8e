//! Signature-(2,n) pseudo-Euclidean linear algebra.
//!
//! Coordinates are stored in index order 0..n+1 with the two "+" directions
//! at indices 0 and n+1, so every slice formula transfers without index
//! permutation.

use crate::error::{Error, Result};

/// The ambient metric signature (2, n): diag(+1, -1 x n, +1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    n: usize,
}

impl Signature {
    /// Signature for an n-dimensional slice; requires n >= 2.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension n + 2.
    pub fn dim(&self) -> usize {
        self.n + 2
    }

    /// Metric sign at coordinate index `idx`.
    pub fn sign(&self, idx: usize) -> f64 {
        if idx == 0 || idx == self.n + 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.sign(i)).collect()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// Pseudo-Euclidean inner product sum_a sign(a) u^a v^a.
    pub fn inner(&self, u: &AmbientVector, v: &AmbientVector) -> Result<f64> {
        self.check_dim(u.dim())?;
        self.check_dim(v.dim())?;
        let mut acc = 0.0;
        for i in 0..self.dim() {
            acc += self.sign(i) * u.coords[i] * v.coords[i];
        }
        Ok(acc)
    }

    /// The cone constraint C(y) = inner(y, y); zero on the null cone.
    pub fn cone_constraint(&self, y: &AmbientVector) -> Result<f64> {
        self.inner(y, y)
    }

    /// Raise a covector index: component-wise multiply by the metric signs.
    pub fn raise(&self, w: &AmbientCovector) -> Result<AmbientVector> {
        self.check_dim(w.dim())?;
        let coords = (0..self.dim())
            .map(|i| self.sign(i) * w.components[i])
            .collect();
        Ok(AmbientVector { coords })
    }

    /// Lower a vector index; inverse of [`Signature::raise`] (signs square to one).
    pub fn lower(&self, v: &AmbientVector) -> Result<AmbientCovector> {
        self.check_dim(v.dim())?;
        let components = (0..self.dim())
            .map(|i| self.sign(i) * v.coords[i])
            .collect();
        Ok(AmbientCovector { components })
    }
}

/// A point or tangent vector of the ambient space, stored as n+2 finite
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVector {
    coords: Vec<f64>,
}

impl AmbientVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 4 {
            return Err(Error::InvalidDimension(coords.len().saturating_sub(2)));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("ambient vector coordinates"));
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    /// Standard basis vector e_idx.
    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[idx] = 1.0;
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.coords[idx]
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|c| t * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self + t * other.
    pub fn add_scaled(&self, t: f64, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * b)
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm, used for conditioning only (never as a geometry).
    pub fn norm_euclid(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

/// The dilation vector field D = y^a d_a evaluated at y; it is y itself.
pub fn dilation_at(y: &AmbientVector) -> AmbientVector {
    y.clone()
}

/// A dual vector (differential) with n+2 finite components; pairs with
/// vectors through the natural pairing, no metric involved.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientCovector {
    components: Vec<f64>,
}

impl AmbientCovector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 4 {
            return Err(Error::InvalidDimension(components.len().saturating_sub(2)));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("covector components"));
        }
        Ok(Self { components })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            components: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Natural pairing <w, v> = sum_a w_a v^a.
    pub fn apply(&self, v: &AmbientVector) -> Result<f64> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(self
            .components
            .iter()
            .zip(v.coords())
            .map(|(w, v)| w * v)
            .sum())
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            components: self.components.iter().map(|c| t * c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }
}
