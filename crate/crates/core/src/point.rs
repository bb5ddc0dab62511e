//! Points of ℝⁿ, coefficient vectors, and the sphere inversion used to
//! compactify the plane.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of ℝⁿ with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EuclideanPoint {
    coords: Vec<f64>,
}

impl EuclideanPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (index, &value) in coords.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteCoordinate { index, value });
            }
        }
        if coords.is_empty() {
            return Err(Error::DimOutOfRange(0, usize::MAX));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }
}

impl From<EuclideanPoint> for Vec<f64> {
    fn from(p: EuclideanPoint) -> Self {
        p.coords
    }
}

/// A coefficient vector over an ordered basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefVector {
    coefs: Vec<f64>,
}

impl CoefVector {
    pub fn new(coefs: Vec<f64>) -> Result<Self> {
        for (index, &value) in coefs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteCoordinate { index, value });
            }
        }
        if coefs.is_empty() {
            return Err(Error::DimOutOfRange(0, usize::MAX));
        }
        Ok(Self { coefs })
    }

    pub fn dim(&self) -> usize {
        self.coefs.len()
    }

    pub fn coefs(&self) -> &[f64] {
        &self.coefs
    }

    pub fn is_zero(&self) -> bool {
        self.coefs.iter().fold(0.0f64, |m, c| m.max(c.abs())) == 0.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coefs)
    }

    /// Direction a/‖a‖. Errors on the zero vector.
    pub fn normalized(&self) -> Result<CoefVector> {
        if self.is_zero() {
            return Err(Error::ZeroCoefficients);
        }
        let n = self.norm();
        CoefVector::new(self.coefs.iter().map(|c| c / n).collect())
    }
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Sphere inversion x ↦ x/‖x‖², an involution on ℝⁿ∖{0}.
pub fn invert(x: &[f64]) -> Vec<f64> {
    let n2 = dot(x, x);
    if n2 == 0.0 {
        return x.to_vec();
    }
    x.iter().map(|c| c / n2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_finite() {
        assert!(EuclideanPoint::new(vec![0.0, f64::NAN]).is_err());
        assert!(CoefVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn zero_vector_is_distinguishable() {
        let z = CoefVector::new(vec![0.0, 0.0, -0.0]).unwrap();
        assert!(z.is_zero());
        assert!(z.normalized().is_err());
        let nz = CoefVector::new(vec![0.0, 1e-300]).unwrap();
        assert!(!nz.is_zero());
    }

    proptest! {
        #[test]
        fn inversion_is_an_involution(
            coords in proptest::collection::vec(-1e6f64..1e6, 1..6)
        ) {
            let n = norm(&coords);
            prop_assume!(n > 1e-9);
            let twice = invert(&invert(&coords));
            let err = dist(&coords, &twice) / n;
            prop_assert!(err <= 1e-12, "relative error {err}");
        }

        #[test]
        fn inversion_norm_is_reciprocal(
            coords in proptest::collection::vec(-1e3f64..1e3, 1..6)
        ) {
            let n = norm(&coords);
            prop_assume!(n > 1e-6);
            let inv = invert(&coords);
            prop_assert!((norm(&inv) * n - 1.0).abs() < 1e-12);
        }
    }
}
