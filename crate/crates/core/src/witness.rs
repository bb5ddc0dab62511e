//! The explicit n-dimensional subspace of C₀(ℝⁿ) whose nonzero elements
//! have a unique global maximum, with closed-form certificates.
//!
//! The subspace is span{πᵢ ∘ G}, where G is the identity on the closed unit
//! ball and the sphere inversion x ↦ x/‖x‖² outside. Every nonzero element
//! ⟨a, G(x)⟩ peaks exactly at a/‖a‖ with value ‖a‖.

use crate::basis::BasisFunction;
use crate::error::{Error, Result};
use crate::point::{dot, invert, CoefVector, EuclideanPoint};
use crate::subspace::Subspace;
use serde::{Deserialize, Serialize};

/// Largest supported ambient dimension; keeps grid memory bounded.
pub const MAX_WITNESS_DIM: usize = 8;

/// Closed-form maximum certificate for a witness element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticMaxResult {
    pub argmax: EuclideanPoint,
    pub value: f64,
    pub coef_norm: f64,
}

/// G(x): identity on the closed unit ball, sphere inversion outside.
pub fn inversion_extension(x: &EuclideanPoint) -> EuclideanPoint {
    let c = x.coords();
    let out = if dot(c, c) <= 1.0 {
        c.to_vec()
    } else {
        invert(c)
    };
    EuclideanPoint::new(out).expect("G preserves finiteness")
}

/// The witness basis {πᵢ ∘ G : i = 1..n}.
pub fn witness_basis(n: usize) -> Result<Subspace> {
    if n == 0 || n > MAX_WITNESS_DIM {
        return Err(Error::DimOutOfRange(n, MAX_WITNESS_DIM));
    }
    let basis = (0..n)
        .map(|i| BasisFunction::projection_inversion(n, i))
        .collect::<Result<Vec<_>>>()?;
    Subspace::new(n, basis)
}

/// The unique global maximum of Σ aᵢ (πᵢ ∘ G): location a/‖a‖, value ‖a‖.
pub fn analytic_max(a: &CoefVector) -> Result<AnalyticMaxResult> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    let coef_norm = a.norm();
    let argmax = EuclideanPoint::new(a.coefs().iter().map(|c| c / coef_norm).collect())?;
    Ok(AnalyticMaxResult {
        argmax,
        value: coef_norm,
        coef_norm,
    })
}

/// Strict interior inequality: for y with ‖G(y)‖ < 1, the witness element
/// satisfies Σ aᵢ πᵢ(G(y)) < ‖a‖. The inequality is checked exactly (no
/// tolerance); the underlying inequality is strict.
pub fn interior_strictness_check(a: &CoefVector, y: &EuclideanPoint) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    if a.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: y.dim(),
        });
    }
    let g = inversion_extension(y);
    if g.norm() >= 1.0 {
        return Err(Error::PointOnUnitSphere);
    }
    let value = dot(a.coefs(), g.coords());
    Ok(value < a.norm())
}
