//! Finite-dimensional subspaces of C₀(ℝⁿ): an ordered basis over a common
//! ambient dimension, elements addressed by coefficient vectors.

use crate::basis::{BasisFunction, Family};
use crate::error::{Error, Result};
use crate::grid::TwoChartGrid;
use crate::point::{dot, CoefVector, EuclideanPoint};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Default floor for the smallest singular value of the normalized Gram
/// matrix.
pub const GRAM_SV_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: Vec<BasisFunction>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Vec<BasisFunction>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidSpec("subspace needs at least one basis function".into()));
        }
        for f in &basis {
            if f.ambient_dim != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: f.ambient_dim,
                });
            }
            f.validate()?;
        }
        Ok(Self { ambient_dim, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Subspace =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Subspace::new(s.ambient_dim, s.basis)
    }

    /// The evaluable element Σ aᵢ fᵢ.
    pub fn combine<'a>(&'a self, a: &CoefVector) -> Result<Element<'a>> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(Element::new(&self.basis, a.coefs().to_vec()))
    }

    pub fn element_from_slice<'a>(&'a self, coefs: &[f64]) -> Element<'a> {
        debug_assert_eq!(coefs.len(), self.dim());
        Element::new(&self.basis, coefs.to_vec())
    }

    /// Smallest singular value of the Gram matrix of the unit-normalized
    /// grid samples of the basis. Errors when it falls below `threshold`.
    pub fn gram_smallest_sv(&self, grid: &TwoChartGrid, threshold: f64) -> Result<f64> {
        if grid.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: grid.dim(),
            });
        }
        let m = self.dim();
        let count = grid.len();
        let mut samples = vec![0.0f64; m * count];
        for (j, f) in self.basis.iter().enumerate() {
            let col = &mut samples[j * count..(j + 1) * count];
            for (v, p) in col.iter_mut().zip(grid.points()) {
                *v = f.eval_slice(p);
            }
            let norm = dot(col, col).sqrt();
            if norm <= 1e-300 {
                return Err(Error::GridCannotSeparate(norm));
            }
            for v in col.iter_mut() {
                *v /= norm;
            }
        }
        let mut gram = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let g = dot(
                    &samples[i * count..(i + 1) * count],
                    &samples[j * count..(j + 1) * count],
                );
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }
        let eigen = gram.symmetric_eigen();
        let smallest = eigen.eigenvalues.iter().fold(f64::INFINITY, |m, &e| m.min(e));
        let smallest = smallest.max(0.0);
        if smallest <= threshold {
            return Err(Error::GramRankDeficient {
                smallest_sv: smallest,
                threshold,
            });
        }
        Ok(smallest)
    }

    pub fn check_gram_rank(&self, grid: &TwoChartGrid) -> Result<f64> {
        self.gram_smallest_sv(grid, GRAM_SV_THRESHOLD)
    }
}

/// A concrete element of a subspace: Σ aᵢ fᵢ with fixed coefficients.
pub struct Element<'a> {
    funcs: &'a [BasisFunction],
    coefs: Vec<f64>,
    /// Set when every basis function is a coordinate projection composed
    /// with the inversion extension. The coefficients are folded into one
    /// dense vector c with Σ aⱼ π_{iⱼ}(y) = ⟨c, y⟩, so evaluation is a
    /// single dot product against G(x).
    chart_coefs: Option<Vec<f64>>,
}

impl<'a> Element<'a> {
    fn new(funcs: &'a [BasisFunction], coefs: Vec<f64>) -> Self {
        let ambient_dim = funcs[0].ambient_dim;
        let indices = funcs
            .iter()
            .map(|f| match &f.family {
                Family::ProjectionInversion { index } => Some(*index),
                _ => None,
            })
            .collect::<Option<Vec<usize>>>();
        let chart_coefs = indices.map(|indices| {
            let mut folded = vec![0.0; ambient_dim];
            for (a, &i) in coefs.iter().zip(&indices) {
                folded[i] += a;
            }
            folded
        });
        Self {
            funcs,
            coefs,
            chart_coefs,
        }
    }

    pub fn coefs(&self) -> &[f64] {
        &self.coefs
    }

    pub fn eval_slice(&self, x: &[f64]) -> f64 {
        if let Some(c) = &self.chart_coefs {
            let n2 = dot(x, x);
            let acc = dot(c, x);
            if n2 <= 1.0 {
                acc
            } else {
                acc / n2
            }
        } else {
            self.coefs
                .iter()
                .zip(self.funcs)
                .map(|(a, f)| a * f.eval_slice(x))
                .sum()
        }
    }

    /// `eval_slice` with the chart factor (1 inside the unit ball, 1/‖x‖²
    /// outside) already known; grid sweeps precompute it per point.
    pub(crate) fn eval_with_chart_scale(&self, x: &[f64], scale: f64) -> f64 {
        if let Some(c) = &self.chart_coefs {
            dot(c, x) * scale
        } else {
            self.eval_slice(x)
        }
    }

    pub fn evaluate(&self, x: &EuclideanPoint) -> Result<f64> {
        let expected = self.funcs[0].ambient_dim;
        if x.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: x.dim(),
            });
        }
        Ok(self.eval_slice(x.coords()))
    }

    /// Sup of |g| over the grid points.
    pub fn grid_sup(&self, grid: &TwoChartGrid) -> f64 {
        grid.points()
            .map(|p| self.eval_slice(p).abs())
            .fold(0.0f64, f64::max)
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.coefs
            .iter()
            .zip(self.funcs)
            .map(|(a, f)| a.abs() * f.lipschitz_bound())
            .sum()
    }

    pub fn envelope(&self, radius: f64) -> f64 {
        self.coefs
            .iter()
            .zip(self.funcs)
            .map(|(a, f)| a.abs() * f.envelope(radius))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFunction;
    use crate::grid::build_grid;
    use crate::witness::witness_basis;
    use approx::assert_relative_eq;

    fn pt(coords: &[f64]) -> EuclideanPoint {
        EuclideanPoint::new(coords.to_vec()).unwrap()
    }

    fn coefs(c: &[f64]) -> CoefVector {
        CoefVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn zero_coefficients_give_the_zero_function() {
        let s = witness_basis(3).unwrap();
        let g = s.combine(&coefs(&[0.0, 0.0, 0.0])).unwrap();
        for p in [
            pt(&[0.0, 0.0, 0.0]),
            pt(&[0.3, -0.1, 0.9]),
            pt(&[5.0, 2.0, -1.0]),
        ] {
            assert_eq!(g.evaluate(&p).unwrap(), 0.0);
        }
    }

    #[test]
    fn witness_first_projection_at_unit_point() {
        let s = witness_basis(2).unwrap();
        let g = s.combine(&coefs(&[1.0, 0.0])).unwrap();
        assert_eq!(g.evaluate(&pt(&[1.0, 0.0])).unwrap(), 1.0);
    }

    #[test]
    fn opposing_bumps_take_opposite_signs() {
        let b1 = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 1.0, 1).unwrap();
        let b2 = BasisFunction::gaussian_bump(pt(&[3.0, 0.0]), 1.0, 1).unwrap();
        let s = Subspace::new(2, vec![b1, b2]).unwrap();
        let g = s.combine(&coefs(&[1.0, -1.0])).unwrap();
        let at_first = g.evaluate(&pt(&[0.0, 0.0])).unwrap();
        let at_second = g.evaluate(&pt(&[3.0, 0.0])).unwrap();
        assert!(at_first > 0.0);
        assert!(at_second < 0.0);
    }

    #[test]
    fn coefficient_dimension_mismatch_is_rejected() {
        let s = witness_basis(2).unwrap();
        assert!(s.combine(&coefs(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn witness_gram_has_full_rank_up_to_dim_six() {
        for n in 1..=6usize {
            let s = witness_basis(n).unwrap();
            let grid = build_grid(n, 9).unwrap();
            let sv = s.check_gram_rank(&grid).unwrap();
            assert!(sv > 1e-8, "n={n}: smallest singular value {sv}");
        }
    }

    #[test]
    fn dependent_basis_fails_gram_rank() {
        let b = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 1.0, 1).unwrap();
        let s = Subspace {
            ambient_dim: 2,
            basis: vec![b.clone(), b],
        };
        let grid = build_grid(2, 9).unwrap();
        assert!(s.check_gram_rank(&grid).is_err());
    }

    #[test]
    fn subspace_json_schema_round_trips() {
        let s = witness_basis(2).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"ambient_dim\":2"));
        assert!(text.contains("\"family\":\"projection-inversion\""));
        let back = Subspace::from_json(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn fast_and_generic_paths_agree() {
        let s = witness_basis(3).unwrap();
        let g = s.combine(&coefs(&[0.5, -1.5, 2.0])).unwrap();
        for p in [
            pt(&[0.2, 0.1, -0.4]),
            pt(&[2.0, -1.0, 0.5]),
            pt(&[0.0, 0.0, 0.0]),
        ] {
            let generic: f64 = [0.5, -1.5, 2.0]
                .iter()
                .zip(&s.basis)
                .map(|(a, f)| a * f.eval_slice(p.coords()))
                .sum();
            assert_relative_eq!(g.evaluate(&p).unwrap(), generic, epsilon = 1e-15);
        }
    }
}
