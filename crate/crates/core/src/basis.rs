//! Evaluable elements of C₀(ℝⁿ) with decay envelopes.
//!
//! Every basis function is normalized at construction so its sup-norm is 1
//! (analytically for the closed-form families, over the sample table for
//! custom functions). Each family carries a nonincreasing envelope `E(R)`
//! with `sup_{|x| >= R} |f(x)| <= E(R)` and `E(R) -> 0`.

use crate::error::{Error, Result};
use crate::point::{dot, EuclideanPoint};
use serde::{Deserialize, Serialize};

/// A sampled function on a lattice over `[-half_width, half_width]^dim`,
/// interpolated multilinearly and zero outside the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleTable {
    pub dim: usize,
    pub half_width: f64,
    pub resolution: usize,
    /// Row-major node values, axis 0 slowest; length `resolution^dim`.
    pub values: Vec<f64>,
}

impl SampleTable {
    pub fn new(dim: usize, half_width: f64, resolution: usize, values: Vec<f64>) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        let expected = resolution.pow(dim as u32);
        if values.len() != expected {
            return Err(Error::InvalidSpec(format!(
                "sample table needs {expected} values, got {}",
                values.len()
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "sample table half_width must be positive and finite, got {half_width}"
            )));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteCoordinate { index, value });
            }
        }
        Ok(Self {
            dim,
            half_width,
            resolution,
            values,
        })
    }

    /// Builds a table by sampling `f` on the lattice.
    pub fn from_fn(
        dim: usize,
        half_width: f64,
        resolution: usize,
        mut f: impl FnMut(&[f64]) -> f64,
    ) -> Result<Self> {
        let count = resolution.pow(dim as u32);
        let mut values = Vec::with_capacity(count);
        let mut x = vec![0.0; dim];
        for flat in 0..count {
            let mut rem = flat;
            for axis in (0..dim).rev() {
                let k = rem % resolution;
                rem /= resolution;
                x[axis] = node(half_width, resolution, k);
            }
            values.push(f(&x));
        }
        Self::new(dim, half_width, resolution, values)
    }

    fn edge(&self) -> f64 {
        2.0 * self.half_width / (self.resolution - 1) as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Multilinear interpolation; zero outside the sampled box.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let h = self.half_width;
        if x.iter().any(|&c| c < -h || c > h) {
            return 0.0;
        }
        let edge = self.edge();
        // cell index and fractional offset per axis
        let mut idx = vec![0usize; self.dim];
        let mut frac = vec![0.0f64; self.dim];
        for axis in 0..self.dim {
            let t = (x[axis] + h) / edge;
            let mut k = t.floor() as usize;
            if k >= self.resolution - 1 {
                k = self.resolution - 2;
            }
            idx[axis] = k;
            frac[axis] = (t - k as f64).clamp(0.0, 1.0);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << self.dim) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            for axis in 0..self.dim {
                let hi = (corner >> axis) & 1 == 1;
                weight *= if hi { frac[axis] } else { 1.0 - frac[axis] };
                flat = flat * self.resolution + idx[axis] + usize::from(hi);
            }
            if weight != 0.0 {
                acc += weight * self.values[flat];
            }
        }
        acc
    }

    /// Piecewise-constant majorant of the tail: the largest node magnitude
    /// reachable from any cell intersecting `{|x| >= radius}`.
    fn tail_majorant(&self, node_norms: &[f64], radius: f64) -> f64 {
        let reach = radius - self.edge() * (self.dim as f64).sqrt();
        self.values
            .iter()
            .zip(node_norms)
            .filter(|(_, &n)| n >= reach)
            .fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }

    fn node_norms(&self) -> Vec<f64> {
        let count = self.values.len();
        let mut norms = Vec::with_capacity(count);
        for flat in 0..count {
            let mut rem = flat;
            let mut n2 = 0.0;
            for _ in 0..self.dim {
                let k = rem % self.resolution;
                rem /= self.resolution;
                let c = node(self.half_width, self.resolution, k);
                n2 += c * c;
            }
            norms.push(n2.sqrt());
        }
        norms
    }

    /// Sum over axes of the steepest adjacent-node slope.
    fn lipschitz_bound(&self) -> f64 {
        let edge = self.edge();
        let mut total = 0.0;
        let mut stride = 1usize;
        for axis in (0..self.dim).rev() {
            let mut steepest = 0.0f64;
            for flat in 0..self.values.len() {
                let k = (flat / stride) % self.resolution;
                if k + 1 < self.resolution {
                    let diff = (self.values[flat + stride] - self.values[flat]).abs();
                    steepest = steepest.max(diff);
                }
            }
            total += steepest / edge;
            let _ = axis;
            stride *= self.resolution;
        }
        total
    }
}

fn node(half_width: f64, resolution: usize, k: usize) -> f64 {
    -half_width + 2.0 * half_width * k as f64 / (resolution - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// π_i ∘ G where G is the identity on the unit ball and the sphere
    /// inversion outside.
    ProjectionInversion { index: usize },
    GaussianBump {
        center: EuclideanPoint,
        width: f64,
        sign: i8,
    },
    Custom { table: SampleTable },
    /// Fixed linear combination of other basis functions, rescaled so the
    /// stored `scale` puts its sup-norm at 1 on the grid it was built over.
    Combination {
        scale: f64,
        terms: Vec<ComboTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboTerm {
    pub coef: f64,
    pub function: BasisFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFunction {
    pub ambient_dim: usize,
    #[serde(flatten)]
    pub family: Family,
}

impl BasisFunction {
    pub fn projection_inversion(ambient_dim: usize, index: usize) -> Result<Self> {
        if index >= ambient_dim {
            return Err(Error::DimOutOfRange(index + 1, ambient_dim));
        }
        Ok(Self {
            ambient_dim,
            family: Family::ProjectionInversion { index },
        })
    }

    pub fn gaussian_bump(center: EuclideanPoint, width: f64, sign: i8) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidSpec(format!(
                "gaussian sign must be +1 or -1, got {sign}"
            )));
        }
        Ok(Self {
            ambient_dim: center.dim(),
            family: Family::GaussianBump {
                center,
                width,
                sign,
            },
        })
    }

    /// Custom functions are normalized so the largest node magnitude is 1.
    pub fn custom(mut table: SampleTable) -> Result<Self> {
        let peak = table.max_abs();
        if peak == 0.0 {
            return Err(Error::InvalidSpec(
                "custom sample table is identically zero".into(),
            ));
        }
        for v in &mut table.values {
            *v /= peak;
        }
        let ambient_dim = table.dim;
        Ok(Self {
            ambient_dim,
            family: Family::Custom { table },
        })
    }

    pub fn combination(terms: Vec<ComboTerm>, scale: f64) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidSpec("combination needs at least one term".into()))?;
        let ambient_dim = first.function.ambient_dim;
        for t in &terms {
            if t.function.ambient_dim != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: t.function.ambient_dim,
                });
            }
        }
        Ok(Self {
            ambient_dim,
            family: Family::Combination { scale, terms },
        })
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            Family::ProjectionInversion { index } => {
                if *index >= self.ambient_dim {
                    return Err(Error::DimOutOfRange(index + 1, self.ambient_dim));
                }
            }
            Family::GaussianBump { center, width, .. } => {
                if center.dim() != self.ambient_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.ambient_dim,
                        found: center.dim(),
                    });
                }
                if !(*width > 0.0) {
                    return Err(Error::InvalidSpec("gaussian width must be positive".into()));
                }
            }
            Family::Custom { table } => {
                if table.dim != self.ambient_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.ambient_dim,
                        found: table.dim,
                    });
                }
            }
            Family::Combination { terms, .. } => {
                for t in terms {
                    if t.function.ambient_dim != self.ambient_dim {
                        return Err(Error::DimensionMismatch {
                            expected: self.ambient_dim,
                            found: t.function.ambient_dim,
                        });
                    }
                    t.function.validate()?;
                }
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &EuclideanPoint) -> Result<f64> {
        if x.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: x.dim(),
            });
        }
        Ok(self.eval_slice(x.coords()))
    }

    /// Evaluation on a raw coordinate slice; callers guarantee the length.
    pub fn eval_slice(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::ProjectionInversion { index } => {
                let n2 = dot(x, x);
                if n2 <= 1.0 {
                    x[*index]
                } else {
                    x[*index] / n2
                }
            }
            Family::GaussianBump {
                center,
                width,
                sign,
            } => {
                let d2: f64 = x
                    .iter()
                    .zip(center.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                f64::from(*sign) * (-d2 / (width * width)).exp()
            }
            Family::Custom { table } => table.eval(x),
            Family::Combination { scale, terms } => {
                scale
                    * terms
                        .iter()
                        .map(|t| t.coef * t.function.eval_slice(x))
                        .sum::<f64>()
            }
        }
    }

    /// Decay envelope: nonincreasing, `sup_{|x| >= radius} |f| <= envelope(radius)`.
    pub fn envelope(&self, radius: f64) -> f64 {
        match &self.family {
            Family::ProjectionInversion { .. } => {
                if radius >= 1.0 {
                    1.0 / radius
                } else {
                    1.0
                }
            }
            Family::GaussianBump { center, width, .. } => {
                let d = (radius - center.norm()).max(0.0);
                (-d * d / (width * width)).exp()
            }
            Family::Custom { table } => table.tail_majorant(&table.node_norms(), radius),
            Family::Combination { scale, terms } => {
                scale.abs()
                    * terms
                        .iter()
                        .map(|t| t.coef.abs() * t.function.envelope(radius))
                        .sum::<f64>()
            }
        }
    }

    /// A global Lipschitz bound (with respect to the Euclidean norm).
    pub fn lipschitz_bound(&self) -> f64 {
        match &self.family {
            // G is 1-Lipschitz on both charts, projections are contractions.
            Family::ProjectionInversion { .. } => 1.0,
            Family::GaussianBump { width, .. } => (2.0f64 / std::f64::consts::E).sqrt() / width,
            Family::Custom { table } => table.lipschitz_bound(),
            Family::Combination { scale, terms } => {
                scale.abs()
                    * terms
                        .iter()
                        .map(|t| t.coef.abs() * t.function.lipschitz_bound())
                        .sum::<f64>()
            }
        }
    }
}
