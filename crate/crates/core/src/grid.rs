//! The deterministic two-chart grid: a lattice on the closed unit ball plus
//! its image under sphere inversion, covering all of ℝⁿ up to the point at
//! infinity.

use crate::error::{Error, Result};
use crate::point::{invert, norm};
use std::io::Write;

/// Lattice enumeration budget (`resolution^n`).
pub const DEFAULT_POINT_BUDGET: usize = 40_000_000;

#[derive(Debug, Clone)]
pub struct TwoChartGrid {
    dim: usize,
    resolution: usize,
    /// Flat row-major coordinates, `dim` entries per point, all with |x| <= 1.
    inner: Vec<f64>,
    /// Inversion images of the nonzero inner points, all with |x| >= 1.
    outer: Vec<f64>,
    /// Chart factor per point (inner chart first): 1 on the closed unit
    /// ball, 1/‖x‖² outside. Precomputed so chart-aware evaluation does
    /// not redo norms (or divisions) per element.
    chart_scales: Vec<f64>,
}

impl TwoChartGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn inner_count(&self) -> usize {
        self.inner.len() / self.dim
    }

    pub fn outer_count(&self) -> usize {
        self.outer.len() / self.dim
    }

    pub fn len(&self) -> usize {
        self.inner_count() + self.outer_count()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn inner_points(&self) -> impl Iterator<Item = &[f64]> {
        self.inner.chunks_exact(self.dim)
    }

    pub fn outer_points(&self) -> impl Iterator<Item = &[f64]> {
        self.outer.chunks_exact(self.dim)
    }

    /// All grid points, inner chart first. Order is fixed; certificates
    /// depend on it only through an associative max with total tie-order.
    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.inner_points().chain(self.outer_points())
    }

    pub fn point(&self, index: usize) -> &[f64] {
        let inner_count = self.inner_count();
        if index < inner_count {
            &self.inner[index * self.dim..(index + 1) * self.dim]
        } else {
            let j = index - inner_count;
            &self.outer[j * self.dim..(j + 1) * self.dim]
        }
    }

    /// 1 if `self.point(index)` lies in the closed unit ball, 1/‖x‖²
    /// otherwise.
    pub fn chart_scale(&self, index: usize) -> f64 {
        self.chart_scales[index]
    }

    /// Chart factors for all points, in `points()` order.
    pub(crate) fn chart_scales(&self) -> &[f64] {
        &self.chart_scales
    }

    /// Inner-chart lattice spacing.
    pub fn cell_edge(&self) -> f64 {
        2.0 / (self.resolution - 1) as f64
    }

    pub fn cell_diameter(&self) -> f64 {
        self.cell_edge() * (self.dim as f64).sqrt()
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|i| format!("x_{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|c| format!("{c:?}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Builds the deterministic two-chart grid for dimension `n`.
pub fn build_grid(n: usize, resolution: usize) -> Result<TwoChartGrid> {
    build_grid_with_budget(n, resolution, DEFAULT_POINT_BUDGET)
}

pub fn build_grid_with_budget(
    n: usize,
    resolution: usize,
    budget: usize,
) -> Result<TwoChartGrid> {
    if n == 0 {
        return Err(Error::DimOutOfRange(0, 8));
    }
    if resolution < 3 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    let mut lattice_count: usize = 1;
    for _ in 0..n {
        lattice_count = lattice_count
            .checked_mul(resolution)
            .ok_or(Error::GridBudgetExceeded {
                requested: usize::MAX,
                budget,
            })?;
        if lattice_count > budget {
            return Err(Error::GridBudgetExceeded {
                requested: lattice_count,
                budget,
            });
        }
    }

    let axis: Vec<f64> = (0..resolution)
        .map(|k| -1.0 + 2.0 * k as f64 / (resolution - 1) as f64)
        .collect();

    let mut inner = Vec::new();
    let mut idx = vec![0usize; n];
    let mut x = vec![axis[0]; n];
    let mut has_origin = false;
    loop {
        let n2: f64 = x.iter().map(|c| c * c).sum();
        if n2 <= 1.0 {
            inner.extend_from_slice(&x);
            if n2 == 0.0 {
                has_origin = true;
            }
        }
        // odometer increment
        let mut axis_i = n;
        loop {
            if axis_i == 0 {
                break;
            }
            axis_i -= 1;
            idx[axis_i] += 1;
            if idx[axis_i] < resolution {
                x[axis_i] = axis[idx[axis_i]];
                break;
            }
            idx[axis_i] = 0;
            x[axis_i] = axis[0];
            if axis_i == 0 {
                idx.clear();
                break;
            }
        }
        if idx.is_empty() {
            break;
        }
    }
    if !has_origin {
        inner.extend(std::iter::repeat(0.0).take(n));
    }
    // even resolutions have no zero axis value, so the unit axis points
    // ±e_i (where the two charts agree) are missing; add them
    if n >= 2 && !axis.iter().any(|&v| v == 0.0) {
        for i in 0..n {
            for sign in [-1.0, 1.0] {
                let mut e = vec![0.0; n];
                e[i] = sign;
                inner.extend_from_slice(&e);
            }
        }
    }

    let mut outer = Vec::with_capacity(inner.len());
    for p in inner.chunks_exact(n) {
        if norm(p) > 0.0 {
            outer.extend(invert(p));
        }
    }

    let chart_scales = inner
        .chunks_exact(n)
        .chain(outer.chunks_exact(n))
        .map(|p| {
            let n2: f64 = p.iter().map(|c| c * c).sum();
            if n2 <= 1.0 {
                1.0
            } else {
                1.0 / n2
            }
        })
        .collect();

    Ok(TwoChartGrid {
        dim: n,
        resolution,
        inner,
        outer,
        chart_scales,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::dist;

    #[test]
    fn one_dimensional_charts_overlap_at_unit_points() {
        let g = build_grid(1, 3).unwrap();
        let inner: Vec<f64> = g.inner_points().map(|p| p[0]).collect();
        assert_eq!(inner, vec![-1.0, 0.0, 1.0]);
        let outer: Vec<f64> = g.outer_points().map(|p| p[0]).collect();
        assert_eq!(outer, vec![-1.0, 1.0]);
    }

    #[test]
    fn outer_points_lie_outside_the_ball() {
        let g = build_grid(2, 5).unwrap();
        for p in g.outer_points() {
            assert!(norm(p) >= 1.0 - 1e-15);
        }
        for p in g.inner_points() {
            assert!(norm(p) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn inversion_is_involutive_on_outer_points() {
        let g = build_grid(2, 5).unwrap();
        for p in g.outer_points() {
            let back = invert(&invert(p));
            assert!(dist(p, &back) <= 1e-12 * norm(p).max(1.0));
            assert!(norm(&invert(p)) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn contains_origin_and_axis_sphere_points() {
        for resolution in [3usize, 4, 5, 9] {
            let g = build_grid(2, resolution).unwrap();
            assert!(g.inner_points().any(|p| norm(p) == 0.0));
            let on_sphere = g
                .inner_points()
                .filter(|p| (norm(p) - 1.0).abs() < 1e-15)
                .count();
            assert!(on_sphere >= 4, "resolution {resolution}: {on_sphere} sphere points");
        }
    }

    #[test]
    fn total_count_is_bounded() {
        let g = build_grid(2, 9).unwrap();
        assert!(g.len() <= 2 * 9usize.pow(2));
    }

    #[test]
    fn budget_exceeded_suggests_lower_resolution() {
        let err = build_grid_with_budget(3, 101, 1000).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lower the resolution"), "{msg}");
    }

    #[test]
    fn resolution_floor_is_enforced() {
        assert!(build_grid(2, 2).is_err());
    }
}
