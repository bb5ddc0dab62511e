//! Numerical global-maximum certification with a uniqueness margin, plus an
//! independent brute-force lattice oracle used to validate it.

use crate::error::{Error, Result};
use crate::grid::TwoChartGrid;
use crate::pattern::{pattern_search_max, DirectionMode, Projection};
use crate::point::{dot, CoefVector, EuclideanPoint};
use crate::subspace::{Element, Subspace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Fraction of the grid sup-norm below the best value within which a point
/// still counts as a near-maximum candidate.
pub const MARGIN_FLOOR_REL: f64 = 1e-6;

/// Derivative-free refinement budget (function evaluations).
pub const REFINE_BUDGET: usize = 600;

/// Cluster radius default, in grid cell diameters.
pub const CLUSTER_RADIUS_CELLS: f64 = 3.0;

#[derive(Debug, Clone, Copy)]
pub struct CertifyParams {
    /// Euclidean radius grouping near-maximum points into one cluster.
    pub cluster_radius: f64,
    pub margin_floor_rel: f64,
    pub refine_budget: usize,
}

impl CertifyParams {
    pub fn for_grid(grid: &TwoChartGrid) -> Self {
        Self {
            cluster_radius: CLUSTER_RADIUS_CELLS * grid.cell_diameter(),
            margin_floor_rel: MARGIN_FLOOR_REL,
            refine_budget: REFINE_BUDGET,
        }
    }

    pub fn with_cluster_radius(mut self, r: f64) -> Self {
        self.cluster_radius = r;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCertificate {
    pub argmax: EuclideanPoint,
    pub value: f64,
    /// Gap between the best value and the best value attained outside the
    /// winning cluster's radius, less the margin floor. Positive exactly
    /// when the near-maximum set forms a single cluster.
    pub margin: f64,
    pub cluster_radius: f64,
    pub cluster_count: usize,
    pub grid_resolution: usize,
    pub refined: bool,
    /// Set when the zero far-field limit comes within the margin floor of
    /// the maximum; the point at infinity is never a unique-maximum point.
    pub sup_at_infinity: bool,
}

impl MaxCertificate {
    /// The certified unique-global-maximum predicate.
    pub fn unique(&self) -> bool {
        self.cluster_count == 1 && !self.sup_at_infinity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinResult {
    pub argmin: EuclideanPoint,
    pub value: f64,
    /// Set when the far-field limit 0 is at or below every sampled value.
    pub at_infinity: bool,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Index of the maximum value; ties break toward lexicographically smallest
/// coordinates so the reduction order never matters.
fn argmax_index(values: &[f64], grid: &TwoChartGrid) -> usize {
    let mut best = 0usize;
    for i in 1..values.len() {
        if values[i] > values[best]
            || (values[i] == values[best] && lex_less(grid.point(i), grid.point(best)))
        {
            best = i;
        }
    }
    best
}

pub fn certify_max(
    s: &Subspace,
    a: &CoefVector,
    grid: &TwoChartGrid,
    params: &CertifyParams,
) -> Result<MaxCertificate> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.dim() != s.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: s.ambient_dim,
            found: grid.dim(),
        });
    }
    // Work with the unit direction so the certificate geometry depends on
    // the ray through a only; rescale reported values at the end.
    let scale = a.norm();
    let unit = a.normalized()?;
    let g = s.combine(&unit)?;

    let values = evaluate_on_grid(&g, grid);
    let best_idx = argmax_index(&values, grid);
    let best = values[best_idx];
    let best_pt = grid.point(best_idx).to_vec();

    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let margin_floor = params.margin_floor_rel * sup;

    // near-maximum candidates, strongest first
    let mut candidates: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] >= best - margin_floor)
        .collect();
    candidates.sort_by(|&i, &j| {
        values[j]
            .partial_cmp(&values[i])
            .unwrap()
            .then_with(|| match lex_less(grid.point(i), grid.point(j)) {
                true => std::cmp::Ordering::Less,
                false => std::cmp::Ordering::Greater,
            })
    });
    let radius_sq = params.cluster_radius * params.cluster_radius;
    let sq_dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    };
    let mut cluster_peaks: Vec<Vec<f64>> = Vec::new();
    for &i in &candidates {
        let p = grid.point(i);
        let joined = cluster_peaks.iter().any(|peak| sq_dist(peak, p) <= radius_sq);
        if !joined {
            cluster_peaks.push(p.to_vec());
        }
    }
    let cluster_count = cluster_peaks.len().max(1);

    // best value attained beyond the winning cluster's radius; the far-field
    // limit 0 always lies outside every cluster. The distance is only
    // needed for values that would improve the running maximum.
    let mut best_outside = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best_outside && sq_dist(grid.point(i), &best_pt) > radius_sq {
            best_outside = v;
        }
    }
    let best_outside = best_outside.max(0.0);
    let raw_gap = best - best_outside;
    let margin = raw_gap - margin_floor;
    let sup_at_infinity = 0.0 >= best - margin_floor;

    // derivative-free polish of the winning peak
    let (argmax, refined_value, refined) = if params.refine_budget > 0 {
        let (point, value) = refine_extremum(
            |x| g.eval_slice(x),
            &best_pt,
            grid.cell_edge(),
            params.refine_budget,
        );
        (point, value.max(best), true)
    } else {
        (best_pt, best, false)
    };

    Ok(MaxCertificate {
        argmax: EuclideanPoint::new(argmax)?,
        value: scale * refined_value,
        margin: scale * margin,
        cluster_radius: params.cluster_radius,
        cluster_count,
        grid_resolution: grid.resolution(),
        refined,
        sup_at_infinity,
    })
}

/// Minimization mirror of `certify_max`, without uniqueness analysis.
pub fn compute_min(s: &Subspace, a: &CoefVector, grid: &TwoChartGrid) -> Result<MinResult> {
    compute_min_with(s, a, grid, REFINE_BUDGET)
}

pub fn compute_min_with(
    s: &Subspace,
    a: &CoefVector,
    grid: &TwoChartGrid,
    refine_budget: usize,
) -> Result<MinResult> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let scale = a.norm();
    let unit = a.normalized()?;
    let g = s.combine(&unit)?;
    let values = evaluate_on_grid(&g, grid);
    let mut best_idx = 0usize;
    for i in 1..values.len() {
        if values[i] < values[best_idx]
            || (values[i] == values[best_idx] && lex_less(grid.point(i), grid.point(best_idx)))
        {
            best_idx = i;
        }
    }
    let best_pt = grid.point(best_idx).to_vec();
    let mut value = values[best_idx];
    let mut argmin = best_pt.clone();
    if refine_budget > 0 {
        let (point, refined) = refine_extremum(
            |x| -g.eval_slice(x),
            &best_pt,
            grid.cell_edge(),
            refine_budget,
        );
        if -refined < value {
            value = -refined;
            argmin = point;
        }
    }
    let at_infinity = 0.0 <= value;
    if at_infinity {
        value = value.min(0.0);
    }
    Ok(MinResult {
        argmin: EuclideanPoint::new(argmin)?,
        value: scale * value,
        at_infinity,
    })
}

/// Polishes an extremum candidate (as a maximization of `f`). After the
/// unconstrained radial-frame search, an incumbent hugging the chart seam
/// (the unit sphere) gets a second search constrained to the sphere:
/// elements built on the compactification often peak on a ridge along the
/// seam, where unconstrained polling converges too slowly to be useful.
pub(crate) fn refine_extremum(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    cell_edge: f64,
    budget: usize,
) -> (Vec<f64>, f64) {
    let step = cell_edge * dot(start, start).max(1.0);
    let free = pattern_search_max(
        &f,
        start,
        step,
        budget,
        1e-14,
        Projection::None,
        DirectionMode::RadialFrame,
    );
    let mut point = free.point;
    let mut value = free.value;
    if (crate::point::norm(&point) - 1.0).abs() <= cell_edge {
        let project = |x: &mut [f64]| {
            let n = crate::point::norm(x);
            if n > 1e-12 {
                for c in x.iter_mut() {
                    *c /= n;
                }
            }
        };
        let seam = pattern_search_max(
            &f,
            &point,
            cell_edge,
            budget,
            1e-14,
            Projection::Some(&project),
            DirectionMode::RadialFrame,
        );
        if seam.value > value {
            value = seam.value;
            point = seam.point;
        }
    }
    (point, value)
}

fn evaluate_on_grid(g: &Element<'_>, grid: &TwoChartGrid) -> Vec<f64> {
    let count = grid.len();
    if count >= 1 << 16 && rayon::current_num_threads() > 1 {
        (0..count)
            .into_par_iter()
            .map(|i| g.eval_with_chart_scale(grid.point(i), grid.chart_scale(i)))
            .collect()
    } else {
        // single contiguous sweep; no per-point index math
        let mut values = Vec::with_capacity(count);
        values.extend(
            grid.points()
                .zip(grid.chart_scales())
                .map(|(p, &s)| g.eval_with_chart_scale(p, s)),
        );
        values
    }
}

/// Exhaustive lattice maximum over `[-w, w]^n`: no charts, no refinement.
/// Used as the independent oracle for `certify_max`.
pub fn brute_force_argmax(
    s: &Subspace,
    a: &CoefVector,
    box_half_width: f64,
    samples_per_axis: usize,
) -> Result<(EuclideanPoint, f64)> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    if samples_per_axis < 2 {
        return Err(Error::ResolutionTooSmall(samples_per_axis));
    }
    let n = s.ambient_dim;
    let mut total: usize = 1;
    for _ in 0..n {
        total = total
            .checked_mul(samples_per_axis)
            .filter(|&t| t <= crate::grid::DEFAULT_POINT_BUDGET)
            .ok_or(Error::EvalBudgetExceeded {
                requested: usize::MAX,
                budget: crate::grid::DEFAULT_POINT_BUDGET,
            })?;
    }
    let g = s.combine(a)?;
    let w = box_half_width;
    let axis: Vec<f64> = (0..samples_per_axis)
        .map(|k| -w + 2.0 * w * k as f64 / (samples_per_axis - 1) as f64)
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_pt = vec![axis[0]; n];
    let mut x = vec![axis[0]; n];
    for flat in 0..total {
        let mut rem = flat;
        for axis_i in (0..n).rev() {
            x[axis_i] = axis[rem % samples_per_axis];
            rem /= samples_per_axis;
        }
        let v = g.eval_slice(&x);
        if v > best || (v == best && lex_less(&x, &best_pt)) {
            best = v;
            best_pt = x.clone();
        }
    }
    Ok((EuclideanPoint::new(best_pt)?, best))
}
