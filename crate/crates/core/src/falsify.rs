//! Counterexample hunting. For a candidate subspace of dimension n+2 the
//! pipeline extracts an (n+1)-dimensional alternating subspace, computes
//! the tail apparatus that confines maxima to a ball, and then searches the
//! coefficient sphere for an element whose two best peak clusters are
//! (numerically) tied — evidence that the candidate leaves Ĉ₀(ℝⁿ).

use crate::alternating::{
    estimate_norm_equivalence, extract_alternating, is_alternating, sign_bounds, tail_radius,
};
use crate::basis::{BasisFunction, Family, SampleTable};
use crate::certify::{certify_max, CertifyParams, REFINE_BUDGET};
use crate::error::{Error, Result};
use crate::grid::{build_grid, TwoChartGrid};
use crate::pattern::{pattern_search, Projection};
use crate::point::{dist, norm, CoefVector, EuclideanPoint};
use crate::sampling::{halton_sphere, rng};
use crate::subspace::{Element, Subspace};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// An element with two separated, near-equal maximum clusters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationWitness {
    pub coefs: CoefVector,
    pub peak1: EuclideanPoint,
    pub peak2: EuclideanPoint,
    pub value1: f64,
    pub value2: f64,
    pub separation: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ViolationFound,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub ambient_dim: usize,
    pub candidate_dim: usize,
    pub family: String,
    pub witness: Option<ViolationWitness>,
    /// Objective evaluations spent (each is one or two grid sweeps).
    pub probes: usize,
    /// Smallest relative gap between the two leading clusters seen.
    pub best_gap: f64,
    pub verdict: Verdict,
    pub seed: u64,
}

/// Knobs shared by `falsify` drivers.
#[derive(Debug, Clone, Copy)]
pub struct FalsifyOptions {
    pub resolution: usize,
    pub tol_gap: f64,
    pub budget: usize,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        Self {
            resolution: 33,
            tol_gap: 1e-3,
            budget: 10_000,
        }
    }
}

/// Grid-level two-peak profile of one element.
struct GridGap {
    v1: f64,
    i1: usize,
    v2: f64,
    i2: usize,
}

fn grid_two_peaks(
    g: &Element<'_>,
    grid: &TwoChartGrid,
    cluster_radius: f64,
    radius_limit: f64,
) -> Option<GridGap> {
    let mut v1 = f64::NEG_INFINITY;
    let mut i1 = usize::MAX;
    for (i, p) in grid.points().enumerate() {
        if norm(p) > radius_limit {
            continue;
        }
        let v = g.eval_slice(p);
        if v > v1 {
            v1 = v;
            i1 = i;
        }
    }
    if i1 == usize::MAX {
        return None;
    }
    let p1 = grid.point(i1);
    let mut v2 = f64::NEG_INFINITY;
    let mut i2 = usize::MAX;
    for (i, p) in grid.points().enumerate() {
        if norm(p) > radius_limit || dist(p, p1) <= cluster_radius {
            continue;
        }
        let v = g.eval_slice(p);
        if v > v2 {
            v2 = v;
            i2 = i;
        }
    }
    if i2 == usize::MAX {
        return None;
    }
    Some(GridGap { v1, i1, v2, i2 })
}

/// Relative gap objective on the coefficient sphere; large when the element
/// has no usable two-peak profile.
fn gap_objective(
    s: &Subspace,
    grid: &TwoChartGrid,
    cluster_radius: f64,
    radius_limit: f64,
    coefs: &[f64],
) -> f64 {
    let g = s.element_from_slice(coefs);
    match grid_two_peaks(&g, grid, cluster_radius, radius_limit) {
        Some(gg) if gg.v1 > 0.0 => (gg.v1 - gg.v2) / gg.v1,
        _ => 2.0,
    }
}

/// Seam-aware off-grid polish of one peak (see `certify::refine_extremum`:
/// ridge peaks on the unit sphere need the constrained second stage).
fn refine_peak(g: &Element<'_>, start: &[f64], cell_edge: f64, evals: usize) -> (Vec<f64>, f64) {
    crate::certify::refine_extremum(|x| g.eval_slice(x), start, cell_edge, evals)
}

/// Gap objective with both peaks polished off-grid. Grid-level ties whose
/// refined peaks merge into one cluster are ridge artifacts — two lattice
/// points straddling a single flat maximum — not violations, and score the
/// same sentinel as elements with no two-peak profile at all.
fn polished_gap_objective(
    s: &Subspace,
    grid: &TwoChartGrid,
    cluster_radius: f64,
    radius_limit: f64,
    coefs: &[f64],
) -> f64 {
    let g = s.element_from_slice(coefs);
    let Some(gg) = grid_two_peaks(&g, grid, cluster_radius, radius_limit) else {
        return 2.0;
    };
    if gg.v1 <= 0.0 {
        return 2.0;
    }
    let edge = grid.cell_edge();
    let (q1, w1) = refine_peak(&g, grid.point(gg.i1), edge, 120);
    let (q2, w2) = refine_peak(&g, grid.point(gg.i2), edge, 120);
    if w1 <= 0.0 || dist(&q1, &q2) < cluster_radius {
        return 2.0;
    }
    let (hi, lo) = if w1 >= w2 { (w1, w2) } else { (w2, w1) };
    (hi - lo) / hi
}

fn sphere_projection(x: &mut [f64]) {
    let n = norm(x);
    if n > 1e-12 {
        for c in x.iter_mut() {
            *c /= n;
        }
    } else {
        x[0] = 1.0;
        for c in x.iter_mut().skip(1) {
            *c = 0.0;
        }
    }
}

pub fn falsify(
    s: &Subspace,
    grid: &TwoChartGrid,
    tol_gap: f64,
    budget: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    falsify_named(s, grid, tol_gap, budget, seed, "custom")
}

fn falsify_named(
    s: &Subspace,
    grid: &TwoChartGrid,
    tol_gap: f64,
    budget: usize,
    seed: u64,
    family: &str,
) -> Result<ExperimentReport> {
    if budget < 10 {
        return Err(Error::BudgetTooSmall(budget));
    }
    if !(tol_gap > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "tol_gap must be positive, got {tol_gap}"
        )));
    }
    let n = s.ambient_dim;
    let target_dim = n + 1;
    if s.dim() < target_dim {
        return Err(Error::SubspaceTooSmall {
            dim: s.dim(),
            required: format!("falsification in dimension {n} needs at least {target_dim} basis functions"),
        });
    }

    // (1) peel down to an (n+1)-dimensional alternating subspace, keeping
    // for each working basis function its coefficients in the candidate's
    // original basis so witnesses can be reported in that frame
    let extracted = s.dim() > target_dim;
    let mut work = s.clone();
    let mut columns: Vec<Vec<f64>> = (0..s.dim())
        .map(|j| {
            let mut e = vec![0.0; s.dim()];
            e[j] = 1.0;
            e
        })
        .collect();
    let mut level = 0u64;
    while work.dim() > target_dim {
        let res = extract_alternating(&work, grid, seed.wrapping_add(level))?;
        columns = res
            .kernel
            .iter()
            .map(|k| {
                // the extracted basis function is (1/sup) Σ kᵢ fᵢ
                let sup = work.element_from_slice(k).grid_sup(grid);
                let mut col = vec![0.0; s.dim()];
                for (ki, old) in k.iter().zip(&columns) {
                    for (c, o) in col.iter_mut().zip(old) {
                        *c += ki / sup * o;
                    }
                }
                col
            })
            .collect();
        work = res.subspace;
        level += 1;
    }

    // (2) Confine the search: beyond the tail radius no element can reach
    // its extreme values. Candidates handed in at dimension n+1 (the
    // conjecture probe) may contain one-signed elements; for those the
    // apparatus does not apply and the search runs unconfined.
    let radius_limit = match sign_bounds(&work, grid, 100, seed) {
        Ok(bounds) => {
            let eq = estimate_norm_equivalence(&work, grid, 1000, seed)?;
            tail_radius(&work, &bounds, &eq)?.a
        }
        Err(Error::NotAlternating(_)) if !extracted => f64::INFINITY,
        Err(e) => return Err(e),
    };

    let params = CertifyParams::for_grid(grid);
    let cluster_radius = params.cluster_radius;
    let m = work.dim();

    // (3) screen the coefficient sphere with a low-discrepancy sweep
    let screen_count = (budget / 2).max(4);
    let objective = |coefs: &[f64]| gap_objective(&work, grid, cluster_radius, radius_limit, coefs);
    let mut screened: Vec<(f64, u64, Vec<f64>)> = (0..screen_count as u64)
        .into_par_iter()
        .map(|i| {
            let a = halton_sphere(m, i);
            (objective(&a), i, a)
        })
        .collect();
    screened.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    let mut probes = screen_count;

    // Re-score the screened leaders with the refined-peak objective: the
    // grid objective cannot tell a genuine two-peak element from a ridge
    // artifact, and for candidates built on the compactification the
    // artifacts dominate the top of the grid ranking.
    let pol =
        |coefs: &[f64]| polished_gap_objective(&work, grid, cluster_radius, radius_limit, coefs);
    let rescored_count = screened.len().min(64);
    let mut rescored: Vec<(f64, u64, Vec<f64>)> = screened
        .iter()
        .take(rescored_count)
        .map(|(_, i, a)| (pol(a), *i, a.clone()))
        .collect();
    rescored.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
    probes += rescored_count;

    // local descent from the best starts
    let descent_budget = (budget / 8).max(8);
    let mut best: (f64, Vec<f64>) = (rescored[0].0, rescored[0].2.clone());
    for (_, _, start) in rescored.iter().take(4) {
        let out = pattern_search(
            &pol,
            start,
            0.2,
            descent_budget,
            1e-10,
            Projection::Some(&sphere_projection),
        );
        probes += out.evals;
        if out.value < best.0 {
            let mut a = out.point;
            sphere_projection(&mut a);
            best = (out.value, a);
        }
    }

    // polish stage: a fine-step descent around the leader
    if budget >= 2000 {
        let out = pattern_search(
            &pol,
            &best.1,
            grid.cell_edge() / 4.0,
            (budget / 10).min(400),
            1e-12,
            Projection::Some(&sphere_projection),
        );
        probes += out.evals;
        if out.value < best.0 {
            let mut a = out.point;
            sphere_projection(&mut a);
            best = (out.value, a);
        }
    }

    // (4) certify the leader and test the witness conditions
    let coefs = CoefVector::new(best.1.clone())?;
    let mut best_gap = best.0;
    let mut witness = None;
    let g = work.element_from_slice(&best.1);
    if let Some(gg) = grid_two_peaks(&g, grid, cluster_radius, radius_limit) {
        if gg.v1 > 0.0 {
            let cert = certify_max(&work, &coefs, grid, &params)?;
            let p2 = grid.point(gg.i2);
            let (q2, w2) = refine_peak(&g, p2, grid.cell_edge(), REFINE_BUDGET);
            let value1 = cert.value;
            let (peak2, value2) = if dist(cert.argmax.coords(), &q2) >= cluster_radius {
                (q2, w2)
            } else {
                (p2.to_vec(), gg.v2)
            };
            let separation = dist(cert.argmax.coords(), &peak2);
            let gap = (value1 - value2).abs();
            let gap_rel = gap / value1.abs().max(f64::MIN_POSITIVE);
            best_gap = best_gap.min(gap_rel);
            let alternates = !extracted || is_alternating(&work, &coefs, grid)?;
            if gap_rel <= tol_gap && separation >= cluster_radius && alternates {
                // report the witness in the candidate's own basis
                let original_coefs = if extracted {
                    let mut a = vec![0.0; s.dim()];
                    for (bj, col) in best.1.iter().zip(&columns) {
                        for (ai, ci) in a.iter_mut().zip(col) {
                            *ai += bj * ci;
                        }
                    }
                    CoefVector::new(a)?
                } else {
                    coefs.clone()
                };
                witness = Some(ViolationWitness {
                    coefs: original_coefs,
                    peak1: cert.argmax,
                    peak2: EuclideanPoint::new(peak2)?,
                    value1,
                    value2,
                    separation,
                    gap,
                });
            }
        }
    }

    let verdict = if witness.is_some() {
        Verdict::ViolationFound
    } else {
        Verdict::Inconclusive
    };
    Ok(ExperimentReport {
        ambient_dim: n,
        candidate_dim: s.dim(),
        family: family.to_string(),
        witness,
        probes,
        best_gap,
        verdict,
        seed,
    })
}

/// Re-evaluates a witness independently of the search: the element's
/// certified maximum on a finer grid must reproduce `value1`, and direct
/// evaluation at `peak2` must reproduce `value2`, each within `tol_abs`.
pub fn reverify_witness(
    s: &Subspace,
    w: &ViolationWitness,
    resolution: usize,
    tol_abs: f64,
) -> Result<bool> {
    let grid = build_grid(s.ambient_dim, resolution)?;
    let params = CertifyParams::for_grid(&grid);
    let cert = certify_max(s, &w.coefs, &grid, &params)?;
    let v1_ok = (cert.value - w.value1).abs() <= tol_abs;
    let g = s.combine(&w.coefs)?;
    let v2_ok = (g.evaluate(&w.peak2)? - w.value2).abs() <= tol_abs;
    Ok(v1_ok && v2_ok)
}

/// Restriction of every basis function to the closed ball of radius
/// `radius`, realized as sample tables (zero outside the ball, node-exact
/// inside). The restricted family must stay linearly independent.
pub fn restrict_to_ball(s: &Subspace, radius: f64) -> Result<Subspace> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "restriction radius must be positive, got {radius}"
        )));
    }
    let dim = s.ambient_dim;
    let resolution = table_resolution(dim);
    let basis = s
        .basis
        .iter()
        .map(|f| {
            let table = SampleTable::from_fn(dim, radius, resolution, |x| {
                if norm(x) <= radius {
                    f.eval_slice(x)
                } else {
                    0.0
                }
            })?;
            Ok(BasisFunction {
                ambient_dim: dim,
                family: Family::Custom { table },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let restricted = Subspace::new(dim, basis)?;
    let grid = build_grid(dim, 17)?;
    restricted
        .check_gram_rank(&grid)
        .map_err(|_| Error::RankDropAfterRestriction { radius })?;
    Ok(restricted)
}

/// Lattice resolution keeping restriction tables near four million nodes.
fn table_resolution(dim: usize) -> usize {
    let budget = 4_194_304f64;
    let r = budget.powf(1.0 / dim as f64).floor() as usize;
    r.clamp(9, 65) | 1 // odd, so the origin is a node
}

/// Shipped candidate families for the falsifier and the conjecture probe.
pub fn family_subspace(name: &str, n: usize, dim: usize, seed: u64) -> Result<Subspace> {
    match name {
        "three-gaussians" => three_gaussians(n, dim, seed),
        "gaussians" => gaussians(n, dim, seed),
        "witness-plus-gaussians" => witness_plus_gaussians(n, dim, seed),
        "perturbed-witness" => perturbed_witness(n, dim, seed),
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

pub const FAMILIES: [&str; 4] = [
    "three-gaussians",
    "gaussians",
    "witness-plus-gaussians",
    "perturbed-witness",
];

fn three_gaussians(n: usize, dim: usize, seed: u64) -> Result<Subspace> {
    if dim != 3 {
        return Err(Error::InvalidSpec(format!(
            "the three-gaussians family has dimension 3, got {dim}"
        )));
    }
    let mut r = rng(seed.wrapping_mul(0x9e3779b97f4a7c15));
    let spread = 1.0 + 0.5 * r.gen::<f64>();
    let width = 0.6 + 0.3 * r.gen::<f64>();
    let centers = [-spread, 0.0, spread];
    let basis = centers
        .iter()
        .map(|&c| {
            let mut coords = vec![0.0; n];
            coords[0] = c;
            BasisFunction::gaussian_bump(EuclideanPoint::new(coords)?, width, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Subspace::new(n, basis)
}

fn random_bumps(
    n: usize,
    count: usize,
    r: &mut rand_chacha::ChaCha8Rng,
    taken: &mut Vec<Vec<f64>>,
) -> Result<Vec<BasisFunction>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let center = loop {
            let dir: Vec<f64> = crate::sampling::sphere_points(n, 1.0, 1, r.gen())
                .pop()
                .expect("one direction");
            let radius = 1.4 * r.gen::<f64>().powf(1.0 / n as f64);
            let c: Vec<f64> = dir.iter().map(|d| d * radius).collect();
            if taken.iter().all(|t| dist(t, &c) >= 0.35) {
                break c;
            }
        };
        taken.push(center.clone());
        let width = 0.35 + 0.25 * r.gen::<f64>();
        out.push(BasisFunction::gaussian_bump(
            EuclideanPoint::new(center)?,
            width,
            1,
        )?);
    }
    Ok(out)
}

fn gaussians(n: usize, dim: usize, seed: u64) -> Result<Subspace> {
    let mut r = rng(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let mut taken = Vec::new();
    Subspace::new(n, random_bumps(n, dim, &mut r, &mut taken)?)
}

fn witness_plus_gaussians(n: usize, dim: usize, seed: u64) -> Result<Subspace> {
    if dim <= n {
        return Err(Error::InvalidSpec(format!(
            "witness-plus-gaussians needs dimension > {n}, got {dim}"
        )));
    }
    let mut basis = crate::witness::witness_basis(n)?.basis;
    let mut r = rng(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(2));
    let mut taken = Vec::new();
    basis.extend(random_bumps(n, dim - n, &mut r, &mut taken)?);
    Subspace::new(n, basis)
}

fn perturbed_witness(n: usize, dim: usize, seed: u64) -> Result<Subspace> {
    let mut r = rng(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(3));
    let mut taken = Vec::new();
    let witness = crate::witness::witness_basis(n)?.basis;
    let mut basis = Vec::with_capacity(dim);
    for f in witness.into_iter().take(dim) {
        let bump = random_bumps(n, 1, &mut r, &mut taken)?.remove(0);
        let eps = 0.02 + 0.06 * r.gen::<f64>();
        basis.push(BasisFunction::combination(
            vec![
                crate::basis::ComboTerm {
                    coef: 1.0,
                    function: f,
                },
                crate::basis::ComboTerm {
                    coef: eps,
                    function: bump,
                },
            ],
            1.0,
        )?);
    }
    if basis.len() < dim {
        basis.extend(random_bumps(n, dim - basis.len(), &mut r, &mut taken)?);
    }
    Subspace::new(n, basis)
}

pub fn conjecture_probe(
    n: usize,
    family: &str,
    trials: usize,
    seed: u64,
    opts: &FalsifyOptions,
) -> Result<Vec<ExperimentReport>> {
    if n < 2 {
        return Err(Error::ConjectureDimTooSmall(n));
    }
    if !FAMILIES.contains(&family) {
        return Err(Error::UnknownFamily(family.to_string()));
    }
    let grid = build_grid(n, opts.resolution)?;
    (0..trials as u64)
        .map(|t| {
            let s = family_subspace(family, n, n + 1, seed.wrapping_add(t))?;
            falsify_named(&s, &grid, opts.tol_gap, opts.budget, seed.wrapping_add(t), family)
        })
        .collect()
}
