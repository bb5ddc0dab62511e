//! Alternating subspaces: every nonzero element takes a strictly negative
//! and a strictly positive value. This module estimates the quantitative
//! constants that make that property exploitable (sign bounds, norm
//! equivalence, a tail radius beyond which no element can reach its extreme
//! values), and extracts an alternating hyperplane from an arbitrary
//! independent family by separating its sampled nonnegative cone.

use crate::certify::{certify_max, compute_min, CertifyParams};
use crate::cone::extreme_rays;
use crate::error::{Error, Result};
use crate::grid::TwoChartGrid;
use crate::point::{dot, norm, CoefVector};
use crate::sampling::{shell_points, unit_coef_probes};
use crate::simplex::max_min_inner_product;
use crate::subspace::Subspace;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Probe count used by the internal extraction verifier.
pub const EXTRACTION_PROBES: usize = 1000;

/// Retry budget when a separating functional fails verification.
pub const EXTRACTION_RETRIES: usize = 8;

/// Largest radius the tail-bound doubling search will certify.
pub const TAIL_RADIUS_BUDGET: f64 = 1e12;

/// Estimates of sup m(g) and inf M(g) over the unit coefficient sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignBounds {
    pub sup_min: f64,
    pub inf_max: f64,
    pub probes: usize,
}

/// Observed equivalence constants between the coefficient Euclidean norm
/// and the grid sup-norm: C1·‖g‖ ≤ ‖a‖ ≤ C2·‖g‖ on all probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalence {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
}

/// Tail threshold N and radius A with |g(x)| ≤ N certified for ‖x‖ > A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRadius {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

/// Result of the cone-separation extraction: an (m−1)-dimensional
/// subspace of the input, the separating functional, and the probe report
/// that vouches for it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub subspace: Subspace,
    /// Rows are coefficient vectors over the input basis spanning ker φ.
    pub kernel: Vec<Vec<f64>>,
    pub phi: Vec<f64>,
    pub probes: usize,
    pub retries: usize,
    pub seed: u64,
}

/// True iff the sampled values of Σ aᵢ fᵢ straddle zero strictly.
pub fn is_alternating(s: &Subspace, a: &CoefVector, grid: &TwoChartGrid) -> Result<bool> {
    if a.is_zero() {
        return Err(Error::ZeroCoefficients);
    }
    let g = s.combine(a)?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for p in grid.points() {
        let v = g.eval_slice(p);
        min = min.min(v);
        max = max.max(v);
    }
    Ok(min < 0.0 && 0.0 < max)
}

/// Samples the unit coefficient sphere and records the extreme ratios
/// ‖a‖ / ‖g‖_∞. The probe sequence is prefix-stable in `probes`, so C1 is
/// nonincreasing and C2 nondecreasing as the budget grows.
pub fn estimate_norm_equivalence(
    s: &Subspace,
    grid: &TwoChartGrid,
    probes: usize,
    seed: u64,
) -> Result<NormEquivalence> {
    s.check_gram_rank(grid)?;
    let ratios = unit_coef_probes(s.dim(), probes, seed)
        .par_iter()
        .map(|a| {
            let g = s.element_from_slice(a);
            let sup = g.grid_sup(grid);
            if sup < 1e-12 {
                return Err(Error::GridCannotSeparate(sup));
            }
            Ok(1.0 / sup)
        })
        .collect::<Result<Vec<f64>>>()?;
    let c1 = ratios.iter().fold(f64::INFINITY, |m, &r| m.min(r));
    let c2 = ratios.iter().fold(0.0f64, |m, &r| m.max(r));
    Ok(NormEquivalence { c1, c2 })
}

/// sup of m(g) and inf of M(g) over probed unit-coefficient elements,
/// where m and M come from the certifier over the same grid.
pub fn sign_bounds(
    s: &Subspace,
    grid: &TwoChartGrid,
    probes: usize,
    seed: u64,
) -> Result<SignBounds> {
    let params = CertifyParams::for_grid(grid);
    let extremes = unit_coef_probes(s.dim(), probes, seed)
        .par_iter()
        .map(|a| {
            let coefs = CoefVector::new(a.clone())?;
            if !is_alternating(s, &coefs, grid)? {
                return Err(Error::NotAlternating(a.clone()));
            }
            let low = compute_min(s, &coefs, grid)?.value;
            let high = certify_max(s, &coefs, grid, &params)?.value;
            Ok((low, high))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let sup_min = extremes.iter().fold(f64::NEG_INFINITY, |m, &(l, _)| m.max(l));
    let inf_max = extremes.iter().fold(f64::INFINITY, |m, &(_, h)| m.min(h));
    Ok(SignBounds {
        sup_min,
        inf_max,
        probes,
    })
}

/// N = min(−sup_min, inf_max)/2 and the smallest doubling radius A with
/// m · C∞ · max_i E_i(A) ≤ N, where E_i are the basis decay envelopes and
/// C∞ bounds the coefficients of the probed elements. Verified a
/// posteriori on 10³ sampled points with ‖x‖ ∈ (A, 4A].
pub fn tail_radius(s: &Subspace, bounds: &SignBounds, eq: &NormEquivalence) -> Result<TailRadius> {
    if !(bounds.sup_min < 0.0 && bounds.inf_max > 0.0) {
        return Err(Error::SignBoundsInvalid {
            sup_min: bounds.sup_min,
            inf_max: bounds.inf_max,
        });
    }
    let n = (-bounds.sup_min).min(bounds.inf_max) / 2.0;
    let m = s.dim() as f64;
    // probes live on the unit coefficient sphere, so |a_i| ≤ 1; C2 covers
    // elements normalized in the sup-norm instead
    let c_inf = eq.c2.max(1.0);

    let worst_envelope = |radius: f64| -> (usize, f64) {
        s.basis
            .iter()
            .enumerate()
            .map(|(i, f)| (i, f.envelope(radius)))
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .expect("non-empty basis")
    };

    let mut a = 1.0f64;
    loop {
        let (index, env) = worst_envelope(a);
        if m * c_inf * env <= n {
            break;
        }
        a *= 2.0;
        if a > TAIL_RADIUS_BUDGET {
            return Err(Error::EnvelopeTooSlow {
                index,
                target: n,
                radius_budget: TAIL_RADIUS_BUDGET,
            });
        }
    }

    let shell = shell_points(s.ambient_dim, a, 4.0 * a, 1000, 0);
    let probes = unit_coef_probes(s.dim(), 100, 1);
    let worst = probes
        .par_iter()
        .map(|coefs| {
            let g = s.element_from_slice(coefs);
            shell
                .iter()
                .map(|x| g.eval_slice(x).abs())
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0f64, f64::max);
    if worst > n {
        return Err(Error::TailCheckFailed {
            radius: a,
            observed: worst,
            bound: n,
        });
    }
    Ok(TailRadius { n, a })
}

/// Orthonormal basis of the hyperplane orthogonal to `phi` (Householder
/// reflection of the standard basis, first column dropped).
fn orthogonal_complement(phi: &[f64]) -> Vec<Vec<f64>> {
    let m = phi.len();
    let pn = norm(phi);
    let v: Vec<f64> = phi.iter().map(|c| c / pn).collect();
    let mut w = v.clone();
    w[0] -= 1.0;
    let wn = norm(&w);
    if wn < 1e-12 {
        // phi is (close to) e1: the complement is the remaining axes
        return (1..m)
            .map(|i| {
                let mut e = vec![0.0; m];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let w: Vec<f64> = w.iter().map(|c| c / wn).collect();
    (1..m)
        .map(|col| {
            let mut d = vec![0.0; m];
            d[col] = 1.0;
            let proj = 2.0 * w[col];
            for row in 0..m {
                d[row] -= proj * w[row];
            }
            d
        })
        .collect()
}

/// Builds the subspace spanned by the kernel combinations, each rescaled
/// to unit grid sup-norm.
fn kernel_subspace(s: &Subspace, kernel: &[Vec<f64>], grid: &TwoChartGrid) -> Result<Subspace> {
    let basis = kernel
        .iter()
        .map(|k| {
            let sup = s.element_from_slice(k).grid_sup(grid);
            if sup < 1e-12 {
                return Err(Error::GridCannotSeparate(sup));
            }
            let terms = k
                .iter()
                .zip(&s.basis)
                .map(|(&coef, f)| crate::basis::ComboTerm {
                    coef,
                    function: f.clone(),
                })
                .collect();
            crate::basis::BasisFunction::combination(terms, 1.0 / sup)
        })
        .collect::<Result<Vec<_>>>()?;
    Subspace::new(s.ambient_dim, basis)
}

/// Evaluation rows of the basis at the grid points, zero rows dropped.
fn sampled_cone_rows(s: &Subspace, grid: &TwoChartGrid) -> Vec<Vec<f64>> {
    grid.points()
        .filter_map(|p| {
            let row: Vec<f64> = s.basis.iter().map(|f| f.eval_slice(p)).collect();
            let n = norm(&row);
            if n <= 1e-12 {
                None
            } else {
                Some(row.iter().map(|c| c / n).collect())
            }
        })
        .collect()
}

/// Functional from the heuristic phase: the normalized sum of sampled cone
/// members, accepted only when it clears every member with margin.
fn heuristic_functional(rows: &[Vec<f64>], probes: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut members: Vec<&Vec<f64>> = Vec::new();
    let in_cone = |a: &[f64]| rows.iter().all(|w| dot(w, a) >= -1e-9);
    for a in probes {
        if in_cone(a) {
            members.push(a);
        }
        if members.len() >= 64 {
            break;
        }
    }
    if members.len() < 16 {
        return None;
    }
    let m = members[0].len();
    let mut phi = vec![0.0f64; m];
    for a in &members {
        for (p, c) in phi.iter_mut().zip(a.iter()) {
            *p += c;
        }
    }
    let pn = norm(&phi);
    if pn < 1e-12 {
        return None;
    }
    for p in phi.iter_mut() {
        *p /= pn;
    }
    if members.iter().all(|a| dot(&phi, a) >= 1e-6) {
        Some(phi)
    } else {
        None
    }
}

fn lp_functional(rays: &[Vec<f64>], retries: usize) -> Result<Vec<f64>> {
    let m = rays[0].len();
    let (phi, t) = max_min_inner_product(rays).ok_or_else(|| Error::SeparationBudgetExhausted {
        retries,
        detail: "dual-cone linear program had no solution".into(),
    })?;
    if t <= 1e-9 {
        return Err(Error::SeparationBudgetExhausted {
            retries,
            detail: format!("dual-cone linear program attained margin {t:e} only"),
        });
    }
    let pn = norm(&phi);
    debug_assert!(pn > 0.0 && phi.len() == m);
    Ok(phi.iter().map(|c| c / pn).collect())
}

/// Extracts an (m−1)-dimensional subspace all of whose probed nonzero
/// elements alternate on the grid, by separating the sampled nonnegative
/// cone P = {a : Σ aᵢ fᵢ ≥ 0 on the grid} with a functional φ strictly
/// positive on P∖{0} and returning ker φ.
pub fn extract_alternating(
    s: &Subspace,
    grid: &TwoChartGrid,
    seed: u64,
) -> Result<ExtractionResult> {
    let m = s.dim();
    if m < 2 {
        return Err(Error::SubspaceTooSmall {
            dim: m,
            required: "cone extraction needs at least two basis functions".into(),
        });
    }
    s.check_gram_rank(grid)?;

    let rows = sampled_cone_rows(s, grid);
    let member_probes = unit_coef_probes(m, 2000, seed);
    let verification_probes = unit_coef_probes(m - 1, EXTRACTION_PROBES, seed.wrapping_add(1));

    let mut rays: Option<Vec<Vec<f64>>> = None;
    let mut phi = match heuristic_functional(&rows, &member_probes) {
        Some(phi) => phi,
        None => {
            let r = extreme_rays(&rows, m)?;
            let phi = if r.is_empty() {
                // sampled cone is {0}: every hyperplane separates it
                let mut e = vec![0.0; m];
                e[0] = 1.0;
                e
            } else {
                lp_functional(&r, 0)?
            };
            rays = Some(r);
            phi
        }
    };

    for retries in 0..=EXTRACTION_RETRIES {
        let kernel = orthogonal_complement(&phi);
        let extracted = kernel_subspace(s, &kernel, grid)?;
        let violation = verification_probes
            .par_iter()
            .find_map_first(|b| {
                let g = extracted.element_from_slice(b);
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                for p in grid.points() {
                    let v = g.eval_slice(p);
                    min = min.min(v);
                    max = max.max(v);
                }
                if min < 0.0 && 0.0 < max {
                    None
                } else {
                    Some((b.clone(), max))
                }
            });
        let Some((b, max)) = violation else {
            return Ok(ExtractionResult {
                subspace: extracted,
                kernel,
                phi,
                probes: EXTRACTION_PROBES,
                retries,
                seed,
            });
        };
        if retries == EXTRACTION_RETRIES {
            break;
        }
        // the offending direction is (numerically) one-signed: feed it to
        // the dual-cone program as an extra generator and re-separate
        let mut a = vec![0.0f64; m];
        for (bj, k) in b.iter().zip(&kernel) {
            for (ai, ki) in a.iter_mut().zip(k) {
                *ai += bj * ki;
            }
        }
        if max <= 0.0 {
            for c in a.iter_mut() {
                *c = -*c;
            }
        }
        let an = norm(&a);
        for c in a.iter_mut() {
            *c /= an;
        }
        let r = match rays.take() {
            Some(r) => r,
            None => extreme_rays(&rows, m)?,
        };
        let mut r = r;
        r.push(a);
        phi = lp_functional(&r, retries + 1)?;
        rays = Some(r);
    }
    Err(Error::SeparationBudgetExhausted {
        retries: EXTRACTION_RETRIES,
        detail: "verification probes kept finding one-signed elements".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFunction;
    use crate::grid::build_grid;
    use crate::point::EuclideanPoint;
    use crate::witness::witness_basis;

    fn coefs(c: &[f64]) -> CoefVector {
        CoefVector::new(c.to_vec()).unwrap()
    }

    fn pt(coords: &[f64]) -> EuclideanPoint {
        EuclideanPoint::new(coords.to_vec()).unwrap()
    }

    fn disjoint_bumps() -> Subspace {
        let b1 = BasisFunction::gaussian_bump(pt(&[-0.5, 0.0]), 0.15, 1).unwrap();
        let b2 = BasisFunction::gaussian_bump(pt(&[0.5, 0.0]), 0.15, 1).unwrap();
        Subspace::new(2, vec![b1, b2]).unwrap()
    }

    #[test]
    fn witness_elements_alternate() {
        let s = witness_basis(2).unwrap();
        let grid = build_grid(2, 17).unwrap();
        for a in [[1.0, 0.0], [0.3, -0.7], [-1.0, -1.0]] {
            assert!(is_alternating(&s, &coefs(&a), &grid).unwrap());
        }
        assert!(is_alternating(&s, &coefs(&[0.0, 0.0]), &grid).is_err());
    }

    #[test]
    fn a_single_bump_does_not_alternate() {
        let b = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 1.0, 1).unwrap();
        let s = Subspace::new(2, vec![b]).unwrap();
        let grid = build_grid(2, 17).unwrap();
        assert!(!is_alternating(&s, &coefs(&[1.0]), &grid).unwrap());
        assert!(!is_alternating(&s, &coefs(&[-2.0]), &grid).unwrap());
    }

    #[test]
    fn difference_of_disjoint_bumps_alternates() {
        let s = disjoint_bumps();
        let grid = build_grid(2, 33).unwrap();
        assert!(is_alternating(&s, &coefs(&[1.0, -1.0]), &grid).unwrap());
    }

    #[test]
    fn single_function_equivalence_is_tight() {
        // one basis function with unit grid sup: C1 = C2 = 1
        let b = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 0.5, 1).unwrap();
        let s = Subspace::new(2, vec![b]).unwrap();
        let grid = build_grid(2, 17).unwrap();
        let eq = estimate_norm_equivalence(&s, &grid, 50, 7).unwrap();
        assert!((eq.c1 - 1.0).abs() <= 1e-9, "C1 = {}", eq.c1);
        assert!((eq.c2 - 1.0).abs() <= 1e-9, "C2 = {}", eq.c2);
    }

    #[test]
    fn disjoint_unit_bumps_have_root_two_spread() {
        // disjointly supported unit bumps: ‖g‖_∞ = max|a_i|, so the ratio
        // ‖a‖/‖g‖_∞ ranges over [1, √2] on the unit sphere of R²
        let s = disjoint_bumps();
        let grid = build_grid(2, 33).unwrap();
        let eq = estimate_norm_equivalence(&s, &grid, 4000, 11).unwrap();
        assert!(eq.c1 >= 1.0 - 1e-6 && eq.c1 <= 1.02, "C1 = {}", eq.c1);
        let root2 = std::f64::consts::SQRT_2;
        assert!(eq.c2 <= root2 + 1e-6 && eq.c2 >= 0.97 * root2, "C2 = {}", eq.c2);
    }

    #[test]
    fn equivalence_constants_are_monotone_in_probes() {
        let s = witness_basis(3).unwrap();
        let grid = build_grid(3, 9).unwrap();
        let mut last_c1 = f64::INFINITY;
        let mut last_c2 = 0.0f64;
        for probes in [10, 100, 1000] {
            let eq = estimate_norm_equivalence(&s, &grid, probes, 5).unwrap();
            assert!(eq.c1 <= last_c1 + 1e-15);
            assert!(eq.c2 >= last_c2 - 1e-15);
            last_c1 = eq.c1;
            last_c2 = eq.c2;
        }
    }

    #[test]
    fn witness_sign_bounds_are_plus_minus_one() {
        let s = witness_basis(2).unwrap();
        let grid = build_grid(2, 33).unwrap();
        let b = sign_bounds(&s, &grid, 100, 3).unwrap();
        assert!((b.sup_min + 1.0).abs() <= 1e-6, "sup_min = {}", b.sup_min);
        assert!((b.inf_max - 1.0).abs() <= 1e-6, "inf_max = {}", b.inf_max);
    }

    #[test]
    fn sign_bounds_reject_a_non_alternating_subspace() {
        let b = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 1.0, 1).unwrap();
        let s = Subspace::new(2, vec![b]).unwrap();
        let grid = build_grid(2, 17).unwrap();
        match sign_bounds(&s, &grid, 10, 0) {
            Err(Error::NotAlternating(a)) => assert_eq!(a.len(), 1),
            other => panic!("expected non-alternating error, got {other:?}"),
        }
    }

    #[test]
    fn witness_tail_radius_matches_the_reciprocal_envelope() {
        // witness envelopes are E_i(R) = 1/R, so the doubling search stops
        // at the first power of two with m·C∞/A ≤ N
        let s = witness_basis(2).unwrap();
        let grid = build_grid(2, 33).unwrap();
        let bounds = sign_bounds(&s, &grid, 100, 3).unwrap();
        let eq = estimate_norm_equivalence(&s, &grid, 1000, 3).unwrap();
        let t = tail_radius(&s, &bounds, &eq).unwrap();
        assert!((t.n - 0.5).abs() <= 1e-5);
        let c_inf = eq.c2.max(1.0);
        assert!(2.0 * c_inf / t.a <= t.n * (1.0 + 1e-12));
        assert!(2.0 * c_inf / (t.a / 2.0) > t.n);
    }

    #[test]
    fn invalid_sign_bounds_are_rejected() {
        let s = witness_basis(2).unwrap();
        let bad = SignBounds {
            sup_min: 0.25,
            inf_max: 1.0,
            probes: 10,
        };
        let eq = NormEquivalence { c1: 1.0, c2: 1.5 };
        assert!(matches!(
            tail_radius(&s, &bad, &eq),
            Err(Error::SignBoundsInvalid { .. })
        ));
    }

    #[test]
    fn complement_is_orthonormal_and_orthogonal_to_phi() {
        let phi = [0.2, -0.9, 0.4, 0.1];
        let kernel = orthogonal_complement(&phi);
        assert_eq!(kernel.len(), 3);
        for (i, k) in kernel.iter().enumerate() {
            assert!(dot(k, &phi).abs() < 1e-12);
            for (j, l) in kernel.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot(k, l) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn extraction_from_disjoint_bumps_yields_their_difference() {
        let s = disjoint_bumps();
        let grid = build_grid(2, 33).unwrap();
        let r = extract_alternating(&s, &grid, 0).unwrap();
        assert_eq!(r.subspace.dim(), 1);
        assert_eq!(r.kernel.len(), 1);
        // the kernel direction must mix the bumps with opposite signs
        let k = &r.kernel[0];
        assert!(k[0] * k[1] < 0.0, "kernel {k:?} does not oppose the bumps");
        for b in [[1.0], [-0.25], [3.0]] {
            assert!(is_alternating(&r.subspace, &coefs(&b), &grid).unwrap());
        }
    }

    #[test]
    fn extraction_from_the_witness_basis_alternates_on_probes() {
        let s = witness_basis(3).unwrap();
        let grid = build_grid(3, 17).unwrap();
        let r = extract_alternating(&s, &grid, 4).unwrap();
        assert_eq!(r.subspace.dim(), 2);
        for b in unit_coef_probes(2, 200, 9) {
            assert!(is_alternating(&r.subspace, &coefs(&b), &grid).unwrap());
        }
    }

    #[test]
    fn extraction_rejects_one_dimensional_input() {
        let b = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 1.0, 1).unwrap();
        let s = Subspace::new(2, vec![b]).unwrap();
        let grid = build_grid(2, 17).unwrap();
        assert!(matches!(
            extract_alternating(&s, &grid, 0),
            Err(Error::SubspaceTooSmall { .. })
        ));
    }

    #[test]
    fn extraction_rejects_a_dependent_basis() {
        let b = BasisFunction::gaussian_bump(EuclideanPoint::origin(2), 1.0, 1).unwrap();
        let half = BasisFunction::combination(
            vec![crate::basis::ComboTerm {
                coef: -0.5,
                function: b.clone(),
            }],
            1.0,
        )
        .unwrap();
        let s = Subspace {
            ambient_dim: 2,
            basis: vec![b, half],
        };
        let grid = build_grid(2, 17).unwrap();
        assert!(matches!(
            extract_alternating(&s, &grid, 0),
            Err(Error::GramRankDeficient { .. })
        ));
    }

    #[test]
    fn extraction_is_deterministic() {
        let s = disjoint_bumps();
        let grid = build_grid(2, 17).unwrap();
        let a = extract_alternating(&s, &grid, 12).unwrap();
        let b = extract_alternating(&s, &grid, 12).unwrap();
        assert_eq!(
            serde_json::to_string(&a.kernel).unwrap(),
            serde_json::to_string(&b.kernel).unwrap()
        );
        assert_eq!(a.phi, b.phi);
    }
}
