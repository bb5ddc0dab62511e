//! Extreme rays of a polyhedral cone `{a : w_j · a >= 0}` by the double
//! description method. Dimensions here are tiny (m <= 8) but the constraint
//! list comes from a grid and can run to thousands of rows, so constraints
//! are normalized and deduplicated up front and zero sets are kept as
//! bitsets.

use crate::error::{Error, Result};
use crate::point::{dot, norm};

const EPS: f64 = 1e-9;

/// Zero set of a ray: which constraints it satisfies with equality.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ZeroSet {
    words: Vec<u64>,
}

impl ZeroSet {
    fn new(capacity: usize) -> Self {
        Self {
            words: vec![0u64; capacity.div_ceil(64)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    fn intersection(&self, other: &Self) -> Self {
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn contains_all(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    v: Vec<f64>,
    zero: ZeroSet,
}

/// Normalizes and deduplicates constraint rows; drops (near-)zero rows.
fn clean_constraints(constraints: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut seen: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    let mut out = Vec::new();
    for w in constraints {
        debug_assert_eq!(w.len(), dim);
        let n = norm(w);
        if n <= 1e-12 {
            continue;
        }
        let unit: Vec<f64> = w.iter().map(|c| c / n).collect();
        let key: Vec<i64> = unit.iter().map(|c| (c * 1e9).round() as i64).collect();
        if seen.insert(key) {
            out.push(unit);
        }
    }
    out
}

fn normalize_ray(v: &mut [f64]) {
    let n = norm(v);
    if n > 0.0 {
        for c in v.iter_mut() {
            *c /= n;
        }
    }
}

/// Extreme rays of `{a in R^dim : w · a >= 0 for all constraint rows w}`.
///
/// An empty result means the cone is `{0}`. A surviving lineality space
/// (the cone contains a line) is reported as an error: for the sampled
/// nonnegative cone of independent functions that signals a grid too
/// coarse to pin signs down.
pub fn extreme_rays(constraints: &[Vec<f64>], dim: usize) -> Result<Vec<Vec<f64>>> {
    let rows = clean_constraints(constraints, dim);
    let total = rows.len();

    // start from the whole space as lineality
    let mut lineality: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (ci, w) in rows.iter().enumerate() {
        let lin_dots: Vec<f64> = lineality.iter().map(|l| dot(w, l)).collect();
        let pivot = lin_dots
            .iter()
            .enumerate()
            .filter(|(_, d)| d.abs() > EPS)
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i);

        if let Some(pi) = pivot {
            // split one lineality direction off: it becomes a ray on the
            // positive side of w, everything else is projected into w = 0
            let mut l = lineality.remove(pi);
            let dl = dot(w, &l);
            if dl < 0.0 {
                for c in l.iter_mut() {
                    *c = -*c;
                }
            }
            let dl = dl.abs();
            for other in lineality.iter_mut() {
                let f = dot(w, other) / dl;
                for (o, lc) in other.iter_mut().zip(&l) {
                    *o -= f * lc;
                }
                normalize_ray(other);
            }
            for ray in rays.iter_mut() {
                let f = dot(w, &ray.v) / dl;
                for (r, lc) in ray.v.iter_mut().zip(&l) {
                    *r -= f * lc;
                }
                normalize_ray(&mut ray.v);
                ray.zero.insert(ci);
            }
            // the split-off direction satisfies every earlier constraint
            // with equality (it lived in the lineality space)
            let mut zero = ZeroSet::new(total);
            for j in 0..ci {
                zero.insert(j);
            }
            normalize_ray(&mut l);
            rays.push(Ray { v: l, zero });
            continue;
        }

        // lineality is inside the hyperplane; partition rays by sign
        let dots: Vec<f64> = rays.iter().map(|r| dot(w, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| dots[i] > EPS).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| dots[i] < -EPS).collect();
        if neg.is_empty() {
            for (ray, d) in rays.iter_mut().zip(&dots) {
                if d.abs() <= EPS {
                    ray.zero.insert(ci);
                }
            }
            continue;
        }

        let mut next: Vec<Ray> = Vec::new();
        for (i, ray) in rays.iter().enumerate() {
            if dots[i] > EPS {
                next.push(Ray {
                    v: ray.v.clone(),
                    zero: ray.zero.clone(),
                });
            } else if dots[i] >= -EPS {
                let mut z = ray.zero.clone();
                z.insert(ci);
                next.push(Ray {
                    v: ray.v.clone(),
                    zero: z,
                });
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero.intersection(&rays[q].zero);
                // combinatorial adjacency: no third ray's zero set
                // contains the common one
                let adjacent = rays.iter().enumerate().all(|(r, other)| {
                    r == p || r == q || !other.zero.contains_all(&common)
                });
                if !adjacent {
                    continue;
                }
                let (dp, dq) = (dots[p], dots[q]);
                let mut v: Vec<f64> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[q].v)
                    .map(|(pc, qc)| dp * qc - dq * pc)
                    .collect();
                normalize_ray(&mut v);
                let mut zero = common;
                zero.insert(ci);
                next.push(Ray { v, zero });
            }
        }
        rays = next;
    }

    if !lineality.is_empty() {
        // includes the no-constraints case: the whole space is a lineality
        return Err(Error::ConeNotPointed);
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut rays: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rays
    }

    #[test]
    fn orthant_rays_are_the_axes() {
        let constraints = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let rays = sorted(extreme_rays(&constraints, 2).unwrap());
        assert_eq!(rays.len(), 2);
        assert!((rays[0][1] - 1.0).abs() < 1e-12 && rays[0][0].abs() < 1e-12);
        assert!((rays[1][0] - 1.0).abs() < 1e-12 && rays[1][1].abs() < 1e-12);
    }

    #[test]
    fn halfspace_alone_is_not_pointed() {
        let constraints = vec![vec![1.0, 0.0]];
        match extreme_rays(&constraints, 2) {
            Err(Error::ConeNotPointed) => {}
            other => panic!("expected non-pointed cone, got {other:?}"),
        }
    }

    #[test]
    fn opposite_halfspaces_leave_a_hyperplane_line() {
        // x >= 0 and x <= 0 pin x = 0 but leave the y-axis free both ways
        let constraints = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert!(matches!(
            extreme_rays(&constraints, 2),
            Err(Error::ConeNotPointed)
        ));
    }

    #[test]
    fn contradictory_strict_cone_collapses_to_zero() {
        // x >= 0, -x + y >= 0, -y - x >= 0 forces x = y = 0 in 1-D slices;
        // simplest check in 1-D: a >= 0 and -a >= 0 → {0}
        let constraints = vec![vec![1.0], vec![-1.0]];
        // {a : a >= 0, -a >= 0} = {0}: a line's worth of lineality never
        // appears, both rays die
        let rays = extreme_rays(&constraints, 1);
        match rays {
            Ok(r) => assert!(r.is_empty()),
            Err(e) => panic!("expected the zero cone, got {e:?}"),
        }
    }

    #[test]
    fn three_dim_orthant_with_redundancy() {
        let mut constraints = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        // redundant and duplicated rows must not change the answer
        constraints.push(vec![2.0, 0.0, 0.0]);
        constraints.push(vec![1.0, 1.0, 1.0]);
        let rays = extreme_rays(&constraints, 3).unwrap();
        assert_eq!(rays.len(), 3);
        for r in &rays {
            assert!((norm(r) - 1.0).abs() < 1e-12);
            assert_eq!(r.iter().filter(|c| c.abs() > 1e-9).count(), 1);
        }
    }

    #[test]
    fn ice_cream_cone_cross_section() {
        // {a in R^3 : a·w_k >= 0} for w_k on a circle approximates a
        // quadratic cone; every returned ray must satisfy all constraints
        let mut constraints = Vec::new();
        for k in 0..12 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
            constraints.push(vec![th.cos(), th.sin(), 1.0]);
        }
        let rays = extreme_rays(&constraints, 3).unwrap();
        assert!(!rays.is_empty());
        for r in &rays {
            for w in &constraints {
                assert!(dot(r, w) >= -1e-9);
            }
        }
    }

    #[test]
    fn every_ray_satisfies_every_constraint() {
        // pseudo-random halfspaces in R^4
        let mut state = 0x243f6a88u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        let constraints: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let mut w: Vec<f64> = (0..4).map(|_| next()).collect();
                w[3] = w[3].abs() + 1.5; // tilt: keeps the cone pointed-ish
                w
            })
            .collect();
        match extreme_rays(&constraints, 4) {
            Ok(rays) => {
                for r in &rays {
                    for w in &constraints {
                        assert!(dot(r, w) >= -1e-8, "ray {r:?} violates {w:?}");
                    }
                }
            }
            Err(Error::ConeNotPointed) => {}
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }
}
