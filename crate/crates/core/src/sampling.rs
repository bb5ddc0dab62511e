//! Seeded samplers: spheres, coefficient spheres, and a low-discrepancy
//! sequence for coefficient-space sweeps.

use crate::pattern::{pattern_search, Projection};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; keeps the sampler dependency-free and reproducible.
    loop {
        let u1: f64 = rng.gen();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        let n = crate::point::norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// `count` points on the sphere of the given radius, deterministic per seed.
pub fn sphere_points(dim: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            unit_direction(&mut rng, dim)
                .into_iter()
                .map(|c| c * radius)
                .collect()
        })
        .collect()
}

/// Unit-norm coefficient vectors, deterministic per seed; requesting a larger
/// count extends the sequence without changing its prefix.
pub fn unit_coef_probes(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (0..count).map(|_| unit_direction(&mut rng, dim)).collect()
}

/// Sampled sup of |f| over the sphere of the given radius, polished by a
/// pattern search constrained to the sphere.
pub fn sphere_sup_abs(
    f: impl Fn(&[f64]) -> f64,
    dim: usize,
    radius: f64,
    samples: usize,
    seed: u64,
    refine_evals: usize,
) -> f64 {
    let pts = sphere_points(dim, radius, samples, seed);
    let mut best = f64::NEG_INFINITY;
    let mut best_pt = pts[0].clone();
    for p in &pts {
        let v = f(p).abs();
        if v > best {
            best = v;
            best_pt = p.clone();
        }
    }
    if refine_evals == 0 {
        return best;
    }
    let objective = |x: &[f64]| -f(x).abs();
    let project = move |x: &mut [f64]| {
        let n = crate::point::norm(x);
        if n > 0.0 {
            for c in x.iter_mut() {
                *c *= radius / n;
            }
        }
    };
    let out = pattern_search(
        objective,
        &best_pt,
        radius * 0.5,
        refine_evals,
        1e-14 * radius,
        Projection::Some(&project),
    );
    best.max(-out.value)
}

const HALTON_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Low-discrepancy points on the unit coefficient sphere: Halton coordinates
/// pushed through Box-Muller pairs, then normalized.
pub fn halton_sphere(dim: usize, index: u64) -> Vec<f64> {
    assert!(2 * dim <= HALTON_PRIMES.len(), "dimension too large for the Halton table");
    let i = index + 1; // skip the all-zeros point
    let mut v = Vec::with_capacity(dim);
    for k in 0..dim {
        let u1 = halton(i, HALTON_PRIMES[2 * k]).max(1e-12);
        let u2 = halton(i, HALTON_PRIMES[2 * k + 1]);
        v.push((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos());
    }
    let n = crate::point::norm(&v);
    if n > 1e-12 {
        for c in &mut v {
            *c /= n;
        }
    } else {
        v[0] = 1.0;
        for c in v.iter_mut().skip(1) {
            *c = 0.0;
        }
    }
    v
}

/// Uniform radius in `(a, b]`, uniform direction.
pub fn shell_points(dim: usize, a: f64, b: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let r = a + (b - a) * rng.gen::<f64>();
            unit_direction(&mut rng, dim)
                .into_iter()
                .map(|c| c * r)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_have_requested_radius() {
        for p in sphere_points(3, 2.5, 100, 1) {
            assert!((crate::point::norm(&p) - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn probes_are_a_prefix_stable_sequence() {
        let short = unit_coef_probes(4, 10, 42);
        let long = unit_coef_probes(4, 50, 42);
        assert_eq!(&long[..10], &short[..]);
    }

    #[test]
    fn halton_sphere_is_deterministic_and_unit() {
        for i in 0..200 {
            let p = halton_sphere(3, i);
            assert!((crate::point::norm(&p) - 1.0).abs() < 1e-12);
            assert_eq!(p, halton_sphere(3, i));
        }
    }

    #[test]
    fn sphere_sup_recovers_linear_extreme() {
        // sup of |<a, x>| over |x| = R is |a| * R
        let a = [3.0, 4.0];
        let sup = sphere_sup_abs(
            |x| a[0] * x[0] + a[1] * x[1],
            2,
            2.0,
            1000,
            0,
            4000,
        );
        assert!((sup - 10.0).abs() / 10.0 < 1e-9, "sup = {sup}");
    }
}
