//! Seeded low-discrepancy sampling of annuli and spheres.
//!
//! Points come from a Halton sequence with a Cranley–Patterson rotation drawn
//! from the seed, so sample `i` is a pure function of `(seed, i)` and can be
//! generated or evaluated in any order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Region;

const PRIMES: [u64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

/// Largest state dimension the sampler supports.
pub const MAX_DIM: usize = 36;

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    out
}

/// Rotated Halton sequence.
#[derive(Debug, Clone)]
pub struct Halton {
    shifts: Vec<f64>,
}

impl Halton {
    /// `stream` separates independent uses of one seed.
    pub fn new(dims: usize, seed: u64, stream: u64) -> Self {
        assert!(dims <= PRIMES.len(), "too many Halton dimensions");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let shifts = (0..dims).map(|_| rng.random::<f64>()).collect();
        Self { shifts }
    }

    /// Coordinate `d` of point `index`, in [0, 1).
    pub fn coord(&self, index: u64, d: usize) -> f64 {
        let v = radical_inverse(index + 1, PRIMES[d]) + self.shifts[d];
        v - v.floor()
    }
}

/// Number of uniform coordinates consumed by one sphere direction in `R^n`.
pub fn direction_dims(n: usize) -> usize {
    match n {
        1 | 2 => 1,
        _ => 2 * n.div_ceil(2),
    }
}

/// Unit vector uniformly distributed on the sphere, from the Halton
/// coordinates `first..first + direction_dims(n)` of `index`.
pub fn direction(h: &Halton, index: u64, first: usize, out: &mut [f64]) {
    let n = out.len();
    match n {
        1 => {
            out[0] = if h.coord(index, first) < 0.5 {
                -1.0
            } else {
                1.0
            }
        }
        2 => {
            let theta = 2.0 * PI * h.coord(index, first);
            out[0] = theta.cos();
            out[1] = theta.sin();
        }
        _ => {
            for k in 0..n.div_ceil(2) {
                let u1 = h.coord(index, first + 2 * k).max(f64::MIN_POSITIVE);
                let u2 = h.coord(index, first + 2 * k + 1);
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, c) = (2.0 * PI * u2).sin_cos();
                out[2 * k] = r * c;
                if 2 * k + 1 < n {
                    out[2 * k + 1] = r * s;
                }
            }
            let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                out.iter_mut().for_each(|v| *v /= norm);
            } else {
                out.iter_mut().for_each(|v| *v = 0.0);
                out[0] = 1.0;
            }
        }
    }
}

/// Radius uniform in volume between `r0` and `r1` in `R^n`.
pub fn shell_radius(u: f64, r0: f64, r1: f64, n: usize) -> f64 {
    let a = r0.powi(n as i32);
    let b = r1.powi(n as i32);
    (a + u * (b - a)).powf(1.0 / n as f64)
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Sample points of a region: annulus points plus a share of points placed
/// exactly on the coordinate hyperplanes `x_j = 0`, where degenerate
/// equality loci of polynomial fields usually live.
pub fn sample_region(
    region: &Region,
    samples: usize,
    plane_fraction: f64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let n = region.dim();
    let dd = direction_dims(n);
    let h = Halton::new(dd + 1, seed, 1);
    let plane_count = if n >= 2 {
        ((samples as f64) * plane_fraction).round() as usize
    } else {
        0
    };
    let free_count = samples - plane_count.min(samples);

    let make = |index: u64, plane: Option<usize>| -> Vec<f64> {
        let mut x = vec![0.0; n];
        direction(&h, index, 0, &mut x);
        let r = shell_radius(h.coord(index, dd), region.r_min(), region.r_max(), n);
        if let Some(j) = plane {
            x[j] = 0.0;
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                x.iter_mut().for_each(|v| *v /= norm);
            } else {
                x[(j + 1) % n] = 1.0;
            }
        }
        x.iter_mut().for_each(|v| *v *= r);
        x
    };

    let mut points = Vec::with_capacity(samples);
    let max_attempts = (samples as u64).saturating_mul(50).max(1000);
    let mut index = 0u64;
    while points.len() < samples && index < max_attempts {
        let k = points.len();
        let plane = (k >= free_count).then(|| (k - free_count) % n);
        let x = make(index, plane);
        index += 1;
        if region.contains_box(&x) {
            points.push(x);
        }
    }
    points
}

/// `count` directions on the unit sphere, deterministic in `seed`.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let h = Halton::new(direction_dims(n), seed, 2);
    (0..count as u64)
        .map(|i| {
            let mut x = vec![0.0; n];
            direction(&h, i, 0, &mut x);
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(5, 3), 2.0 / 3.0 + 1.0 / 9.0);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn directions_are_unit() {
        for n in 1..6 {
            for d in sphere_directions(n, 50, 7) {
                let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn region_samples_respect_radii_and_planes() {
        let region = Region::annulus(3, 0.1, 2.0).unwrap();
        let pts = sample_region(&region, 1000, 0.1, 3);
        assert_eq!(pts.len(), 1000);
        for p in &pts {
            let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((0.1 - 1e-12..=2.0 + 1e-12).contains(&r));
        }
        let on_planes = pts.iter().filter(|p| p.contains(&0.0)).count();
        assert!(on_planes >= 100);
    }

    #[test]
    fn same_seed_same_points() {
        let region = Region::annulus(2, 0.5, 1.0).unwrap();
        assert_eq!(
            sample_region(&region, 100, 0.1, 9),
            sample_region(&region, 100, 0.1, 9)
        );
        assert_ne!(
            sample_region(&region, 100, 0.1, 9),
            sample_region(&region, 100, 0.1, 10)
        );
    }

    #[test]
    fn box_bounds_filter_points() {
        let region = Region::annulus(2, 0.1, 2.0)
            .unwrap()
            .with_box(vec![(0.0, 2.0), (-2.0, 2.0)])
            .unwrap();
        let pts = sample_region(&region, 200, 0.0, 1);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|p| p[0] >= 0.0));
    }
}
