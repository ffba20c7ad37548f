use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitBall, UnitSphere};
use rayon::prelude::*;
use serde::Serialize;

use super::Shape;
use crate::fields::gauss_legendre;
use crate::particle::Vec3;

/// Value with an absolute error estimate (standard error for Monte Carlo).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn relative_error(&self) -> f64 {
        self.error / self.value.abs()
    }
}

fn sample(shape: Shape, rng: &mut ChaCha8Rng) -> Vec3 {
    let p: [f64; 3] = match shape {
        Shape::Shell => UnitSphere.sample(rng),
        Shape::Ball => UnitBall.sample(rng),
    };
    Vec3::from(p)
}

/// Runs `f` on every sampled pair. Partition `p` draws from stream `p` of
/// the seed, and partial sums are combined in partition order, so results
/// depend only on `(seed, partitions)`.
fn pair_sums<F>(shape: Shape, len: usize, pairs: u64, seed: u64, partitions: u32, f: F) -> Vec<Estimate>
where
    F: Fn(&Vec3, &mut [f64]) + Sync,
{
    let base = pairs / u64::from(partitions);
    let extra = pairs % u64::from(partitions);
    let parts: Vec<Vec<f64>> = (0..partitions)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::from(p));
            let count = base + u64::from(u64::from(p) < extra);
            let mut acc = vec![0.0; 2 * len];
            let mut vals = vec![0.0; len];
            for _ in 0..count {
                let d = sample(shape, &mut rng) - sample(shape, &mut rng);
                f(&d, &mut vals);
                for (k, v) in vals.iter().enumerate() {
                    acc[k] += v;
                    acc[len + k] += v * v;
                }
            }
            acc
        })
        .collect();
    let mut tot = vec![0.0; 2 * len];
    for part in &parts {
        for (t, v) in tot.iter_mut().zip(part) {
            *t += v;
        }
    }
    let n = pairs as f64;
    (0..len)
        .map(|k| {
            let mean = tot[k] / n;
            let var = ((tot[len + k] / n - mean * mean) * n / (n - 1.0)).max(0.0);
            Estimate { value: mean, error: (var / n).sqrt() }
        })
        .collect()
}

/// Unit-radius, unit-charge moments `E[d^(m-1)]`, `m = 0..=max_m`.
pub(super) fn monte_carlo(shape: Shape, max_m: usize, pairs: u64, seed: u64, partitions: u32) -> Vec<Estimate> {
    pair_sums(shape, max_m + 1, pairs, seed, partitions, |d, out| {
        let r = d.norm();
        let mut p = 1.0 / r;
        for o in out.iter_mut() {
            *o = p;
            p *= r;
        }
    })
}

pub(super) fn mc_direction(shape: Shape, dir: &Vec3, pairs: u64, seed: u64, partitions: u32) -> Estimate {
    pair_sums(shape, 1, pairs, seed, partitions, |d, out| {
        let c = d.dot(dir);
        out[0] = c * c / d.norm_squared();
    })[0]
}

fn on_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (x.iter().map(|x| 0.5 * (x + 1.0)).collect(), w.iter().map(|w| 0.5 * w).collect())
}

fn gauss_rule(shape: Shape, max_m: usize, n: usize) -> Vec<f64> {
    let (x, w) = on_unit(n);
    let mut out = vec![0.0; max_m + 1];
    match shape {
        // one point at the pole; cos θ = 1 - 2s² makes d = 2s
        Shape::Shell => {
            for (s, ws) in x.iter().zip(&w) {
                let d = 2.0 * s;
                let mut p = 1.0 / d;
                for o in out.iter_mut() {
                    *o += ws * 2.0 * s * p;
                    p *= d;
                }
            }
        }
        // r = x, r' = x y < r (doubled), then d over [r - r', r + r']
        Shape::Ball => {
            for (xi, wx) in x.iter().zip(&w) {
                for (yi, wy) in x.iter().zip(&w) {
                    let (lo, hi) = (xi * (1.0 - yi), xi * (1.0 + yi));
                    let outer = wx * wy * 9.0 * xi.powi(3) * yi;
                    for (di, wd) in x.iter().zip(&w) {
                        let d = lo + (hi - lo) * di;
                        let wt = outer * wd * (hi - lo);
                        let mut p = 1.0;
                        for o in out.iter_mut() {
                            *o += wt * p;
                            p *= d;
                        }
                    }
                }
            }
        }
    }
    out
}

pub(super) fn gauss(shape: Shape, max_m: usize, order: usize) -> Vec<Estimate> {
    let coarse = gauss_rule(shape, max_m, order);
    let fine = gauss_rule(shape, max_m, 2 * order);
    fine.iter().zip(&coarse).map(|(f, c)| Estimate { value: *f, error: (f - c).abs() }).collect()
}

pub(super) fn gauss_direction(order: usize) -> Estimate {
    let rule = |n: usize| {
        let (x, w) = gauss_legendre(n);
        x.iter().zip(&w).map(|(x, w)| 0.5 * w * x * x).sum::<f64>()
    };
    let (c, f) = (rule(order), rule(2 * order));
    Estimate { value: f, error: (f - c).abs() }
}
