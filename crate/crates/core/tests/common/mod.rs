#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Field<'a> = Box<dyn Fn([f64; 3]) -> [f64; 3] + 'a>;

/// Eighth-order central difference weights for a first derivative, offsets 1..=4.
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

pub fn partial(f: &dyn Fn([f64; 3]) -> [f64; 3], x: [f64; 3], axis: usize, comp: usize, h: f64) -> f64 {
    let mut sum = 0.0;
    for (k, w) in D1.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        let mut xp = x;
        let mut xm = x;
        xp[axis] += s;
        xm[axis] -= s;
        sum += w * (f(xp)[comp] - f(xm)[comp]);
    }
    sum / h
}

/// Finite-difference curl of `f`. Nesting this is expensive but independent
/// of any analytic derivative.
pub fn fd_curl<'a>(f: Field<'a>, h: f64) -> Field<'a> {
    Box::new(move |x| {
        [
            partial(&*f, x, 1, 2, h) - partial(&*f, x, 2, 1, h),
            partial(&*f, x, 2, 0, h) - partial(&*f, x, 0, 2, h),
            partial(&*f, x, 0, 1, h) - partial(&*f, x, 1, 0, h),
        ]
    })
}

/// Finite-difference divergence of `f`.
pub fn fd_div(f: &dyn Fn([f64; 3]) -> [f64; 3], x: [f64; 3], h: f64) -> f64 {
    (0..3).map(|a| partial(f, x, a, a, h)).sum()
}

/// Uniform points in the box `[margin, 1 - margin]^3`.
pub fn random_points(count: usize, margin: f64, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| std::array::from_fn(|_| rng.gen_range(margin..1.0 - margin)))
        .collect()
}

pub fn rel_close(value: f64, reference: f64, tol: f64) -> bool {
    ((value - reference) / reference).abs() <= tol
}
