use std::f64::consts::PI;

use super::poly::AxisBox;
use crate::error::{Error, Result};

/// Gauss–Legendre rule with `order` points, mapped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroQuadratureOrder);
        }
        let (nodes, weights) = legendre_nodes(order);
        Ok(GaussRule {
            points: nodes.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            weights: weights.iter().map(|w| 0.5 * w).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Tensor-product nodes and weights on `bx`. Degenerate axes contribute a
    /// single node with unit weight, so faces get 2D rules and edges 1D rules.
    pub fn tensor(&self, bx: &AxisBox) -> Vec<([f64; 3], f64)> {
        let axis_rule = |a: usize| -> Vec<(f64, f64)> {
            if bx.is_degenerate(a) {
                vec![(bx.lo[a], 1.0)]
            } else {
                let len = bx.hi[a] - bx.lo[a];
                self.points
                    .iter()
                    .zip(&self.weights)
                    .map(|(p, w)| (bx.lo[a] + len * p, len * w))
                    .collect()
            }
        };
        let (r0, r1, r2) = (axis_rule(0), axis_rule(1), axis_rule(2));
        let mut out = Vec::with_capacity(r0.len() * r1.len() * r2.len());
        for &(x, wx) in &r0 {
            for &(y, wy) in &r1 {
                for &(z, wz) in &r2 {
                    out.push(([x, y, z], wx * wy * wz));
                }
            }
        }
        out
    }

    pub fn integrate<F: Fn([f64; 3]) -> f64>(&self, bx: &AxisBox, f: F) -> f64 {
        self.tensor(bx).into_iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Nodes and weights on `[-1, 1]` via Newton iteration on `P_n`.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_order() {
        assert_eq!(GaussRule::new(0), Err(Error::ZeroQuadratureOrder));
    }

    #[test]
    fn two_point_rule_is_exact_for_cubics() {
        let g = GaussRule::new(2).unwrap();
        let v = g.integrate(&AxisBox::new([0.0; 3], [1.0, 0.0, 0.0]), |x| x[0].powi(3));
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn weights_positive_and_sum_to_measure() {
        for q in 1..=12 {
            let g = GaussRule::new(q).unwrap();
            assert!(g.weights().iter().all(|&w| w > 0.0));
            assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let bx = AxisBox::new([0.0, 0.1, 0.2], [0.5, 0.3, 0.2]);
            let total: f64 = g.tensor(&bx).iter().map(|(_, w)| w).sum();
            assert!((total - bx.measure()).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_up_to_degree_2q_minus_1() {
        for q in 1..=10 {
            let g = GaussRule::new(q).unwrap();
            for d in 0..2 * q {
                let v: f64 = g
                    .points()
                    .iter()
                    .zip(g.weights())
                    .map(|(p, w)| w * p.powi(d as i32))
                    .sum();
                assert!(
                    (v - 1.0 / (d as f64 + 1.0)).abs() < 1e-14,
                    "q={q} d={d} got {v}"
                );
            }
        }
    }

    #[test]
    fn constant_on_face() {
        let h = 0.125;
        let g = GaussRule::new(6).unwrap();
        let face = AxisBox::new([0.25, 0.5, 0.0], [0.25 + 0.0, 0.5 + h, h]);
        assert!((g.integrate(&face, |_| 1.0) - h * h).abs() < 1e-16);
    }

    #[test]
    fn trigonometric_product_on_unit_cube() {
        // the 6-point truncation error for sin(pi t) is ~1.7e-10 per axis
        let g = GaussRule::new(10).unwrap();
        let v = g.integrate(&AxisBox::cube(0.0, 1.0), |x| {
            (PI * x[0]).sin() * (PI * x[1]).sin() * (PI * x[2]).sin()
        });
        // 1D antiderivative: int_0^1 sin(pi t) dt = 2/pi
        let expected = (2.0 / PI).powi(3);
        assert!((v - expected).abs() <= 1e-14, "{v} vs {expected}");
    }
}
