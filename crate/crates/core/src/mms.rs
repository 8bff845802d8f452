//! Manufactured solution on the unit cube.
//!
//! The potential is `phi = S(x1) S(x2) S(x3)` with `S(t) = sin^3(pi t)`, the
//! solution is `u = curl(0, 0, phi)` and the load is `f = -curl Δ curl u`.
//! Every field is a finite sum of products `c * S^(a)(x1) S^(b)(x2) S^(c)(x3)`
//! and `S = (3 sin(pi t) - sin(3 pi t)) / 4`, so all derivatives are exact.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::interp::SmoothField;

/// Highest per-axis derivative order tabulated for evaluation.
const MAX_ORDER: usize = 8;
/// Largest derivative order served through [`ExactFields::eval_derivative`].
pub const MAX_QUERY_ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    pub amplitude: f64,
    /// Frequency as a multiple of pi.
    pub multiple: u32,
    pub kind: TrigKind,
}

/// `sum_m a_m sin(m pi t)` / `cos(m pi t)` with the derivative order tracked.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries1D {
    pub terms: Vec<TrigTerm>,
    pub order: usize,
}

impl TrigSeries1D {
    /// `sin^3(pi t) = (3 sin(pi t) - sin(3 pi t)) / 4`
    pub fn sin_cubed() -> Self {
        TrigSeries1D {
            terms: vec![
                TrigTerm { amplitude: 0.75, multiple: 1, kind: TrigKind::Sin },
                TrigTerm { amplitude: -0.25, multiple: 3, kind: TrigKind::Sin },
            ],
            order: 0,
        }
    }

    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let w = t.multiple as f64 * PI;
                match t.kind {
                    TrigKind::Sin => TrigTerm { amplitude: t.amplitude * w, kind: TrigKind::Cos, ..*t },
                    TrigKind::Cos => TrigTerm { amplitude: -t.amplitude * w, kind: TrigKind::Sin, ..*t },
                }
            })
            .collect();
        TrigSeries1D { terms, order: self.order + 1 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let arg = term.multiple as f64 * PI * t;
                term.amplitude
                    * match term.kind {
                        TrigKind::Sin => arg.sin(),
                        TrigKind::Cos => arg.cos(),
                    }
            })
            .sum()
    }

    fn eval_cached(&self, sin: &[f64; 4], cos: &[f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let m = t.multiple as usize;
                t.amplitude
                    * match t.kind {
                        TrigKind::Sin => sin[m],
                        TrigKind::Cos => cos[m],
                    }
            })
            .sum()
    }
}

/// Scalar `sum c * S^(a)(x1) S^(b)(x2) S^(c)(x3)` keyed by `[a, b, c]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeparableScalar(BTreeMap<[u8; 3], f64>);

impl SeparableScalar {
    pub fn term(orders: [u8; 3], coeff: f64) -> Self {
        let mut s = SeparableScalar::default();
        s.add(orders, coeff);
        s
    }

    fn add(&mut self, orders: [u8; 3], coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let e = self.0.entry(orders).or_insert(0.0);
        *e += coeff;
        if *e == 0.0 {
            self.0.remove(&orders);
        }
    }

    pub fn axpy(&mut self, s: f64, other: &SeparableScalar) {
        for (o, c) in &other.0 {
            self.add(*o, s * c);
        }
    }

    pub fn derivative(&self, axis: usize) -> Self {
        SeparableScalar(
            self.0
                .iter()
                .map(|(o, c)| {
                    let mut d = *o;
                    d[axis] += 1;
                    (d, *c)
                })
                .collect(),
        )
    }

    pub fn multi_derivative(&self, alpha: [usize; 3]) -> Self {
        SeparableScalar(
            self.0
                .iter()
                .map(|(o, c)| {
                    (
                        [o[0] + alpha[0] as u8, o[1] + alpha[1] as u8, o[2] + alpha[2] as u8],
                        *c,
                    )
                })
                .collect(),
        )
    }

    pub fn max_order(&self) -> usize {
        self.0.keys().flat_map(|o| o.iter()).map(|&d| d as usize).max().unwrap_or(0)
    }

    fn eval(&self, table: &AxisTable) -> f64 {
        self.0
            .iter()
            .map(|(o, c)| {
                c * table.values[0][o[0] as usize]
                    * table.values[1][o[1] as usize]
                    * table.values[2][o[2] as usize]
            })
            .sum()
    }
}

pub type SeparableVector = [SeparableScalar; 3];

fn vec_derivative(v: &SeparableVector, alpha: [usize; 3]) -> SeparableVector {
    std::array::from_fn(|c| v[c].multi_derivative(alpha))
}

fn vec_curl(v: &SeparableVector) -> SeparableVector {
    let diff = |a: usize, comp: usize| v[comp].derivative(a);
    let sub = |mut p: SeparableScalar, q: SeparableScalar| {
        p.axpy(-1.0, &q);
        p
    };
    [
        sub(diff(1, 2), diff(2, 1)),
        sub(diff(2, 0), diff(0, 2)),
        sub(diff(0, 1), diff(1, 0)),
    ]
}

fn vec_laplacian(v: &SeparableVector) -> SeparableVector {
    std::array::from_fn(|c| {
        let mut out = SeparableScalar::default();
        for a in 0..3 {
            out.axpy(1.0, &v[c].derivative(a).derivative(a));
        }
        out
    })
}

fn vec_divergence(v: &SeparableVector) -> SeparableScalar {
    let mut out = SeparableScalar::default();
    for a in 0..3 {
        out.axpy(1.0, &v[a].derivative(a));
    }
    out
}

/// `S^(d)(x_a)` for every axis and every tabulated order at one point.
struct AxisTable {
    values: [[f64; MAX_ORDER + 1]; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExactField {
    /// Scalar potential `phi`; use component 0.
    Potential,
    Velocity,
    CurlVelocity,
    Load,
}

/// Values of `u`, `curl u` and `grad curl u` at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactSample {
    pub u: [f64; 3],
    pub curl: [f64; 3],
    /// `grad_curl[i][j] = d(curl u)_i / dx_j`
    pub grad_curl: [[f64; 3]; 3],
}

#[derive(Clone, Debug)]
pub struct ExactFields {
    series: Vec<TrigSeries1D>,
    phi: SeparableScalar,
    u: SeparableVector,
    curl_u: SeparableVector,
    grad_curl_u: [SeparableVector; 3],
    laplacian_curl_u: SeparableVector,
    f: SeparableVector,
    derivatives: HashMap<(ExactField, [usize; 3]), SeparableVector>,
}

fn multi_indices(max_order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=max_order {
        for b in 0..=max_order - a {
            for c in 0..=max_order - a - b {
                out.push([a, b, c]);
            }
        }
    }
    out
}

impl Default for ExactFields {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactFields {
    pub fn new() -> Self {
        let mut series = vec![TrigSeries1D::sin_cubed()];
        for d in 1..=MAX_ORDER {
            series.push(series[d - 1].derivative());
        }
        let phi = SeparableScalar::term([0, 0, 0], 1.0);
        let u = [
            phi.derivative(1),
            {
                let mut s = phi.derivative(0);
                s = SeparableScalar(s.0.into_iter().map(|(o, c)| (o, -c)).collect());
                s
            },
            SeparableScalar::default(),
        ];
        let curl_u = vec_curl(&u);
        let grad_curl_u = std::array::from_fn(|j| {
            let mut alpha = [0; 3];
            alpha[j] = 1;
            vec_derivative(&curl_u, alpha)
        });
        let laplacian_curl_u = vec_laplacian(&curl_u);
        let mut f = vec_curl(&laplacian_curl_u);
        for c in f.iter_mut() {
            *c = SeparableScalar(c.0.iter().map(|(o, v)| (*o, -v)).collect());
        }
        let mut derivatives = HashMap::new();
        let phi_vec: SeparableVector = [phi.clone(), SeparableScalar::default(), SeparableScalar::default()];
        for alpha in multi_indices(MAX_QUERY_ORDER) {
            derivatives.insert((ExactField::Potential, alpha), vec_derivative(&phi_vec, alpha));
            derivatives.insert((ExactField::Velocity, alpha), vec_derivative(&u, alpha));
            derivatives.insert((ExactField::CurlVelocity, alpha), vec_derivative(&curl_u, alpha));
            derivatives.insert((ExactField::Load, alpha), vec_derivative(&f, alpha));
        }
        debug_assert!(derivatives
            .values()
            .flat_map(|v| v.iter())
            .all(|s| s.max_order() <= MAX_ORDER));
        ExactFields {
            series,
            phi,
            u,
            curl_u,
            grad_curl_u,
            laplacian_curl_u,
            f,
            derivatives,
        }
    }

    fn table(&self, x: [f64; 3]) -> AxisTable {
        let mut values = [[0.0; MAX_ORDER + 1]; 3];
        for a in 0..3 {
            let mut sin = [0.0; 4];
            let mut cos = [0.0; 4];
            for m in [1usize, 3] {
                let (s, c) = (m as f64 * PI * x[a]).sin_cos();
                sin[m] = s;
                cos[m] = c;
            }
            for (d, s) in self.series.iter().enumerate() {
                values[a][d] = s.eval_cached(&sin, &cos);
            }
        }
        AxisTable { values }
    }

    fn eval_vec(v: &SeparableVector, t: &AxisTable) -> [f64; 3] {
        [v[0].eval(t), v[1].eval(t), v[2].eval(t)]
    }

    pub fn potential(&self, x: [f64; 3]) -> f64 {
        self.phi.eval(&self.table(x))
    }

    pub fn u(&self, x: [f64; 3]) -> [f64; 3] {
        Self::eval_vec(&self.u, &self.table(x))
    }

    pub fn curl_u(&self, x: [f64; 3]) -> [f64; 3] {
        Self::eval_vec(&self.curl_u, &self.table(x))
    }

    pub fn grad_curl_u(&self, x: [f64; 3]) -> [[f64; 3]; 3] {
        let t = self.table(x);
        let by_axis: [[f64; 3]; 3] = std::array::from_fn(|j| Self::eval_vec(&self.grad_curl_u[j], &t));
        std::array::from_fn(|i| std::array::from_fn(|j| by_axis[j][i]))
    }

    pub fn laplacian_curl_u(&self, x: [f64; 3]) -> [f64; 3] {
        Self::eval_vec(&self.laplacian_curl_u, &self.table(x))
    }

    pub fn f(&self, x: [f64; 3]) -> [f64; 3] {
        Self::eval_vec(&self.f, &self.table(x))
    }

    pub fn div_u(&self, x: [f64; 3]) -> f64 {
        vec_divergence(&self.u).eval(&self.table(x))
    }

    pub fn div_f(&self, x: [f64; 3]) -> f64 {
        vec_divergence(&self.f).eval(&self.table(x))
    }

    /// `u`, `curl u` and `grad curl u` sharing one trigonometric table.
    pub fn sample(&self, x: [f64; 3]) -> ExactSample {
        let t = self.table(x);
        let by_axis: [[f64; 3]; 3] = std::array::from_fn(|j| Self::eval_vec(&self.grad_curl_u[j], &t));
        ExactSample {
            u: Self::eval_vec(&self.u, &t),
            curl: Self::eval_vec(&self.curl_u, &t),
            grad_curl: std::array::from_fn(|i| std::array::from_fn(|j| by_axis[j][i])),
        }
    }

    /// `d^alpha` of one component of an exact field, `|alpha| <= 3`.
    pub fn eval_derivative(
        &self,
        field: ExactField,
        component: usize,
        alpha: [usize; 3],
        x: [f64; 3],
    ) -> Result<f64> {
        let order: usize = alpha.iter().sum();
        if order > MAX_QUERY_ORDER {
            return Err(Error::UnsupportedOrder { order });
        }
        let v = &self.derivatives[&(field, alpha)];
        Ok(v[component].eval(&self.table(x)))
    }

    fn derivative_vec(&self, field: ExactField, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3] {
        let order: usize = alpha.iter().sum();
        assert!(order <= MAX_QUERY_ORDER, "derivative order {order} above {MAX_QUERY_ORDER}");
        Self::eval_vec(&self.derivatives[&(field, alpha)], &self.table(x))
    }
}

impl SmoothField for ExactFields {
    fn derivative(&self, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3] {
        self.derivative_vec(ExactField::Velocity, alpha, x)
    }

    fn curl_derivative(&self, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3] {
        self.derivative_vec(ExactField::CurlVelocity, alpha, x)
    }
}
