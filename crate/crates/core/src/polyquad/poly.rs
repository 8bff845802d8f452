use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponents `(a, b, c)` of `x1^a x2^b x3^c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub [u8; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn new(a: u8, b: u8, c: u8) -> Self {
        Monomial([a, b, c])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponent(&self, axis: usize) -> u8 {
        self.0[axis]
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    /// Number of axes with a nonzero exponent.
    pub fn active_axes(&self) -> usize {
        self.0.iter().filter(|&&e| e > 0).count()
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        x[0].powi(self.0[0] as i32) * x[1].powi(self.0[1] as i32) * x[2].powi(self.0[2] as i32)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (axis, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", axis + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Axis-aligned box `[lo, hi]`. Axes with `lo == hi` are degenerate, so the
/// same type describes cells, faces, edges and points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl AxisBox {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        AxisBox { lo, hi }
    }

    pub fn cube(lo: f64, hi: f64) -> Self {
        AxisBox::new([lo; 3], [hi; 3])
    }

    /// The centered unit cube `[-1/2, 1/2]^3`.
    pub fn reference() -> Self {
        AxisBox::cube(-0.5, 0.5)
    }

    pub fn point(p: [f64; 3]) -> Self {
        AxisBox::new(p, p)
    }

    pub fn is_degenerate(&self, axis: usize) -> bool {
        self.lo[axis] == self.hi[axis]
    }

    pub fn dimension(&self) -> usize {
        (0..3).filter(|&a| !self.is_degenerate(a)).count()
    }

    /// Length, area or volume over the non-degenerate axes (1 for a point).
    pub fn measure(&self) -> f64 {
        (0..3)
            .filter(|&a| !self.is_degenerate(a))
            .map(|a| self.hi[a] - self.lo[a])
            .product()
    }

    pub fn center(&self) -> [f64; 3] {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
            0.5 * (self.lo[2] + self.hi[2]),
        ]
    }
}

/// Integral of `t^e` over `[lo, hi]`, or its value when the interval is a point.
fn power_integral(e: u8, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo.powi(e as i32);
    }
    let k = e as i32 + 1;
    (hi.powi(k) - lo.powi(k)) / k as f64
}

/// Scalar polynomial in three variables stored as a sparse coefficient map.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Monomial, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, coeff: f64) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, coeff);
        p
    }

    /// The coordinate `x_{axis+1}`.
    pub fn var(axis: usize) -> Self {
        let mut e = [0u8; 3];
        e[axis] = 1;
        Poly::monomial(Monomial(e), 1.0)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, f64)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn max_degree(&self, axis: usize) -> u8 {
        self.terms.keys().map(|m| m.0[axis]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(*m, s * c);
        }
    }

    pub fn derivative(&self, axis: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.0[axis];
            if e == 0 {
                continue;
            }
            let mut d = *m;
            d.0[axis] = e - 1;
            out.add_term(d, c * e as f64);
        }
        out
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    /// Evaluation from precomputed powers, `powers[axis][k] = x_axis^k`.
    pub fn eval_powers(&self, powers: &[Vec<f64>; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let [a, b, d] = m.0;
                c * powers[0][a as usize] * powers[1][b as usize] * powers[2][d as usize]
            })
            .sum()
    }

    /// Exact integral over `bx` in the polynomial's own variables. Degenerate
    /// axes are evaluated instead of integrated.
    pub fn integrate(&self, bx: &AxisBox) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c * monomial_integral(*m, bx))
            .sum()
    }

    /// Exact integral of `self * other` over `bx` without forming the product.
    pub fn integrate_product(&self, other: &Poly, bx: &AxisBox) -> f64 {
        let mut sum = 0.0;
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                sum += ca * cb * monomial_integral(ma.times(mb), bx);
            }
        }
        sum
    }

    /// Drops coefficients with magnitude below `tol`.
    pub fn pruned(&self, tol: f64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }
}

pub fn monomial_integral(m: Monomial, bx: &AxisBox) -> f64 {
    (0..3)
        .map(|a| power_integral(m.0[a], bx.lo[a], bx.hi[a]))
        .product()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(a: u8, b: u8, c: u8) -> Poly {
        Poly::monomial(Monomial::new(a, b, c), 1.0)
    }

    #[test]
    fn power_rule() {
        // d/dx1 (x1^2 x2) = 2 x1 x2
        let d = x(2, 1, 0).derivative(0);
        assert_eq!(d, Poly::monomial(Monomial::new(1, 1, 0), 2.0));
        assert!(x(0, 3, 1).derivative(0).is_zero());
    }

    #[test]
    fn box_integrals() {
        assert_eq!(Poly::constant(1.0).integrate(&AxisBox::cube(0.0, 1.0)), 1.0);
        let v = x(1, 1, 1).integrate(&AxisBox::cube(0.0, 1.0));
        assert!((v - 0.125).abs() < 1e-15);
        let h: f64 = 0.3;
        let v = x(2, 0, 0).integrate(&AxisBox::cube(0.0, h));
        assert!((v - h.powi(5) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_axes_evaluate() {
        // x1^2 x2 restricted to the edge x2 = 0.5, x3 = 0, x1 in [0, 1]
        let e = AxisBox::new([0.0, 0.5, 0.0], [1.0, 0.5, 0.0]);
        assert!((x(2, 1, 0).integrate(&e) - 0.5 / 3.0).abs() < 1e-15);
        assert_eq!(e.dimension(), 1);
        assert_eq!(AxisBox::point([0.1, 0.2, 0.3]).measure(), 1.0);
    }

    #[test]
    fn product_integral_matches_expanded_product() {
        let p = &x(1, 0, 2) + &x(0, 2, 0).scale(3.0);
        let q = &x(2, 1, 0) - &Poly::constant(0.5);
        let bx = AxisBox::new([-0.5, 0.0, -0.25], [0.5, 0.75, 0.5]);
        let direct = (&p * &q).integrate(&bx);
        assert!((direct - p.integrate_product(&q, &bx)).abs() < 1e-15);
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = &x(1, 1, 0) - &x(1, 1, 0);
        assert!(p.is_zero());
        assert_eq!(format!("{}", x(2, 0, 1)), "1*x1^2*x3");
    }
}
