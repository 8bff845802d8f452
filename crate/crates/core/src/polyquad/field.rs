use super::poly::{AxisBox, Poly};

/// Affine frame `x = center + size * xhat` (componentwise). Polynomials are
/// stored in the scaled variable `xhat`, so a cell frame maps the cell onto
/// `[-1/2, 1/2]^3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub center: [f64; 3],
    pub size: [f64; 3],
}

impl Frame {
    pub fn new(center: [f64; 3], size: [f64; 3]) -> Self {
        Frame { center, size }
    }

    /// Identity frame: scaled and physical variables coincide.
    pub fn reference() -> Self {
        Frame::new([0.0; 3], [1.0; 3])
    }

    pub fn to_local(&self, x: [f64; 3]) -> [f64; 3] {
        [
            (x[0] - self.center[0]) / self.size[0],
            (x[1] - self.center[1]) / self.size[1],
            (x[2] - self.center[2]) / self.size[2],
        ]
    }

    pub fn to_global(&self, xhat: [f64; 3]) -> [f64; 3] {
        [
            self.center[0] + self.size[0] * xhat[0],
            self.center[1] + self.size[1] * xhat[1],
            self.center[2] + self.size[2] * xhat[2],
        ]
    }

    pub fn local_box(&self, bx: &AxisBox) -> AxisBox {
        AxisBox::new(self.to_local(bx.lo), self.to_local(bx.hi))
    }

    pub fn jacobian(&self) -> f64 {
        self.size.iter().product()
    }
}

/// A three-component polynomial vector field living in a [`Frame`].
///
/// Calculus is done in physical variables: `differentiate(axis)` includes the
/// `1 / size[axis]` chain-rule factor.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    pub comps: [Poly; 3],
    pub frame: Frame,
}

impl PolyField {
    pub fn new(comps: [Poly; 3], frame: Frame) -> Self {
        PolyField { comps, frame }
    }

    pub fn zero(frame: Frame) -> Self {
        PolyField::new([Poly::zero(), Poly::zero(), Poly::zero()], frame)
    }

    /// Reference-frame field from components.
    pub fn reference(comps: [Poly; 3]) -> Self {
        PolyField::new(comps, Frame::reference())
    }

    /// Field with a single nonzero component.
    pub fn axis(comp: usize, p: Poly, frame: Frame) -> Self {
        let mut f = PolyField::zero(frame);
        f.comps[comp] = p;
        f
    }

    pub fn gradient(q: &Poly, frame: Frame) -> Self {
        PolyField::new(
            [
                q.derivative(0).scale(1.0 / frame.size[0]),
                q.derivative(1).scale(1.0 / frame.size[1]),
                q.derivative(2).scale(1.0 / frame.size[2]),
            ],
            frame,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, p| m.max(p.max_abs_coeff()))
    }

    pub fn scale(&self, s: f64) -> PolyField {
        PolyField::new(
            [self.comps[0].scale(s), self.comps[1].scale(s), self.comps[2].scale(s)],
            self.frame,
        )
    }

    /// `self += s * other`; both fields must share a frame.
    pub fn axpy(&mut self, s: f64, other: &PolyField) {
        debug_assert_eq!(self.frame, other.frame);
        for c in 0..3 {
            self.comps[c].axpy(s, &other.comps[c]);
        }
    }

    pub fn sub(&self, other: &PolyField) -> PolyField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Linear combination `sum_j w_j f_j` of fields sharing `frame`.
    pub fn combination<'a, I>(frame: Frame, terms: I) -> PolyField
    where
        I: IntoIterator<Item = (f64, &'a PolyField)>,
    {
        let mut out = PolyField::zero(frame);
        for (w, f) in terms {
            if w != 0.0 {
                out.axpy(w, f);
            }
        }
        out
    }

    pub fn differentiate(&self, axis: usize) -> PolyField {
        let s = 1.0 / self.frame.size[axis];
        PolyField::new(
            [
                self.comps[0].derivative(axis).scale(s),
                self.comps[1].derivative(axis).scale(s),
                self.comps[2].derivative(axis).scale(s),
            ],
            self.frame,
        )
    }

    /// Partial derivative of component `comp` along `axis`.
    pub fn partial(&self, comp: usize, axis: usize) -> Poly {
        self.comps[comp]
            .derivative(axis)
            .scale(1.0 / self.frame.size[axis])
    }

    pub fn curl(&self) -> PolyField {
        PolyField::new(
            [
                &self.partial(2, 1) - &self.partial(1, 2),
                &self.partial(0, 2) - &self.partial(2, 0),
                &self.partial(1, 0) - &self.partial(0, 1),
            ],
            self.frame,
        )
    }

    pub fn divergence(&self) -> Poly {
        let mut d = self.partial(0, 0);
        d.axpy(1.0, &self.partial(1, 1));
        d.axpy(1.0, &self.partial(2, 2));
        d
    }

    /// `grad[i][j] = d(comp_i) / dx_j`.
    pub fn grad(&self) -> [[Poly; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.partial(i, j)))
    }

    /// Value at a physical point.
    pub fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        self.eval_local(self.frame.to_local(x))
    }

    pub fn eval_local(&self, xhat: [f64; 3]) -> [f64; 3] {
        [
            self.comps[0].eval(xhat),
            self.comps[1].eval(xhat),
            self.comps[2].eval(xhat),
        ]
    }

    /// Exact `(self, other)_{L2}` over a box given in the frame's scaled
    /// variables; the Jacobian of the frame is included.
    pub fn inner_product(&self, other: &PolyField, local_box: &AxisBox) -> f64 {
        debug_assert_eq!(self.frame, other.frame);
        let j = self.frame.jacobian();
        (0..3)
            .map(|c| self.comps[c].integrate_product(&other.comps[c], local_box))
            .sum::<f64>()
            * j
    }

    /// Exact `(grad self, grad other)` over a box in scaled variables.
    pub fn grad_inner_product(&self, other: &PolyField, local_box: &AxisBox) -> f64 {
        (0..3)
            .map(|axis| self.differentiate(axis).inner_product(&other.differentiate(axis), local_box))
            .sum()
    }

    /// Exact integral of component `comp` over a box in scaled variables,
    /// without Jacobian.
    pub fn integrate_component_local(&self, comp: usize, local_box: &AxisBox) -> f64 {
        self.comps[comp].integrate(local_box)
    }
}

/// Cross product `(x - x_c) × w` with `x - x_c` the scaled coordinate vector
/// of the field's frame.
pub fn position_cross(w: &PolyField) -> PolyField {
    let x = [Poly::var(0), Poly::var(1), Poly::var(2)];
    let cross = |a: usize, b: usize| -> Poly { &(&x[a] * &w.comps[b]) - &(&x[b] * &w.comps[a]) };
    PolyField::new([cross(1, 2), cross(2, 0), cross(0, 1)], w.frame)
}

#[cfg(test)]
mod tests {
    use super::super::poly::Monomial;
    use super::*;

    fn mono(a: u8, b: u8, c: u8) -> Poly {
        Poly::monomial(Monomial::new(a, b, c), 1.0)
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let g = PolyField::gradient(&mono(1, 1, 1), Frame::reference());
        assert_eq!(g.comps[0], mono(0, 1, 1));
        assert!(g.curl().is_zero());
    }

    #[test]
    fn curl_of_z_component() {
        // curl (0, 0, x1 x2) = (x1, -x2, 0)
        let f = PolyField::axis(2, mono(1, 1, 0), Frame::reference());
        let c = f.curl();
        assert_eq!(c.comps[0], mono(1, 0, 0));
        assert_eq!(c.comps[1], mono(0, 1, 0).scale(-1.0));
        assert!(c.comps[2].is_zero());
    }

    #[test]
    fn div_curl_vanishes() {
        let f = PolyField::reference([
            &mono(2, 1, 3) + &mono(0, 1, 1),
            mono(3, 0, 2).scale(-2.0),
            &mono(1, 2, 2) - &mono(1, 0, 0),
        ]);
        assert!(f.curl().divergence().is_zero());
    }

    #[test]
    fn scaled_frame_chain_rule() {
        let frame = Frame::new([0.5, 0.5, 0.5], [0.25, 0.25, 0.25]);
        // scaled x1 => physical (x1 - 0.5) / 0.25, derivative 4
        let f = PolyField::axis(1, Poly::var(0), frame);
        let c = f.curl();
        assert_eq!(c.comps[2], Poly::constant(4.0));
        let v = f.eval([0.75, 0.0, 0.0]);
        assert!((v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn position_cross_matches_hand_expansion() {
        // (x) × (1, 0, 0) = (0, x3, -x2)
        let w = PolyField::axis(0, Poly::constant(1.0), Frame::reference());
        let c = position_cross(&w);
        assert!(c.comps[0].is_zero());
        assert_eq!(c.comps[1], mono(0, 0, 1));
        assert_eq!(c.comps[2], mono(0, 1, 0).scale(-1.0));
    }
}
