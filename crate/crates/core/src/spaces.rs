//! Shape-function spaces, their DoF functionals and dual bases.
//!
//! Every space lives on a centered unit box in scaled variables (a single
//! cell for the local spaces, a 3x3x3 block for the macro spaces). A dual
//! basis is obtained by inverting the Vandermonde matrix `V[i][k] =
//! DoF_i(span_k)`. Because the mesh is uniform the reference construction is
//! shared by every cell; the physical DoF of a scaled function is
//! `h^p * DoF_ref`, with `p` given by [`DofKind::scale_power`].
//!
//! Scalar spaces (`Q1K`) store the function in component 0.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::{local_edges, local_faces, local_vertices, macro_edge_layout, macro_face_layout, other_axes};
use crate::polyquad::{position_cross, AxisBox, Monomial, Poly, PolyField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    /// Face-based Brinkman brick element.
    WK,
    /// Nonconforming grad-curl brick element.
    VK,
    /// Lowest-order Nédélec brick element.
    NedelecK,
    /// Trilinear Lagrange element.
    Q1K,
    /// Macro edge element on a 3x3x3 block.
    VM,
    /// Macro face element on a 3x3x3 block.
    WM,
}

impl SpaceKind {
    pub fn expected_dim(self) -> usize {
        match self {
            SpaceKind::WK => 18,
            SpaceKind::VK => 24,
            SpaceKind::NedelecK => 12,
            SpaceKind::Q1K => 8,
            SpaceKind::VM => 144,
            SpaceKind::WM => 108,
        }
    }

    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::WK,
        SpaceKind::VK,
        SpaceKind::NedelecK,
        SpaceKind::Q1K,
        SpaceKind::VM,
        SpaceKind::WM,
    ];
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceKind::WK => "W_K",
            SpaceKind::VK => "V_K",
            SpaceKind::NedelecK => "Nedelec_K",
            SpaceKind::Q1K => "Q1_K",
            SpaceKind::VM => "V_M",
            SpaceKind::WM => "W_M",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofKind {
    /// `int_E v . t ds`
    EdgeTangential,
    /// `int_F curl v . t dF`
    FaceTangentialCurl,
    /// `int_F v . n dF`
    FaceNormal,
    /// `int_F v . t dF`
    FaceTangential,
    /// `v(x)` for a scalar function.
    VertexValue,
}

impl DofKind {
    /// Power of the cell size relating physical and reference DoF values.
    pub fn scale_power(self) -> i32 {
        match self {
            DofKind::EdgeTangential | DofKind::FaceTangentialCurl => 1,
            DofKind::FaceNormal | DofKind::FaceTangential => 2,
            DofKind::VertexValue => 0,
        }
    }
}

/// One DoF functional, expressed in the scaled variables of its element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DofFunctional {
    pub kind: DofKind,
    /// Local entity index (edge, face or vertex of the element).
    pub entity: usize,
    /// Axis of the direction vector `t` or `n`; unused for vertex values.
    pub axis: usize,
    pub domain: AxisBox,
}

/// Component `axis` of the curl taken in the polynomial's own variables.
pub fn scaled_curl_component(v: &PolyField, axis: usize) -> Poly {
    let (b, c) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    &v.comps[c].derivative(b) - &v.comps[b].derivative(c)
}

impl DofFunctional {
    /// Exact evaluation on a polynomial field, in the field's scaled variables.
    pub fn apply(&self, v: &PolyField) -> f64 {
        match self.kind {
            DofKind::EdgeTangential | DofKind::FaceNormal | DofKind::FaceTangential => {
                v.comps[self.axis].integrate(&self.domain)
            }
            DofKind::FaceTangentialCurl => scaled_curl_component(v, self.axis).integrate(&self.domain),
            DofKind::VertexValue => v.comps[0].eval(self.domain.lo),
        }
    }
}

fn cell_edge_box(axis: usize, off: [usize; 3]) -> AxisBox {
    let lo: [f64; 3] = std::array::from_fn(|a| off[a] as f64 - 0.5);
    let mut hi = lo;
    hi[axis] = 0.5;
    AxisBox::new(lo, hi)
}

fn cell_face_box(axis: usize, side: usize) -> AxisBox {
    let mut lo = [-0.5; 3];
    let mut hi = [0.5; 3];
    lo[axis] = side as f64 - 0.5;
    hi[axis] = lo[axis];
    AxisBox::new(lo, hi)
}

/// The twelve edge functionals shared by `V_K` and the Nédélec element.
pub fn cell_edge_dofs() -> Vec<DofFunctional> {
    local_edges()
        .iter()
        .enumerate()
        .map(|(e, &(axis, off))| DofFunctional {
            kind: DofKind::EdgeTangential,
            entity: e,
            axis,
            domain: cell_edge_box(axis, off),
        })
        .collect()
}

/// Face-curl functionals of `V_K`: local DoF `2 f + j` for face `f` and tangent `j`.
pub fn cell_face_curl_dofs() -> Vec<DofFunctional> {
    let mut out = Vec::with_capacity(12);
    for (f, &(axis, side)) in local_faces().iter().enumerate() {
        let (b, c) = other_axes(axis);
        for t in [b, c] {
            out.push(DofFunctional {
                kind: DofKind::FaceTangentialCurl,
                entity: f,
                axis: t,
                domain: cell_face_box(axis, side),
            });
        }
    }
    out
}

/// `W_K` functionals: local DoF `3 f + j`, tangents first, then the normal.
pub fn cell_face_dofs() -> Vec<DofFunctional> {
    let mut out = Vec::with_capacity(18);
    for (f, &(axis, side)) in local_faces().iter().enumerate() {
        let (b, c) = other_axes(axis);
        let domain = cell_face_box(axis, side);
        for t in [b, c] {
            out.push(DofFunctional {
                kind: DofKind::FaceTangential,
                entity: f,
                axis: t,
                domain,
            });
        }
        out.push(DofFunctional {
            kind: DofKind::FaceNormal,
            entity: f,
            axis,
            domain,
        });
    }
    out
}

fn macro_edge_dofs() -> Vec<DofFunctional> {
    macro_edge_layout()
        .into_iter()
        .enumerate()
        .map(|(e, (axis, l))| {
            let lo: [f64; 3] = std::array::from_fn(|a| l[a] as f64 / 3.0 - 0.5);
            let mut hi = lo;
            hi[axis] += 1.0 / 3.0;
            DofFunctional {
                kind: DofKind::EdgeTangential,
                entity: e,
                axis,
                domain: AxisBox::new(lo, hi),
            }
        })
        .collect()
}

fn macro_face_dofs() -> Vec<DofFunctional> {
    macro_face_layout()
        .into_iter()
        .enumerate()
        .map(|(f, (axis, l))| {
            let lo: [f64; 3] = std::array::from_fn(|a| l[a] as f64 / 3.0 - 0.5);
            let mut hi = lo;
            let (b, c) = other_axes(axis);
            hi[b] += 1.0 / 3.0;
            hi[c] += 1.0 / 3.0;
            DofFunctional {
                kind: DofKind::FaceNormal,
                entity: f,
                axis,
                domain: AxisBox::new(lo, hi),
            }
        })
        .collect()
}

fn mono(a: u8, b: u8, c: u8) -> Poly {
    Poly::monomial(Monomial::new(a, b, c), 1.0)
}

fn axis_field(comp: usize, p: Poly) -> PolyField {
    PolyField::reference(std::array::from_fn(|c| if c == comp { p.clone() } else { Poly::zero() }))
}

/// Unit fields `e_comp * x^m` for all `m` with per-axis degree bounds.
fn tensor_monomial_fields(bounds: [[u8; 3]; 3]) -> Vec<PolyField> {
    let mut out = Vec::new();
    for (comp, b) in bounds.iter().enumerate() {
        for i in 0..=b[0] {
            for j in 0..=b[1] {
                for k in 0..=b[2] {
                    out.push(axis_field(comp, mono(i, j, k)));
                }
            }
        }
    }
    out
}

/// Spanning set of `W_K`: `[P1]^3` plus the six univariate quadratics.
pub fn span_wk() -> Vec<PolyField> {
    let mut out = Vec::with_capacity(18);
    let lin = [mono(0, 0, 0), mono(1, 0, 0), mono(0, 1, 0), mono(0, 0, 1)];
    for comp in 0..3 {
        for p in &lin {
            out.push(axis_field(comp, p.clone()));
        }
    }
    let squares = [mono(2, 0, 0), mono(0, 2, 0), mono(0, 0, 2)];
    for comp in 0..3 {
        let (b, c) = other_axes(comp);
        out.push(axis_field(comp, squares[b].clone()));
        out.push(axis_field(comp, squares[c].clone()));
    }
    out
}

/// Gradients of the non-constant `Q1` monomials.
fn q1_gradients() -> Vec<PolyField> {
    [
        mono(1, 0, 0),
        mono(0, 1, 0),
        mono(0, 0, 1),
        mono(1, 1, 0),
        mono(1, 0, 1),
        mono(0, 1, 1),
        mono(1, 1, 1),
    ]
    .iter()
    .map(|q| PolyField::gradient(q, crate::polyquad::Frame::reference()))
    .collect()
}

/// Coefficient vectors of fields over the union of their (component, monomial) keys.
fn coefficient_matrix(fields: &[&PolyField]) -> DMatrix<f64> {
    let mut keys: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for f in fields {
        for c in 0..3 {
            for (m, _) in f.comps[c].terms() {
                let next = keys.len();
                keys.entry((c, *m)).or_insert(next);
            }
        }
    }
    let mut mat = DMatrix::zeros(keys.len(), fields.len());
    for (j, f) in fields.iter().enumerate() {
        for c in 0..3 {
            for (m, v) in f.comps[c].terms() {
                mat[(keys[&(c, *m)], j)] = *v;
            }
        }
    }
    mat
}

/// Keeps the candidates that are linearly independent of the ones already
/// kept (modified Gram–Schmidt with a relative threshold).
pub fn independent_subset(candidates: &[PolyField], rel_tol: f64) -> Vec<PolyField> {
    let refs: Vec<&PolyField> = candidates.iter().collect();
    let mat = coefficient_matrix(&refs);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (j, cand) in candidates.iter().enumerate() {
        let mut v = mat.column(j).clone_owned();
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let d = q.dot(&v);
                v.axpy(-d, q, 1.0);
            }
        }
        let r = v.norm();
        if r > rel_tol * norm0 {
            basis.push(v / r);
            kept.push(cand.clone());
        }
    }
    kept
}

/// Spanning set of `V_K = grad Q1 ⊕ (x - x_K) × W_K`, reduced to 24 independent fields.
pub fn span_vk() -> Result<Vec<PolyField>> {
    let mut candidates = q1_gradients();
    candidates.extend(span_wk().iter().map(position_cross));
    let kept = independent_subset(&candidates, 1e-10);
    if kept.len() != 24 {
        return Err(Error::DegenerateSpan {
            space: SpaceKind::VK,
            rank: kept.len(),
            expected: 24,
        });
    }
    Ok(kept)
}

pub fn span_nedelec() -> Vec<PolyField> {
    tensor_monomial_fields([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
}

pub fn span_q1() -> Vec<PolyField> {
    let mut out = Vec::with_capacity(8);
    for i in 0..=1 {
        for j in 0..=1 {
            for k in 0..=1 {
                out.push(axis_field(0, mono(i, j, k)));
            }
        }
    }
    out
}

pub fn span_vm() -> Vec<PolyField> {
    tensor_monomial_fields([[2, 3, 3], [3, 2, 3], [3, 3, 2]])
}

pub fn span_wm() -> Vec<PolyField> {
    tensor_monomial_fields([[3, 2, 2], [2, 3, 2], [2, 2, 3]])
}

fn q1_dofs() -> Vec<DofFunctional> {
    local_vertices()
        .iter()
        .enumerate()
        .map(|(v, off)| DofFunctional {
            kind: DofKind::VertexValue,
            entity: v,
            axis: 0,
            domain: AxisBox::point(std::array::from_fn(|a| off[a] as f64 - 0.5)),
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ElementSpace {
    pub kind: SpaceKind,
    pub span: Vec<PolyField>,
    pub dofs: Vec<DofFunctional>,
    /// `dual[j] = sum_k coeffs[(k, j)] span[k]`.
    pub coeffs: DMatrix<f64>,
    pub dual: Vec<PolyField>,
    /// 2-norm condition number of the Vandermonde matrix.
    pub condition: f64,
}

pub fn vandermonde(span: &[PolyField], dofs: &[DofFunctional]) -> DMatrix<f64> {
    DMatrix::from_fn(dofs.len(), span.len(), |i, k| dofs[i].apply(&span[k]))
}

impl ElementSpace {
    pub fn new(kind: SpaceKind, span: Vec<PolyField>, dofs: Vec<DofFunctional>) -> Result<Self> {
        let expected = kind.expected_dim();
        if span.len() != expected || dofs.len() != expected {
            return Err(Error::DegenerateSpan {
                space: kind,
                rank: span.len().min(dofs.len()),
                expected,
            });
        }
        let v = vandermonde(&span, &dofs);
        let sv = v.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition < 1e13) {
            return Err(Error::SingularVandermonde { space: kind, condition });
        }
        let coeffs = v
            .lu()
            .try_inverse()
            .ok_or(Error::SingularVandermonde { space: kind, condition })?;
        let frame = span[0].frame;
        let dual = (0..expected)
            .map(|j| PolyField::combination(frame, (0..expected).map(|k| (coeffs[(k, j)], &span[k]))))
            .collect();
        Ok(ElementSpace {
            kind,
            span,
            dofs,
            coeffs,
            dual,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.dual.len()
    }

    /// `max_ij |DoF_i(dual_j) - delta_ij|`, recomputed from the dual fields.
    pub fn duality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, dof) in self.dofs.iter().enumerate() {
            for (j, d) in self.dual.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dof.apply(d) - target).abs());
            }
        }
        worst
    }

    /// Reference-frame function with the given reference DoF values.
    pub fn interpolate(&self, dof_values: &[f64]) -> PolyField {
        debug_assert_eq!(dof_values.len(), self.dim());
        PolyField::combination(self.dual[0].frame, dof_values.iter().copied().zip(self.dual.iter()))
    }

    pub fn apply_dofs(&self, v: &PolyField) -> Vec<f64> {
        self.dofs.iter().map(|d| d.apply(v)).collect()
    }
}

pub fn build_wk() -> Result<ElementSpace> {
    ElementSpace::new(SpaceKind::WK, span_wk(), cell_face_dofs())
}

pub fn build_vk() -> Result<ElementSpace> {
    build_vk_with(None)
}

/// `V_K` with an optional fault: `eps * x1 x2 x3` added to the first
/// component of the first spanning field.
pub fn build_vk_with(perturbation: Option<f64>) -> Result<ElementSpace> {
    let mut span = span_vk()?;
    if let Some(eps) = perturbation {
        span[0].comps[0].add_term(Monomial::new(1, 1, 1), eps);
    }
    let mut dofs = cell_edge_dofs();
    dofs.extend(cell_face_curl_dofs());
    ElementSpace::new(SpaceKind::VK, span, dofs)
}

pub fn build_nedelec() -> Result<ElementSpace> {
    ElementSpace::new(SpaceKind::NedelecK, span_nedelec(), cell_edge_dofs())
}

pub fn build_q1() -> Result<ElementSpace> {
    ElementSpace::new(SpaceKind::Q1K, span_q1(), q1_dofs())
}

pub fn build_vm() -> Result<ElementSpace> {
    ElementSpace::new(SpaceKind::VM, span_vm(), macro_edge_dofs())
}

pub fn build_wm() -> Result<ElementSpace> {
    ElementSpace::new(SpaceKind::WM, span_wm(), macro_face_dofs())
}

/// Relative least-squares residual of `field` against `span(target)` in
/// coefficient space (0 for the zero field).
pub fn span_residual(field: &PolyField, target: &[PolyField]) -> f64 {
    let mut all: Vec<&PolyField> = target.iter().collect();
    all.push(field);
    let mat = coefficient_matrix(&all);
    let k = target.len();
    let a = mat.columns(0, k).clone_owned();
    let b = mat.column(k).clone_owned();
    let bn = b.norm();
    if bn == 0.0 {
        return 0.0;
    }
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-13).expect("SVD with vectors computed");
    (a * x - &b).norm() / bn
}

/// Largest relative residual of `curl(v)` against `span(target)` over the
/// dual basis of `source`.
pub fn curl_inclusion_residual(source: &ElementSpace, target: &ElementSpace) -> f64 {
    source
        .dual
        .iter()
        .map(|v| span_residual(&v.curl(), &target.span))
        .fold(0.0, f64::max)
}

/// All reference spaces built once per run.
#[derive(Clone, Debug)]
pub struct ReferenceSpaces {
    pub wk: ElementSpace,
    pub vk: ElementSpace,
    pub nedelec: ElementSpace,
    pub q1: ElementSpace,
    pub vm: ElementSpace,
    pub wm: ElementSpace,
}

impl ReferenceSpaces {
    pub fn build() -> Result<Self> {
        Self::build_with(None)
    }

    pub fn build_with(vk_perturbation: Option<f64>) -> Result<Self> {
        Ok(ReferenceSpaces {
            wk: build_wk()?,
            vk: build_vk_with(vk_perturbation)?,
            nedelec: build_nedelec()?,
            q1: build_q1()?,
            vm: build_vm()?,
            wm: build_wm()?,
        })
    }

    pub fn get(&self, kind: SpaceKind) -> &ElementSpace {
        match kind {
            SpaceKind::WK => &self.wk,
            SpaceKind::VK => &self.vk,
            SpaceKind::NedelecK => &self.nedelec,
            SpaceKind::Q1K => &self.q1,
            SpaceKind::VM => &self.vm,
            SpaceKind::WM => &self.wm,
        }
    }

    /// `curl V_K ⊆ W_K` residual.
    pub fn check_curl_inclusion(&self) -> f64 {
        curl_inclusion_residual(&self.vk, &self.wk)
    }

    /// `curl V_M ⊆ W_M` residual.
    pub fn check_macro_curl_inclusion(&self) -> f64 {
        curl_inclusion_residual(&self.vm, &self.wm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyquad::Frame;

    #[test]
    fn dimensions() {
        let s = ReferenceSpaces::build().unwrap();
        for kind in SpaceKind::ALL {
            assert_eq!(s.get(kind).dim(), kind.expected_dim(), "{kind}");
        }
    }

    #[test]
    fn unisolvence_identity() {
        let s = ReferenceSpaces::build().unwrap();
        assert!(s.nedelec.duality_defect() < 1e-12);
        assert!(s.vk.duality_defect() < 1e-10);
        assert!(s.wk.duality_defect() < 1e-10);
        assert!(s.q1.duality_defect() < 1e-12);
        assert!(s.vm.duality_defect() < 1e-8);
        assert!(s.wm.duality_defect() < 1e-8);
        assert!(s.vm.condition.is_finite());
    }

    #[test]
    fn vk_span_contains_known_fields() {
        let vk = build_vk().unwrap();
        let grad = PolyField::gradient(&mono(1, 1, 1), Frame::reference());
        assert!(span_residual(&grad, &vk.span) < 1e-12);
        let cross = PolyField::reference([Poly::zero(), mono(0, 0, 1), mono(0, 1, 0).scale(-1.0)]);
        assert!(span_residual(&cross, &vk.span) < 1e-12);
        // not in V_K: a field with an x1^2 x2^2 term
        let outside = axis_field(0, mono(2, 2, 0));
        assert!(span_residual(&outside, &vk.span) > 0.5);
    }

    #[test]
    fn raw_cross_products_have_one_dependency() {
        let crosses: Vec<PolyField> = span_wk().iter().map(position_cross).collect();
        assert_eq!(independent_subset(&crosses, 1e-10).len(), 17);
    }

    #[test]
    fn curl_inclusions() {
        let s = ReferenceSpaces::build().unwrap();
        assert!(s.check_curl_inclusion() <= 1e-12);
        assert!(s.check_macro_curl_inclusion() <= 1e-12);
        let grad = PolyField::gradient(&mono(1, 0, 1), Frame::reference());
        assert!(span_residual(&grad.curl(), &s.wk.span) == 0.0);
    }

    #[test]
    fn perturbed_vk_breaks_curl_inclusion() {
        let s = ReferenceSpaces::build_with(Some(1e-3)).unwrap();
        assert!(s.check_curl_inclusion() > 1e-6);
    }

    #[test]
    fn edge_dofs_shared_with_nedelec() {
        let s = ReferenceSpaces::build().unwrap();
        for (a, b) in s.vk.dofs[..12].iter().zip(&s.nedelec.dofs) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn duality_block_structure() {
        let s = ReferenceSpaces::build().unwrap();
        // edge duals have vanishing face-curl DoFs and vice versa
        for j in 0..24 {
            for i in 0..24 {
                if (i < 12) != (j < 12) {
                    assert!(s.vk.dofs[i].apply(&s.vk.dual[j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn wk_components_are_sums_of_univariate_terms() {
        for f in span_wk() {
            for c in 0..3 {
                assert!(f.comps[c].terms().all(|(m, _)| m.active_axes() <= 1));
            }
        }
    }

    #[test]
    fn singular_vandermonde_detected() {
        // duplicated spanning field
        let mut span = span_nedelec();
        span[1] = span[0].clone();
        let err = ElementSpace::new(SpaceKind::NedelecK, span, cell_edge_dofs()).unwrap_err();
        assert!(matches!(err, Error::SingularVandermonde { .. }));
    }
}
