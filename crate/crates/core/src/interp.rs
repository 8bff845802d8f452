//! Interpolation operators.
//!
//! * `I_K` / `I0_K` onto `V_K`: edge integrals plus face integrals of
//!   tangential curl, with or without the `h_k^2 / 12` second-derivative
//!   correction,
//! * `Pi_K` / `Pi0_K` onto `W_K`: corrected tangential and plain normal face integrals,
//! * `I^C_K` onto the lowest-order Nédélec element,
//! * `I_M` / `Pi_M` onto the macro spaces,
//!
//! and their global, piecewise versions. DoF integrals of smooth fields use a
//! tensor Gauss rule; the correction derivatives come from
//! [`SmoothField::curl_derivative`] and are never approximated numerically.

use crate::error::Result;
use crate::mesh::{BrickMesh, MacroPartition, Macroelement};
use crate::polyquad::{AxisBox, Frame, GaussRule, PolyField};
use crate::spaces::{DofFunctional, DofKind, ElementSpace, SpaceKind};
use crate::system::{DofTag, DofVector, FaceDofMap, GlobalDofMap};

/// A vector field with analytic partial derivatives up to total order 3.
pub trait SmoothField: Sync {
    /// `d^alpha v` at a physical point.
    fn derivative(&self, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3];

    fn value(&self, x: [f64; 3]) -> [f64; 3] {
        self.derivative([0; 3], x)
    }

    /// `d^alpha curl v`, valid for `|alpha| <= 2`.
    fn curl_derivative(&self, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3] {
        let d = |axis: usize, comp: usize| {
            let mut a = alpha;
            a[axis] += 1;
            self.derivative(a, x)[comp]
        };
        [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)]
    }

    fn curl(&self, x: [f64; 3]) -> [f64; 3] {
        self.curl_derivative([0; 3], x)
    }
}

impl SmoothField for PolyField {
    fn derivative(&self, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3] {
        let mut f = self.clone();
        for (axis, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                f = f.differentiate(axis);
            }
        }
        f.eval(x)
    }
}

/// `curl v` viewed as a smooth field in its own right.
pub struct CurlOf<'a, F: SmoothField + ?Sized>(pub &'a F);

impl<F: SmoothField + ?Sized> SmoothField for CurlOf<'_, F> {
    fn derivative(&self, alpha: [usize; 3], x: [f64; 3]) -> [f64; 3] {
        self.0.curl_derivative(alpha, x)
    }
}

/// An interpolant on one cell or macroelement.
#[derive(Clone, Debug)]
pub struct LocalInterpolant {
    pub space: SpaceKind,
    /// Physical DoF values.
    pub dofs: Vec<f64>,
    pub field: PolyField,
}

impl LocalInterpolant {
    /// Builds the element function with physical DoF values `dofs` on `frame`.
    /// The frame must be a cube (equal sizes), as on the uniform mesh.
    pub fn from_dofs(space: &ElementSpace, frame: Frame, dofs: Vec<f64>) -> Self {
        let h = frame.size[0];
        debug_assert!(frame.size.iter().all(|s| (s - h).abs() <= 1e-14 * h));
        let scaled: Vec<f64> = dofs
            .iter()
            .zip(&space.dofs)
            .map(|(v, d)| v / h.powi(d.kind.scale_power()))
            .collect();
        let mut field = space.interpolate(&scaled);
        field.frame = frame;
        LocalInterpolant {
            space: space.kind,
            dofs,
            field,
        }
    }

    /// Re-applies the space's functionals to the stored field (physical units).
    pub fn reapply_dofs(&self, space: &ElementSpace) -> Vec<f64> {
        let h = self.field.frame.size[0];
        space
            .dofs
            .iter()
            .map(|d| d.apply(&self.field) * h.powi(d.kind.scale_power()))
            .collect()
    }
}

fn physical_box(frame: &Frame, d: &DofFunctional) -> AxisBox {
    AxisBox::new(frame.to_global(d.domain.lo), frame.to_global(d.domain.hi))
}

/// One DoF of a smooth field on a physical element. `corrected` adds the
/// `h_k^2 / 12` second-derivative term to tangential face functionals.
pub fn smooth_dof<F: SmoothField + ?Sized>(
    v: &F,
    frame: &Frame,
    dof: &DofFunctional,
    rule: &GaussRule,
    corrected: bool,
) -> f64 {
    let bx = physical_box(frame, dof);
    let t = dof.axis;
    let weight = frame.size[t] * frame.size[t] / 12.0;
    let mut second = [0; 3];
    second[t] = 2;
    match dof.kind {
        DofKind::EdgeTangential | DofKind::FaceNormal => rule.integrate(&bx, |x| v.value(x)[t]),
        DofKind::FaceTangential => rule.integrate(&bx, |x| {
            let mut s = v.value(x)[t];
            if corrected {
                s += weight * v.derivative(second, x)[t];
            }
            s
        }),
        DofKind::FaceTangentialCurl => rule.integrate(&bx, |x| {
            let mut s = v.curl(x)[t];
            if corrected {
                s += weight * v.curl_derivative(second, x)[t];
            }
            s
        }),
        DofKind::VertexValue => v.value(dof.domain.lo)[0],
    }
}

fn interpolate_smooth<F: SmoothField + ?Sized>(
    v: &F,
    space: &ElementSpace,
    frame: Frame,
    rule: &GaussRule,
    corrected: bool,
) -> LocalInterpolant {
    let dofs = space
        .dofs
        .iter()
        .map(|d| smooth_dof(v, &frame, d, rule, corrected))
        .collect();
    LocalInterpolant::from_dofs(space, frame, dofs)
}

/// Corrected interpolation `Pi_K w` onto `W_K`.
pub fn interp_pik<F: SmoothField + ?Sized>(w: &F, wk: &ElementSpace, frame: Frame, rule: &GaussRule) -> LocalInterpolant {
    interpolate_smooth(w, wk, frame, rule, true)
}

/// Canonical face-integral interpolation onto `W_K`.
pub fn interp_pik_canonical<F: SmoothField + ?Sized>(
    w: &F,
    wk: &ElementSpace,
    frame: Frame,
    rule: &GaussRule,
) -> LocalInterpolant {
    interpolate_smooth(w, wk, frame, rule, false)
}

/// Corrected interpolation `I_K v` onto `V_K`.
pub fn interp_ik<F: SmoothField + ?Sized>(v: &F, vk: &ElementSpace, frame: Frame, rule: &GaussRule) -> LocalInterpolant {
    interpolate_smooth(v, vk, frame, rule, true)
}

/// Canonical interpolation `I0_K v` preserving all `V_K` DoFs.
pub fn interp_ik_canonical<F: SmoothField + ?Sized>(
    v: &F,
    vk: &ElementSpace,
    frame: Frame,
    rule: &GaussRule,
) -> LocalInterpolant {
    interpolate_smooth(v, vk, frame, rule, false)
}

/// Nédélec interpolation `I^C_K v` of a smooth field.
pub fn interp_nedelec<F: SmoothField + ?Sized>(
    v: &F,
    nedelec: &ElementSpace,
    frame: Frame,
    rule: &GaussRule,
) -> LocalInterpolant {
    interpolate_smooth(v, nedelec, frame, rule, false)
}

/// `I^C_K` of a `V_K` function: its twelve edge DoFs fed to the Nédélec basis.
pub fn nedelec_of_vk(v: &LocalInterpolant, nedelec: &ElementSpace) -> LocalInterpolant {
    debug_assert_eq!(v.space, SpaceKind::VK);
    LocalInterpolant::from_dofs(nedelec, v.field.frame, v.dofs[..12].to_vec())
}

/// `I_M v` onto `V_M` over a macroelement.
pub fn interp_macro_v<F: SmoothField + ?Sized>(v: &F, vm: &ElementSpace, m: &Macroelement, rule: &GaussRule) -> LocalInterpolant {
    interpolate_smooth(v, vm, m.frame, rule, false)
}

/// `Pi_M w` onto `W_M` over a macroelement.
pub fn interp_macro_w<F: SmoothField + ?Sized>(w: &F, wm: &ElementSpace, m: &Macroelement, rule: &GaussRule) -> LocalInterpolant {
    interpolate_smooth(w, wm, m.frame, rule, false)
}

/// The `V_h` function `u_h` restricted to one cell.
pub fn restrict_to_cell(u_h: &DofVector, dofmap: &GlobalDofMap, mesh: &BrickMesh, vk: &ElementSpace, cell: usize) -> LocalInterpolant {
    let dofs = dofmap.gather_v(u_h, cell).to_vec();
    LocalInterpolant::from_dofs(vk, mesh.cell_frame(cell), dofs)
}

/// Global `I_h v`: one value per `V_h` DoF.
pub fn global_ih<F: SmoothField + ?Sized>(
    v: &F,
    mesh: &BrickMesh,
    dofmap: &GlobalDofMap,
    rule: &GaussRule,
    corrected: bool,
) -> DofVector {
    let mut values = vec![0.0; dofmap.num_v()];
    for (e, slot) in dofmap.edge_dofs().iter().enumerate() {
        if let Some(i) = *slot {
            let (axis, _) = mesh.edge_lattice(e);
            values[i] = rule.integrate(&mesh.edge_box(e), |x| v.value(x)[axis]);
        }
    }
    let h = mesh.h_axis();
    for (face, slot) in dofmap.face_dofs().iter().enumerate() {
        if let Some(first) = *slot {
            let (axis, _) = mesh.face_lattice(face);
            let (b, c) = crate::mesh::other_axes(axis);
            let bx = mesh.face_box(face);
            for (j, t) in [b, c].into_iter().enumerate() {
                let weight = h[t] * h[t] / 12.0;
                let mut second = [0; 3];
                second[t] = 2;
                values[first + j] = rule.integrate(&bx, |x| {
                    let mut s = v.curl(x)[t];
                    if corrected {
                        s += weight * v.curl_derivative(second, x)[t];
                    }
                    s
                });
            }
        }
    }
    DofVector::new(values, DofTag::Velocity)
}

/// Global `Pi_h w` onto `W_h`: three values per interior face.
pub fn global_pih<F: SmoothField + ?Sized>(w: &F, mesh: &BrickMesh, map: &FaceDofMap, rule: &GaussRule) -> Vec<f64> {
    let mut values = vec![0.0; map.len()];
    let h = mesh.h_axis();
    for (face, slot) in map.face_dofs().iter().enumerate() {
        if let Some(first) = *slot {
            let (axis, _) = mesh.face_lattice(face);
            let (b, c) = crate::mesh::other_axes(axis);
            let bx = mesh.face_box(face);
            for (j, t) in [b, c].into_iter().enumerate() {
                let weight = h[t] * h[t] / 12.0;
                let mut second = [0; 3];
                second[t] = 2;
                values[first + j] =
                    rule.integrate(&bx, |x| w.value(x)[t] + weight * w.derivative(second, x)[t]);
            }
            values[first + 2] = rule.integrate(&bx, |x| w.value(x)[axis]);
        }
    }
    values
}

/// `I^C_h u_h`: the Nédélec DoFs of a `V_h` function are its edge DoFs.
pub fn global_nedelec_of(u_h: &DofVector, dofmap: &GlobalDofMap) -> Vec<f64> {
    u_h.values[..dofmap.num_edge_dofs()].to_vec()
}

/// Postprocessed field `I_{3h}`: one `V_M` interpolant per macroelement,
/// stored by its 144 physical edge DoF values.
#[derive(Clone, Debug)]
pub struct MacroField {
    pub frames: Vec<Frame>,
    pub dofs: Vec<Vec<f64>>,
}

impl MacroField {
    /// `I_{3h} u_h` from the edge DoFs of a `V_h` function.
    pub fn from_discrete(u_h: &DofVector, dofmap: &GlobalDofMap, partition: &MacroPartition) -> Self {
        let mut frames = Vec::with_capacity(partition.len());
        let mut dofs = Vec::with_capacity(partition.len());
        for m in &partition.macros {
            frames.push(m.frame);
            dofs.push(
                m.edges
                    .iter()
                    .map(|&e| dofmap.edge_dofs()[e].map_or(0.0, |i| u_h.values[i]))
                    .collect(),
            );
        }
        MacroField { frames, dofs }
    }

    /// `I_{3h} v` of a smooth field.
    pub fn from_smooth<F: SmoothField + ?Sized>(
        v: &F,
        vm: &ElementSpace,
        partition: &MacroPartition,
        rule: &GaussRule,
    ) -> Self {
        MacroField {
            frames: partition.macros.iter().map(|m| m.frame).collect(),
            dofs: partition
                .macros
                .iter()
                .map(|m| interp_macro_v(v, vm, m, rule).dofs)
                .collect(),
        }
    }

    pub fn local(&self, vm: &ElementSpace, index: usize) -> LocalInterpolant {
        LocalInterpolant::from_dofs(vm, self.frames[index], self.dofs[index].clone())
    }
}

/// `global_i3h`: `I_{3h} u_h`; errors when `n` is not a multiple of 3.
pub fn global_i3h(u_h: &DofVector, mesh: &BrickMesh, dofmap: &GlobalDofMap) -> Result<MacroField> {
    let partition = mesh.macro_partition()?;
    Ok(MacroField::from_discrete(u_h, dofmap, &partition))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyquad::{Monomial, Poly};
    use crate::spaces::ReferenceSpaces;

    fn mono(a: u8, b: u8, c: u8) -> Poly {
        Poly::monomial(Monomial::new(a, b, c), 1.0)
    }

    fn cell_frame() -> Frame {
        Frame::new([0.3, 0.55, 0.7], [0.1; 3])
    }

    fn field_diff(a: &PolyField, b: &PolyField) -> f64 {
        a.sub(b).max_abs_coeff()
    }

    #[test]
    fn pik_reproduces_linear_fields() {
        let s = ReferenceSpaces::build().unwrap();
        let rule = GaussRule::new(6).unwrap();
        let frame = cell_frame();
        // a linear field expressed in the cell frame
        let w = PolyField::new(
            [&mono(1, 0, 0) + &Poly::constant(2.0), mono(0, 0, 1).scale(-3.0), &mono(0, 1, 0) + &mono(1, 0, 0)],
            frame,
        );
        let pi = interp_pik(&w, &s.wk, frame, &rule);
        assert!(field_diff(&pi.field, &w) < 1e-10);
        let reapplied = pi.reapply_dofs(&s.wk);
        for (a, b) in reapplied.iter().zip(&pi.dofs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn pik_equals_canonical_when_correction_vanishes() {
        let s = ReferenceSpaces::build().unwrap();
        let rule = GaussRule::new(6).unwrap();
        let frame = Frame::reference();
        // d^2 w_t / dx_t^2 = 0 for every tangent t: w1 has no x1^2, etc.
        let w = PolyField::reference([mono(0, 2, 1), mono(1, 0, 2), mono(2, 1, 0)]);
        let a = interp_pik(&w, &s.wk, frame, &rule);
        let b = interp_pik_canonical(&w, &s.wk, frame, &rule);
        assert!(field_diff(&a.field, &b.field) < 1e-12);
    }

    #[test]
    fn gradient_field_is_reproduced_by_ik() {
        let s = ReferenceSpaces::build().unwrap();
        let rule = GaussRule::new(6).unwrap();
        let frame = cell_frame();
        let g = PolyField::gradient(&mono(1, 1, 1), frame);
        let ik = interp_ik(&g, &s.vk, frame, &rule);
        assert!(field_diff(&ik.field, &g) < 1e-10);
        assert!(ik.field.curl().max_abs_coeff() < 1e-9);
    }

    #[test]
    fn ik_equals_canonical_on_vk_functions_with_linear_curl() {
        let s = ReferenceSpaces::build().unwrap();
        let rule = GaussRule::new(6).unwrap();
        let frame = Frame::reference();
        // (x - x_K) × (1, 0, 0) has constant curl
        let v = PolyField::reference([Poly::zero(), mono(0, 0, 1), mono(0, 1, 0).scale(-1.0)]);
        let a = interp_ik(&v, &s.vk, frame, &rule);
        let b = interp_ik_canonical(&v, &s.vk, frame, &rule);
        assert!(field_diff(&a.field, &v) < 1e-12);
        assert!(field_diff(&b.field, &v) < 1e-12);
    }

    #[test]
    fn nedelec_projection_and_face_duals() {
        let s = ReferenceSpaces::build().unwrap();
        let rule = GaussRule::new(6).unwrap();
        let frame = Frame::reference();
        for n in &s.nedelec.dual {
            let p = interp_nedelec(n, &s.nedelec, frame, &rule);
            assert!(field_diff(&p.field, n) < 1e-12);
        }
        for j in 12..24 {
            let dofs: Vec<f64> = (0..24).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            let v = LocalInterpolant::from_dofs(&s.vk, frame, dofs);
            let c = interp_nedelec(&v.field, &s.nedelec, frame, &rule);
            assert!(c.dofs.iter().all(|d| d.abs() < 1e-12));
            assert!(c.field.max_abs_coeff() < 1e-11);
        }
    }

    #[test]
    fn curl_of_wraps_curl() {
        let v = PolyField::reference([mono(0, 1, 2), mono(2, 0, 1), mono(1, 1, 1)]);
        let c = CurlOf(&v);
        let x = [0.1, -0.2, 0.3];
        let direct = v.curl().eval(x);
        let wrapped = c.value(x);
        for k in 0..3 {
            assert!((direct[k] - wrapped[k]).abs() < 1e-14);
        }
    }
}
