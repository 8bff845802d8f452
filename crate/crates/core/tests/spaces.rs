use brickcurl::spaces::{build_vk_with, span_residual, SpaceKind};
use brickcurl::ReferenceSpaces;
use std::sync::OnceLock;

fn spaces() -> &'static ReferenceSpaces {
    static S: OnceLock<ReferenceSpaces> = OnceLock::new();
    S.get_or_init(|| ReferenceSpaces::build().unwrap())
}

#[test]
fn every_space_is_unisolvent_with_expected_dimension() {
    for kind in SpaceKind::ALL {
        let s = spaces().get(kind);
        assert_eq!(s.dim(), kind.expected_dim(), "{kind}");
        assert!(s.duality_defect() <= 1e-8, "{kind}: {:e}", s.duality_defect());
        assert!(s.condition.is_finite());
    }
}

#[test]
fn dimensions_match_entity_counts() {
    // 6 faces x 3 for W_K, 12 edges + 6 faces x 2 for V_K
    let expected = [
        (SpaceKind::WK, 18),
        (SpaceKind::VK, 24),
        (SpaceKind::NedelecK, 12),
        (SpaceKind::Q1K, 8),
        (SpaceKind::VM, 3 * 3 * 16),
        (SpaceKind::WM, 3 * 9 * 4),
    ];
    for (kind, n) in expected {
        assert_eq!(kind.expected_dim(), n);
    }
}

#[test]
fn curl_inclusions_hold() {
    assert!(spaces().check_curl_inclusion() <= 1e-12);
    assert!(spaces().check_macro_curl_inclusion() <= 1e-12);
}

#[test]
fn nedelec_space_sits_inside_vk() {
    let s = spaces();
    for f in &s.nedelec.span {
        assert!(span_residual(f, &s.vk.span) <= 1e-12);
    }
}

#[test]
fn vk_edge_functionals_agree_with_nedelec_on_nedelec_fields() {
    let s = spaces();
    // V_K lists its 12 edge functionals first, in the Nédélec order
    for f in &s.nedelec.dual {
        let a = s.nedelec.apply_dofs(f);
        let b = s.vk.apply_dofs(f);
        for i in 0..12 {
            assert!((a[i] - b[i]).abs() <= 1e-12);
        }
    }
}

#[test]
fn macro_spaces_have_tensor_degrees() {
    let s = spaces();
    for f in &s.vm.span {
        for comp in 0..3 {
            for axis in 0..3 {
                let cap = if axis == comp { 2 } else { 3 };
                assert!(f.comps[comp].max_degree(axis) <= cap);
            }
        }
    }
    for f in &s.wm.span {
        for comp in 0..3 {
            for axis in 0..3 {
                let cap = if axis == comp { 3 } else { 2 };
                assert!(f.comps[comp].max_degree(axis) <= cap);
            }
        }
    }
}

#[test]
fn q1_duals_are_nodal_hats() {
    let q1 = &spaces().q1;
    for d in &q1.dual {
        let c = d.comps[0].eval([0.0; 3]);
        assert!((c - 0.125).abs() <= 1e-14);
    }
}

#[test]
fn perturbed_vk_breaks_curl_inclusion() {
    let faulty = build_vk_with(Some(1e-3)).unwrap();
    let clean = &spaces().vk;
    let r = brickcurl::spaces::curl_inclusion_residual(&faulty, &spaces().wk);
    assert!(r > 1e-6, "fault not visible: {r:e}");
    assert!(clean.duality_defect() <= 1e-8);
}
