use brickcurl::analysis::{discrete_difference, error_vs_exact};
use brickcurl::interp::{global_ih, restrict_to_cell};
use brickcurl::polyquad::GaussRule;
use brickcurl::study::{Study, StudyConfig};
use brickcurl::system::DofTag;
use brickcurl::{DofVector, Scheme};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn coefficient_norms_match_quadrature_of_the_field() {
    let study = Study::new(StudyConfig::default()).unwrap();
    let disc = study.discretize(3).unwrap();
    let mut rng = StdRng::seed_from_u64(41);
    let v = DofVector::new(
        (0..disc.dofmap.num_v()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        DofTag::Velocity,
    );
    let zero = DofVector::zeros(v.len(), DofTag::Velocity);
    let e = discrete_difference(&v, &zero, &disc.mesh, &disc.dofmap, &study.locals);

    let rule = GaussRule::new(5).unwrap();
    let mut sq = [0.0; 3];
    for cell in 0..disc.mesh.num_cells() {
        let f = restrict_to_cell(&v, &disc.dofmap, &disc.mesh, &study.spaces.vk, cell).field;
        let curl = f.curl();
        let grad = curl.grad();
        for (x, w) in rule.tensor(&disc.mesh.cell_box(cell)) {
            let val = f.eval(x);
            let c = curl.eval(x);
            // partials are polynomials in the cell's scaled variables
            let xhat = curl.frame.to_local(x);
            for k in 0..3 {
                sq[2] += w * val[k] * val[k];
                sq[1] += w * c[k] * c[k];
                for j in 0..3 {
                    sq[0] += w * grad[k][j].eval(xhat).powi(2);
                }
            }
        }
    }
    let q = sq.map(f64::sqrt);
    for (a, b) in e.as_array().iter().zip(q) {
        assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
    }
}

#[test]
fn difference_of_a_vector_with_itself_is_zero() {
    let study = Study::new(StudyConfig::default()).unwrap();
    let disc = study.discretize(6).unwrap();
    let ih = study.interpolant(&disc);
    let e = discrete_difference(&ih, &ih, &disc.mesh, &disc.dofmap, &study.locals);
    assert_eq!(e.as_array(), [0.0; 3]);
}

#[test]
fn errors_obey_the_triangle_inequality() {
    let study = Study::new(StudyConfig::default()).unwrap();
    let disc = study.discretize(6).unwrap();
    let run = study.solve(&disc, Scheme::Modified).unwrap();
    let ih = global_ih(&study.exact, &disc.mesh, &disc.dofmap, study.rule(), true);
    let total = study.errors(&disc, &run);
    let interp = error_vs_exact(&ih, &study.exact, &disc.mesh, &disc.dofmap, study.vk_table());
    let close = study.superclose(&disc, &run);
    for k in 0..3 {
        let t = total.as_array()[k];
        let bound = interp.as_array()[k] + close.as_array()[k];
        assert!(t <= bound * (1.0 + 1e-12), "component {k}: {t} > {bound}");
    }
}

#[test]
fn interpolation_error_shrinks_under_refinement() {
    let study = Study::new(StudyConfig::default()).unwrap();
    let mut prev: Option<[f64; 3]> = None;
    for n in [3, 6, 12] {
        let disc = study.discretize(n).unwrap();
        let ih = study.interpolant(&disc);
        let e = error_vs_exact(&ih, &study.exact, &disc.mesh, &disc.dofmap, study.vk_table()).as_array();
        if let Some(p) = prev {
            for k in 0..3 {
                assert!(e[k] < p[k], "n={n} component {k}");
            }
        }
        prev = Some(e);
    }
}
