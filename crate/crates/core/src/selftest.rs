//! Invariant battery: exact identities of the element construction, the
//! interpolation operators and a dense-oracle solve at `n = 3`.

use std::fmt;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::interp::{
    global_ih, interp_ik, interp_ik_canonical, interp_pik, nedelec_of_vk, CurlOf, LocalInterpolant,
    MacroField,
};
use crate::mesh::{local_faces, BrickMesh};
use crate::polyquad::{AxisBox, Frame, GaussRule, Monomial, Poly, PolyField};
use crate::spaces::{ReferenceSpaces, SpaceKind};
use crate::study::{Scheme, Study, StudyConfig};
use crate::system::{dense_solve, FaceDofMap};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<48} {:>10.3e} (<= {:.0e})", self.name, self.value, self.threshold)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SelftestOptions {
    /// Perturbs the first `V_K` spanning field by `eps * x1 x2 x3`.
    pub vk_fault: Option<f64>,
    pub seed: u64,
}

fn mono(a: u8, b: u8, c: u8) -> Poly {
    Poly::monomial(Monomial::new(a, b, c), 1.0)
}

/// Random field with per-axis degree at most `deg` in every component.
pub fn random_poly_field<R: Rng>(rng: &mut R, deg: u8, frame: Frame) -> PolyField {
    let comp = |rng: &mut R| {
        let mut p = Poly::zero();
        for a in 0..=deg {
            for b in 0..=deg {
                for c in 0..=deg {
                    p.add_term(Monomial::new(a, b, c), rng.gen_range(-1.0..1.0));
                }
            }
        }
        p
    };
    PolyField::new([comp(rng), comp(rng), comp(rng)], frame)
}

fn relative_diff(a: &PolyField, b: &PolyField) -> f64 {
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(1e-300);
    a.sub(b).max_abs_coeff() / scale
}

/// Vector fields whose components are monomials of total degree `<= deg`.
fn monomial_fields(deg: u8) -> Vec<PolyField> {
    let mut out = Vec::new();
    for comp in 0..3 {
        for a in 0..=deg {
            for b in 0..=deg - a {
                for c in 0..=deg - a - b {
                    out.push(PolyField::axis(comp, mono(a, b, c), Frame::reference()));
                }
            }
        }
    }
    out
}

fn unisolvence(spaces: &ReferenceSpaces, checks: &mut Vec<Check>) {
    for kind in SpaceKind::ALL {
        let s = spaces.get(kind);
        checks.push(Check::new(format!("unisolvence {kind} (dim {})", s.dim()), s.duality_defect(), 1e-8));
    }
}

/// `(grad(w - Pi w), grad w_h) = 0` for `w` in `[P2]^3`, `w_h` in `W_K`.
pub fn wk_orthogonality_defect(spaces: &ReferenceSpaces, rule: &GaussRule) -> f64 {
    let bx = AxisBox::reference();
    let mut worst: f64 = 0.0;
    for w in monomial_fields(2) {
        let pi = interp_pik(&w, &spaces.wk, Frame::reference(), rule);
        let e = w.sub(&pi.field);
        for wh in &spaces.wk.dual {
            worst = worst.max(e.grad_inner_product(wh, &bx).abs());
        }
    }
    worst
}

/// `(v - I0 v, grad q) = 0` for `v` in `[P1]^3`, `q` in `Q1`.
pub fn q1_orthogonality_defect(spaces: &ReferenceSpaces, rule: &GaussRule) -> f64 {
    let bx = AxisBox::reference();
    let grads: Vec<PolyField> = spaces
        .q1
        .dual
        .iter()
        .map(|q| PolyField::gradient(&q.comps[0], Frame::reference()))
        .collect();
    let mut worst: f64 = 0.0;
    for v in monomial_fields(1) {
        let i0 = interp_ik_canonical(&v, &spaces.vk, Frame::reference(), rule);
        let e = v.sub(&i0.field);
        for g in &grads {
            worst = worst.max(e.inner_product(g, &bx).abs());
        }
    }
    worst
}

/// `(q, curl(v - I^C v)) = 0` for constant `q` and every `V_K` dual.
pub fn nedelec_curl_defect(spaces: &ReferenceSpaces) -> f64 {
    let bx = AxisBox::reference();
    let mut worst: f64 = 0.0;
    for (j, v) in spaces.vk.dual.iter().enumerate() {
        let dofs: Vec<f64> = (0..24).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        let local = LocalInterpolant::from_dofs(&spaces.vk, Frame::reference(), dofs);
        let c = nedelec_of_vk(&local, &spaces.nedelec);
        let diff = v.sub(&c.field).curl();
        for k in 0..3 {
            worst = worst.max(diff.comps[k].integrate(&bx).abs());
        }
    }
    worst
}

/// `Pi_K curl v = curl I_K v` on random polynomials of per-axis degree 3.
pub fn commuting_defect<R: Rng>(spaces: &ReferenceSpaces, rule: &GaussRule, rng: &mut R, samples: usize) -> f64 {
    let frame = Frame::new([0.35, 0.45, 0.55], [0.1; 3]);
    (0..samples)
        .map(|_| {
            let v = random_poly_field(rng, 3, frame);
            let pi = interp_pik(&CurlOf(&v), &spaces.wk, frame, rule);
            let ik = interp_ik(&v, &spaces.vk, frame, rule);
            relative_diff(&pi.field, &ik.field.curl())
        })
        .fold(0.0, f64::max)
}

/// `Pi_M curl_h v_h = curl I_M v_h` for random piecewise `V_K` functions on
/// the macroelement of a 3x3x3 mesh (all entities carry random DoFs).
pub fn macro_commuting_defect<R: Rng>(spaces: &ReferenceSpaces, rule: &GaussRule, rng: &mut R, samples: usize) -> Result<f64> {
    let mesh = BrickMesh::new(3)?;
    let partition = mesh.macro_partition()?;
    let m = &partition.macros[0];
    let faces = local_faces();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let edge_vals: Vec<f64> = (0..mesh.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let face_vals: Vec<[f64; 2]> = (0..mesh.num_faces())
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let cells: Vec<LocalInterpolant> = (0..mesh.num_cells())
            .map(|c| {
                let mut dofs: Vec<f64> = mesh.cell_edges(c).iter().map(|&e| edge_vals[e]).collect();
                for f in mesh.cell_faces(c) {
                    dofs.extend(face_vals[f]);
                }
                LocalInterpolant::from_dofs(&spaces.vk, mesh.cell_frame(c), dofs)
            })
            .collect();
        let normal_integrals: Vec<f64> = m
            .faces
            .iter()
            .map(|&face| {
                let (axis, l) = mesh.face_lattice(face);
                let (cell, side) = if l[axis] < mesh.n() {
                    (mesh.cell_index(l), 0)
                } else {
                    let mut lo = l;
                    lo[axis] -= 1;
                    (mesh.cell_index(lo), 1)
                };
                debug_assert_eq!(mesh.cell_faces(cell)[2 * axis + side], face);
                debug_assert_eq!(faces[2 * axis + side], (axis, side));
                let curl = cells[cell].field.curl();
                rule.integrate(&mesh.face_box(face), |x| curl.eval(x)[axis])
            })
            .collect();
        let pi_m = LocalInterpolant::from_dofs(&spaces.wm, m.frame, normal_integrals);
        let edge_dofs: Vec<f64> = m.edges.iter().map(|&e| edge_vals[e]).collect();
        let i_m = LocalInterpolant::from_dofs(&spaces.vm, m.frame, edge_dofs);
        worst = worst.max(relative_diff(&pi_m.field, &i_m.field.curl()));
    }
    Ok(worst)
}

/// Largest jump of a face integral of any component of a random `W_h`
/// function across interior faces (boundary faces: the integral itself).
pub fn wh_jump_defect<R: Rng>(spaces: &ReferenceSpaces, rule: &GaussRule, rng: &mut R, n: usize) -> Result<f64> {
    let mesh = BrickMesh::new(n)?;
    let map = FaceDofMap::new(&mesh);
    let w: Vec<f64> = (0..map.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut integrals: Vec<Vec<[f64; 3]>> = vec![Vec::new(); mesh.num_faces()];
    for cell in 0..mesh.num_cells() {
        let local = LocalInterpolant::from_dofs(&spaces.wk, mesh.cell_frame(cell), map.gather(&w, cell).to_vec());
        for face in mesh.cell_faces(cell) {
            let bx = mesh.face_box(face);
            integrals[face].push(std::array::from_fn(|k| rule.integrate(&bx, |x| local.field.eval(x)[k])));
        }
    }
    let h2 = mesh.h() * mesh.h();
    let mut worst: f64 = 0.0;
    for sides in &integrals {
        let jump: [f64; 3] = match sides.as_slice() {
            [a, b] => std::array::from_fn(|k| a[k] - b[k]),
            [a] => *a,
            _ => unreachable!("a face has one or two cells"),
        };
        worst = worst.max(jump.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / h2);
    }
    Ok(worst)
}

/// Largest number of axes appearing in a single monomial of a `W_K` field.
pub fn wk_mixed_monomials(spaces: &ReferenceSpaces) -> usize {
    spaces
        .wk
        .span
        .iter()
        .chain(&spaces.wk.dual)
        .flat_map(|f| f.comps.iter())
        .flat_map(|p| p.pruned(1e-12).terms().map(|(m, _)| m.active_axes()).collect::<Vec<_>>())
        .max()
        .unwrap_or(0)
}

pub fn run_selftest(options: SelftestOptions) -> Result<SelftestReport> {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(options.seed);
    let spaces = ReferenceSpaces::build_with(options.vk_fault)?;
    let rule = GaussRule::new(6)?;
    let mut checks = Vec::new();

    unisolvence(&spaces, &mut checks);
    checks.push(Check::new("curl V_K in W_K", spaces.check_curl_inclusion(), 1e-12));
    checks.push(Check::new("curl V_M in W_M", spaces.check_macro_curl_inclusion(), 1e-12));
    checks.push(Check::new("commuting Pi_K curl = curl I_K", commuting_defect(&spaces, &rule, &mut rng, 10), 1e-8));
    checks.push(Check::new(
        "macro commuting Pi_M curl_h = curl I_M",
        macro_commuting_defect(&spaces, &rule, &mut rng, 3)?,
        1e-8,
    ));
    checks.push(Check::new("W_K orthogonality against P2", wk_orthogonality_defect(&spaces, &rule), 1e-12));
    checks.push(Check::new("I0_K orthogonality against grad Q1", q1_orthogonality_defect(&spaces, &rule), 1e-12));
    checks.push(Check::new("(q, curl(v - I^C v)) for constant q", nedelec_curl_defect(&spaces), 1e-12));
    checks.push(Check::new("W_h face-integral jumps", wh_jump_defect(&spaces, &rule, &mut rng, 3)?, 1e-10));
    checks.push(Check::new(
        "W_K components are univariate sums",
        wk_mixed_monomials(&spaces).saturating_sub(1) as f64,
        0.0,
    ));

    let study = Study::new(StudyConfig::default())?;
    let disc = study.discretize(3)?;
    let partition = disc.mesh.macro_partition()?;
    let ih = global_ih(&study.exact, &disc.mesh, &disc.dofmap, study.rule(), true);
    let from_ih = MacroField::from_discrete(&ih, &disc.dofmap, &partition);
    let direct = MacroField::from_smooth(&study.exact, &study.spaces.vm, &partition, study.rule());
    let i3h_gap = from_ih
        .dofs
        .iter()
        .flatten()
        .zip(direct.dofs.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new("I_3h I_h u = I_3h u at n=3", i3h_gap, 1e-10));

    for scheme in [Scheme::Original, Scheme::Modified] {
        let run = study.solve(&disc, scheme)?;
        let oracle = dense_solve(&run.system)?;
        let gap = run
            .solution
            .u
            .values
            .iter()
            .chain(&run.solution.p.values)
            .zip(oracle.u.values.iter().chain(&oracle.p.values))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(format!("n=3 {scheme}: MINRES vs dense LU"), gap, 1e-8));
        checks.push(Check::new(format!("n=3 {scheme}: max |p_h|"), run.solution.p.max_abs(), 1e-8));
    }

    Ok(SelftestReport {
        checks,
        seconds: t0.elapsed().as_secs_f64(),
    })
}
