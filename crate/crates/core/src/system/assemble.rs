//! Local reference matrices and global assembly on the uniform mesh.

use std::sync::Arc;

use nalgebra::SMatrix;
use rayon::prelude::*;

use crate::mesh::BrickMesh;
use crate::polyquad::{AxisBox, Frame, PolyField};
use crate::spaces::ReferenceSpaces;

use super::dofmap::GlobalDofMap;
use super::sparse::CsrMatrix;
use super::tabulate::BasisTable;

pub type Mat24 = SMatrix<f64, 24, 24>;
pub type Mat24x8 = SMatrix<f64, 24, 8>;
pub type Mat8 = SMatrix<f64, 8, 8>;

/// Right-hand side variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// `(f, v_h)` with the `V_K` basis.
    Original,
    /// `(f, I^C_h v_h)`: edge basis functions replaced by their Nédélec
    /// interpolants, face-curl basis functions contribute nothing.
    Modified,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Original => "original",
            Scheme::Modified => "modified",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "original" => Ok(Scheme::Original),
            "modified" => Ok(Scheme::Modified),
            other => Err(format!("unknown scheme `{other}` (expected original or modified)")),
        }
    }
}

/// Exact element matrices in scaled variables on the reference cell.
///
/// For a cell of size `h` with physical basis `phi_i = phi_hat_i / h`:
/// `A_K = h^-3 a`, curl mass `h^-1 c`, mass `h m`, `B_K = h b`, `L_K = h l`.
#[derive(Clone, Debug)]
pub struct LocalMatrices {
    /// `(grad curl, grad curl)`
    pub a: Mat24,
    /// `(curl, curl)`
    pub c: Mat24,
    /// `(v, v)`
    pub m: Mat24,
    /// `(v, grad q)`
    pub b: Mat24x8,
    /// `(grad q, grad q)`
    pub l: Mat8,
}

impl LocalMatrices {
    pub fn new(spaces: &ReferenceSpaces) -> Self {
        let bx = AxisBox::reference();
        let vk = &spaces.vk.dual;
        let curls: Vec<PolyField> = vk.iter().map(|v| v.curl()).collect();
        let grads: Vec<PolyField> = spaces
            .q1
            .dual
            .iter()
            .map(|q| PolyField::gradient(&q.comps[0], Frame::reference()))
            .collect();
        let a = Mat24::from_fn(|i, j| curls[i].grad_inner_product(&curls[j], &bx));
        let c = Mat24::from_fn(|i, j| curls[i].inner_product(&curls[j], &bx));
        let m = Mat24::from_fn(|i, j| vk[i].inner_product(&vk[j], &bx));
        let b = Mat24x8::from_fn(|i, k| vk[i].inner_product(&grads[k], &bx));
        let l = Mat8::from_fn(|k, j| grads[k].inner_product(&grads[j], &bx));
        LocalMatrices { a, c, m, b, l }
    }

    /// Physical `A_K` on a cell of size `h`.
    pub fn a_k(&self, h: f64) -> Mat24 {
        self.a / (h * h * h)
    }

    /// Physical grad-curl norm matrix `A_K + C_K + M_K`.
    pub fn norm_k(&self, h: f64) -> Mat24 {
        self.a / (h * h * h) + self.c / h + self.m * h
    }
}

/// Global assembly over a uniform mesh.
pub struct Assembler<'a> {
    pub mesh: &'a BrickMesh,
    pub dofmap: &'a GlobalDofMap,
    pub locals: &'a LocalMatrices,
}

impl<'a> Assembler<'a> {
    pub fn new(mesh: &'a BrickMesh, dofmap: &'a GlobalDofMap, locals: &'a LocalMatrices) -> Self {
        Assembler { mesh, dofmap, locals }
    }

    fn assemble_vv(&self, local: &Mat24) -> CsrMatrix {
        let nv = self.dofmap.num_v();
        let mut t = Vec::with_capacity(self.mesh.num_cells() * 24 * 24);
        for cell in 0..self.mesh.num_cells() {
            let map = self.dofmap.cell_v(cell);
            for (i, gi) in map.iter().enumerate() {
                let Some(gi) = *gi else { continue };
                for (j, gj) in map.iter().enumerate() {
                    if let Some(gj) = *gj {
                        t.push((gi, gj, local[(i, j)]));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(nv, nv, &mut t)
    }

    /// `a_h(u, v) = sum_K (grad curl u, grad curl v)_K`.
    pub fn assemble_a(&self) -> CsrMatrix {
        self.assemble_vv(&self.locals.a_k(self.mesh.h()))
    }

    /// Broken `H(grad curl)` norm matrix, used by the preconditioner.
    pub fn assemble_norm_v(&self) -> CsrMatrix {
        self.assemble_vv(&self.locals.norm_k(self.mesh.h()))
    }

    /// `b(v, q) = (v, grad q)`, rows `V_h`, columns `Q_h`.
    pub fn assemble_b(&self) -> CsrMatrix {
        let h = self.mesh.h();
        let mut t = Vec::new();
        for cell in 0..self.mesh.num_cells() {
            let vm = self.dofmap.cell_v(cell);
            let qm = self.dofmap.cell_q(cell);
            for (i, gi) in vm.iter().enumerate() {
                let Some(gi) = *gi else { continue };
                for (k, gk) in qm.iter().enumerate() {
                    if let Some(gk) = *gk {
                        t.push((gi, gk, h * self.locals.b[(i, k)]));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.dofmap.num_v(), self.dofmap.num_q(), &mut t)
    }

    /// `Q_h` stiffness matrix.
    pub fn assemble_q_stiffness(&self) -> CsrMatrix {
        let h = self.mesh.h();
        let mut t = Vec::new();
        for cell in 0..self.mesh.num_cells() {
            let qm = self.dofmap.cell_q(cell);
            for (k, gk) in qm.iter().enumerate() {
                let Some(gk) = *gk else { continue };
                for (j, gj) in qm.iter().enumerate() {
                    if let Some(gj) = *gj {
                        t.push((gk, gj, h * self.locals.l[(k, j)]));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(self.dofmap.num_q(), self.dofmap.num_q(), &mut t)
    }

    /// Load vector on `V_h` by tensor Gauss quadrature. `vk_table` and
    /// `nedelec_table` must share their points.
    pub fn assemble_rhs<F>(&self, f: F, scheme: Scheme, vk_table: &BasisTable, nedelec_table: &BasisTable) -> Vec<f64>
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync,
    {
        let h = self.mesh.h();
        let (table, active) = match scheme {
            Scheme::Original => (vk_table, 24),
            Scheme::Modified => (nedelec_table, 12),
        };
        let locals: Vec<[f64; 24]> = (0..self.mesh.num_cells())
            .into_par_iter()
            .map(|cell| {
                let frame = self.mesh.cell_frame(cell);
                let mut out = [0.0; 24];
                for q in 0..table.num_points() {
                    let fx = f(frame.to_global(table.point(q)));
                    let w = table.weight(q);
                    for (i, o) in out.iter_mut().enumerate().take(active) {
                        let v = table.value(q, i);
                        *o += w * (fx[0] * v[0] + fx[1] * v[1] + fx[2] * v[2]);
                    }
                }
                out.map(|v| v * h * h)
            })
            .collect();
        let mut rhs = vec![0.0; self.dofmap.num_v()];
        for (cell, local) in locals.iter().enumerate() {
            for (i, gi) in self.dofmap.cell_v(cell).iter().enumerate() {
                if let Some(gi) = *gi {
                    rhs[gi] += local[i];
                }
            }
        }
        rhs
    }
}

/// The saddle-point system `[[A, B], [B^T, 0]] [u; p] = [F; 0]`.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub a: Arc<CsrMatrix>,
    pub b: Arc<CsrMatrix>,
    /// `V_h` part of the right-hand side; the `Q_h` part is zero.
    pub rhs_v: Vec<f64>,
}

impl SaddleSystem {
    pub fn nv(&self) -> usize {
        self.a.nrows()
    }

    pub fn nq(&self) -> usize {
        self.b.ncols()
    }

    pub fn dim(&self) -> usize {
        self.nv() + self.nq()
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.rhs_v.clone();
        r.resize(self.dim(), 0.0);
        r
    }

    /// `y = K z`.
    pub fn apply(&self, z: &[f64], y: &mut [f64]) {
        let nv = self.nv();
        let (zu, zp) = z.split_at(nv);
        let (yu, yp) = y.split_at_mut(nv);
        self.a.matvec(zu, yu);
        let mut bp = vec![0.0; nv];
        self.b.matvec(zp, &mut bp);
        for (y, v) in yu.iter_mut().zip(bp) {
            *y += v;
        }
        yp.iter_mut().for_each(|v| *v = 0.0);
        self.b.matvec_transpose_add(zu, yp);
    }

    /// `||b - K z|| / ||b||` (absolute residual when `b = 0`).
    pub fn relative_residual(&self, z: &[f64]) -> f64 {
        let mut kz = vec![0.0; self.dim()];
        self.apply(z, &mut kz);
        let b = self.rhs();
        let r: f64 = b.iter().zip(&kz).map(|(b, k)| (b - k).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bn > 0.0 {
            r / bn
        } else {
            r
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let nv = self.nv();
        let mut k = nalgebra::DMatrix::zeros(self.dim(), self.dim());
        k.view_mut((0, 0), (nv, nv)).copy_from(&self.a.to_dense());
        let b = self.b.to_dense();
        k.view_mut((0, nv), (nv, self.nq())).copy_from(&b);
        k.view_mut((nv, 0), (self.nq(), nv)).copy_from(&b.transpose());
        k
    }
}
