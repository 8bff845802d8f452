//! Saddle-point solvers.
//!
//! The iterative path is preconditioned MINRES with the block-diagonal
//! preconditioner `diag(P_V, L)`, where `P_V` is the broken grad-curl norm
//! matrix and `L` the `Q_h` stiffness matrix, both applied through sparse
//! Cholesky factorizations. MINRES is restarted from its last iterate until
//! the true Euclidean relative residual meets the tolerance.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::{MatMut, Side};

use crate::error::{Error, Result};

use super::assemble::SaddleSystem;
use super::dofmap::{DofTag, DofVector};
use super::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverParams {
    /// Target for `||b - K z|| / ||b||`.
    pub tol: f64,
    /// Total MINRES iterations over all restarts.
    pub max_iterations: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            tol: 1e-10,
            max_iterations: 20_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub u: DofVector,
    pub p: DofVector,
    pub iterations: usize,
    pub residual: f64,
}

fn factor(m: &CsrMatrix, what: &str) -> Result<Option<Llt<usize, f64>>> {
    if m.nrows() == 0 {
        return Ok(None);
    }
    let lower = m.to_faer_lower()?;
    lower
        .sp_cholesky(Side::Lower)
        .map(Some)
        .map_err(|e| Error::SingularSystem(format!("Cholesky factorization of {what} failed: {e:?}")))
}

/// `diag(P_V, L)^{-1}` via sparse Cholesky.
pub struct BlockPreconditioner {
    v: Option<Llt<usize, f64>>,
    q: Option<Llt<usize, f64>>,
    nv: usize,
    nq: usize,
}

impl BlockPreconditioner {
    pub fn new(norm_v: &CsrMatrix, stiffness_q: &CsrMatrix) -> Result<Self> {
        Ok(BlockPreconditioner {
            v: factor(norm_v, "the velocity norm matrix")?,
            q: factor(stiffness_q, "the pressure stiffness matrix")?,
            nv: norm_v.nrows(),
            nq: stiffness_q.nrows(),
        })
    }

    pub fn apply(&self, r: &[f64], out: &mut [f64]) {
        out.copy_from_slice(r);
        let (ou, op) = out.split_at_mut(self.nv);
        if let Some(v) = &self.v {
            v.solve_in_place(MatMut::from_column_major_slice_mut(ou, self.nv, 1));
        }
        if let Some(q) = &self.q {
            q.solve_in_place(MatMut::from_column_major_slice_mut(op, self.nq, 1));
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct MinresOutcome {
    iterations: usize,
}

/// One MINRES run from the current `x`, stopping when the preconditioned
/// residual estimate drops by `rtol` or after `max_iter` steps.
fn minres<A, M>(apply: A, precond: M, b: &[f64], x: &mut [f64], rtol: f64, max_iter: usize) -> Result<MinresOutcome>
where
    A: Fn(&[f64], &mut [f64]),
    M: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut r1 = vec![0.0; n];
    apply(x, &mut r1);
    for (r, bi) in r1.iter_mut().zip(b) {
        *r = bi - *r;
    }
    let mut y = vec![0.0; n];
    precond(&r1, &mut y);
    let beta1_sq = dot(&r1, &y);
    if beta1_sq < 0.0 || !beta1_sq.is_finite() {
        return Err(Error::SingularSystem("preconditioner is not positive definite".into()));
    }
    let beta1 = beta1_sq.sqrt();
    if beta1 == 0.0 {
        return Ok(MinresOutcome { iterations: 0 });
    }
    let mut r2 = r1.clone();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0_f64, 0.0_f64);
    let mut itn = 0;
    while itn < max_iter {
        itn += 1;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        apply(&v, &mut y);
        if itn >= 2 {
            let c = beta / oldb;
            for (yi, ri) in y.iter_mut().zip(&r1) {
                *yi -= c * ri;
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for (yi, ri) in y.iter_mut().zip(&r2) {
            *yi -= c * ri;
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        precond(&r2, &mut y);
        oldb = beta;
        let beta_sq = dot(&r2, &y);
        if beta_sq < 0.0 || !beta_sq.is_finite() {
            return Err(Error::SingularSystem("preconditioner is not positive definite".into()));
        }
        beta = beta_sq.sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        if phibar <= rtol * beta1 || beta == 0.0 {
            break;
        }
    }
    Ok(MinresOutcome { iterations: itn })
}

/// Solves `K z = b` for the saddle system to the Euclidean relative residual
/// `params.tol`.
pub fn solve_saddle(system: &SaddleSystem, precond: &BlockPreconditioner, params: &SolverParams) -> Result<SaddleSolution> {
    let nv = system.nv();
    let b = system.rhs();
    let mut z = vec![0.0; system.dim()];
    let mut total = 0;
    let mut residual = if b.iter().all(|v| *v == 0.0) { 0.0 } else { 1.0 };
    let mut rtol = params.tol * 0.1;
    while residual > params.tol {
        if total >= params.max_iterations {
            return Err(Error::MaxIterations {
                iterations: total,
                residual,
            });
        }
        let out = minres(
            |x, y| system.apply(x, y),
            |r, o| precond.apply(r, o),
            &b,
            &mut z,
            rtol,
            params.max_iterations - total,
        )?;
        total += out.iterations;
        let previous = residual;
        residual = system.relative_residual(&z);
        if !residual.is_finite() {
            return Err(Error::SingularSystem("non-finite residual".into()));
        }
        if (out.iterations == 0 || residual >= previous) && residual > params.tol {
            return Err(Error::MaxIterations {
                iterations: total,
                residual,
            });
        }
        rtol *= 0.1;
    }
    let p = z.split_off(nv);
    Ok(SaddleSolution {
        u: DofVector::new(z, DofTag::Velocity),
        p: DofVector::new(p, DofTag::Pressure),
        iterations: total,
        residual,
    })
}

/// Direct dense solve with full-pivoting LU; intended for small systems.
pub fn dense_solve(system: &SaddleSystem) -> Result<SaddleSolution> {
    let nv = system.nv();
    if system.dim() == 0 {
        return Ok(SaddleSolution {
            u: DofVector::zeros(0, DofTag::Velocity),
            p: DofVector::zeros(0, DofTag::Pressure),
            iterations: 0,
            residual: 0.0,
        });
    }
    let k = system.to_dense();
    let lu = k.full_piv_lu();
    if !lu.is_invertible() {
        return Err(Error::SingularSystem("dense saddle matrix is singular".into()));
    }
    let rhs = nalgebra::DVector::from_vec(system.rhs());
    let z = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("dense LU solve failed".into()))?;
    let mut z: Vec<f64> = z.iter().copied().collect();
    let residual = system.relative_residual(&z);
    let p = z.split_off(nv);
    Ok(SaddleSolution {
        u: DofVector::new(z, DofTag::Velocity),
        p: DofVector::new(p, DofTag::Pressure),
        iterations: 0,
        residual,
    })
}
