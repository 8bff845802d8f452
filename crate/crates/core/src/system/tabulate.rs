//! Basis values, curls and curl gradients at quadrature points.
//!
//! Tables are built in scaled variables once per run; on a uniform mesh they
//! serve every cell (or macroelement) after multiplication by powers of the
//! element size.

use crate::error::Result;
use crate::mesh::macro_cell_offset;
use crate::polyquad::{AxisBox, GaussRule, Poly, PolyField};

/// Values stored per point and basis function: value (3), curl (3) and
/// `grad curl` (9, `[i][j] = d_j curl_i`).
pub const QUANTITIES: usize = 15;

#[derive(Clone, Debug)]
pub struct BasisTable {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    nbasis: usize,
    data: Vec<f64>,
}

impl BasisTable {
    /// Tabulates `fields` (scaled variables) at the given points.
    pub fn new(fields: &[PolyField], points: Vec<[f64; 3]>, weights: Vec<f64>) -> Self {
        let polys: Vec<Vec<Poly>> = fields
            .iter()
            .map(|f| {
                let curl = f.curl();
                let mut out: Vec<Poly> = f.comps.to_vec();
                out.extend(curl.comps.iter().cloned());
                for i in 0..3 {
                    for j in 0..3 {
                        out.push(curl.partial(i, j));
                    }
                }
                out
            })
            .collect();
        let max_deg = polys
            .iter()
            .flatten()
            .map(|p| (0..3).map(|a| p.max_degree(a)).max().unwrap_or(0))
            .max()
            .unwrap_or(0) as usize;
        let nbasis = fields.len();
        let mut data = Vec::with_capacity(points.len() * nbasis * QUANTITIES);
        for p in &points {
            let powers: [Vec<f64>; 3] =
                std::array::from_fn(|a| (0..=max_deg).map(|k| p[a].powi(k as i32)).collect());
            for basis in &polys {
                data.extend(basis.iter().map(|q| q.eval_powers(&powers)));
            }
        }
        BasisTable {
            points,
            weights,
            nbasis,
            data,
        }
    }

    /// Tensor Gauss points of the reference cell (weights sum to 1).
    pub fn on_cell(fields: &[PolyField], quad_order: usize) -> Result<Self> {
        let rule = GaussRule::new(quad_order)?;
        let (points, weights) = rule.tensor(&AxisBox::reference()).into_iter().unzip();
        Ok(BasisTable::new(fields, points, weights))
    }

    /// Gauss points of the 27 fine cells of the reference macroelement, fine
    /// cell by fine cell in macroelement order (weights sum to 1).
    pub fn on_macro(fields: &[PolyField], quad_order: usize) -> Result<Self> {
        let rule = GaussRule::new(quad_order)?;
        let cell = rule.tensor(&AxisBox::reference());
        let mut points = Vec::with_capacity(27 * cell.len());
        let mut weights = Vec::with_capacity(27 * cell.len());
        for local in 0..27 {
            let off = macro_cell_offset(local);
            for (x, w) in &cell {
                points.push(std::array::from_fn(|a| ((off[a] as f64 + 0.5) + x[a]) / 3.0 - 0.5));
                weights.push(w / 27.0);
            }
        }
        Ok(BasisTable::new(fields, points, weights))
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points_per_cell(&self, cells: usize) -> usize {
        self.points.len() / cells
    }

    pub fn nbasis(&self) -> usize {
        self.nbasis
    }

    pub fn point(&self, q: usize) -> [f64; 3] {
        self.points[q]
    }

    pub fn weight(&self, q: usize) -> f64 {
        self.weights[q]
    }

    /// The 15 tabulated quantities of basis `j` at point `q`.
    pub fn entry(&self, q: usize, j: usize) -> &[f64] {
        let start = (q * self.nbasis + j) * QUANTITIES;
        &self.data[start..start + QUANTITIES]
    }

    pub fn value(&self, q: usize, j: usize) -> [f64; 3] {
        let e = self.entry(q, j);
        [e[0], e[1], e[2]]
    }

    /// `sum_j c_j * quantity_j(point q)` with separate scale factors for the
    /// value, curl and curl-gradient blocks.
    pub fn combine(&self, q: usize, coeffs: &[f64], scales: [f64; 3]) -> [f64; QUANTITIES] {
        debug_assert_eq!(coeffs.len(), self.nbasis);
        let mut out = [0.0; QUANTITIES];
        let base = q * self.nbasis * QUANTITIES;
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let e = &self.data[base + j * QUANTITIES..base + (j + 1) * QUANTITIES];
            for k in 0..QUANTITIES {
                out[k] += c * e[k];
            }
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o *= scales[block_of(k)];
        }
        out
    }
}

fn block_of(k: usize) -> usize {
    match k {
        0..=2 => 0,
        3..=5 => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyquad::{Frame, Monomial};

    #[test]
    fn table_matches_direct_evaluation() {
        let f = PolyField::new(
            [
                Poly::monomial(Monomial::new(0, 2, 1), 1.5),
                Poly::monomial(Monomial::new(1, 0, 3), -0.5),
                Poly::monomial(Monomial::new(2, 1, 0), 2.0),
            ],
            Frame::reference(),
        );
        let t = BasisTable::on_macro(std::slice::from_ref(&f), 2).unwrap();
        assert_eq!(t.num_points(), 27 * 8);
        let total: f64 = (0..t.num_points()).map(|q| t.weight(q)).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let curl = f.curl();
        for q in [0, 17, 100, 215] {
            let x = t.point(q);
            let e = t.entry(q, 0);
            let v = f.eval(x);
            let c = curl.eval(x);
            for k in 0..3 {
                assert!((e[k] - v[k]).abs() < 1e-14);
                assert!((e[3 + k] - c[k]).abs() < 1e-14);
            }
            let g = curl.partial(1, 2).eval(x);
            assert!((e[6 + 3 + 2] - g).abs() < 1e-14);
        }
    }
}
