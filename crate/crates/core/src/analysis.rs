//! Error norms, convergence orders and report serialization.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::MacroField;
use crate::mesh::BrickMesh;
use crate::mms::ExactFields;
use crate::system::{BasisTable, DofVector, GlobalDofMap, LocalMatrices, Scheme};

/// `(|curl_h e|_{1,h}, ||curl_h e||_0, ||e||_0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorTriple {
    pub grad_curl: f64,
    pub curl: f64,
    pub l2: f64,
}

impl ErrorTriple {
    pub fn from_squares(sq: [f64; 3]) -> Self {
        ErrorTriple {
            grad_curl: sq[0].max(0.0).sqrt(),
            curl: sq[1].max(0.0).sqrt(),
            l2: sq[2].max(0.0).sqrt(),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.grad_curl, self.curl, self.l2]
    }
}

/// What a report measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `u - u_h`.
    Error,
    /// `I_h u - u_h`.
    Superclose,
    /// `u - I_{3h} u_h`.
    Superconvergent,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Error => "errors",
            Quantity::Superclose => "superclose",
            Quantity::Superconvergent => "superconv",
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Quantity::Error => "u - u_h",
            Quantity::Superclose => "I_h u - u_h",
            Quantity::Superconvergent => "u - I_3h u_h",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `log(e1 / e2) / log(n2 / n1)` for every column of consecutive rows.
pub fn compute_eoc(rows: &[(usize, ErrorTriple)]) -> Result<Vec<[f64; 3]>> {
    for (_, e) in rows {
        for v in e.as_array() {
            if !(v > 0.0) {
                return Err(Error::DegenerateError { value: v });
            }
        }
    }
    Ok(rows
        .windows(2)
        .map(|w| {
            let (n1, e1) = (w[0].0 as f64, w[0].1.as_array());
            let (n2, e2) = (w[1].0 as f64, w[1].1.as_array());
            std::array::from_fn(|k| (e1[k] / e2[k]).ln() / (n2 / n1).ln())
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub quantity: Quantity,
    pub rows: Vec<(usize, ErrorTriple)>,
}

impl ConvergenceReport {
    pub fn new(scheme: Scheme, quantity: Quantity) -> Self {
        ConvergenceReport {
            scheme,
            quantity,
            rows: Vec::new(),
        }
    }

    /// Orders aligned with `rows`; the first row has none. Columns whose
    /// orders cannot be formed (non-positive errors) are left empty.
    pub fn eoc(&self) -> Vec<[Option<f64>; 3]> {
        let mut out = vec![[None; 3]; self.rows.len()];
        for i in 1..self.rows.len() {
            let (n1, e1) = (self.rows[i - 1].0 as f64, self.rows[i - 1].1.as_array());
            let (n2, e2) = (self.rows[i].0 as f64, self.rows[i].1.as_array());
            for k in 0..3 {
                if e1[k] > 0.0 && e2[k] > 0.0 {
                    out[i][k] = Some((e1[k] / e2[k]).ln() / (n2 / n1).ln());
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,err1,eoc1,err2,eoc2,err3,eoc3\n");
        for ((n, e), eoc) in self.rows.iter().zip(self.eoc()) {
            let _ = write!(s, "{n}");
            for (v, o) in e.as_array().iter().zip(eoc) {
                let _ = write!(s, ",{v:.6e},");
                if let Some(o) = o {
                    let _ = write!(s, "{o:.4}");
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let q = self.quantity.symbol();
        let headers = [
            "n".to_string(),
            format!("|curl_h({q})|_1,h"),
            "order".to_string(),
            format!("||curl_h({q})||_0"),
            "order".to_string(),
            format!("||{q}||_0"),
            "order".to_string(),
        ];
        let mut cells: Vec<Vec<String>> = Vec::new();
        for ((n, e), eoc) in self.rows.iter().zip(self.eoc()) {
            let mut row = vec![n.to_string()];
            for (v, o) in e.as_array().iter().zip(eoc) {
                row.push(format!("{v:.3E}"));
                row.push(o.map_or("-".to_string(), |o| format!("{o:.2}")));
            }
            cells.push(row);
        }
        let widths: Vec<usize> = (0..headers.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([headers[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |row: &[String]| -> String {
            let parts: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            format!("| {} |\n", parts.join(" | "))
        };
        let mut s = format!("### {} scheme, {}\n\n", self.scheme, self.quantity);
        s.push_str(&line(&headers));
        let rule: Vec<String> = widths.iter().map(|w| format!("{}:", "-".repeat(w.saturating_sub(1).max(1)))).collect();
        s.push_str(&format!("| {} |\n", rule.join(" | ")));
        for r in &cells {
            s.push_str(&line(r));
        }
        s
    }
}

fn sum_in_order(parts: Vec<[f64; 3]>) -> [f64; 3] {
    parts.into_iter().fold([0.0; 3], |acc, p| [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]])
}

fn squared_errors(exact: &ExactFields, x: [f64; 3], disc: &[f64; 15]) -> [f64; 3] {
    let s = exact.sample(x);
    let mut sq = [0.0; 3];
    for i in 0..3 {
        sq[2] += (s.u[i] - disc[i]).powi(2);
        sq[1] += (s.curl[i] - disc[3 + i]).powi(2);
        for j in 0..3 {
            sq[0] += (s.grad_curl[i][j] - disc[6 + 3 * i + j]).powi(2);
        }
    }
    sq
}

/// `u - u_h` by per-cell Gauss quadrature; `vk_table` is the `V_K` dual
/// basis tabulated on the reference cell.
pub fn error_vs_exact(
    u_h: &DofVector,
    exact: &ExactFields,
    mesh: &BrickMesh,
    dofmap: &GlobalDofMap,
    vk_table: &BasisTable,
) -> ErrorTriple {
    let h = mesh.h();
    let scales = [1.0 / h, 1.0 / (h * h), 1.0 / (h * h * h)];
    let jac = h * h * h;
    let parts: Vec<[f64; 3]> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let frame = mesh.cell_frame(cell);
            let c = dofmap.gather_v(u_h, cell);
            let mut acc = [0.0; 3];
            for q in 0..vk_table.num_points() {
                let disc = vk_table.combine(q, &c, scales);
                let sq = squared_errors(exact, frame.to_global(vk_table.point(q)), &disc);
                let w = vk_table.weight(q) * jac;
                for k in 0..3 {
                    acc[k] += w * sq[k];
                }
            }
            acc
        })
        .collect();
    ErrorTriple::from_squares(sum_in_order(parts))
}

/// Norms of `a - b` for two `V_h` functions by exact integration with the
/// local reference matrices.
pub fn discrete_difference(a: &DofVector, b: &DofVector, mesh: &BrickMesh, dofmap: &GlobalDofMap, locals: &LocalMatrices) -> ErrorTriple {
    let h = mesh.h();
    let d = a.sub(b);
    let parts: Vec<[f64; 3]> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let v = nalgebra::SVector::<f64, 24>::from(dofmap.gather_v(&d, cell));
            [
                v.dot(&(locals.a * v)) / (h * h * h),
                v.dot(&(locals.c * v)) / h,
                v.dot(&(locals.m * v)) * h,
            ]
        })
        .collect();
    ErrorTriple::from_squares(sum_in_order(parts))
}

/// `I_h u - u_h` measured exactly in coefficient space.
pub fn superclose_error(ih_u: &DofVector, u_h: &DofVector, mesh: &BrickMesh, dofmap: &GlobalDofMap, locals: &LocalMatrices) -> ErrorTriple {
    discrete_difference(ih_u, u_h, mesh, dofmap, locals)
}

/// `u - I_{3h} u_h` by Gauss quadrature on every fine cell; `vm_table` is the
/// `V_M` dual basis tabulated by [`BasisTable::on_macro`].
pub fn superconvergent_error(field: &MacroField, exact: &ExactFields, vm_table: &BasisTable) -> ErrorTriple {
    let parts: Vec<[f64; 3]> = (0..field.frames.len())
        .into_par_iter()
        .map(|m| {
            let frame = field.frames[m];
            let big = frame.size[0];
            let scales = [1.0 / big, 1.0 / (big * big), 1.0 / (big * big * big)];
            let jac = frame.jacobian();
            let mut acc = [0.0; 3];
            for q in 0..vm_table.num_points() {
                let disc = vm_table.combine(q, &field.dofs[m], scales);
                let sq = squared_errors(exact, frame.to_global(vm_table.point(q)), &disc);
                let w = vm_table.weight(q) * jac;
                for k in 0..3 {
                    acc[k] += w * sq[k];
                }
            }
            acc
        })
        .collect();
    ErrorTriple::from_squares(sum_in_order(parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(v: f64) -> ErrorTriple {
        ErrorTriple {
            grad_curl: v,
            curl: v,
            l2: v,
        }
    }

    #[test]
    fn eoc_exact_ratio() {
        let eoc = compute_eoc(&[(6, triple(4.0)), (12, triple(1.0))]).unwrap();
        for v in eoc[0] {
            assert!((v - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eoc_first_order_data() {
        let rows: Vec<_> = [6, 12, 18, 24].iter().map(|&n| (n, triple(3.7 / n as f64))).collect();
        for row in compute_eoc(&rows).unwrap() {
            for v in row {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eoc_rejects_zero() {
        let err = compute_eoc(&[(6, triple(0.0)), (12, triple(1.0))]).unwrap_err();
        assert!(matches!(err, Error::DegenerateError { .. }));
    }

    #[test]
    fn csv_layout() {
        let mut r = ConvergenceReport::new(Scheme::Modified, Quantity::Error);
        r.rows.push((6, triple(4.0)));
        r.rows.push((12, triple(1.0)));
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,err1,eoc1,err2,eoc2,err3,eoc3");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 7);
        assert!(lines[2].ends_with(",2.0000"));
        let md = r.to_markdown();
        assert!(md.contains("2.00"));
    }
}
