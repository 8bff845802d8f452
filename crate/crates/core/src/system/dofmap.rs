//! Global numbering of interior degrees of freedom.

use crate::mesh::BrickMesh;

/// Which discrete space a coefficient vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofTag {
    Velocity,
    Pressure,
}

/// Coefficients of a discrete function in its global DoF numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct DofVector {
    pub values: Vec<f64>,
    pub tag: DofTag,
}

impl DofVector {
    pub fn new(values: Vec<f64>, tag: DofTag) -> Self {
        DofVector { values, tag }
    }

    pub fn zeros(len: usize, tag: DofTag) -> Self {
        DofVector {
            values: vec![0.0; len],
            tag,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &DofVector) -> DofVector {
        debug_assert_eq!(self.len(), other.len());
        DofVector {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            tag: self.tag,
        }
    }
}

/// DoF numbering of `V_h` and `Q_h`.
///
/// `V_h`: interior edges in global edge order, followed by two DoFs per
/// interior face (tangents in ascending axis order). `Q_h`: interior vertices.
#[derive(Clone, Debug)]
pub struct GlobalDofMap {
    edge_dof: Vec<Option<usize>>,
    face_dof: Vec<Option<usize>>,
    vertex_dof: Vec<Option<usize>>,
    num_edge_dofs: usize,
    num_v: usize,
    num_q: usize,
    cell_v: Vec<[Option<usize>; 24]>,
    cell_q: Vec<[Option<usize>; 8]>,
}

impl GlobalDofMap {
    pub fn new(mesh: &BrickMesh) -> Self {
        let flags = mesh.classify_boundary();
        let mut next = 0;
        let edge_dof: Vec<Option<usize>> = flags
            .edges
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let num_edge_dofs = next;
        let face_dof: Vec<Option<usize>> = flags
            .faces
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 2;
                    next - 2
                })
            })
            .collect();
        let num_v = next;
        let mut nq = 0;
        let vertex_dof: Vec<Option<usize>> = flags
            .vertices
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    nq += 1;
                    nq - 1
                })
            })
            .collect();
        let cell_v = (0..mesh.num_cells())
            .map(|c| {
                let mut m = [None; 24];
                for (k, e) in mesh.cell_edges(c).into_iter().enumerate() {
                    m[k] = edge_dof[e];
                }
                for (f, face) in mesh.cell_faces(c).into_iter().enumerate() {
                    if let Some(first) = face_dof[face] {
                        m[12 + 2 * f] = Some(first);
                        m[12 + 2 * f + 1] = Some(first + 1);
                    }
                }
                m
            })
            .collect();
        let cell_q = (0..mesh.num_cells())
            .map(|c| {
                let mut m = [None; 8];
                for (k, v) in mesh.cell_vertices(c).into_iter().enumerate() {
                    m[k] = vertex_dof[v];
                }
                m
            })
            .collect();
        GlobalDofMap {
            edge_dof,
            face_dof,
            vertex_dof,
            num_edge_dofs,
            num_v,
            num_q: nq,
            cell_v,
            cell_q,
        }
    }

    pub fn num_v(&self) -> usize {
        self.num_v
    }

    pub fn num_q(&self) -> usize {
        self.num_q
    }

    pub fn num_edge_dofs(&self) -> usize {
        self.num_edge_dofs
    }

    /// Global edge -> `V_h` DoF, `None` on the boundary.
    pub fn edge_dofs(&self) -> &[Option<usize>] {
        &self.edge_dof
    }

    /// Global face -> first of its two `V_h` DoFs, `None` on the boundary.
    pub fn face_dofs(&self) -> &[Option<usize>] {
        &self.face_dof
    }

    pub fn vertex_dofs(&self) -> &[Option<usize>] {
        &self.vertex_dof
    }

    /// Local `V_K` index -> global DoF for one cell.
    pub fn cell_v(&self, cell: usize) -> &[Option<usize>; 24] {
        &self.cell_v[cell]
    }

    pub fn cell_q(&self, cell: usize) -> &[Option<usize>; 8] {
        &self.cell_q[cell]
    }

    /// Local DoF values of a `V_h` function on one cell; boundary DoFs are 0.
    pub fn gather_v(&self, u: &DofVector, cell: usize) -> [f64; 24] {
        self.cell_v[cell].map(|g| g.map_or(0.0, |i| u.values[i]))
    }

    pub fn gather_q(&self, p: &DofVector, cell: usize) -> [f64; 8] {
        self.cell_q[cell].map(|g| g.map_or(0.0, |i| p.values[i]))
    }
}

/// DoF numbering of `W_h`: three DoFs per interior face (two tangential,
/// then normal).
#[derive(Clone, Debug)]
pub struct FaceDofMap {
    face_dof: Vec<Option<usize>>,
    len: usize,
    cell_w: Vec<[Option<usize>; 18]>,
}

impl FaceDofMap {
    pub fn new(mesh: &BrickMesh) -> Self {
        let flags = mesh.classify_boundary();
        let mut next = 0;
        let face_dof: Vec<Option<usize>> = flags
            .faces
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 3;
                    next - 3
                })
            })
            .collect();
        let cell_w = (0..mesh.num_cells())
            .map(|c| {
                let mut m = [None; 18];
                for (f, face) in mesh.cell_faces(c).into_iter().enumerate() {
                    if let Some(first) = face_dof[face] {
                        for j in 0..3 {
                            m[3 * f + j] = Some(first + j);
                        }
                    }
                }
                m
            })
            .collect();
        FaceDofMap {
            face_dof,
            len: next,
            cell_w,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn face_dofs(&self) -> &[Option<usize>] {
        &self.face_dof
    }

    pub fn cell_w(&self, cell: usize) -> &[Option<usize>; 18] {
        &self.cell_w[cell]
    }

    pub fn gather(&self, w: &[f64], cell: usize) -> [f64; 18] {
        self.cell_w[cell].map(|g| g.map_or(0.0, |i| w[i]))
    }
}
