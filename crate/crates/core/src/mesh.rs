//! Uniform brick partition of the unit cube.
//!
//! Entities are addressed by integer lattice coordinates:
//!
//! * vertex `(i, j, k)` with every coordinate in `0..=n`,
//! * cell `(i, j, k)` with every coordinate in `0..n` (lower corner at vertex `(i, j, k)`),
//! * edge along `axis` starting at vertex `l`: `l[axis] < n`, others `<= n`,
//! * face with normal `axis` and lower corner at vertex `l`: `l[axis] <= n`, others `< n`.
//!
//! Flat indices are lexicographic with the first coordinate slowest. Edges and
//! faces are grouped by axis. Edge tangents and face normals always point in
//! the positive axis direction; a face with normal `a` has tangents along the
//! remaining two axes in ascending order.

use crate::error::{Error, Result};
use crate::polyquad::{AxisBox, Frame};

pub type Lattice = [usize; 3];

/// The two axes other than `axis`, ascending.
pub fn other_axes(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        2 => (0, 1),
        _ => panic!("axis out of range: {axis}"),
    }
}

fn add(a: Lattice, b: Lattice) -> Lattice {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn lex(l: Lattice, dims: [usize; 3]) -> usize {
    (l[0] * dims[1] + l[1]) * dims[2] + l[2]
}

fn unlex(mut idx: usize, dims: [usize; 3]) -> Lattice {
    let k = idx % dims[2];
    idx /= dims[2];
    let j = idx % dims[1];
    [idx / dims[1], j, k]
}

/// Local edge `4 * axis + 2 * s + t` of a cell runs along `axis`, offset by
/// `s` along the lower and `t` along the higher of the other two axes.
pub fn local_edges() -> [(usize, Lattice); 12] {
    std::array::from_fn(|e| {
        let axis = e / 4;
        let (b, c) = other_axes(axis);
        let mut off = [0; 3];
        off[b] = (e / 2) % 2;
        off[c] = e % 2;
        (axis, off)
    })
}

/// Local face `2 * axis + side`.
pub fn local_faces() -> [(usize, usize); 6] {
    std::array::from_fn(|f| (f / 2, f % 2))
}

/// Local vertex `4 * s0 + 2 * s1 + s2`.
pub fn local_vertices() -> [Lattice; 8] {
    std::array::from_fn(|v| [v / 4, (v / 2) % 2, v % 2])
}

/// Fine edges of a 3x3x3 block in canonical order: grouped by axis, then
/// lexicographic in block-local lattice coordinates.
pub fn macro_edge_layout() -> Vec<(usize, Lattice)> {
    let mut out = Vec::with_capacity(144);
    for axis in 0..3 {
        let mut dims = [4; 3];
        dims[axis] = 3;
        for idx in 0..dims.iter().product::<usize>() {
            out.push((axis, unlex(idx, dims)));
        }
    }
    out
}

/// Fine faces of a 3x3x3 block in canonical order.
pub fn macro_face_layout() -> Vec<(usize, Lattice)> {
    let mut out = Vec::with_capacity(108);
    for axis in 0..3 {
        let mut dims = [3; 3];
        dims[axis] = 4;
        for idx in 0..dims.iter().product::<usize>() {
            out.push((axis, unlex(idx, dims)));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrickMesh {
    n: usize,
    h_axis: [f64; 3],
}

/// Boundary flags for every entity, indexed by flat entity index.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFlags {
    pub vertices: Vec<bool>,
    pub edges: Vec<bool>,
    pub faces: Vec<bool>,
}

impl BoundaryFlags {
    pub fn interior_vertices(&self) -> usize {
        self.vertices.iter().filter(|b| !**b).count()
    }

    pub fn interior_edges(&self) -> usize {
        self.edges.iter().filter(|b| !**b).count()
    }

    pub fn interior_faces(&self) -> usize {
        self.faces.iter().filter(|b| !**b).count()
    }
}

impl BrickMesh {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMesh);
        }
        let h = 1.0 / n as f64;
        Ok(BrickMesh { n, h_axis: [h; 3] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_axis(&self) -> [f64; 3] {
        self.h_axis
    }

    /// Edge length, identical along all axes.
    pub fn h(&self) -> f64 {
        self.h_axis[0]
    }

    /// Cell diagonal `sqrt(h1^2 + h2^2 + h3^2)`.
    pub fn h_diag(&self) -> f64 {
        self.h_axis.iter().map(|h| h * h).sum::<f64>().sqrt()
    }

    pub fn num_cells(&self) -> usize {
        self.n.pow(3)
    }

    pub fn num_vertices(&self) -> usize {
        (self.n + 1).pow(3)
    }

    pub fn edges_per_axis(&self) -> usize {
        self.n * (self.n + 1).pow(2)
    }

    pub fn faces_per_axis(&self) -> usize {
        self.n.pow(2) * (self.n + 1)
    }

    pub fn num_edges(&self) -> usize {
        3 * self.edges_per_axis()
    }

    pub fn num_faces(&self) -> usize {
        3 * self.faces_per_axis()
    }

    fn edge_dims(&self, axis: usize) -> [usize; 3] {
        let mut d = [self.n + 1; 3];
        d[axis] = self.n;
        d
    }

    fn face_dims(&self, axis: usize) -> [usize; 3] {
        let mut d = [self.n; 3];
        d[axis] = self.n + 1;
        d
    }

    pub fn vertex_index(&self, l: Lattice) -> usize {
        lex(l, [self.n + 1; 3])
    }

    pub fn vertex_lattice(&self, idx: usize) -> Lattice {
        unlex(idx, [self.n + 1; 3])
    }

    pub fn cell_index(&self, l: Lattice) -> usize {
        lex(l, [self.n; 3])
    }

    pub fn cell_lattice(&self, idx: usize) -> Lattice {
        unlex(idx, [self.n; 3])
    }

    pub fn edge_index(&self, axis: usize, l: Lattice) -> usize {
        axis * self.edges_per_axis() + lex(l, self.edge_dims(axis))
    }

    pub fn edge_lattice(&self, idx: usize) -> (usize, Lattice) {
        let axis = idx / self.edges_per_axis();
        (axis, unlex(idx % self.edges_per_axis(), self.edge_dims(axis)))
    }

    pub fn face_index(&self, axis: usize, l: Lattice) -> usize {
        axis * self.faces_per_axis() + lex(l, self.face_dims(axis))
    }

    pub fn face_lattice(&self, idx: usize) -> (usize, Lattice) {
        let axis = idx / self.faces_per_axis();
        (axis, unlex(idx % self.faces_per_axis(), self.face_dims(axis)))
    }

    fn on_boundary(&self, c: usize) -> bool {
        c == 0 || c == self.n
    }

    pub fn is_boundary_vertex(&self, idx: usize) -> bool {
        self.vertex_lattice(idx).iter().any(|&c| self.on_boundary(c))
    }

    pub fn is_boundary_edge(&self, idx: usize) -> bool {
        let (axis, l) = self.edge_lattice(idx);
        let (b, c) = other_axes(axis);
        self.on_boundary(l[b]) || self.on_boundary(l[c])
    }

    pub fn is_boundary_face(&self, idx: usize) -> bool {
        let (axis, l) = self.face_lattice(idx);
        self.on_boundary(l[axis])
    }

    pub fn classify_boundary(&self) -> BoundaryFlags {
        BoundaryFlags {
            vertices: (0..self.num_vertices()).map(|v| self.is_boundary_vertex(v)).collect(),
            edges: (0..self.num_edges()).map(|e| self.is_boundary_edge(e)).collect(),
            faces: (0..self.num_faces()).map(|f| self.is_boundary_face(f)).collect(),
        }
    }

    /// Global edges of a cell in local edge order.
    pub fn cell_edges(&self, cell: usize) -> [usize; 12] {
        let base = self.cell_lattice(cell);
        let layout = local_edges();
        std::array::from_fn(|e| {
            let (axis, off) = layout[e];
            self.edge_index(axis, add(base, off))
        })
    }

    /// Global faces of a cell in local face order.
    pub fn cell_faces(&self, cell: usize) -> [usize; 6] {
        let base = self.cell_lattice(cell);
        std::array::from_fn(|f| {
            let (axis, side) = local_faces()[f];
            let mut l = base;
            l[axis] += side;
            self.face_index(axis, l)
        })
    }

    pub fn cell_vertices(&self, cell: usize) -> [usize; 8] {
        let base = self.cell_lattice(cell);
        let layout = local_vertices();
        std::array::from_fn(|v| self.vertex_index(add(base, layout[v])))
    }

    pub fn vertex_coords(&self, idx: usize) -> [f64; 3] {
        let l = self.vertex_lattice(idx);
        std::array::from_fn(|a| l[a] as f64 * self.h_axis[a])
    }

    pub fn cell_frame(&self, cell: usize) -> Frame {
        let l = self.cell_lattice(cell);
        Frame::new(
            std::array::from_fn(|a| (l[a] as f64 + 0.5) * self.h_axis[a]),
            self.h_axis,
        )
    }

    pub fn cell_box(&self, cell: usize) -> AxisBox {
        let l = self.cell_lattice(cell);
        AxisBox::new(
            std::array::from_fn(|a| l[a] as f64 * self.h_axis[a]),
            std::array::from_fn(|a| (l[a] + 1) as f64 * self.h_axis[a]),
        )
    }

    pub fn edge_box(&self, idx: usize) -> AxisBox {
        let (axis, l) = self.edge_lattice(idx);
        let lo: [f64; 3] = std::array::from_fn(|a| l[a] as f64 * self.h_axis[a]);
        let mut hi = lo;
        hi[axis] += self.h_axis[axis];
        AxisBox::new(lo, hi)
    }

    pub fn face_box(&self, idx: usize) -> AxisBox {
        let (axis, l) = self.face_lattice(idx);
        let lo: [f64; 3] = std::array::from_fn(|a| l[a] as f64 * self.h_axis[a]);
        let mut hi = lo;
        let (b, c) = other_axes(axis);
        hi[b] += self.h_axis[b];
        hi[c] += self.h_axis[c];
        AxisBox::new(lo, hi)
    }

    pub fn macro_partition(&self) -> Result<MacroPartition> {
        MacroPartition::new(self)
    }
}

/// One 3x3x3 block of cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Macroelement {
    pub lattice: Lattice,
    pub cells: Vec<usize>,
    /// Fine edges in [`macro_edge_layout`] order.
    pub edges: Vec<usize>,
    /// Fine faces in [`macro_face_layout`] order.
    pub faces: Vec<usize>,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacroPartition {
    pub macros: Vec<Macroelement>,
}

impl MacroPartition {
    pub fn new(mesh: &BrickMesh) -> Result<Self> {
        let n = mesh.n();
        if !n.is_multiple_of(3) {
            return Err(Error::NonDivisibleMesh { n });
        }
        let m = n / 3;
        let edge_layout = macro_edge_layout();
        let face_layout = macro_face_layout();
        let h = mesh.h_axis();
        let mut macros = Vec::with_capacity(m.pow(3));
        for idx in 0..m.pow(3) {
            let ml = unlex(idx, [m; 3]);
            let base = [3 * ml[0], 3 * ml[1], 3 * ml[2]];
            let cells = (0..27)
                .map(|c| mesh.cell_index(add(base, unlex(c, [3; 3]))))
                .collect();
            let edges = edge_layout
                .iter()
                .map(|&(axis, l)| mesh.edge_index(axis, add(base, l)))
                .collect();
            let faces = face_layout
                .iter()
                .map(|&(axis, l)| mesh.face_index(axis, add(base, l)))
                .collect();
            let frame = Frame::new(
                std::array::from_fn(|a| (base[a] as f64 + 1.5) * h[a]),
                std::array::from_fn(|a| 3.0 * h[a]),
            );
            macros.push(Macroelement {
                lattice: ml,
                cells,
                edges,
                faces,
                frame,
            });
        }
        Ok(MacroPartition { macros })
    }

    pub fn len(&self) -> usize {
        self.macros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.macros.is_empty()
    }
}

/// Position of a fine cell inside its macroelement, in cell-size units.
pub fn macro_cell_offset(local: usize) -> Lattice {
    unlex(local, [3; 3])
}
