//! Structured hexahedral box mesh with lexicographic numbering (x fastest).
//!
//! Edges are numbered x-edges first, then y-edges, then z-edges. Every edge
//! points along its positive axis, which is also lower-to-higher vertex id.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxMesh {
    n: [usize; 3],
    lengths: [f64; 3],
    h: [f64; 3],
}

impl BoxMesh {
    pub fn new(nx: usize, ny: usize, nz: usize, lx: f64, ly: f64, lz: f64) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidInput(format!("mesh cell counts must be ≥ 1, got {nx}×{ny}×{nz}")));
        }
        if !(lx > 0.0 && ly > 0.0 && lz > 0.0) {
            return Err(Error::InvalidInput(format!("domain lengths must be > 0, got {lx}×{ly}×{lz}")));
        }
        let n = [nx, ny, nz];
        let lengths = [lx, ly, lz];
        let h = [lx / nx as f64, ly / ny as f64, lz / nz as f64];
        Ok(Self { n, lengths, h })
    }

    pub fn unit_cube(n: usize) -> Result<Self> {
        Self::new(n, n, n, 1.0, 1.0, 1.0)
    }

    pub fn cells_per_axis(&self) -> [usize; 3] {
        self.n
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn h(&self) -> [f64; 3] {
        self.h
    }

    pub fn h_min(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn n_cells(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn n_vertices(&self) -> usize {
        (self.n[0] + 1) * (self.n[1] + 1) * (self.n[2] + 1)
    }

    /// Number of edges parallel to `axis`.
    pub fn n_edges_along(&self, axis: Axis) -> usize {
        let mut c = 1;
        for d in 0..3 {
            c *= if d == axis.index() { self.n[d] } else { self.n[d] + 1 };
        }
        c
    }

    pub fn n_edges(&self) -> usize {
        Axis::ALL.iter().map(|&a| self.n_edges_along(a)).sum()
    }

    /// Number of faces normal to `axis`.
    pub fn n_faces_normal(&self, axis: Axis) -> usize {
        let mut c = 1;
        for d in 0..3 {
            c *= if d == axis.index() { self.n[d] + 1 } else { self.n[d] };
        }
        c
    }

    pub fn n_faces(&self) -> usize {
        Axis::ALL.iter().map(|&a| self.n_faces_normal(a)).sum()
    }

    pub fn cell_id(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    pub fn cell_ijk(&self, c: usize) -> [usize; 3] {
        let i = c % self.n[0];
        let r = c / self.n[0];
        [i, r % self.n[1], r / self.n[1]]
    }

    pub fn cell_centroid(&self, c: usize) -> [f64; 3] {
        let ijk = self.cell_ijk(c);
        [0, 1, 2].map(|d| (ijk[d] as f64 + 0.5) * self.h[d])
    }

    pub fn vertex_id(&self, i: usize, j: usize, k: usize) -> usize {
        i + (self.n[0] + 1) * (j + (self.n[1] + 1) * k)
    }

    pub fn vertex_ijk(&self, v: usize) -> [usize; 3] {
        let i = v % (self.n[0] + 1);
        let r = v / (self.n[0] + 1);
        [i, r % (self.n[1] + 1), r / (self.n[1] + 1)]
    }

    pub fn vertex_coords(&self, v: usize) -> [f64; 3] {
        let ijk = self.vertex_ijk(v);
        [0, 1, 2].map(|d| ijk[d] as f64 * self.h[d])
    }

    pub fn vertex_on_boundary(&self, v: usize) -> bool {
        let ijk = self.vertex_ijk(v);
        (0..3).any(|d| ijk[d] == 0 || ijk[d] == self.n[d])
    }

    fn edge_offset(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => 0,
            Axis::Y => self.n_edges_along(Axis::X),
            Axis::Z => self.n_edges_along(Axis::X) + self.n_edges_along(Axis::Y),
        }
    }

    /// Edge parallel to `axis` whose tail vertex is `(i, j, k)`.
    pub fn edge_id(&self, axis: Axis, i: usize, j: usize, k: usize) -> usize {
        let mut dims = [self.n[0] + 1, self.n[1] + 1, self.n[2] + 1];
        dims[axis.index()] -= 1;
        self.edge_offset(axis) + i + dims[0] * (j + dims[1] * k)
    }

    /// Axis and tail-vertex lattice coordinates of edge `e`.
    pub fn edge_axis_ijk(&self, e: usize) -> (Axis, [usize; 3]) {
        let mut rem = e;
        for axis in Axis::ALL {
            let cnt = self.n_edges_along(axis);
            if rem < cnt {
                let mut dims = [self.n[0] + 1, self.n[1] + 1, self.n[2] + 1];
                dims[axis.index()] -= 1;
                let i = rem % dims[0];
                let r = rem / dims[0];
                return (axis, [i, r % dims[1], r / dims[1]]);
            }
            rem -= cnt;
        }
        panic!("edge id {e} out of range");
    }

    pub fn edge_axis(&self, e: usize) -> Axis {
        self.edge_axis_ijk(e).0
    }

    /// `(tail, head)` vertex ids; `tail < head` always.
    pub fn edge_vertices(&self, e: usize) -> (usize, usize) {
        let (axis, [i, j, k]) = self.edge_axis_ijk(e);
        let tail = self.vertex_id(i, j, k);
        let head = match axis {
            Axis::X => self.vertex_id(i + 1, j, k),
            Axis::Y => self.vertex_id(i, j + 1, k),
            Axis::Z => self.vertex_id(i, j, k + 1),
        };
        (tail, head)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.h[self.edge_axis(e).index()]
    }

    /// True when the edge lies in a boundary face of the box.
    pub fn edge_on_boundary(&self, e: usize) -> bool {
        let (axis, ijk) = self.edge_axis_ijk(e);
        (0..3).filter(|&d| d != axis.index()).any(|d| ijk[d] == 0 || ijk[d] == self.n[d])
    }

    /// The twelve edges of cell `c` in local order: four x-edges at
    /// `(Δy, Δz) ∈ {(0,0), (1,0), (0,1), (1,1)}`, then y-edges at
    /// `(Δx, Δz)`, then z-edges at `(Δx, Δy)`, each in the same pattern.
    pub fn cell_edges(&self, c: usize) -> [usize; 12] {
        let [i, j, k] = self.cell_ijk(c);
        let mut out = [0; 12];
        for (s, (a, b)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            out[s] = self.edge_id(Axis::X, i, j + a, k + b);
            out[4 + s] = self.edge_id(Axis::Y, i + a, j, k + b);
            out[8 + s] = self.edge_id(Axis::Z, i + a, j + b, k);
        }
        out
    }

    pub fn cell_vertices(&self, c: usize) -> [usize; 8] {
        let [i, j, k] = self.cell_ijk(c);
        let mut out = [0; 8];
        for s in 0..8 {
            out[s] = self.vertex_id(i + (s & 1), j + ((s >> 1) & 1), k + ((s >> 2) & 1));
        }
        out
    }

    /// Cells sharing edge `e` (between one and four).
    pub fn edge_cells(&self, e: usize) -> Vec<usize> {
        let (axis, ijk) = self.edge_axis_ijk(e);
        let d = axis.index();
        let (p, q) = ((d + 1) % 3, (d + 2) % 3);
        let mut out = Vec::with_capacity(4);
        for dq in [1usize, 0] {
            for dp in [1usize, 0] {
                let mut c = ijk;
                if c[p] < dp || c[q] < dq {
                    continue;
                }
                c[p] -= dp;
                c[q] -= dq;
                if c[p] < self.n[p] && c[q] < self.n[q] {
                    out.push(self.cell_id(c[0], c[1], c[2]));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Cells sharing vertex `v` (between one and eight).
    pub fn vertex_cells(&self, v: usize) -> Vec<usize> {
        let ijk = self.vertex_ijk(v);
        let mut out = Vec::with_capacity(8);
        for s in 0..8 {
            let off = [s & 1, (s >> 1) & 1, (s >> 2) & 1];
            if (0..3).all(|d| ijk[d] >= off[d] && ijk[d] - off[d] < self.n[d]) {
                out.push(self.cell_id(ijk[0] - off[0], ijk[1] - off[1], ijk[2] - off[2]));
            }
        }
        out.sort_unstable();
        out
    }

    /// Edges incident to vertex `v` (between three and six).
    pub fn vertex_edges(&self, v: usize) -> Vec<usize> {
        let [i, j, k] = self.vertex_ijk(v);
        let ijk = [i, j, k];
        let mut out = Vec::with_capacity(6);
        for axis in Axis::ALL {
            let d = axis.index();
            if ijk[d] > 0 {
                let mut t = ijk;
                t[d] -= 1;
                out.push(self.edge_id(axis, t[0], t[1], t[2]));
            }
            if ijk[d] < self.n[d] {
                out.push(self.edge_id(axis, i, j, k));
            }
        }
        out.sort_unstable();
        out
    }

    /// Face normal to `axis` whose minimal vertex is `(i, j, k)`. Faces are
    /// numbered x-normal first, then y-normal, then z-normal.
    pub fn face_id(&self, axis: Axis, i: usize, j: usize, k: usize) -> usize {
        let mut dims = self.n;
        dims[axis.index()] += 1;
        let offset: usize = Axis::ALL[..axis.index()].iter().map(|&a| self.n_faces_normal(a)).sum();
        offset + i + dims[0] * (j + dims[1] * k)
    }

    pub fn face_axis_ijk(&self, f: usize) -> (Axis, [usize; 3]) {
        let mut rem = f;
        for axis in Axis::ALL {
            let cnt = self.n_faces_normal(axis);
            if rem < cnt {
                let mut dims = self.n;
                dims[axis.index()] += 1;
                let i = rem % dims[0];
                let r = rem / dims[0];
                return (axis, [i, r % dims[1], r / dims[1]]);
            }
            rem -= cnt;
        }
        panic!("face id {f} out of range");
    }

    /// Cells on either side of face `f` (one on the boundary, else two).
    pub fn face_cells(&self, f: usize) -> Vec<usize> {
        let (axis, ijk) = self.face_axis_ijk(f);
        let d = axis.index();
        let mut out = Vec::with_capacity(2);
        if ijk[d] > 0 {
            let mut t = ijk;
            t[d] -= 1;
            out.push(self.cell_id(t[0], t[1], t[2]));
        }
        if ijk[d] < self.n[d] {
            out.push(self.cell_id(ijk[0], ijk[1], ijk[2]));
        }
        out
    }

    /// The four edges bounding face `f`.
    pub fn face_edges(&self, f: usize) -> [usize; 4] {
        let (axis, [i, j, k]) = self.face_axis_ijk(f);
        let d = axis.index();
        let (p, q) = (Axis::ALL[(d + 1) % 3], Axis::ALL[(d + 2) % 3]);
        let shift = |ax: Axis| {
            let mut t = [i, j, k];
            t[ax.index()] += 1;
            t
        };
        let (sp, sq) = (shift(p), shift(q));
        [
            self.edge_id(p, i, j, k),
            self.edge_id(p, sq[0], sq[1], sq[2]),
            self.edge_id(q, i, j, k),
            self.edge_id(q, sp[0], sp[1], sp[2]),
        ]
    }

    /// Cells sharing a face with cell `c`.
    pub fn face_neighbors(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        let ijk = self.cell_ijk(c);
        (0..6).filter_map(move |s| {
            let d = s / 2;
            let mut t = ijk;
            if s % 2 == 0 {
                if t[d] == 0 {
                    return None;
                }
                t[d] -= 1;
            } else {
                if t[d] + 1 >= self.n[d] {
                    return None;
                }
                t[d] += 1;
            }
            Some(self.cell_id(t[0], t[1], t[2]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_counts() {
        let m = BoxMesh::unit_cube(1).unwrap();
        assert_eq!((m.n_vertices(), m.n_edges(), m.n_faces(), m.n_cells()), (8, 12, 6, 1));
        let m = BoxMesh::unit_cube(3).unwrap();
        assert_eq!((m.n_cells(), m.n_vertices()), (27, 64));
    }

    #[test]
    fn two_cell_edge_count_by_enumeration() {
        let m = BoxMesh::new(2, 1, 1, 2.0, 1.0, 1.0).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for c in 0..m.n_cells() {
            for e in m.cell_edges(c) {
                seen.insert(m.edge_vertices(e));
            }
        }
        assert_eq!(seen.len(), 20);
        assert_eq!(m.n_edges(), 20);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(BoxMesh::new(0, 1, 1, 1.0, 1.0, 1.0).is_err());
        assert!(BoxMesh::new(1, 1, 1, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn edge_round_trip_and_orientation() {
        let m = BoxMesh::new(3, 2, 4, 1.0, 2.0, 3.0).unwrap();
        for e in 0..m.n_edges() {
            let (axis, [i, j, k]) = m.edge_axis_ijk(e);
            assert_eq!(m.edge_id(axis, i, j, k), e);
            let (t, h) = m.edge_vertices(e);
            assert!(t < h);
            let (xt, xh) = (m.vertex_coords(t), m.vertex_coords(h));
            let d = axis.index();
            assert!((xh[d] - xt[d] - m.h()[d]).abs() < 1e-15);
        }
    }

    #[test]
    fn adjacency_is_consistent() {
        let m = BoxMesh::new(3, 2, 2, 1.0, 1.0, 1.0).unwrap();
        for c in 0..m.n_cells() {
            for e in m.cell_edges(c) {
                assert!(m.edge_cells(e).contains(&c));
            }
            for v in m.cell_vertices(c) {
                assert!(m.vertex_cells(v).contains(&c));
            }
        }
        for f in 0..m.n_faces() {
            let (axis, [i, j, k]) = m.face_axis_ijk(f);
            assert_eq!(m.face_id(axis, i, j, k), f);
            for c in m.face_cells(f) {
                for e in m.face_edges(f) {
                    assert!(m.cell_edges(c).contains(&e));
                }
            }
        }
        let interior_faces = (0..m.n_faces()).filter(|&f| m.face_cells(f).len() == 2).count();
        let pairs: usize = (0..m.n_cells()).map(|c| m.face_neighbors(c).count()).sum();
        assert_eq!(2 * interior_faces, pairs);
        let total: usize = (0..m.n_edges()).map(|e| m.edge_cells(e).len()).sum();
        assert_eq!(total, 12 * m.n_cells());
        for v in 0..m.n_vertices() {
            for e in m.vertex_edges(v) {
                let (t, h) = m.edge_vertices(e);
                assert!(t == v || h == v);
            }
        }
    }
}
