//! Interface objects: maximal sets of interface entities sharing the same
//! set of neighboring PB-subdomains.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PbPartition;
use crate::meshfe::BoxMesh;

pub const NO_GLOB: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GlobKind {
    Face,
    Edge,
    Corner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Glob {
    pub kind: GlobKind,
    pub neigh_pb: Vec<usize>,
    pub neigh_geo: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Fine edges; each carries one DOF.
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
    pub ndof: usize,
}

#[derive(Debug, Clone)]
pub struct GlobSet {
    pub globs: Vec<Glob>,
    /// Owning glob of each mesh edge, or [`NO_GLOB`] off the interface.
    pub edge_glob: Vec<usize>,
    pub vertex_glob: Vec<usize>,
    /// Sorted PB-subdomain neighbors of every mesh vertex, boundary
    /// vertices included.
    pub vertex_neigh_pb: Vec<Vec<usize>>,
}

impl GlobSet {
    pub fn n_globs(&self) -> usize {
        self.globs.len()
    }

    pub fn of_kind(&self, kind: GlobKind) -> impl Iterator<Item = (usize, &Glob)> {
        self.globs.iter().enumerate().filter(move |(_, g)| g.kind == kind)
    }

    pub fn is_interface_edge(&self, e: usize) -> bool {
        self.edge_glob[e] != NO_GLOB
    }
}

fn neighbors(cells: &[usize], part: &PbPartition) -> (Vec<usize>, Vec<usize>) {
    let mut pb: Vec<usize> = cells.iter().map(|&c| part.pb[c]).collect();
    pb.sort_unstable();
    pb.dedup();
    let mut geo: Vec<usize> = pb.iter().map(|&p| part.pb_geo[p]).collect();
    geo.sort_unstable();
    geo.dedup();
    (pb, geo)
}

#[derive(Default)]
struct Entities {
    vertices: Vec<usize>,
    edges: Vec<usize>,
    faces: Vec<usize>,
}

/// Groups interface vertices, edges and faces by their PB neighbor set.
/// The interface consists of entities shared by at least two geometric
/// subdomains and not lying on the domain boundary.
pub fn classify_globs(mesh: &BoxMesh, part: &PbPartition) -> GlobSet {
    let mut groups: BTreeMap<Vec<usize>, Entities> = BTreeMap::new();
    let nv = mesh.n_vertices();
    let mut vertex_neigh_pb = Vec::with_capacity(nv);
    for v in 0..nv {
        let (pb, geo) = neighbors(&mesh.vertex_cells(v), part);
        if geo.len() >= 2 && !mesh.vertex_on_boundary(v) {
            groups.entry(pb.clone()).or_default().vertices.push(v);
        }
        vertex_neigh_pb.push(pb);
    }
    for e in 0..mesh.n_edges() {
        let (pb, geo) = neighbors(&mesh.edge_cells(e), part);
        if geo.len() >= 2 && !mesh.edge_on_boundary(e) {
            groups.entry(pb).or_default().edges.push(e);
        }
    }
    for f in 0..mesh.n_faces() {
        let cells = mesh.face_cells(f);
        if cells.len() < 2 {
            continue;
        }
        let (pb, geo) = neighbors(&cells, part);
        if geo.len() >= 2 {
            groups.entry(pb).or_default().faces.push(f);
        }
    }

    let mut edge_glob = vec![NO_GLOB; mesh.n_edges()];
    let mut vertex_glob = vec![NO_GLOB; nv];
    let mut globs = Vec::with_capacity(groups.len());
    for (neigh_pb, ent) in groups {
        let id = globs.len();
        for &e in &ent.edges {
            edge_glob[e] = id;
        }
        for &v in &ent.vertices {
            vertex_glob[v] = id;
        }
        let mut neigh_geo: Vec<usize> = neigh_pb.iter().map(|&p| part.pb_geo[p]).collect();
        neigh_geo.sort_unstable();
        neigh_geo.dedup();
        let ndof = ent.edges.len();
        let kind = match (ndof, neigh_pb.len()) {
            (0, _) => GlobKind::Corner,
            (_, 2) => GlobKind::Face,
            _ => GlobKind::Edge,
        };
        globs.push(Glob { kind, neigh_pb, neigh_geo, vertices: ent.vertices, edges: ent.edges, faces: ent.faces, ndof });
    }
    GlobSet { globs, edge_glob, vertex_glob, vertex_neigh_pb }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshfe::CoefficientField;
    use crate::partition::geometric_partition;

    fn homogeneous(mesh: &BoxMesh, parts: [usize; 3]) -> GlobSet {
        let geo = geometric_partition(mesh, parts).unwrap();
        let n = parts.iter().product();
        let f = CoefficientField::homogeneous(mesh.n_cells(), 1.0, 1.0).unwrap();
        classify_globs(mesh, &PbPartition::geometric(geo, n, &f).unwrap())
    }

    #[test]
    fn two_subdomains_give_one_face() {
        // 4×2×2 cells split at x = 2: the interface plane has 3×3 vertices,
        // of which only the centre is off the boundary, and 4 free edges.
        let mesh = BoxMesh::new(4, 2, 2, 2.0, 1.0, 1.0).unwrap();
        let gs = homogeneous(&mesh, [2, 1, 1]);
        assert_eq!(gs.n_globs(), 1);
        let g = &gs.globs[0];
        assert_eq!(g.kind, GlobKind::Face);
        assert_eq!(g.neigh_pb, vec![0, 1]);
        assert_eq!(g.ndof, 4);
        assert_eq!(g.vertices, vec![mesh.vertex_id(2, 1, 1)]);
        assert_eq!(g.faces.len(), 4);
    }

    #[test]
    fn four_subdomains_give_four_faces_and_an_edge() {
        let mesh = BoxMesh::new(4, 4, 2, 1.0, 1.0, 1.0).unwrap();
        let gs = homogeneous(&mesh, [2, 2, 1]);
        let faces: Vec<_> = gs.of_kind(GlobKind::Face).collect();
        let edges: Vec<_> = gs.of_kind(GlobKind::Edge).collect();
        assert_eq!(faces.len(), 4);
        assert_eq!(edges.len(), 1);
        let e = edges[0].1;
        assert_eq!(e.neigh_pb, vec![0, 1, 2, 3]);
        // the shared vertical line x = y = 0.5 has two z-edges
        assert_eq!(e.ndof, 2);
        assert_eq!(gs.of_kind(GlobKind::Corner).count(), 0);
    }

    #[test]
    fn eight_subdomains_have_a_corner() {
        let mesh = BoxMesh::unit_cube(4).unwrap();
        let gs = homogeneous(&mesh, [2, 2, 2]);
        assert_eq!(gs.of_kind(GlobKind::Face).count(), 12);
        assert_eq!(gs.of_kind(GlobKind::Edge).count(), 6);
        let corners: Vec<_> = gs.of_kind(GlobKind::Corner).collect();
        assert_eq!(corners.len(), 1);
        assert_eq!(corners[0].1.vertices, vec![mesh.vertex_id(2, 2, 2)]);
    }

    #[test]
    fn disjoint_cover_of_interface() {
        let mesh = BoxMesh::unit_cube(6).unwrap();
        let gs = homogeneous(&mesh, [3, 2, 3]);
        let mut seen = vec![false; mesh.n_edges()];
        for g in &gs.globs {
            for &e in &g.edges {
                assert!(!seen[e]);
                seen[e] = true;
            }
        }
        for e in 0..mesh.n_edges() {
            assert_eq!(seen[e], gs.is_interface_edge(e));
        }
    }
}
