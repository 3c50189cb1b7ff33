use serde::{Deserialize, Serialize};

use super::mesh::BoxMesh;
use crate::error::{Error, Result};

/// Lowest-order edge element space: one DOF per mesh edge, with edges in
/// boundary faces eliminated by the homogeneous tangential condition.
#[derive(Debug, Clone)]
pub struct EdgeSpace {
    mesh: BoxMesh,
    dirichlet: Vec<bool>,
    dof_of_edge: Vec<usize>,
    edge_of_dof: Vec<usize>,
}

pub const NO_DOF: usize = usize::MAX;

impl EdgeSpace {
    pub fn new(mesh: BoxMesh) -> Self {
        let ne = mesh.n_edges();
        let dirichlet: Vec<bool> = (0..ne).map(|e| mesh.edge_on_boundary(e)).collect();
        let mut dof_of_edge = vec![NO_DOF; ne];
        let mut edge_of_dof = Vec::new();
        for e in 0..ne {
            if !dirichlet[e] {
                dof_of_edge[e] = edge_of_dof.len();
                edge_of_dof.push(e);
            }
        }
        Self { mesh, dirichlet, dof_of_edge, edge_of_dof }
    }

    pub fn mesh(&self) -> &BoxMesh {
        &self.mesh
    }

    pub fn order(&self) -> usize {
        1
    }

    pub fn n_dofs(&self) -> usize {
        self.edge_of_dof.len()
    }

    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.dirichlet
    }

    pub fn is_dirichlet(&self, edge: usize) -> bool {
        self.dirichlet[edge]
    }

    /// Free DOF index of `edge`, or [`NO_DOF`].
    pub fn dof(&self, edge: usize) -> usize {
        self.dof_of_edge[edge]
    }

    pub fn edge(&self, dof: usize) -> usize {
        self.edge_of_dof[dof]
    }

    /// Edge interpolant `g_e = φ(head) − φ(tail)` of the gradient of the
    /// nodal function `phi`, restricted to free DOFs.
    pub fn interpolate_gradient(&self, phi: &[f64]) -> Vec<f64> {
        self.edge_of_dof
            .iter()
            .map(|&e| {
                let (t, h) = self.mesh.edge_vertices(e);
                phi[h] - phi[t]
            })
            .collect()
    }
}

/// Per-cell coefficients, with an optional material label per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub material: Option<Vec<u32>>,
}

impl CoefficientField {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, material: Option<Vec<u32>>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::DimensionMismatch { expected: alpha.len(), got: beta.len() });
        }
        if let Some(m) = &material {
            if m.len() != alpha.len() {
                return Err(Error::DimensionMismatch { expected: alpha.len(), got: m.len() });
            }
        }
        if let Some(c) = alpha.iter().position(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha[{c}] = {} must be ≥ 0", alpha[c])));
        }
        if let Some(c) = beta.iter().position(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidInput(format!("beta[{c}] = {} must be > 0", beta[c])));
        }
        Ok(Self { alpha, beta, material })
    }

    pub fn homogeneous(n_cells: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![alpha; n_cells], vec![beta; n_cells], Some(vec![0; n_cells]))
    }

    pub fn n_cells(&self) -> usize {
        self.alpha.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_mask_matches_endpoint_rule() {
        let mesh = BoxMesh::new(3, 2, 2, 1.0, 1.0, 1.0).unwrap();
        let space = EdgeSpace::new(mesh.clone());
        for e in 0..mesh.n_edges() {
            let (t, h) = mesh.edge_vertices(e);
            let (a, b) = (mesh.vertex_ijk(t), mesh.vertex_ijk(h));
            let n = mesh.cells_per_axis();
            // both endpoints share a boundary coordinate plane
            let in_face = (0..3).any(|d| a[d] == b[d] && (a[d] == 0 || a[d] == n[d]));
            assert_eq!(space.is_dirichlet(e), in_face);
            if space.is_dirichlet(e) {
                assert!(mesh.vertex_on_boundary(t) && mesh.vertex_on_boundary(h));
            }
        }
        assert_eq!(BoxMesh::unit_cube(1).map(EdgeSpace::new).unwrap().n_dofs(), 0);
        // interior edges of an n³ mesh: 3 n (n-1)²
        assert_eq!(EdgeSpace::new(BoxMesh::unit_cube(4).unwrap()).n_dofs(), 3 * 4 * 9);
    }

    #[test]
    fn field_validation() {
        assert!(CoefficientField::new(vec![0.0], vec![1.0], None).is_ok());
        assert!(CoefficientField::new(vec![-1.0], vec![1.0], None).is_err());
        assert!(CoefficientField::new(vec![1.0], vec![0.0], None).is_err());
        assert!(CoefficientField::new(vec![1.0], vec![1.0, 2.0], None).is_err());
    }
}
