//! Coarse edges, the edge-local change of basis and the coarse constraints.

pub mod basis;
pub mod chains;
pub mod constraints;

pub use basis::{build_qe, qf_entries, ChangeOfBasis, EdgeBlock};
pub use chains::{build_coarse_edges, partition_coarse_edges, split_chains, Chain, CoarseEdge};
pub use constraints::{s0_row, s1_new, s1_row, RowKind};

use crate::error::{Error, Result};
use crate::linalg::{DenseLu, DenseMatrix, SparseRow};
use crate::meshfe::EdgeSpace;
use crate::partition::GlobSet;

/// Global coarse data shared by all subdomains.
#[derive(Debug, Clone)]
pub struct CoarseSpace {
    pub edges: Vec<CoarseEdge>,
    pub qe: Vec<DenseMatrix>,
    /// `(fine edge, gradient column, value)` per coarse edge.
    pub qf: Vec<Vec<(usize, usize, f64)>>,
    /// Constraint rows over each chain, in chain order.
    pub rows: Vec<Vec<(RowKind, Vec<f64>)>>,
    /// First global coarse DOF of each coarse edge.
    pub offset: Vec<usize>,
    n_coarse: usize,
}

/// Change of basis and constraints of one subdomain in its local numbering.
#[derive(Debug, Clone)]
pub struct LocalCoarse {
    pub basis: ChangeOfBasis,
    pub rows: Vec<SparseRow>,
    pub kinds: Vec<RowKind>,
    /// Global coarse DOF of each row.
    pub coarse_dofs: Vec<usize>,
    /// Coarse edges touching the subdomain.
    pub edges: Vec<usize>,
}

impl CoarseSpace {
    pub fn build(space: &EdgeSpace, globs: &GlobSet) -> Result<Self> {
        let mesh = space.mesh();
        let edges = build_coarse_edges(mesh, globs)?;
        let mut qe = Vec::with_capacity(edges.len());
        let mut qf = Vec::with_capacity(edges.len());
        let mut rows = Vec::with_capacity(edges.len());
        let mut offset = Vec::with_capacity(edges.len());
        let mut n_coarse = 0;
        for (k, ce) in edges.iter().enumerate() {
            let q = build_qe(ce, mesh);
            let lu = DenseLu::factor(&q).map_err(|_| Error::SingularCoarseEdge { edge: k })?;
            let mut r = vec![(RowKind::S0, s0_row(ce))];
            if let Some(s1) = s1_row(ce, mesh, &lu) {
                r.push((RowKind::S1, s1));
            }
            offset.push(n_coarse);
            n_coarse += r.len();
            rows.push(r);
            qf.push(qf_entries(ce, mesh, globs));
            qe.push(q);
        }
        Ok(Self { edges, qe, qf, rows, offset, n_coarse })
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Restriction to subdomain `sub` (all coarse edges when `None`) whose
    /// local DOF `l` is global free DOF `l2g[l]`, `l2g` sorted.
    pub fn restrict(&self, space: &EdgeSpace, sub: Option<usize>, l2g: &[usize]) -> Result<LocalCoarse> {
        let local = |e: usize| l2g.binary_search(&space.dof(e)).ok();
        let mut blocks = Vec::new();
        let mut couplings = Vec::new();
        let mut rows = Vec::new();
        let mut kinds = Vec::new();
        let mut coarse_dofs = Vec::new();
        let mut edges = Vec::new();
        for (k, ce) in self.edges.iter().enumerate() {
            if let Some(s) = sub {
                if ce.neigh_geo.binary_search(&s).is_err() {
                    continue;
                }
            }
            let dofs: Vec<usize> = ce
                .chain
                .edges
                .iter()
                .map(|&e| local(e).ok_or_else(|| Error::InvalidInput(format!("coarse edge {k} has a DOF outside the subdomain"))))
                .collect::<Result<_>>()?;
            for &(c, b, v) in &self.qf[k] {
                if let Some(lc) = local(c) {
                    couplings.push((lc, dofs[b], v));
                }
            }
            for (j, (kind, r)) in self.rows[k].iter().enumerate() {
                rows.push(dofs.iter().copied().zip(r.iter().copied()).collect());
                kinds.push(*kind);
                coarse_dofs.push(self.offset[k] + j);
            }
            blocks.push(EdgeBlock { id: k, dofs, q: self.qe[k].clone() });
            edges.push(k);
        }
        let basis = ChangeOfBasis::new(l2g.len(), blocks, &couplings)?;
        Ok(LocalCoarse { basis, rows, kinds, coarse_dofs, edges })
    }
}
