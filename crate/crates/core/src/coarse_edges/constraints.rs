//! Zero- and first-moment constraint rows over the fine DOFs of a coarse
//! edge, in the standard (old) basis.

use super::chains::CoarseEdge;
use crate::linalg::DenseLu;
use crate::meshfe::BoxMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    S0,
    S1,
}

/// Mean tangential trace: `s_a` on each fine edge `a`.
pub fn s0_row(ce: &CoarseEdge) -> Vec<f64> {
    ce.chain.signs.clone()
}

/// First-moment row in the new basis: minus the hat-function integral on
/// each gradient coordinate, zero on the tangent-average coordinate.
pub fn s1_new(ce: &CoarseEdge, mesh: &BoxMesh) -> Vec<f64> {
    let e = &ce.chain.edges;
    let n = e.len();
    let mut c = vec![0.0; n];
    for b in 0..n.saturating_sub(1) {
        c[b] = -0.5 * (mesh.edge_length(e[b]) + mesh.edge_length(e[b + 1]));
    }
    c
}

/// First-moment row in the old basis, `(Q^E)⁻ᵀ` applied to [`s1_new`].
/// `None` for a single fine edge.
pub fn s1_row(ce: &CoarseEdge, mesh: &BoxMesh, qe: &DenseLu) -> Option<Vec<f64>> {
    if ce.n_e() < 2 {
        return None;
    }
    Some(qe.solve_transpose(&s1_new(ce, mesh)))
}
