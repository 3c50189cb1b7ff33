//! Global and sub-assembled curl-curl and mass operators over free DOFs.

use super::element::reference_cell;
use super::space::{CoefficientField, EdgeSpace, NO_DOF};
use crate::error::{Error, Result};
use crate::linalg::{SparseSym, TripletBuilder};

/// Assembled system `A = K + M` over free DOFs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: SparseSym,
    pub m: SparseSym,
    pub f: Vec<f64>,
}

impl GlobalSystem {
    pub fn a(&self) -> SparseSym {
        self.k.add(&self.m)
    }
}

/// Sub-assembled operators of one subdomain in local numbering. Local DOF
/// `l` is global free DOF `l2g[l]`; `l2g` is sorted.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub cells: Vec<usize>,
    pub l2g: Vec<usize>,
    pub k: SparseSym,
    pub m: SparseSym,
    pub f: Vec<f64>,
}

impl LocalSystem {
    pub fn a(&self) -> SparseSym {
        self.k.add(&self.m)
    }

    pub fn n_dofs(&self) -> usize {
        self.l2g.len()
    }

    /// Local index of global DOF `g`, if present.
    pub fn local(&self, g: usize) -> Option<usize> {
        self.l2g.binary_search(&g).ok()
    }
}

fn check_field(space: &EdgeSpace, field: &CoefficientField) -> Result<()> {
    let nc = space.mesh().n_cells();
    if field.n_cells() != nc {
        return Err(Error::DimensionMismatch { expected: nc, got: field.n_cells() });
    }
    Ok(())
}

/// Adds the contributions of `cells` into triplet builders indexed through
/// `index` (edge → row, or `NO_DOF`).
fn accumulate(
    space: &EdgeSpace,
    field: &CoefficientField,
    load: [f64; 3],
    cells: &[usize],
    index: impl Fn(usize) -> usize,
    k: &mut TripletBuilder,
    m: &mut TripletBuilder,
    f: &mut [f64],
) {
    let mesh = space.mesh();
    let re = reference_cell(mesh, load);
    for &c in cells {
        let (alpha, beta) = (field.alpha[c], field.beta[c]);
        let rows = mesh.cell_edges(c).map(&index);
        for i in 0..12 {
            let ri = rows[i];
            if ri == NO_DOF {
                continue;
            }
            f[ri] += re.f[i];
            for j in 0..12 {
                let rj = rows[j];
                if rj == NO_DOF {
                    continue;
                }
                if alpha != 0.0 && re.k[i][j] != 0.0 {
                    k.push(ri, rj, alpha * re.k[i][j]);
                }
                if re.m[i][j] != 0.0 {
                    m.push(ri, rj, beta * re.m[i][j]);
                }
            }
        }
    }
}

/// `K` (weighted by α), `M` (weighted by β) and the load for the constant
/// vector field `load`, with Dirichlet rows and columns eliminated.
pub fn assemble_global(space: &EdgeSpace, field: &CoefficientField, load: [f64; 3]) -> Result<GlobalSystem> {
    check_field(space, field)?;
    let n = space.n_dofs();
    let nc = space.mesh().n_cells();
    let mut k = TripletBuilder::with_capacity(n, 64 * nc);
    let mut m = TripletBuilder::with_capacity(n, 64 * nc);
    let mut f = vec![0.0; n];
    let cells: Vec<usize> = (0..nc).collect();
    accumulate(space, field, load, &cells, |e| space.dof(e), &mut k, &mut m, &mut f);
    Ok(GlobalSystem { k: k.build(), m: m.build(), f })
}

/// Cells of each subdomain, in increasing cell order.
pub fn cells_by_subdomain(labels: &[usize], n_sub: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n_sub];
    for (c, &s) in labels.iter().enumerate() {
        out[s].push(c);
    }
    out
}

fn local_system(space: &EdgeSpace, field: &CoefficientField, load: [f64; 3], cells: Vec<usize>) -> LocalSystem {
    let mesh = space.mesh();
    let mut l2g: Vec<usize> = cells
        .iter()
        .flat_map(|&c| mesh.cell_edges(c))
        .map(|e| space.dof(e))
        .filter(|&d| d != NO_DOF)
        .collect();
    l2g.sort_unstable();
    l2g.dedup();
    let n = l2g.len();
    let index = |e: usize| {
        let d = space.dof(e);
        if d == NO_DOF {
            NO_DOF
        } else {
            l2g.binary_search(&d).expect("edge of own cell")
        }
    };
    let mut k = TripletBuilder::with_capacity(n, 64 * cells.len());
    let mut m = TripletBuilder::with_capacity(n, 64 * cells.len());
    let mut f = vec![0.0; n];
    accumulate(space, field, load, &cells, index, &mut k, &mut m, &mut f);
    LocalSystem { cells, l2g, k: k.build(), m: m.build(), f }
}

/// Sub-assembled system of subdomain `i` under the cell labeling `labels`.
pub fn assemble_subdomain(
    space: &EdgeSpace,
    field: &CoefficientField,
    labels: &[usize],
    i: usize,
    load: [f64; 3],
) -> Result<LocalSystem> {
    check_field(space, field)?;
    if labels.len() != field.n_cells() {
        return Err(Error::DimensionMismatch { expected: field.n_cells(), got: labels.len() });
    }
    let cells: Vec<usize> = (0..labels.len()).filter(|&c| labels[c] == i).collect();
    if cells.is_empty() {
        return Err(Error::InvalidInput(format!("subdomain {i} owns no cells")));
    }
    Ok(local_system(space, field, load, cells))
}

/// All subdomain systems at once; `labels[c] < n_sub` for every cell.
pub fn assemble_subdomains(
    space: &EdgeSpace,
    field: &CoefficientField,
    labels: &[usize],
    n_sub: usize,
    load: [f64; 3],
) -> Result<Vec<LocalSystem>> {
    check_field(space, field)?;
    if let Some(c) = labels.iter().position(|&s| s >= n_sub) {
        return Err(Error::InvalidInput(format!("cell {c} has no subdomain label")));
    }
    let groups = cells_by_subdomain(labels, n_sub);
    if let Some(i) = groups.iter().position(|g| g.is_empty()) {
        return Err(Error::InvalidInput(format!("subdomain {i} owns no cells")));
    }
    Ok(crate::par::map(groups, |cells| local_system(space, field, load, cells)))
}
