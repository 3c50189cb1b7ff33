//! Change of basis from standard edge DOFs to gradients of interior-node
//! hat functions plus one tangent-average function per coarse edge.
//!
//! Only DOFs on coarse edges (`S`) and interface DOFs touching an interior
//! node of a coarse edge (`F`) are affected:
//! `u_S,old = Q_SS u_S,new` and `u_F,old = u_F,new + Q_FS u_S,new`.
//! `Q_SS` is block diagonal with one `Q^E` per coarse edge except where an
//! edge of one coarse edge touches an interior node of another.

use super::chains::CoarseEdge;
use crate::error::{Error, Result};
use crate::linalg::{DenseLu, DenseMatrix};
use crate::meshfe::BoxMesh;
use crate::partition::GlobSet;

/// `Q^E`: column `b < n_e − 1` holds the tangential moments of the gradient
/// of the hat function at interior node `b + 1`; the last column holds the
/// moments `s_a |e_a|` of the unit tangent-average function.
pub fn build_qe(ce: &CoarseEdge, mesh: &BoxMesh) -> DenseMatrix {
    let ch = &ce.chain;
    let n = ch.n_e();
    let mut q = DenseMatrix::zeros(n, n);
    for b in 0..n - 1 {
        q[(b, b)] = ch.signs[b];
        q[(b + 1, b)] = -ch.signs[b + 1];
    }
    for a in 0..n {
        q[(a, n - 1)] = ch.signs[a] * mesh.edge_length(ch.edges[a]);
    }
    q
}

/// Entries `(c, b, σ_c(∇φ_b))` for interface fine edges `c` outside the
/// coarse edge that touch its interior node `b + 1`.
pub fn qf_entries(ce: &CoarseEdge, mesh: &BoxMesh, globs: &GlobSet) -> Vec<(usize, usize, f64)> {
    let ch = &ce.chain;
    let mut out = Vec::new();
    for (b, &node) in ch.interior_nodes().iter().enumerate() {
        for c in mesh.vertex_edges(node) {
            if c == ch.edges[b] || c == ch.edges[b + 1] || !globs.is_interface_edge(c) {
                continue;
            }
            let (_, head) = mesh.edge_vertices(c);
            out.push((c, b, if head == node { 1.0 } else { -1.0 }));
        }
    }
    out
}

/// One coarse edge in some local numbering.
#[derive(Debug, Clone)]
pub struct EdgeBlock {
    pub id: usize,
    /// Local DOFs in chain order; new-basis coordinate `j` of the edge is
    /// stored at `dofs[j]`.
    pub dofs: Vec<usize>,
    pub q: DenseMatrix,
}

#[derive(Debug, Clone)]
struct Cluster {
    dofs: Vec<usize>,
    q: DenseMatrix,
    lu: DenseLu,
}

/// A change of basis `u_old = C u_new` over `n` DOFs.
#[derive(Debug, Clone)]
pub struct ChangeOfBasis {
    n: usize,
    clusters: Vec<Cluster>,
    f_rows: Vec<(usize, Vec<(usize, f64)>)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl ChangeOfBasis {
    /// `couplings` are `(row, col, value)` in local DOFs, `col` being a
    /// gradient coordinate of some block.
    pub fn new(n: usize, blocks: Vec<EdgeBlock>, couplings: &[(usize, usize, f64)]) -> Result<Self> {
        const NONE: usize = usize::MAX;
        let mut block_of = vec![NONE; n];
        for (k, b) in blocks.iter().enumerate() {
            for &d in &b.dofs {
                if d >= n {
                    return Err(Error::DimensionMismatch { expected: n, got: d + 1 });
                }
                block_of[d] = k;
            }
        }
        let mut parent: Vec<usize> = (0..blocks.len()).collect();
        let mut f_map: std::collections::BTreeMap<usize, Vec<(usize, f64)>> = Default::default();
        let mut cross = Vec::new();
        for &(r, c, v) in couplings {
            if block_of[c] == NONE {
                return Err(Error::InvalidInput(format!("coupling column {c} is not on a coarse edge")));
            }
            if block_of[r] == NONE {
                f_map.entry(r).or_default().push((c, v));
            } else {
                let (a, b) = (find(&mut parent, block_of[r]), find(&mut parent, block_of[c]));
                parent[a] = b;
                cross.push((r, c, v));
            }
        }
        let mut members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for k in 0..blocks.len() {
            let root = find(&mut parent, k);
            members.entry(root).or_default().push(k);
        }
        let mut pos = vec![NONE; n];
        let mut cluster_of_block = vec![0; blocks.len()];
        let mut clusters = Vec::with_capacity(members.len());
        for ks in members.values() {
            let dofs: Vec<usize> = ks.iter().flat_map(|&k| blocks[k].dofs.iter().copied()).collect();
            for (i, &d) in dofs.iter().enumerate() {
                pos[d] = i;
            }
            let m = dofs.len();
            let mut q = DenseMatrix::zeros(m, m);
            for &k in ks {
                cluster_of_block[k] = clusters.len();
                let b = &blocks[k];
                for (i, &di) in b.dofs.iter().enumerate() {
                    for (j, &dj) in b.dofs.iter().enumerate() {
                        q[(pos[di], pos[dj])] = b.q[(i, j)];
                    }
                }
            }
            clusters.push(Cluster { dofs, q, lu: DenseLu::factor(&DenseMatrix::identity(0))? });
        }
        for &(r, c, v) in &cross {
            let cl = &mut clusters[cluster_of_block[block_of[r]]];
            cl.q[(pos[r], pos[c])] += v;
        }
        for (ci, cl) in clusters.iter_mut().enumerate() {
            cl.lu = DenseLu::factor(&cl.q).map_err(|_| {
                let first = members.values().nth(ci).map(|ks| blocks[ks[0]].id).unwrap_or(0);
                Error::SingularCoarseEdge { edge: first }
            })?;
        }
        Ok(Self { n, clusters, f_rows: f_map.into_iter().collect() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        Ok(())
    }

    /// `C x`: new basis to old.
    pub fn apply_c(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut y = x.to_vec();
        for cl in &self.clusters {
            let xs: Vec<f64> = cl.dofs.iter().map(|&d| x[d]).collect();
            for (i, v) in cl.q.matvec(&xs).into_iter().enumerate() {
                y[cl.dofs[i]] = v;
            }
        }
        for (r, cols) in &self.f_rows {
            y[*r] += cols.iter().map(|&(c, v)| v * x[c]).sum::<f64>();
        }
        Ok(y)
    }

    /// `C⁻¹ y`: old basis to new.
    pub fn apply_cinv(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        let mut x = y.to_vec();
        for cl in &self.clusters {
            let ys: Vec<f64> = cl.dofs.iter().map(|&d| y[d]).collect();
            for (i, v) in cl.lu.solve(&ys).into_iter().enumerate() {
                x[cl.dofs[i]] = v;
            }
        }
        for (r, cols) in &self.f_rows {
            x[*r] = y[*r] - cols.iter().map(|&(c, v)| v * x[c]).sum::<f64>();
        }
        Ok(x)
    }

    /// `Cᵀ x`
    pub fn apply_ct(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut y = x.to_vec();
        for cl in &self.clusters {
            let xs: Vec<f64> = cl.dofs.iter().map(|&d| x[d]).collect();
            for (i, v) in cl.q.matvec_t(&xs).into_iter().enumerate() {
                y[cl.dofs[i]] = v;
            }
        }
        for (r, cols) in &self.f_rows {
            for &(c, v) in cols {
                y[c] += v * x[*r];
            }
        }
        Ok(y)
    }

    /// `C⁻ᵀ y`
    pub fn apply_cinv_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y)?;
        let mut t = y.to_vec();
        for (r, cols) in &self.f_rows {
            for &(c, v) in cols {
                t[c] -= v * y[*r];
            }
        }
        let mut x = y.to_vec();
        for cl in &self.clusters {
            let ts: Vec<f64> = cl.dofs.iter().map(|&d| t[d]).collect();
            for (i, v) in cl.lu.solve_transpose(&ts).into_iter().enumerate() {
                x[cl.dofs[i]] = v;
            }
        }
        Ok(x)
    }

    /// Dense `C`, row-major.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut c = DenseMatrix::identity(self.n);
        for cl in &self.clusters {
            for (i, &di) in cl.dofs.iter().enumerate() {
                for (j, &dj) in cl.dofs.iter().enumerate() {
                    c[(di, dj)] = cl.q[(i, j)];
                }
            }
        }
        for (r, cols) in &self.f_rows {
            for &(col, v) in cols {
                c[(*r, col)] += v;
            }
        }
        c
    }
}
