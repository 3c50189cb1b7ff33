use super::weights::{compute_weights, GlobWeights, ScalingKind};
use crate::coarse_edges::{CoarseSpace, LocalCoarse};
use crate::error::{Error, Result};
use crate::linalg::{factorize, FactorKind, Factorization, LinearOperator, SaddlePoint, SparseRow, SparseSym, TripletBuilder};
use crate::meshfe::{EdgeSpace, GlobalSystem, LocalSystem};
use crate::partition::{GlobSet, PbPartition, NO_GLOB};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BddcOptions {
    pub scaling: ScalingKind,
    /// Use fully assembled interface mass entries in the local problems.
    pub perturbed: bool,
}

impl Default for BddcOptions {
    fn default() -> Self {
        Self { scaling: ScalingKind::Cardinality, perturbed: false }
    }
}

/// Local matrix `K_i + M̃_i` where mass entries coupling two interface DOFs
/// are taken from the assembled global mass matrix.
pub fn build_perturbed_local(local: &LocalSystem, global_m: &SparseSym, iface: &[bool]) -> SparseSym {
    let n = local.n_dofs();
    let mut t = TripletBuilder::with_capacity(n, local.k.nnz() + local.m.nnz());
    for i in 0..n {
        for (j, v) in local.k.row(i) {
            t.push(i, j, v);
        }
        for (j, v) in local.m.row(i) {
            if !(iface[i] && iface[j]) {
                t.push(i, j, v);
            }
        }
        if iface[i] {
            for (g, v) in global_m.row(local.l2g[i]) {
                if let Some(j) = local.local(g) {
                    if iface[j] {
                        t.push(i, j, v);
                    }
                }
            }
        }
    }
    t.build()
}

#[derive(Debug)]
struct Subdomain {
    l2g: Vec<usize>,
    interior: Vec<usize>,
    interior_fact: Factorization,
    /// Averaging weight of each local DOF.
    weight: Vec<f64>,
    coarse: LocalCoarse,
    saddle: SaddlePoint,
}

impl Subdomain {
    fn gather(&self, x: &[f64]) -> Vec<f64> {
        self.l2g.iter().map(|&g| x[g]).collect()
    }

    fn weighted(&self, mut x: Vec<f64>) -> Vec<f64> {
        for (v, w) in x.iter_mut().zip(&self.weight) {
            *v *= w;
        }
        x
    }
}

/// Two-level BDDC preconditioner with edge-local change of basis.
#[derive(Debug)]
pub struct Bddc {
    n: usize,
    a: SparseSym,
    subs: Vec<Subdomain>,
    coarse: Factorization,
    coarse_matrix: SparseSym,
    weights: GlobWeights,
    opts: BddcOptions,
}

fn sum_into(y: &mut [f64], sub: &Subdomain, x: &[f64]) {
    for (&g, v) in sub.l2g.iter().zip(x) {
        y[g] += v;
    }
}

impl Bddc {
    /// `locals[i]` must be the sub-assembled system of geometric subdomain `i`.
    pub fn setup(
        space: &EdgeSpace,
        global: &GlobalSystem,
        locals: &[LocalSystem],
        part: &PbPartition,
        globs: &GlobSet,
        coarse: &CoarseSpace,
        opts: BddcOptions,
    ) -> Result<Self> {
        if locals.len() != part.n_geo {
            return Err(Error::DimensionMismatch { expected: part.n_geo, got: locals.len() });
        }
        let weights = compute_weights(globs, part, opts.scaling, space.mesh().h_min())?;
        let a = global.a();
        let built = crate::par::map((0..locals.len()).collect(), |i| {
            Self::setup_subdomain(space, global, &locals[i], i, globs, coarse, &weights, opts)
        });
        let subs = built.into_iter().collect::<Result<Vec<_>>>()?;

        let nc = coarse.n_coarse();
        let mut t = TripletBuilder::new(nc);
        for sub in &subs {
            let m = sub.coarse.rows.len();
            let mut inv = Vec::with_capacity(m * m);
            for k in 0..m {
                let mut e = vec![0.0; m];
                e[k] = 1.0;
                inv.extend(sub.saddle.solve_schur(&e));
            }
            for k in 0..m {
                for l in 0..m {
                    let v = 0.5 * (inv[k * m + l] + inv[l * m + k]);
                    t.push(sub.coarse.coarse_dofs[k], sub.coarse.coarse_dofs[l], v);
                }
            }
        }
        let coarse_matrix = t.build();
        let coarse_fact = factorize(&coarse_matrix, FactorKind::SpdCholesky).map_err(|e| e.context("coarse problem"))?;
        Ok(Self { n: space.n_dofs(), a, subs, coarse: coarse_fact, coarse_matrix, weights, opts })
    }

    #[allow(clippy::too_many_arguments)]
    fn setup_subdomain(
        space: &EdgeSpace,
        global: &GlobalSystem,
        local: &LocalSystem,
        i: usize,
        globs: &GlobSet,
        coarse: &CoarseSpace,
        weights: &GlobWeights,
        opts: BddcOptions,
    ) -> Result<Subdomain> {
        let n = local.n_dofs();
        let glob_of: Vec<usize> = local.l2g.iter().map(|&g| globs.edge_glob[space.edge(g)]).collect();
        let iface: Vec<bool> = glob_of.iter().map(|&g| g != NO_GLOB).collect();
        let interior: Vec<usize> = (0..n).filter(|&l| !iface[l]).collect();
        let a_i = local.a();
        let interior_fact = factorize(&a_i.principal_submatrix(&interior), FactorKind::SpdCholesky)
            .map_err(|e| e.context(format!("interior problem of subdomain {i}")))?;
        let weight = glob_of.iter().map(|&g| if g == NO_GLOB { 1.0 } else { weights.weight(g, i) }).collect();
        let a_tilde = if opts.perturbed { build_perturbed_local(local, &global.m, &iface) } else { a_i };
        let lc = coarse.restrict(space, Some(i), &local.l2g)?;
        let saddle = SaddlePoint::new(&a_tilde, lc.rows.clone()).map_err(|e| {
            let source = match e {
                Error::Singular { pivot } if pivot >= n => {
                    let cd = lc.coarse_dofs[pivot - n];
                    Error::SingularCoarseEdge { edge: coarse.offset.partition_point(|&o| o <= cd) - 1 }
                }
                other => other,
            };
            Error::SingularSaddle { subdomain: i, source: Box::new(source) }
        })?;
        Ok(Subdomain { l2g: local.l2g.clone(), interior, interior_fact, weight, coarse: lc, saddle })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn n_subdomains(&self) -> usize {
        self.subs.len()
    }

    pub fn coarse_size(&self) -> usize {
        self.coarse_matrix.dim()
    }

    pub fn coarse_matrix(&self) -> &SparseSym {
        &self.coarse_matrix
    }

    pub fn weights(&self) -> &GlobWeights {
        &self.weights
    }

    pub fn options(&self) -> BddcOptions {
        self.opts
    }

    pub fn local_dofs(&self, i: usize) -> &[usize] {
        &self.subs[i].l2g
    }

    pub fn constraint_rows(&self, i: usize) -> &[SparseRow] {
        &self.subs[i].coarse.rows
    }

    /// Coarse basis of subdomain `i`, one column per local coarse DOF.
    pub fn coarse_basis(&self, i: usize) -> Vec<Vec<f64>> {
        let sub = &self.subs[i];
        let m = sub.coarse.rows.len();
        (0..m)
            .map(|k| {
                let mut e = vec![0.0; m];
                e[k] = 1.0;
                let mut col = vec![0.0; sub.l2g.len()];
                let mut defect = e;
                // one refinement step against the computed constraint values
                for _ in 0..2 {
                    let c = sub.saddle.solve_schur(&defect);
                    for (l, &cl) in c.iter().enumerate() {
                        crate::linalg::axpy(cl, sub.saddle.y_col(l), &mut col);
                    }
                    let cc = sub.saddle.apply_constraints(&col);
                    defect = (0..m).map(|l| f64::from(u8::from(l == k)) - cc[l]).collect();
                }
                col
            })
            .collect()
    }

    /// `A_b⁻¹ r`: independent interior solves.
    pub fn interior_solve(&self, r: &[f64]) -> Vec<f64> {
        let parts = crate::par::map(self.subs.iter().collect(), |sub| {
            let b: Vec<f64> = sub.interior.iter().map(|&l| r[sub.l2g[l]]).collect();
            sub.interior_fact.solve(&b)
        });
        let mut u = vec![0.0; self.n];
        for (sub, x) in self.subs.iter().zip(parts) {
            for (&l, v) in sub.interior.iter().zip(x) {
                u[sub.l2g[l]] = v;
            }
        }
        u
    }

    /// Global `C u` through the weighted local changes of basis.
    pub fn apply_c(&self, u: &[f64]) -> Vec<f64> {
        let parts = crate::par::map(self.subs.iter().collect(), |sub| {
            let x = sub.coarse.basis.apply_c(&sub.gather(u)).expect("local dimension");
            sub.weighted(x)
        });
        let mut y = vec![0.0; self.n];
        for (sub, x) in self.subs.iter().zip(parts) {
            sum_into(&mut y, sub, &x);
        }
        y
    }

    /// Global `Cᵀ s`.
    pub fn apply_ct(&self, s: &[f64]) -> Vec<f64> {
        let parts = crate::par::map(self.subs.iter().collect(), |sub| {
            sub.coarse.basis.apply_ct(&sub.weighted(sub.gather(s))).expect("local dimension")
        });
        let mut y = vec![0.0; self.n];
        for (sub, x) in self.subs.iter().zip(parts) {
            sum_into(&mut y, sub, &x);
        }
        y
    }

    /// Weighted average of a broken field given per subdomain in the
    /// standard basis: `C Σ R_iᵀ D_i C_i⁻¹ u_i`.
    pub fn average(&self, broken: &[Vec<f64>]) -> Result<Vec<f64>> {
        if broken.len() != self.subs.len() {
            return Err(Error::DimensionMismatch { expected: self.subs.len(), got: broken.len() });
        }
        let mut w = vec![0.0; self.n];
        for (sub, u) in self.subs.iter().zip(broken) {
            let x = sub.coarse.basis.apply_cinv(u)?;
            sum_into(&mut w, sub, &sub.weighted(x));
        }
        Ok(self.apply_c(&w))
    }

    /// Preconditioner application `z = P r`.
    pub fn apply(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.n);
        let u1 = self.interior_solve(r);
        let au1 = self.a.apply(&u1);
        let s: Vec<f64> = r.iter().zip(&au1).map(|(a, b)| a - b).collect();
        let g = self.apply_ct(&s);

        let local = crate::par::map(self.subs.iter().collect(), |sub| {
            let rhs = sub.coarse.basis.apply_cinv_t(&sub.weighted(sub.gather(&g))).expect("local dimension");
            let zero = vec![0.0; sub.coarse.rows.len()];
            sub.saddle.solve(&rhs, &zero)
        });
        let mut rc = vec![0.0; self.coarse_size()];
        for (sub, (_, lambda)) in self.subs.iter().zip(&local) {
            for (&cd, l) in sub.coarse.coarse_dofs.iter().zip(lambda) {
                rc[cd] += l;
            }
        }
        let uc = self.coarse.solve(&rc);

        let pieces = crate::par::map(self.subs.iter().zip(local).collect(), |(sub, (mut v, _))| {
            let uci: Vec<f64> = sub.coarse.coarse_dofs.iter().map(|&cd| uc[cd]).collect();
            let c = sub.saddle.solve_schur(&uci);
            for (l, &cl) in c.iter().enumerate() {
                crate::linalg::axpy(cl, sub.saddle.y_col(l), &mut v);
            }
            sub.weighted(sub.coarse.basis.apply_cinv(&v).expect("local dimension"))
        });
        let mut w_hat = vec![0.0; self.n];
        for (sub, x) in self.subs.iter().zip(&pieces) {
            sum_into(&mut w_hat, sub, x);
        }
        let w = self.apply_c(&w_hat);

        let aw = self.a.apply(&w);
        let corr = self.interior_solve(&aw);
        let mut z = u1;
        for i in 0..self.n {
            z[i] += w[i] - corr[i];
        }
        z
    }
}

impl LinearOperator for Bddc {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.apply(x));
    }
}
