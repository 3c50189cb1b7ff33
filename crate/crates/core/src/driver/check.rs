//! Numerical invariants of the pipeline, usable from tests and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{PbMode, ProblemConfig, Scenario};
use super::run::Pipeline;
use crate::bddc::{compute_weights, Bddc, BddcOptions, ScalingKind};
use crate::coarse_edges::{split_chains, Chain};
use crate::error::Result;
use crate::linalg::{factorize, norm2, FactorKind, TripletBuilder};
use crate::meshfe::{assemble_subdomains, CoefficientField};
use crate::partition::{GlobKind, NO_GLOB};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value <= tolerance, value, tolerance }
    }

    fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value >= tolerance, value, tolerance }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// Largest `|Σ_D δ_D(λ) − 1|` over globs and all four scalings.
pub fn weight_partition_of_unity(p: &Pipeline) -> Result<f64> {
    let mut worst = 0.0f64;
    for kind in [ScalingKind::Cardinality, ScalingKind::Alpha, ScalingKind::Beta, ScalingKind::Omega] {
        if kind == ScalingKind::Alpha && p.part.avg_alpha.iter().any(|&a| a <= 0.0) {
            continue;
        }
        let w = compute_weights(&p.globs, &p.part, kind, p.space.mesh().h_min())?;
        for g in &w.weights {
            worst = worst.max((g.iter().map(|&(_, v)| v).sum::<f64>() - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Largest relative `‖C_i⁻¹ C_i x − x‖` over subdomains, plus the same for
/// the transposes.
pub fn basis_round_trip(p: &Pipeline) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, l) in p.locals.iter().enumerate() {
        let lc = p.coarse.restrict(&p.space, Some(i), &l.l2g)?;
        let x = random_vec(l.n_dofs(), 11 + i as u64);
        let nx = norm2(&x).max(f64::MIN_POSITIVE);
        let back = lc.basis.apply_cinv(&lc.basis.apply_c(&x)?)?;
        let back_t = lc.basis.apply_cinv_t(&lc.basis.apply_ct(&x)?)?;
        for b in [back, back_t] {
            let d: Vec<f64> = b.iter().zip(&x).map(|(a, c)| a - c).collect();
            worst = worst.max(norm2(&d) / nx);
        }
    }
    Ok(worst)
}

/// Largest `|Σ_i R_iᵀ A_i R_i − A|` entry relative to `max |A|`.
pub fn subassembly_defect(p: &Pipeline) -> f64 {
    let n = p.space.n_dofs();
    let mut t = TripletBuilder::new(n);
    for l in &p.locals {
        let a = l.a();
        for i in 0..a.dim() {
            for (j, v) in a.row(i) {
                t.push(l.l2g[i], l.l2g[j], v);
            }
        }
    }
    let sum = t.build();
    let a = p.global.a();
    let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0f64;
    for i in 0..n {
        for (j, v) in sum.row(i) {
            worst = worst.max((v - a.get(i, j)).abs());
        }
        for (j, v) in a.row(i) {
            worst = worst.max((v - sum.get(i, j)).abs());
        }
    }
    worst / scale
}

/// Largest disagreement of a coarse DOF of a continuous field between the
/// subdomains sharing it, relative to the field's max norm.
pub fn constraint_agreement(p: &Pipeline) -> Result<f64> {
    let u = random_vec(p.space.n_dofs(), 23);
    let mut value: Vec<Option<f64>> = vec![None; p.coarse.n_coarse()];
    let mut worst = 0.0f64;
    for (i, l) in p.locals.iter().enumerate() {
        let lc = p.coarse.restrict(&p.space, Some(i), &l.l2g)?;
        for (row, &cd) in lc.rows.iter().zip(&lc.coarse_dofs) {
            let v: f64 = row.iter().map(|&(j, a)| a * u[l.l2g[j]]).sum();
            match value[cd] {
                Some(w) => worst = worst.max((v - w).abs()),
                None => value[cd] = Some(v),
            }
        }
    }
    Ok(worst)
}

/// Largest `|C Φ_i − I|` entry over subdomains.
pub fn coarse_basis_defect(prec: &Bddc) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..prec.n_subdomains() {
        let phi = prec.coarse_basis(i);
        for (k, row) in prec.constraint_rows(i).iter().enumerate() {
            for (l, col) in phi.iter().enumerate() {
                let v: f64 = row.iter().map(|&(j, a)| a * col[j]).sum();
                worst = worst.max((v - if k == l { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    worst
}

/// Averages per-subdomain discrete gradients `∇(φ + ψ_i)` and returns the
/// largest curl energy of a local trace, minimized over interior values,
/// relative to `‖K_i‖_F ‖w_i‖²`. `ψ_i` is random but vanishes on the
/// boundary, at coarse-edge endpoints and at interface nodes outside faces
/// and coarse-edge interiors.
pub fn gradient_preservation(p: &Pipeline, prec: &Bddc, seed: u64) -> Result<f64> {
    let mesh = p.space.mesh();
    let nv = mesh.n_vertices();
    let mut free_node = vec![false; nv];
    for v in 0..nv {
        let g = p.globs.vertex_glob[v];
        free_node[v] = !mesh.vertex_on_boundary(v) && (g == NO_GLOB || p.globs.globs[g].kind == GlobKind::Face);
    }
    for ce in &p.coarse.edges {
        for &v in ce.chain.interior_nodes() {
            free_node[v] = true;
        }
    }
    let mut r = rng(seed);
    let mut nodal = |free: &dyn Fn(usize) -> bool| -> Vec<f64> {
        (0..nv).map(|v| if free(v) { r.random_range(-1.0..1.0) } else { 0.0 }).collect()
    };
    let common = nodal(&|v| !mesh.vertex_on_boundary(v));
    let broken: Vec<Vec<f64>> = (0..p.locals.len())
        .map(|_| {
            let psi = nodal(&|v| free_node[v]);
            let phi: Vec<f64> = common.iter().zip(&psi).map(|(a, b)| a + b).collect();
            p.space.interpolate_gradient(&phi)
        })
        .zip(&p.locals)
        .map(|(g, l)| l.l2g.iter().map(|&d| g[d]).collect())
        .collect();
    let w = prec.average(&broken)?;

    let unit = CoefficientField::homogeneous(mesh.n_cells(), 1.0, 1.0)?;
    let curl = assemble_subdomains(&p.space, &unit, &p.part.geo, p.part.n_geo, [0.0; 3])?;
    let mut worst = 0.0f64;
    for l in &curl {
        let n = l.n_dofs();
        let wi: Vec<f64> = l.l2g.iter().map(|&g| w[g]).collect();
        let iface: Vec<bool> = l.l2g.iter().map(|&g| p.globs.is_interface_edge(p.space.edge(g))).collect();
        let interior: Vec<usize> = (0..n).filter(|&j| !iface[j]).collect();
        // minimize over interior values with a vanishing mass shift
        let reg = l.k.add(&l.m.scaled(1e-8 * l.k.frobenius_norm() / l.m.frobenius_norm()));
        let mut wb = wi.clone();
        for &j in &interior {
            wb[j] = 0.0;
        }
        let kw = reg.apply(&wb);
        let rhs: Vec<f64> = interior.iter().map(|&j| -kw[j]).collect();
        let wint = factorize(&reg.principal_submatrix(&interior), FactorKind::SpdCholesky)?.solve(&rhs);
        for (&j, v) in interior.iter().zip(wint) {
            wb[j] = v;
        }
        let energy = l.k.bilinear(&wb, &wb);
        let scale = l.k.frobenius_norm() * wi.iter().map(|v| v * v).sum::<f64>();
        if scale > 0.0 {
            worst = worst.max(energy / scale);
        }
    }
    Ok(worst)
}

/// `‖x − A⁻¹ f‖ / ‖A⁻¹ f‖`.
pub fn direct_agreement(p: &Pipeline, x: &[f64]) -> Result<f64> {
    let direct = factorize(&p.global.a(), FactorKind::SpdCholesky)?.solve(&p.global.f);
    let d: Vec<f64> = x.iter().zip(&direct).map(|(a, b)| a - b).collect();
    Ok(norm2(&d) / norm2(&direct))
}

fn chain_ok(c: &Chain, edges: &[(usize, usize, usize)]) -> bool {
    let find = |id: usize| edges.iter().find(|e| e.0 == id).copied();
    c.edges.len() + 1 == c.nodes.len()
        && c.edges.iter().zip(&c.signs).enumerate().all(|(a, (&id, &s))| match find(id) {
            Some((_, t, h)) => (s > 0.0 && c.nodes[a] == t && c.nodes[a + 1] == h) || (s < 0.0 && c.nodes[a] == h && c.nodes[a + 1] == t),
            None => false,
        })
}

/// Structural invariants of a set of chains split from `edges`: the chains
/// partition the edges, are consistently oriented, and no interior node is
/// a split point or touches a third edge.
pub fn chains_valid(edges: &[(usize, usize, usize)], chains: &[Chain], split_at: &dyn Fn(usize) -> bool) -> bool {
    let mut ids: Vec<usize> = chains.iter().flat_map(|c| c.edges.iter().copied()).collect();
    ids.sort_unstable();
    let mut expect: Vec<usize> = edges.iter().map(|e| e.0).collect();
    expect.sort_unstable();
    if ids != expect {
        return false;
    }
    let degree = |v: usize| edges.iter().filter(|e| e.1 == v || e.2 == v).count();
    chains.iter().all(|c| {
        chain_ok(c, edges) && c.interior_nodes().iter().all(|&v| degree(v) == 2 && !split_at(v))
    })
}

/// The four pathological cases: disconnected pieces, a node touching an
/// extra subdomain, an n-furcation and a closed loop.
pub fn synthetic_edge_partition_suite() -> Vec<(String, bool)> {
    let cases: Vec<(&str, Vec<(usize, usize, usize)>, Vec<usize>, usize)> = vec![
        ("disconnected components", vec![(0, 0, 1), (1, 1, 2), (2, 7, 8), (3, 9, 8)], vec![], 2),
        ("extra-subdomain node", vec![(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 4)], vec![2], 2),
        ("n-furcation", vec![(0, 0, 3), (1, 1, 3), (2, 3, 4), (3, 4, 5), (4, 3, 6)], vec![], 4),
        ("closed loop", vec![(0, 4, 7), (1, 7, 9), (2, 6, 9), (3, 4, 6)], vec![], 1),
    ];
    cases
        .into_iter()
        .map(|(name, edges, split, expect)| {
            let split_at = |v: usize| split.contains(&v);
            let chains = split_chains(&edges, split_at);
            let mut rev = edges.clone();
            rev.reverse();
            let same = split_chains(&rev, split_at) == chains;
            let ok = chains.len() == expect && chains_valid(&edges, &chains, &split_at) && same;
            (name.to_string(), ok)
        })
        .collect()
}

/// Chain invariants for every edge glob of the pipeline, plus `|det Q^E| > 0`.
pub fn edge_partition_valid(p: &Pipeline) -> bool {
    let mesh = p.space.mesh();
    for (g, glob) in p.globs.of_kind(GlobKind::Edge) {
        let edges: Vec<(usize, usize, usize)> = glob
            .edges
            .iter()
            .map(|&e| {
                let (t, h) = mesh.edge_vertices(e);
                (e, t, h)
            })
            .collect();
        let chains: Vec<Chain> = p.coarse.edges.iter().filter(|c| c.glob == g).map(|c| c.chain.clone()).collect();
        let split_at = |v: usize| p.globs.vertex_neigh_pb[v] != glob.neigh_pb;
        if !chains_valid(&edges, &chains, &split_at) {
            return false;
        }
    }
    p.coarse.qe.iter().all(|q| crate::linalg::DenseLu::factor(q).map(|lu| lu.determinant().abs() > 0.0).unwrap_or(false))
}

/// Lanczos estimate of the smallest eigenvalue of the unperturbed
/// preconditioned operator.
pub fn unperturbed_lambda_min(p: &Pipeline) -> Result<f64> {
    let prec = p.preconditioner(BddcOptions { scaling: p.config.scaling, perturbed: false })?;
    let b = random_vec(p.space.n_dofs(), 31);
    let (_, rep) = crate::linalg::pcg(&p.global.a(), &prec, &b, 1e-10, 500)?;
    Ok(rep.lanczos_eigs.0)
}

/// Small problems covering every scenario and partition mode.
pub fn suite_configs() -> Vec<(&'static str, ProblemConfig)> {
    let base = ProblemConfig { h_ratio: 4, tol: 1e-8, ..ProblemConfig::default() };
    vec![
        ("homogeneous 2x2x2", base.clone()),
        (
            "checkerboard 2x2x2",
            ProblemConfig {
                scenario: Scenario::Checkerboard,
                alpha_white: 1e2,
                beta_white: 1.0,
                alpha_black: 1e4,
                beta_black: 1e-2,
                scaling: ScalingKind::Omega,
                perturbed: true,
                pb_mode: PbMode::Material,
                ..base.clone()
            },
        ),
        (
            "channels 3x3x2",
            ProblemConfig {
                scenario: Scenario::Channels,
                partition: [3, 3, 2],
                contrast_exp: Some(2.0),
                scaling: ScalingKind::Alpha,
                perturbed: true,
                pb_mode: PbMode::Material,
                ..base.clone()
            },
        ),
        (
            "sinusoidal rpb 2x2x2",
            ProblemConfig {
                scenario: Scenario::Sinusoidal,
                c_max: 4.0,
                r_alpha: 10.0,
                r_beta: 10.0,
                scaling: ScalingKind::Alpha,
                perturbed: true,
                pb_mode: PbMode::Relaxed,
                ..base
            },
        ),
    ]
}

/// Runs every invariant on [`suite_configs`].
pub fn run_suite() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (i, (name, s)) in synthetic_edge_partition_suite().into_iter().enumerate() {
        out.push(CheckOutcome { name: format!("edge partition case [{}] {name}", i + 1), passed: s, value: f64::from(u8::from(s)), tolerance: 1.0 });
    }
    for (name, cfg) in suite_configs() {
        let p = Pipeline::build(&cfg)?;
        let prec = p.preconditioner(p.options())?;
        out.push(CheckOutcome::at_most(format!("{name}: weight partition of unity"), weight_partition_of_unity(&p)?, 1e-14));
        out.push(CheckOutcome::at_most(format!("{name}: change of basis round trip"), basis_round_trip(&p)?, 1e-12));
        out.push(CheckOutcome::at_most(format!("{name}: gradient preservation"), gradient_preservation(&p, &prec, 5)?, 1e-10));
        out.push(CheckOutcome::at_most(format!("{name}: C Phi = I"), coarse_basis_defect(&prec), 1e-10));
        out.push(CheckOutcome::at_most(format!("{name}: sub-assembly identity"), subassembly_defect(&p), 1e-13));
        out.push(CheckOutcome::at_most(format!("{name}: constraint agreement"), constraint_agreement(&p)?, 1e-12));
        let valid = edge_partition_valid(&p);
        out.push(CheckOutcome { name: format!("{name}: edge partition invariants"), passed: valid, value: f64::from(u8::from(valid)), tolerance: 1.0 });
        let (x, _) = p.solve(&prec)?;
        out.push(CheckOutcome::at_most(format!("{name}: PCG vs direct"), direct_agreement(&p, &x)?, 1e-6));
        out.push(CheckOutcome::at_least(format!("{name}: unperturbed lambda_min"), unperturbed_lambda_min(&p)?, 1.0 - 1e-6));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_cases_pass() {
        for (name, ok) in synthetic_edge_partition_suite() {
            assert!(ok, "{name}");
        }
    }

    #[test]
    fn chain_validator_rejects_bad_chains() {
        let edges = [(0, 0, 1), (1, 1, 2)];
        let good = split_chains(&edges, |_| false);
        assert!(chains_valid(&edges, &good, &|_| false));
        assert!(!chains_valid(&edges, &good, &|v| v == 1));
        let mut flipped = good.clone();
        flipped[0].signs[0] = -1.0;
        assert!(!chains_valid(&edges, &flipped, &|_| false));
    }

    #[test]
    fn gradient_check_has_teeth() {
        let cfg = suite_configs().remove(1).1;
        let p = Pipeline::build(&cfg).unwrap();
        let prec = p.preconditioner(p.options()).unwrap();
        assert!(gradient_preservation(&p, &prec, 1).unwrap() <= 1e-10);
        // without the change of basis, averaging destroys gradients
        let mut plain = p.clone();
        for q in &mut plain.coarse.qf {
            q.clear();
        }
        for (q, ce) in plain.coarse.qe.iter_mut().zip(&plain.coarse.edges) {
            *q = crate::linalg::DenseMatrix::identity(ce.n_e());
        }
        let naive = plain.preconditioner(plain.options()).unwrap();
        assert!(gradient_preservation(&plain, &naive, 1).unwrap() > 1e-6);
    }
}
