//! Averaging weights and the (perturbed) BDDC preconditioner.

mod precond;
mod weights;

pub use precond::{build_perturbed_local, Bddc, BddcOptions};
pub use weights::{chi, compute_weights, GlobWeights, ScalingKind};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse_edges::CoarseSpace;
    use crate::linalg::{dot, factorize, norm2, pcg, FactorKind, Identity, SparseSym};
    use crate::meshfe::{assemble_global, assemble_subdomains, BoxMesh, CoefficientField, EdgeSpace, GlobalSystem, LocalSystem};
    use crate::partition::{classify_globs, geometric_partition, GlobSet, PbPartition};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Case {
        space: EdgeSpace,
        global: GlobalSystem,
        locals: Vec<LocalSystem>,
        part: PbPartition,
        globs: GlobSet,
        coarse: CoarseSpace,
    }

    impl Case {
        fn new(n: [usize; 3], parts: [usize; 3], field: impl Fn([f64; 3]) -> (f64, f64), by_material: bool) -> Self {
            let mesh = BoxMesh::new(n[0], n[1], n[2], 1.0, 1.0, 1.0).unwrap();
            let (alpha, beta): (Vec<f64>, Vec<f64>) = (0..mesh.n_cells()).map(|c| field(mesh.cell_centroid(c))).unzip();
            let field = CoefficientField::new(alpha, beta, None).unwrap();
            let geo = geometric_partition(&mesh, parts).unwrap();
            let n_geo = parts.iter().product();
            let part = if by_material {
                PbPartition::by_material(&mesh, geo, n_geo, &field).unwrap()
            } else {
                PbPartition::geometric(geo, n_geo, &field).unwrap()
            };
            let globs = classify_globs(&mesh, &part);
            let space = EdgeSpace::new(mesh);
            let global = assemble_global(&space, &field, [1.0, 1.0, 1.0]).unwrap();
            let locals = assemble_subdomains(&space, &field, &part.geo, n_geo, [1.0, 1.0, 1.0]).unwrap();
            let coarse = CoarseSpace::build(&space, &globs).unwrap();
            Self { space, global, locals, part, globs, coarse }
        }

        fn homogeneous(n: usize, parts: [usize; 3]) -> Self {
            Self::new([n; 3], parts, |_| (1.0, 1.0), false)
        }

        fn bddc(&self, scaling: ScalingKind, perturbed: bool) -> Bddc {
            let opts = BddcOptions { scaling, perturbed };
            Bddc::setup(&self.space, &self.global, &self.locals, &self.part, &self.globs, &self.coarse, opts).unwrap()
        }
    }

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Checkerboard of 2×2×2 subdomain blocks over a 4³ mesh split 2×2×2.
    fn checker(x: [f64; 3]) -> (f64, f64) {
        let parity = x.iter().map(|v| (v * 2.0).floor() as usize).sum::<usize>() % 2;
        if parity == 0 {
            (1e2, 1.0)
        } else {
            (1e4, 1e-2)
        }
    }

    #[test]
    fn single_subdomain_is_a_direct_solver() {
        let c = Case::homogeneous(3, [1, 1, 1]);
        let p = c.bddc(ScalingKind::Cardinality, true);
        assert_eq!(p.coarse_size(), 0);
        let r = random(c.space.n_dofs(), 1);
        let z = p.apply(&r);
        let az = c.global.a().apply(&z);
        for (a, b) in az.iter().zip(&r) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_size_of_eight_cubes() {
        let c = Case::homogeneous(4, [2, 2, 2]);
        assert_eq!(c.bddc(ScalingKind::Cardinality, false).coarse_size(), 12);
    }

    fn symmetry_defect(c: &Case, scaling: ScalingKind, perturbed: bool) -> f64 {
        let p = c.bddc(scaling, perturbed);
        let n = c.space.n_dofs();
        let (r1, r2) = (random(n, 2), random(n, 3));
        let (p1, p2) = (p.apply(&r1), p.apply(&r2));
        let scale = (norm2(&r1) * norm2(&p2)).max(norm2(&r2) * norm2(&p1));
        (dot(&r1, &p2) - dot(&r2, &p1)).abs() / scale
    }

    #[test]
    fn preconditioner_is_symmetric() {
        let homogeneous = Case::homogeneous(4, [2, 2, 1]);
        let mild = Case::new([4, 4, 4], [2, 2, 2], |x| (1.0 + 9.0 * checker(x).0 / 1e4, 1.0), true);
        for (c, scaling, perturbed) in [
            (&homogeneous, ScalingKind::Cardinality, true),
            (&mild, ScalingKind::Omega, true),
            (&mild, ScalingKind::Alpha, false),
        ] {
            let d = symmetry_defect(c, scaling, perturbed);
            assert!(d <= 1e-10, "{scaling} {perturbed}: {d:e}");
        }
    }

    #[test]
    fn high_contrast_symmetry_is_limited_by_roundoff() {
        let c = Case::new([4, 4, 4], [2, 2, 2], checker, true);
        for (scaling, perturbed) in [(ScalingKind::Omega, true), (ScalingKind::Alpha, false)] {
            let d = symmetry_defect(&c, scaling, perturbed);
            assert!(d <= 1e-8, "{scaling} {perturbed}: {d:e}");
        }
    }

    #[test]
    fn transpose_of_global_change_of_basis() {
        let c = Case::new([6, 6, 3], [3, 2, 1], |x| (1.0 + x[0], 1.0), false);
        let p = c.bddc(ScalingKind::Alpha, false);
        let n = c.space.n_dofs();
        let (u, v) = (random(n, 4), random(n, 5));
        let (a, b) = (dot(&v, &p.apply_c(&u)), dot(&u, &p.apply_ct(&v)));
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn coarse_basis_satisfies_constraints() {
        let c = Case::new([6, 6, 6], [2, 2, 2], |x| (1.0 + 10.0 * x[1], 1.0 + x[2]), false);
        let p = c.bddc(ScalingKind::Beta, true);
        for i in 0..p.n_subdomains() {
            let phi = p.coarse_basis(i);
            let rows = p.constraint_rows(i);
            for (k, row) in rows.iter().enumerate() {
                for (l, col) in phi.iter().enumerate() {
                    let v: f64 = row.iter().map(|&(j, a)| a * col[j]).sum();
                    let expect = if k == l { 1.0 } else { 0.0 };
                    assert!((v - expect).abs() < 1e-10, "subdomain {i} ({k},{l}): {v}");
                }
            }
        }
        assert!(p.coarse_matrix().is_symmetric(1e-12));
    }

    #[test]
    fn homogeneous_eight_subdomains_converge_quickly() {
        let c = Case::homogeneous(8, [2, 2, 2]);
        let p = c.bddc(ScalingKind::Cardinality, false);
        let a = c.global.a();
        let (x, rep) = pcg(&a, &p, &c.global.f, 1e-6, 200).unwrap();
        assert!(rep.converged && rep.iterations <= 25, "{} iterations", rep.iterations);
        let direct = factorize(&a, FactorKind::SpdCholesky).unwrap().solve(&c.global.f);
        let err = x.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-5 * scale);
        let (_, plain) = pcg(&a, &Identity(a.dim()), &c.global.f, 1e-6, 2000).unwrap();
        assert!(rep.iterations < plain.iterations);
    }

    #[test]
    fn unperturbed_spectrum_is_bounded_below_by_one() {
        let c = Case::new([6, 6, 6], [3, 3, 3], checker, true);
        for scaling in [ScalingKind::Cardinality, ScalingKind::Omega] {
            let p = c.bddc(scaling, false);
            let (_, rep) = pcg(&c.global.a(), &p, &random(c.space.n_dofs(), 6), 1e-10, 300).unwrap();
            assert!(rep.lanczos_eigs.0 >= 1.0 - 1e-6, "{scaling}: {:?}", rep.lanczos_eigs);
        }
    }

    #[test]
    fn perturbed_local_matrix() {
        let c = Case::new([4, 2, 2], [2, 1, 1], |x| (1.0 + x[0], 2.0 + x[1]), false);
        let iface: Vec<Vec<bool>> = c
            .locals
            .iter()
            .map(|l| l.l2g.iter().map(|&g| c.globs.is_interface_edge(c.space.edge(g))).collect())
            .collect();
        let t0 = build_perturbed_local(&c.locals[0], &c.global.m, &iface[0]);
        assert!(t0.is_symmetric(1e-15));
        let l0 = &c.locals[0];
        let mut checked = 0;
        for a in 0..l0.n_dofs() {
            for b in 0..l0.n_dofs() {
                let expect = if iface[0][a] && iface[0][b] {
                    let (ga, gb) = (l0.l2g[a], l0.l2g[b]);
                    let l1 = &c.locals[1];
                    let m1 = match (l1.local(ga), l1.local(gb)) {
                        (Some(x), Some(y)) => l1.m.get(x, y),
                        _ => 0.0,
                    };
                    checked += 1;
                    l0.k.get(a, b) + l0.m.get(a, b) + m1
                } else {
                    l0.k.get(a, b) + l0.m.get(a, b)
                };
                assert!((t0.get(a, b) - expect).abs() < 1e-15);
            }
        }
        assert!(checked > 0);

        let single = Case::homogeneous(2, [1, 1, 1]);
        let none = vec![false; single.locals[0].n_dofs()];
        let t = build_perturbed_local(&single.locals[0], &single.global.m, &none);
        let a: SparseSym = single.locals[0].a();
        assert_eq!(t.to_dense(), a.to_dense());
    }

    #[test]
    fn averaging_reproduces_continuous_fields() {
        let c = Case::new([6, 6, 6], [3, 2, 1], checker, true);
        let p = c.bddc(ScalingKind::Alpha, true);
        let u = random(c.space.n_dofs(), 7);
        let broken: Vec<Vec<f64>> = (0..p.n_subdomains()).map(|i| p.local_dofs(i).iter().map(|&g| u[g]).collect()).collect();
        let w = p.average(&broken).unwrap();
        for (a, b) in w.iter().zip(&u) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
