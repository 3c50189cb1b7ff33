//! Lowest-order Nédélec shape functions on an axis-aligned hexahedron and
//! the cell curl-curl, mass and load integrals.

use super::mesh::BoxMesh;

/// Local `(a, b)` offsets of the four edges parallel to one axis; see
/// [`BoxMesh::cell_edges`].
const PATTERN: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

#[inline]
fn lag(a: usize, t: f64) -> f64 {
    if a == 0 {
        1.0 - t
    } else {
        t
    }
}

#[inline]
fn dlag(a: usize) -> f64 {
    if a == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Shape function values and curls at reference point `xi ∈ [0,1]³` of a
/// cell with spacings `h`.
pub fn shape_functions(h: [f64; 3], xi: [f64; 3]) -> ([[f64; 3]; 12], [[f64; 3]; 12]) {
    let [hx, hy, hz] = h;
    let [x, y, z] = xi;
    let mut val = [[0.0; 3]; 12];
    let mut curl = [[0.0; 3]; 12];
    for (s, &(a, b)) in PATTERN.iter().enumerate() {
        // x-edge: (a, b) offsets in (y, z)
        val[s] = [lag(a, y) * lag(b, z) / hx, 0.0, 0.0];
        curl[s] = [0.0, lag(a, y) * dlag(b) / (hx * hz), -dlag(a) * lag(b, z) / (hx * hy)];
        // y-edge: (a, b) offsets in (x, z)
        val[4 + s] = [0.0, lag(a, x) * lag(b, z) / hy, 0.0];
        curl[4 + s] = [-lag(a, x) * dlag(b) / (hy * hz), 0.0, dlag(a) * lag(b, z) / (hy * hx)];
        // z-edge: (a, b) offsets in (x, y)
        val[8 + s] = [0.0, 0.0, lag(a, x) * lag(b, y) / hz];
        curl[8 + s] = [lag(a, x) * dlag(b) / (hz * hy), -dlag(a) * lag(b, y) / (hz * hx), 0.0];
    }
    (val, curl)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellMatrices {
    pub k: [[f64; 12]; 12],
    pub m: [[f64; 12]; 12],
    pub f: [f64; 12],
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `K_e = α ∫ ∇×N_i·∇×N_j`, `M_e = β ∫ N_i·N_j`, `f_e = ∫ N_i·load` by
/// 2×2×2 Gauss quadrature.
pub fn assemble_cell(h: [f64; 3], alpha: f64, beta: f64, load: [f64; 3]) -> CellMatrices {
    let g = 0.5 / 3f64.sqrt();
    let pts = [0.5 - g, 0.5 + g];
    let w = 0.125 * h[0] * h[1] * h[2];
    let mut out = CellMatrices { k: [[0.0; 12]; 12], m: [[0.0; 12]; 12], f: [0.0; 12] };
    for &x in &pts {
        for &y in &pts {
            for &z in &pts {
                let (val, curl) = shape_functions(h, [x, y, z]);
                for i in 0..12 {
                    out.f[i] += w * dot3(&val[i], &load);
                    for j in 0..12 {
                        out.k[i][j] += w * alpha * dot3(&curl[i], &curl[j]);
                        out.m[i][j] += w * beta * dot3(&val[i], &val[j]);
                    }
                }
            }
        }
    }
    out
}

/// Cell matrices for `α = β = 1`, shared by every cell of a uniform mesh.
pub fn reference_cell(mesh: &BoxMesh, load: [f64; 3]) -> CellMatrices {
    assemble_cell(mesh.h(), 1.0, 1.0, load)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangential_moment_duality() {
        for h in [[1.0, 1.0, 1.0], [0.5, 2.0, 0.25]] {
            let mesh = BoxMesh::new(1, 1, 1, h[0], h[1], h[2]).unwrap();
            let edges = mesh.cell_edges(0);
            for (s, &e) in edges.iter().enumerate() {
                let (t, hd) = mesh.edge_vertices(e);
                let (a, b) = (mesh.vertex_coords(t), mesh.vertex_coords(hd));
                let mid = [0, 1, 2].map(|d| 0.5 * (a[d] + b[d]) / h[d]);
                let axis = mesh.edge_axis(e).index();
                let (val, _) = shape_functions(h, mid);
                for (r, v) in val.iter().enumerate() {
                    // N_r·t is constant along any edge parallel to it
                    let moment = v[axis] * h[axis];
                    let expect = if r == s { 1.0 } else { 0.0 };
                    assert!((moment - expect).abs() < 1e-14, "edge {s}, fn {r}: {moment}");
                }
            }
        }
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let mesh = BoxMesh::new(1, 1, 1, 0.3, 0.7, 1.1).unwrap();
        let cm = assemble_cell(mesh.h(), 1.0, 1.0, [0.0; 3]);
        let edges = mesh.cell_edges(0);
        for seed in 0..8 {
            let phi: Vec<f64> = (0..8).map(|v| ((v * 7 + seed * 3) % 11) as f64 - 5.0).collect();
            let g: Vec<f64> = edges
                .iter()
                .map(|&e| {
                    let (t, h) = mesh.edge_vertices(e);
                    phi[h] - phi[t]
                })
                .collect();
            for i in 0..12 {
                let kg: f64 = (0..12).map(|j| cm.k[i][j] * g[j]).sum();
                assert!(kg.abs() < 1e-12, "{kg}");
            }
        }
    }

    #[test]
    fn mass_matches_closed_form() {
        // ∫ℓ_a ℓ_b over [0,1] is 1/3 on the diagonal and 1/6 off it.
        let mm = |a: usize, b: usize| if a == b { 1.0 / 3.0 } else { 1.0 / 6.0 };
        let h = [0.5, 0.25, 2.0];
        let vol = h[0] * h[1] * h[2];
        let cm = assemble_cell(h, 1.0, 3.0, [0.0; 3]);
        for i in 0..12 {
            for j in 0..12 {
                let expect = if i / 4 == j / 4 {
                    let (a, b) = PATTERN[i % 4];
                    let (c, d) = PATTERN[j % 4];
                    3.0 * vol / (h[i / 4] * h[i / 4]) * mm(a, c) * mm(b, d)
                } else {
                    0.0
                };
                assert!((cm.m[i][j] - expect).abs() < 1e-13, "({i},{j})");
            }
        }
        let one_m_one: f64 = cm.m.iter().flatten().sum::<f64>() / 3.0;
        let expect = vol * h.iter().map(|x| 1.0 / (x * x)).sum::<f64>();
        assert!((one_m_one - expect).abs() < 1e-12);
    }

    #[test]
    fn unit_cube_mass_sum_is_three() {
        let cm = assemble_cell([1.0; 3], 1.0, 1.0, [1.0; 3]);
        let s: f64 = cm.m.iter().flatten().sum();
        assert!((s - 3.0).abs() < 1e-14);
        for v in cm.f {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_in_coefficients_and_kernel_dimension() {
        let h = [1.0, 0.5, 0.75];
        let a = assemble_cell(h, 1.0, 1.0, [0.0; 3]);
        let b = assemble_cell(h, 2.0, 1.0, [0.0; 3]);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(b.k[i][j], 2.0 * a.k[i][j]);
                assert_eq!(b.m[i][j], a.m[i][j]);
                assert_eq!(a.k[i][j], a.k[j][i]);
            }
        }
        let km = faer::Mat::<f64>::from_fn(12, 12, |i, j| a.k[i][j]);
        let ev = km.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let top = ev[11];
        assert!(ev[0] > -1e-12 * top);
        // gradients of the eight vertex functions minus constants
        assert_eq!(ev.iter().filter(|&&x| x.abs() <= 1e-12 * top).count(), 7);
    }
}
