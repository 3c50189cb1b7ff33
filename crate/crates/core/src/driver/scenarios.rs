//! Coefficient fields of the test problems. Material 0 is white, 1 black.

use super::config::{Heterogeneous, ProblemConfig, Scenario};
use crate::error::Result;
use crate::meshfe::{BoxMesh, CoefficientField};

pub fn coefficient_field(cfg: &ProblemConfig, mesh: &BoxMesh) -> Result<CoefficientField> {
    match cfg.scenario {
        Scenario::Homogeneous => CoefficientField::homogeneous(mesh.n_cells(), cfg.alpha, cfg.beta),
        Scenario::Checkerboard => {
            let white = checkerboard_white(mesh, cfg.partition);
            two_materials(&white, cfg.white(), cfg.black())
        }
        Scenario::Channels => {
            let white = channel_cells(mesh, cfg.partition, cfg.gamma);
            two_materials(&white, cfg.white(), (1.0, 1.0))
        }
        Scenario::Sinusoidal => sinusoidal(mesh, cfg.partition, cfg.c_max, cfg.which),
    }
}

fn two_materials(white: &[bool], w: (f64, f64), b: (f64, f64)) -> Result<CoefficientField> {
    let pick = |x: bool| if x { w } else { b };
    CoefficientField::new(
        white.iter().map(|&x| pick(x).0).collect(),
        white.iter().map(|&x| pick(x).1).collect(),
        Some(white.iter().map(|&x| u32::from(!x)).collect()),
    )
}

fn block_of(mesh: &BoxMesh, parts: [usize; 3], c: usize) -> ([usize; 3], [usize; 3]) {
    let n = mesh.cells_per_axis();
    let ijk = mesh.cell_ijk(c);
    let size = [0, 1, 2].map(|d| n[d] / parts[d]);
    ([0, 1, 2].map(|d| ijk[d] / size[d]), [0, 1, 2].map(|d| ijk[d] % size[d]))
}

/// Cells of subdomains with even `I + J + K`.
pub fn checkerboard_white(mesh: &BoxMesh, parts: [usize; 3]) -> Vec<bool> {
    (0..mesh.n_cells())
        .map(|c| {
            let (b, _) = block_of(mesh, parts, c);
            (b[0] + b[1] + b[2]) % 2 == 0
        })
        .collect()
}

/// Cells inside one of the axis-parallel channels of cross-section `γH`
/// anchored at the minimal corner of every subdomain.
pub fn channel_cells(mesh: &BoxMesh, parts: [usize; 3], gamma: f64) -> Vec<bool> {
    let n = mesh.cells_per_axis();
    let width = [0, 1, 2].map(|d| (gamma * (n[d] / parts[d]) as f64).round() as usize);
    (0..mesh.n_cells())
        .map(|c| {
            let (_, off) = block_of(mesh, parts, c);
            let inside = [0, 1, 2].map(|d| off[d] < width[d]);
            (0..3).any(|a| (0..3).filter(|&d| d != a).all(|d| inside[d]))
        })
        .collect()
}

/// `log10 α = (c/2) sin(N_x π x)` and `log10 β = (c/2) sin(N_y π y)`,
/// sampled at cell centroids, with `x, y` scaled to the unit interval.
pub fn sinusoidal(mesh: &BoxMesh, parts: [usize; 3], c_max: f64, which: Heterogeneous) -> Result<CoefficientField> {
    let len = mesh.lengths();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    for c in 0..mesh.n_cells() {
        let x = mesh.cell_centroid(c);
        let wave = |d: usize| 10f64.powf(0.5 * c_max * (parts[d] as f64 * std::f64::consts::PI * x[d] / len[d]).sin());
        alpha.push(if which != Heterogeneous::Beta { wave(0) } else { 1.0 });
        beta.push(if which != Heterogeneous::Alpha { wave(1) } else { 1.0 });
    }
    CoefficientField::new(alpha, beta, None)
}
