//! Geometric subdomains, physics-based sub-partitions and interface globs.

mod globs;

pub use globs::{classify_globs, Glob, GlobKind, GlobSet, NO_GLOB};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meshfe::{BoxMesh, CoefficientField};

/// Structured block partition: subdomain `I + Nx (J + Ny K)` owns the cells
/// of block `(I, J, K)`.
pub fn geometric_partition(mesh: &BoxMesh, parts: [usize; 3]) -> Result<Vec<usize>> {
    let n = mesh.cells_per_axis();
    for d in 0..3 {
        if parts[d] == 0 || !n[d].is_multiple_of(parts[d]) {
            return Err(Error::InvalidInput(format!(
                "{} cells along axis {d} cannot be split into {} blocks",
                n[d], parts[d]
            )));
        }
    }
    let block = [n[0] / parts[0], n[1] / parts[1], n[2] / parts[2]];
    Ok((0..mesh.n_cells())
        .map(|c| {
            let ijk = mesh.cell_ijk(c);
            let b = [0, 1, 2].map(|d| ijk[d] / block[d]);
            b[0] + parts[0] * (b[1] + parts[1] * b[2])
        })
        .collect())
}

/// Three-level cell labeling: geometric subdomain and PB-subdomain, plus
/// the PB-subdomain averaged coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbPartition {
    pub geo: Vec<usize>,
    pub n_geo: usize,
    pub pb: Vec<usize>,
    /// Geometric subdomain containing each PB-subdomain.
    pub pb_geo: Vec<usize>,
    pub avg_alpha: Vec<f64>,
    pub avg_beta: Vec<f64>,
}

impl PbPartition {
    pub fn n_pb(&self) -> usize {
        self.pb_geo.len()
    }

    fn from_labels(geo: Vec<usize>, n_geo: usize, pb: Vec<usize>, n_pb: usize, field: &CoefficientField) -> Self {
        let mut pb_geo = vec![usize::MAX; n_pb];
        for (c, &p) in pb.iter().enumerate() {
            debug_assert!(pb_geo[p] == usize::MAX || pb_geo[p] == geo[c]);
            pb_geo[p] = geo[c];
        }
        let (avg_alpha, avg_beta) = averaged_coefficients(&pb, n_pb, field);
        Self { geo, n_geo, pb, pb_geo, avg_alpha, avg_beta }
    }

    /// PB-subdomains coincide with geometric subdomains.
    pub fn geometric(geo: Vec<usize>, n_geo: usize, field: &CoefficientField) -> Result<Self> {
        check_labels(&geo, n_geo, field)?;
        let pb = geo.clone();
        Ok(Self::from_labels(geo, n_geo, pb, n_geo, field))
    }

    /// Face-connected components of equal material inside each geometric
    /// subdomain. Without material ids, cells with bitwise-equal `(α, β)`
    /// count as one material.
    pub fn by_material(mesh: &BoxMesh, geo: Vec<usize>, n_geo: usize, field: &CoefficientField) -> Result<Self> {
        check_labels(&geo, n_geo, field)?;
        let key: Vec<(u64, u64, u32)> = (0..field.n_cells())
            .map(|c| match &field.material {
                Some(m) => (0, 0, m[c]),
                None => (field.alpha[c].to_bits(), field.beta[c].to_bits(), 0),
            })
            .collect();
        let class: Vec<(usize, (u64, u64, u32))> = (0..geo.len()).map(|c| (geo[c], key[c])).collect();
        let (pb, n_pb) = connected_classes(mesh, &class);
        Ok(Self::from_labels(geo, n_geo, pb, n_pb, field))
    }

    /// Relaxed partition: in each geometric subdomain, cells are binned into
    /// the coefficient intervals `[r^{i-1} min, r^i min]`; a value on a bin
    /// boundary joins the lower bin. Each nonempty `(i, j)` bin becomes one
    /// PB-subdomain, optionally split further into face-connected pieces.
    pub fn relaxed(
        mesh: &BoxMesh,
        geo: Vec<usize>,
        n_geo: usize,
        field: &CoefficientField,
        r_alpha: f64,
        r_beta: f64,
        split_connected: bool,
    ) -> Result<Self> {
        check_labels(&geo, n_geo, field)?;
        for r in [r_alpha, r_beta] {
            if !(r > 1.0) {
                return Err(Error::InvalidInput(format!("relaxation threshold must be > 1, got {r}")));
            }
        }
        let mut amin = vec![f64::INFINITY; n_geo];
        let mut amax = vec![0.0f64; n_geo];
        let mut bmin = vec![f64::INFINITY; n_geo];
        let mut bmax = vec![0.0f64; n_geo];
        for c in 0..geo.len() {
            let d = geo[c];
            if field.alpha[c] > 0.0 {
                amin[d] = amin[d].min(field.alpha[c]);
                amax[d] = amax[d].max(field.alpha[c]);
            }
            bmin[d] = bmin[d].min(field.beta[c]);
            bmax[d] = bmax[d].max(field.beta[c]);
        }
        let la: Vec<usize> = (0..n_geo).map(|d| interval_count(amin[d], amax[d], r_alpha)).collect();
        let lb: Vec<usize> = (0..n_geo).map(|d| interval_count(bmin[d], bmax[d], r_beta)).collect();
        let class: Vec<(usize, (usize, usize))> = (0..geo.len())
            .map(|c| {
                let d = geo[c];
                // α = 0 cells form their own bin 0
                let i = if field.alpha[c] > 0.0 { interval_index(field.alpha[c], amin[d], r_alpha, la[d]) } else { 0 };
                let j = interval_index(field.beta[c], bmin[d], r_beta, lb[d]);
                (d, (i, j))
            })
            .collect();
        let (pb, n_pb) = if split_connected { connected_classes(mesh, &class) } else { first_seen_classes(&class) };
        Ok(Self::from_labels(geo, n_geo, pb, n_pb, field))
    }
}

fn check_labels(geo: &[usize], n_geo: usize, field: &CoefficientField) -> Result<()> {
    if geo.len() != field.n_cells() {
        return Err(Error::DimensionMismatch { expected: field.n_cells(), got: geo.len() });
    }
    if let Some(c) = geo.iter().position(|&g| g >= n_geo) {
        return Err(Error::InvalidInput(format!("cell {c} has no subdomain label")));
    }
    Ok(())
}

/// Smallest `ℓ ≥ 1` with `max/min < r^ℓ`.
pub fn interval_count(min: f64, max: f64, r: f64) -> usize {
    if !(min > 0.0) || !max.is_finite() || r == f64::INFINITY {
        return 1;
    }
    let ratio = max / min;
    let mut l = 1;
    let mut bound = r;
    while ratio >= bound {
        l += 1;
        bound *= r;
    }
    l
}

/// Smallest `i ≥ 1` with `value ≤ r^i min`, capped at `l`.
pub fn interval_index(value: f64, min: f64, r: f64, l: usize) -> usize {
    let mut i = 1;
    let mut bound = min * r;
    while i < l && value > bound {
        i += 1;
        bound *= r;
    }
    i
}

/// Labels cells by class, numbering classes in order of first cell.
fn first_seen_classes<K: Ord + Clone>(class: &[K]) -> (Vec<usize>, usize) {
    let mut ids = std::collections::BTreeMap::new();
    let labels = class
        .iter()
        .map(|k| {
            let n = ids.len();
            *ids.entry(k.clone()).or_insert(n)
        })
        .collect();
    (labels, ids.len())
}

/// Face-connected components of cells with equal class, numbered by a
/// flood fill in increasing cell order.
fn connected_classes<K: PartialEq>(mesh: &BoxMesh, class: &[K]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; class.len()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for seed in 0..class.len() {
        if label[seed] != usize::MAX {
            continue;
        }
        label[seed] = next;
        queue.push_back(seed);
        while let Some(c) = queue.pop_front() {
            for nb in mesh.face_neighbors(c) {
                if label[nb] == usize::MAX && class[nb] == class[c] {
                    label[nb] = next;
                    queue.push_back(nb);
                }
            }
        }
        next += 1;
    }
    (label, next)
}

/// Volume-weighted means of α and β per PB-subdomain. Cells of a box mesh
/// have equal volume, so these are arithmetic means.
pub fn averaged_coefficients(pb: &[usize], n_pb: usize, field: &CoefficientField) -> (Vec<f64>, Vec<f64>) {
    let mut sa = vec![0.0; n_pb];
    let mut sb = vec![0.0; n_pb];
    let mut cnt = vec![0usize; n_pb];
    for (c, &p) in pb.iter().enumerate() {
        sa[p] += field.alpha[c];
        sb[p] += field.beta[c];
        cnt[p] += 1;
    }
    for p in 0..n_pb {
        if cnt[p] > 0 {
            sa[p] /= cnt[p] as f64;
            sb[p] /= cnt[p] as f64;
        }
    }
    (sa, sb)
}
