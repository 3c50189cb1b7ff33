use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{GlobSet, PbPartition};

/// Per PB-subdomain quantity `χ` entering the averaging weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingKind {
    Cardinality,
    Alpha,
    Beta,
    /// `ᾱ + β̄ h²`
    Omega,
}

impl fmt::Display for ScalingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingKind::Cardinality => "cardinality",
            ScalingKind::Alpha => "alpha",
            ScalingKind::Beta => "beta",
            ScalingKind::Omega => "omega",
        })
    }
}

impl FromStr for ScalingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cardinality" => Ok(ScalingKind::Cardinality),
            "alpha" => Ok(ScalingKind::Alpha),
            "beta" => Ok(ScalingKind::Beta),
            "omega" => Ok(ScalingKind::Omega),
            _ => Err(Error::Config(format!("unknown scaling `{s}`"))),
        }
    }
}

/// `χ` of every PB-subdomain. `h` enters only the ω variant.
pub fn chi(part: &PbPartition, kind: ScalingKind, h: f64) -> Result<Vec<f64>> {
    let n = part.n_pb();
    let chi: Vec<f64> = match kind {
        ScalingKind::Cardinality => vec![1.0; n],
        ScalingKind::Alpha => part.avg_alpha.clone(),
        ScalingKind::Beta => part.avg_beta.clone(),
        ScalingKind::Omega => (0..n).map(|p| part.avg_alpha[p] + part.avg_beta[p] * h * h).collect(),
    };
    if let Some(p) = chi.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{kind} scaling needs a positive value on PB-subdomain {p}, got {}", chi[p])));
    }
    Ok(chi)
}

/// Weight of every glob for each of its geometric subdomains, sorted by
/// subdomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobWeights {
    pub weights: Vec<Vec<(usize, f64)>>,
}

impl GlobWeights {
    /// Weight of subdomain `geo` on glob `g`; zero if it does not touch it.
    pub fn weight(&self, g: usize, geo: usize) -> f64 {
        let w = &self.weights[g];
        w.binary_search_by_key(&geo, |&(d, _)| d).map(|k| w[k].1).unwrap_or(0.0)
    }
}

/// `δ_D(λ) = Σ_{pb ∈ neigh_pb(λ) ∩ D} χ / Σ_{pb ∈ neigh_pb(λ)} χ`.
pub fn compute_weights(globs: &GlobSet, part: &PbPartition, kind: ScalingKind, h: f64) -> Result<GlobWeights> {
    let chi = chi(part, kind, h)?;
    let mut weights = Vec::with_capacity(globs.n_globs());
    for (g, glob) in globs.globs.iter().enumerate() {
        let total: f64 = glob.neigh_pb.iter().map(|&p| chi[p]).sum();
        if !(total > 0.0) {
            return Err(Error::ZeroWeight { glob: g });
        }
        let w = glob
            .neigh_geo
            .iter()
            .map(|&d| {
                let num: f64 = glob.neigh_pb.iter().filter(|&&p| part.pb_geo[p] == d).map(|&p| chi[p]).sum();
                (d, num / total)
            })
            .collect();
        weights.push(w);
    }
    Ok(GlobWeights { weights })
}
