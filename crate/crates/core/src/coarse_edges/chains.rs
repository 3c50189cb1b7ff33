//! Splitting of edge globs into simple oriented chains of fine edges.
//!
//! Chains start at the minimum-id boundary node and always step to the
//! minimum-id neighbor first, so the result depends only on global vertex
//! ids and never on input order.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meshfe::BoxMesh;
use crate::partition::{GlobKind, GlobSet};

/// An oriented chain of fine edges. `nodes[a]` and `nodes[a + 1]` are the
/// ends of `edges[a]` in chain order; `signs[a]` is `+1` when the fine edge
/// points along the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub edges: Vec<usize>,
    pub signs: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl Chain {
    pub fn n_e(&self) -> usize {
        self.edges.len()
    }

    pub fn start(&self) -> usize {
        self.nodes[0]
    }

    pub fn end(&self) -> usize {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }
}

/// Splits a set of fine edges `(id, tail, head)` into chains. Nodes where
/// `split_at` holds, nodes of degree one and nodes of degree above two
/// become chain ends; closed loops open at their minimum-id node.
pub fn split_chains(edges: &[(usize, usize, usize)], split_at: impl Fn(usize) -> bool) -> Vec<Chain> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &(_, t, h)) in edges.iter().enumerate() {
        adj.entry(t).or_default().push(k);
        adj.entry(h).or_default().push(k);
    }
    let mut count: BTreeMap<usize, usize> = adj.iter().map(|(&v, l)| (v, l.len())).collect();
    let mut boundary: BTreeSet<usize> = BTreeSet::new();
    let mut inner: BTreeSet<usize> = BTreeSet::new();
    for (&v, &c) in &count {
        if c != 2 || split_at(v) {
            boundary.insert(v);
        } else {
            inner.insert(v);
        }
    }
    let other = |k: usize, v: usize| {
        let (_, t, h) = edges[k];
        if t == v {
            h
        } else {
            t
        }
    };
    let mut used = vec![false; edges.len()];
    let mut remaining = edges.len();
    let mut chains = Vec::new();
    while remaining > 0 {
        let start = match boundary.iter().copied().find(|v| count[v] > 0) {
            Some(v) => v,
            None => {
                let v = *inner.iter().find(|v| count[*v] > 0).expect("edges remain on some node");
                inner.remove(&v);
                boundary.insert(v);
                v
            }
        };
        let mut chain = Chain { edges: Vec::new(), signs: Vec::new(), nodes: vec![start] };
        let mut cur = start;
        let mut next_edge = adj[&start]
            .iter()
            .copied()
            .filter(|&k| !used[k])
            .min_by_key(|&k| other(k, start))
            .expect("start node has a free edge");
        loop {
            used[next_edge] = true;
            remaining -= 1;
            let (id, t, _) = edges[next_edge];
            let nxt = other(next_edge, cur);
            *count.get_mut(&cur).unwrap() -= 1;
            *count.get_mut(&nxt).unwrap() -= 1;
            chain.edges.push(id);
            chain.signs.push(if t == cur { 1.0 } else { -1.0 });
            chain.nodes.push(nxt);
            cur = nxt;
            if !inner.contains(&cur) {
                break;
            }
            match adj[&cur].iter().copied().find(|&k| !used[k]) {
                Some(k) => next_edge = k,
                None => break,
            }
        }
        chains.push(chain);
    }
    chains
}

/// A coarse (sub-)edge: a chain together with its owning glob.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseEdge {
    pub glob: usize,
    pub chain: Chain,
    pub neigh_pb: Vec<usize>,
    pub neigh_geo: Vec<usize>,
}

impl CoarseEdge {
    pub fn n_e(&self) -> usize {
        self.chain.n_e()
    }

    /// Coarse DOFs carried: zero and first moment, or only the zero moment
    /// for a single fine edge.
    pub fn n_coarse(&self) -> usize {
        if self.n_e() > 1 {
            2
        } else {
            1
        }
    }
}

/// Sub-edges of edge glob `g`. Nodes touching PB-subdomains beyond the
/// glob's own neighbor set are chain ends.
pub fn partition_coarse_edges(mesh: &BoxMesh, globs: &GlobSet, g: usize) -> Result<Vec<CoarseEdge>> {
    let glob = globs.globs.get(g).ok_or_else(|| Error::InvalidInput(format!("glob {g} does not exist")))?;
    if glob.kind != GlobKind::Edge {
        return Err(Error::InvalidInput(format!("glob {g} is a {:?}, not an edge", glob.kind)));
    }
    let fine: Vec<(usize, usize, usize)> = glob
        .edges
        .iter()
        .map(|&e| {
            let (t, h) = mesh.edge_vertices(e);
            (e, t, h)
        })
        .collect();
    let chains = split_chains(&fine, |v| globs.vertex_neigh_pb[v] != glob.neigh_pb);
    Ok(chains
        .into_iter()
        .map(|chain| CoarseEdge { glob: g, chain, neigh_pb: glob.neigh_pb.clone(), neigh_geo: glob.neigh_geo.clone() })
        .collect())
}

/// All coarse edges, in glob order.
pub fn build_coarse_edges(mesh: &BoxMesh, globs: &GlobSet) -> Result<Vec<CoarseEdge>> {
    let mut out = Vec::new();
    for (g, _) in globs.of_kind(GlobKind::Edge) {
        out.extend(partition_coarse_edges(mesh, globs, g)?);
    }
    Ok(out)
}
