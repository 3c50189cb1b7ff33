//! Physics-based BDDC preconditioners for lowest-order Nédélec edge
//! discretizations of `∇×(α∇×u) + βu = f` on structured hexahedral meshes.
//!
//! The pipeline runs mesh → partition → globs → coarse edges → change of
//! basis and constraints → preconditioner → PCG. [`driver::run`] wires it
//! together from a [`driver::ProblemConfig`].

pub mod bddc;
pub mod coarse_edges;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod meshfe;
mod par;
pub mod partition;

pub use error::{Error, Result};
