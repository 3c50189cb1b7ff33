//! Box mesh, lowest-order Nédélec edge space and operator assembly.

mod assembly;
mod element;
mod mesh;
mod space;

pub use assembly::{
    assemble_global, assemble_subdomain, assemble_subdomains, cells_by_subdomain, GlobalSystem, LocalSystem,
};
pub use element::{assemble_cell, reference_cell, shape_functions, CellMatrices};
pub use mesh::{Axis, BoxMesh};
pub use space::{CoefficientField, EdgeSpace, NO_DOF};
