//! Discrete weak form: shape functions, mesh, element kernels and assembly.

pub mod assembly;
pub mod element;
pub mod mesh;
pub mod shape;
pub mod sparse;

pub use assembly::{
    apply_boundary_conditions, assemble, total_potential, Assembly, Energy, GlobalSystem,
    ShellModel, ShellState,
};
pub use element::{ElementOptions, ShearTreatment};
pub use mesh::{read_mesh_dump, write_mesh_dump, Edge, LoadFrame, MeshDump, NodalLoad, ShellMesh};
pub use sparse::SparseMatrix;
