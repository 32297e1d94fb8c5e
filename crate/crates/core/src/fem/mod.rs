//! Reference elements, quadrature, dof maps and assembly.

pub mod assembly;
pub mod basis;
pub mod quadrature;
pub mod space;

pub use assembly::{assemble_cells, assemble_facets, assemble_matrix, interpolate, Accumulator, BasisEval, Offsets, Qp};
pub use space::{build_space, FunctionSpace, SpaceKind, Support};
