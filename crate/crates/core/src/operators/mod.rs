//! Sparse operators: storage, assembly of the model Hamiltonians from ladder
//! operator words, the excitation map and momentum blocks.

mod blocks;
mod hamiltonians;
mod sparse;
pub mod terms;
mod trafo;

pub use blocks::{block_decompose, block_decompose_by, Block, BlockDecomposition};
pub use hamiltonians::*;
pub use sparse::{SparseHermitianOperator, SparseMatrix, HERMITICITY_TOL, PRUNE_TOL};
pub use trafo::{assemble_u_map, assemble_u_map_joint, conjugate, v_remainder_lhs, VTerm, WTerm};
