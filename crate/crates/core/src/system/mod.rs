//! Global DoF numbering, sparse assembly and the saddle-point solver.

mod assemble;
mod dofmap;
mod solver;
mod sparse;
mod tabulate;

pub use assemble::{Assembler, LocalMatrices, Mat24, Mat24x8, Mat8, SaddleSystem, Scheme};
pub use dofmap::{DofTag, DofVector, FaceDofMap, GlobalDofMap};
pub use solver::{dense_solve, solve_saddle, BlockPreconditioner, SaddleSolution, SolverParams};
pub use sparse::CsrMatrix;
pub use tabulate::{BasisTable, QUANTITIES};
