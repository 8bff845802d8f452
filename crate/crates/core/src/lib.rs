//! Nonconforming brick element for the three-dimensional quad-curl problem.
//!
//! The crate assembles and solves the mixed saddle-point system on uniform
//! brick meshes of the unit cube, in both the standard form and the variant
//! whose right-hand side is reconstructed through lowest-order Nédélec
//! interpolation. It also provides the corrected interpolation used to
//! measure supercloseness and the 3x3x3 macroelement postprocessing used to
//! obtain global superconvergence.

pub mod analysis;
pub mod error;
pub mod interp;
pub mod mesh;
pub mod mms;
pub mod polyquad;
pub mod selftest;
pub mod spaces;
pub mod study;
pub mod system;

pub use analysis::{ConvergenceReport, ErrorTriple, Quantity};
pub use error::{Error, Result};
pub use mesh::{BrickMesh, MacroPartition};
pub use mms::ExactFields;
pub use spaces::{ElementSpace, ReferenceSpaces, SpaceKind};
pub use study::{Scheme, StudyConfig};
pub use system::{DofVector, GlobalDofMap, SaddleSystem};
