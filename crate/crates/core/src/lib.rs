//! Nearest structured matrix with prescribed eigenpairs.
//!
//! Given a structure matrix `J` (normal, `J^2 = -I`), eigenvectors `X`,
//! eigenvalues `D` and a target `At`, find the matrix closest to `At` in
//! Frobenius norm among the normal matrices `A` with `AX = XD` that are
//! J-Hamiltonian, skew-J-Hamiltonian or J-symplectic.
//!
//! ```
//! use jprocrustes::reference;
//!
//! let inst = reference::example1();
//! let sol = inst.solve().unwrap().into_solution().unwrap();
//! assert!(sol.eigen_residual < 1e-10);
//! ```

pub mod cli;
pub mod error;
pub mod ham;
pub mod jspace;
pub mod matcore;
pub mod oracle;
pub mod problem;
pub mod reference;
pub mod skewham;
pub mod symplectic;
pub mod synth;

pub use error::{Error, Result};
pub use ham::{Condition, FeasibilityReport, Solution, SolveOutcome};
pub use jspace::{BlockData, JStructure, StructureMode};
pub use matcore::{ComplexMatrix, Tolerance};
pub use problem::ProblemInstance;
