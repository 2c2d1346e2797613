//! Solvers for u_t = phi(u)_xx with a cubic-like piecewise-linear phi on [0, 1]
//! under homogeneous Neumann conditions.
//!
//! Indices in the public API follow the 1-based grid numbering x_j = (j-1) h
//! where noted (`L`, `j_star`); vectors are stored 0-based.

pub mod error;
pub mod exact;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod phase;
pub mod schemes;
pub mod spectral;

pub use error::{Error, Result};
pub use exact::{ExactRiemannSolution, HeatKernelCdf, SolutionKind};
pub use grid::GridState;
pub use phase::{PhaseLabel, PiecewiseLinearPhi, RiemannData};
pub use schemes::{run, RunRecord, SchemeConfig, SchemeKind};
