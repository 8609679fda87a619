//! Box-constrained ℓ0-regularized minimization of smooth convex functions.
//!
//! The crate solves `min_x λ‖x‖₀ + f(x)` subject to `l <= x <= u` with an
//! accelerated proximal iterative hard-thresholding method (extrapolation on
//! the current support, gradient-sign restart) and five comparison methods:
//! PIHT, IFB, mAPG, nmAPG and EPIHT. The convergence properties of the
//! accelerated method are exposed as runtime checks in [`trace`], and
//! [`bench`] reproduces compressive-sensing and sparse logistic regression
//! experiments.

pub mod bench;
pub mod check;
pub mod cli;
pub mod io;
pub mod linalg;
pub mod objectives;
pub mod prox;
pub mod solvers;
pub mod trace;

pub use objectives::{LeastSquaresObjective, LogisticObjective, SmoothObjective};
pub use prox::{BoxConstraint, TieRule};
pub use solvers::{solve, Method, Problem, SolverConfig, SolverError, SolverResult, Status, StopRule};
