//! Finite-element solver for the steady incompressible lid-driven cavity on
//! uniform square meshes.
//!
//! The discretization is the cheapest stable nonconforming pair on
//! quadrilaterals: P1-nonconforming velocities (piecewise linear per cell,
//! continuous at interior edge midpoints, one vector DOF per interior vertex)
//! against piecewise-constant pressures with the spurious checkerboard mode
//! removed (zero mean separately on the red and black cells). The
//! discontinuous lid data `(1,0)` is carried exactly by a fixed boundary
//! lifting built from top-row basis functions plus two DSSY-type corner
//! functions, with no regularization of the corner singularities.
//!
//! Crate layout follows the pipeline:
//!
//! * [`mesh`] — uniform square partition, indexing, red/black coloring;
//! * [`elements`] — reference bases (P1-NC, DSSY family) and Gauss quadrature;
//! * [`spaces`] — global velocity/pressure fields, DOF maps, boundary lifting;
//! * [`assembly`] — broken bilinear/trilinear forms and the saddle system;
//! * [`linalg`] — banded LU, GMRES, and the saddle-point block solver;
//! * [`solver`] — Oseen solves and the Picard driver with continuation;
//! * [`diagnostics`] — mass-conservation indicators, stream function,
//!   vortex location, centerline profiles.

pub mod assembly;
pub mod diagnostics;
pub mod elements;
pub mod linalg;
pub mod mesh;
pub mod solver;
pub mod spaces;

pub use assembly::SaddleSystem;
pub use diagnostics::{DiagnosticsError, DiagnosticsReport};
pub use mesh::{CellColor, Mesh, MeshError};
pub use solver::{
    CavitySolution, Continuation, InitialGuess, PicardConfig, SolveReport, SolverError,
};
pub use spaces::{BoundaryLifting, PressureField, VelocityField};
