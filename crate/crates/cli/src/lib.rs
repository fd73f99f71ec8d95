//! Library half of the benchmark harness: the published reference tables
//! (centerline profiles, vortex data, flow rates, DOF counts, contour
//! levels) shared by the `cavity-bench` binary and the acceptance suite.

pub mod reference;
