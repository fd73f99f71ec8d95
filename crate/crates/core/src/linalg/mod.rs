//! Minimal dense-free linear algebra tailored to the saddle-point systems
//! this crate assembles: compressed sparse rows for assembly products and
//! residuals, a LAPACK-style banded LU for the velocity blocks (their
//! lexicographic interior ordering gives bandwidth N), and a projected GMRES
//! for the pressure Schur complement, whose kernel — the constant and
//! checkerboard modes — is known analytically.

pub mod band;
pub mod csr;
pub mod gmres;

pub use band::{BandedLu, BandedMatrix};
pub use csr::CsrMatrix;
pub use gmres::{gmres, gmres_right, GmresOutcome};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("banded factorization hit a negligible pivot at column {col}")]
    SingularPivot { col: usize },
    #[error("matrix entry ({row}, {col}) lies outside the declared band (kl={kl}, ku={ku})")]
    OutsideBand { row: usize, col: usize, kl: usize, ku: usize },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// Euclidean norm.
pub fn nrm2(x: &[f64]) -> f64 {
    x.iter().map(|&v| v * v).sum::<f64>().sqrt()
}

/// Dot product.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

/// `y ← y + alpha·x`.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
