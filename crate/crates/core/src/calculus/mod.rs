//! Discrete differential forms on a structured box grid.
//!
//! A `k`-cochain holds one value per oriented `k`-cell, the integral of the
//! form over that cell. The exterior derivative is the signed incidence
//! matrix, the Hodge star and inner products use diagonal dual/primal volume
//! ratios, and the codifferential is the exact adjoint of `d` under those
//! inner products. Vector fields enter through an averaged interior product;
//! the Lie derivative is assembled from Cartan's formula.

mod cochain;
mod derivative;
mod field;
mod grid;
pub mod io;
mod lie;

pub use cochain::{Cochain, CochainKind};
pub use derivative::{codifferential, exterior_derivative, hodge_star, inner_product};
pub use field::{
    covariant_derivative, covariant_matrix, interior_product, interior_product_matrix, lie_derivative, lie_matrix,
    VectorField,
};
pub use grid::{AxisKind, CellType, CylinderGrid, GridSpec, Variant};
pub use lie::{lie_skew_symmetry_report, LieSkewLevel, LieSkewReport};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalculusError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{op} is not defined for degree {degree}")]
    InvalidDegree { op: &'static str, degree: usize },
    #[error("expected {expected} values for a degree-{degree} cochain, got {got}")]
    LengthMismatch { degree: usize, expected: usize, got: usize },
    #[error("cochain belongs to a different grid")]
    GridMismatch,
    #[error("{op} expects a {expected} cochain")]
    WrongKind { op: &'static str, expected: &'static str },
    #[error("cochain values must be finite")]
    NonFinite,
    #[error("Lie derivative is not skew up to a bounded part here: {0}")]
    NotSkewAdmissible(String),
    #[error("{0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}
