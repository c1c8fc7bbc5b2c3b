//! Finite-dimensional operator calculus.
//!
//! Operators are dense real matrices standing in for (possibly unbounded)
//! closed operators on a real Hilbert space with the Euclidean inner product,
//! so the adjoint is the transpose. The submodules build accretivity checks
//! and residual checks for commutator and transmutator identities on top of
//! the primitives defined here.

mod accretive;
mod identities;
mod random;

pub use accretive::{check_accretivity, AccretivityReport, AccretivityVerdict};
pub use identities::{
    resolvent_transmutator_family, transmutator_adjoint_residual, verify_resolvent_commutator, verify_skew_decomposition,
    verify_sum_theorem, verify_weak_equals_strong, CommutatorDecay, ResolventCommutatorCheck, SkewDecompositionReport,
    SumTheoremEntry, SumTheoremReport, TransmutatorPair, WeakStrongReport, DEFAULT_ETA_SWEEP,
};
pub use random::{OperatorSampler, QuasiSkew, QUASI_SKEW_SCALES};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Largest dimension for which norms and condition numbers come from a full SVD.
pub const DENSE_NORM_LIMIT: usize = 64;
/// `I + ηC` counts as singular above this condition number.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("operator entries must be finite")]
    NonFinite,
    #[error("operator must be square, got {rows}×{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("1 + ηC is numerically singular at η = {eta} (condition number {condition:.3e})")]
    Singular { eta: f64, condition: f64 },
    #[error("resolvent parameter must be ≥ 0, got {0}")]
    NegativeParameter(f64),
    #[error("operator is not symmetric (defect {0:.3e})")]
    NotSymmetric(f64),
}

/// A real matrix tagged with the labels of its domain and codomain spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<f64>,
    domain: String,
    codomain: String,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self, OperatorError> {
        Self::with_labels(entries, "H", "H")
    }

    pub fn with_labels(entries: DMatrix<f64>, domain: &str, codomain: &str) -> Result<Self, OperatorError> {
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(OperatorError::NonFinite);
        }
        Ok(Self { entries, domain: domain.to_owned(), codomain: codomain.to_owned() })
    }

    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self, OperatorError> {
        Self::new(DMatrix::from_row_slice(rows, cols, data))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_trusted(DMatrix::zeros(rows, cols))
    }

    /// Wraps results of arithmetic on already-validated operators.
    pub(crate) fn from_trusted(entries: DMatrix<f64>) -> Self {
        Self { entries, domain: "H".into(), codomain: "H".into() }
    }

    fn relabel(mut self, domain: &str, codomain: &str) -> Self {
        self.domain = domain.to_owned();
        self.codomain = codomain.to_owned();
        self
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.entries.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn codomain(&self) -> &str {
        &self.codomain
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.entries * x
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<Self, OperatorError> {
        if self.cols() != rhs.rows() {
            return Err(OperatorError::ShapeMismatch { op: "compose", left: self.shape(), right: rhs.shape() });
        }
        Ok(Self::from_trusted(&self.entries * &rhs.entries).relabel(&rhs.domain, &self.codomain))
    }

    pub fn add(&self, rhs: &OperatorMatrix) -> Result<Self, OperatorError> {
        self.same_shape("add", rhs)?;
        Ok(Self::from_trusted(&self.entries + &rhs.entries).relabel(&self.domain, &self.codomain))
    }

    pub fn sub(&self, rhs: &OperatorMatrix) -> Result<Self, OperatorError> {
        self.same_shape("sub", rhs)?;
        Ok(Self::from_trusted(&self.entries - &rhs.entries).relabel(&self.domain, &self.codomain))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_trusted(&self.entries * s).relabel(&self.domain, &self.codomain)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.amax()
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }

    /// Block-diagonal operator `diag(self, other)`.
    pub fn block_diag(&self, other: &OperatorMatrix) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = other.shape();
        let mut m = DMatrix::zeros(r1 + r2, c1 + c2);
        m.view_mut((0, 0), (r1, c1)).copy_from(&self.entries);
        m.view_mut((r1, c1), (r2, c2)).copy_from(&other.entries);
        Self::from_trusted(m)
    }

    fn same_shape(&self, op: &'static str, rhs: &OperatorMatrix) -> Result<(), OperatorError> {
        if self.shape() != rhs.shape() {
            return Err(OperatorError::ShapeMismatch { op, left: self.shape(), right: rhs.shape() });
        }
        Ok(())
    }

    fn require_square(&self) -> Result<usize, OperatorError> {
        if !self.is_square() {
            return Err(OperatorError::NotSquare { rows: self.rows(), cols: self.cols() });
        }
        Ok(self.rows())
    }
}

/// Adjoint under the real Euclidean inner product: the transpose, with
/// domain and codomain swapped.
pub fn adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_trusted(a.entries.transpose()).relabel(&a.codomain, &a.domain)
}

/// `½(C + C*)`.
pub fn sym_part(c: &OperatorMatrix) -> Result<OperatorMatrix, OperatorError> {
    c.require_square()?;
    let t = c.entries.transpose();
    Ok(OperatorMatrix::from_trusted((&c.entries + t) * 0.5).relabel(&c.domain, &c.codomain))
}

/// `½(C − C*)`.
pub fn skew_part(c: &OperatorMatrix) -> Result<OperatorMatrix, OperatorError> {
    c.require_square()?;
    let t = c.entries.transpose();
    Ok(OperatorMatrix::from_trusted((&c.entries - t) * 0.5).relabel(&c.domain, &c.codomain))
}

/// `[α, C] = αC − Cα`.
pub fn commutator(alpha: &OperatorMatrix, c: &OperatorMatrix) -> Result<OperatorMatrix, OperatorError> {
    transmutator(alpha, c, alpha)
}

/// `[L, C, R] = LC − CR`.
pub fn transmutator(l: &OperatorMatrix, c: &OperatorMatrix, r: &OperatorMatrix) -> Result<OperatorMatrix, OperatorError> {
    let lc = l.compose(c)?;
    let cr = c.compose(r)?;
    if lc.shape() != cr.shape() {
        return Err(OperatorError::ShapeMismatch { op: "transmutator", left: lc.shape(), right: cr.shape() });
    }
    Ok(OperatorMatrix::from_trusted(lc.entries - cr.entries).relabel(&r.domain, &l.codomain))
}

/// `(1 + ηC)⁻¹`.
pub fn resolvent(c: &OperatorMatrix, eta: f64) -> Result<OperatorMatrix, OperatorError> {
    let n = c.require_square()?;
    if !(eta >= 0.0) {
        return Err(OperatorError::NegativeParameter(eta));
    }
    if eta == 0.0 {
        return Ok(OperatorMatrix::identity(n).relabel(&c.domain, &c.codomain));
    }
    let shifted = DMatrix::identity(n, n) + &c.entries * eta;
    let condition = condition_number(&shifted);
    if !(condition <= SINGULAR_CONDITION) {
        return Err(OperatorError::Singular { eta, condition });
    }
    let inv = shifted.lu().try_inverse().ok_or(OperatorError::Singular { eta, condition: f64::INFINITY })?;
    Ok(OperatorMatrix::from_trusted(inv).relabel(&c.codomain, &c.domain))
}

/// Spectral norm: full SVD up to [`DENSE_NORM_LIMIT`], power iteration on
/// `AᵀA` above.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) <= DENSE_NORM_LIMIT {
        return m.singular_values().max();
    }
    let ata = m.transpose() * m;
    power_norm(&ata).sqrt()
}

fn power_norm(sym_psd: &DMatrix<f64>) -> f64 {
    let n = sym_psd.nrows();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64) * 0.7).sin());
    v /= v.norm();
    let mut estimate = 0.0;
    for _ in 0..crate::linalg::POWER_MAX_ITER {
        let w = sym_psd * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / nw;
        if (next - estimate).abs() <= crate::linalg::POWER_TOL * next.abs() {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// `‖A‖₂ ‖A⁻¹‖₂`; infinite for singular matrices.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() <= DENSE_NORM_LIMIT {
        let sv = m.singular_values();
        let min = sv.min();
        return if min == 0.0 { f64::INFINITY } else { sv.max() / min };
    }
    match m.clone().lu().try_inverse() {
        Some(inv) => spectral_norm(m) * spectral_norm(&inv),
        None => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(rows: usize, cols: usize, data: &[f64]) -> OperatorMatrix {
        OperatorMatrix::from_row_slice(rows, cols, data).unwrap()
    }

    #[test]
    fn adjoint_of_nilpotent_shift() {
        let a = op(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(adjoint(&a), op(2, 2, &[0.0, 0.0, 1.0, 0.0]));
    }

    #[test]
    fn adjoint_fixes_symmetric_and_swaps_labels() {
        let a = op(2, 2, &[1.0, 2.0, 2.0, 5.0]);
        assert_eq!(adjoint(&a).entries(), a.entries());
        let b = OperatorMatrix::with_labels(DMatrix::zeros(2, 3), "X", "Y").unwrap();
        let bt = adjoint(&b);
        assert_eq!((bt.domain(), bt.codomain(), bt.shape()), ("Y", "X", (3, 2)));
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(OperatorMatrix::from_row_slice(1, 1, &[f64::NAN]), Err(OperatorError::NonFinite));
    }

    #[test]
    fn sym_and_skew_of_upper_triangular() {
        let c = op(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert_eq!(sym_part(&c).unwrap(), op(2, 2, &[1.0, 1.0, 1.0, 1.0]));
        assert_eq!(skew_part(&c).unwrap(), op(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn sym_of_skew_vanishes_and_identity_is_symmetric() {
        let s = op(2, 2, &[0.0, 3.0, -3.0, 0.0]);
        assert_eq!(sym_part(&s).unwrap().max_abs(), 0.0);
        let i = OperatorMatrix::identity(3);
        assert_eq!(sym_part(&i).unwrap(), i);
        assert_eq!(skew_part(&i).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sym_part_rejects_rectangular() {
        assert_eq!(
            sym_part(&OperatorMatrix::zeros(2, 3)),
            Err(OperatorError::NotSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn identity_commutes() {
        let c = op(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let i = OperatorMatrix::identity(2);
        assert_eq!(commutator(&i, &c).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn transmutator_with_equal_sides_is_commutator() {
        let l = op(2, 2, &[0.5, 1.0, -1.0, 2.0]);
        let c = op(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(transmutator(&l, &c, &l).unwrap(), commutator(&l, &c).unwrap());
    }

    #[test]
    fn transmutator_shape_mismatch() {
        let l = OperatorMatrix::zeros(2, 2);
        let c = OperatorMatrix::zeros(3, 3);
        assert!(matches!(transmutator(&l, &c, &l), Err(OperatorError::ShapeMismatch { .. })));
    }

    #[test]
    fn resolvent_at_zero_is_identity() {
        let c = op(2, 2, &[3.0, 1.0, 4.0, 1.0]);
        assert_eq!(resolvent(&c, 0.0).unwrap(), OperatorMatrix::identity(2));
    }

    #[test]
    fn resolvent_of_rotation_generator() {
        // (I + ½J)⁻¹ = [[1, ½], [−½, 1]]⁻¹ = (1/1.25)·[[1, −½], [½, 1]].
        let c = op(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let r = resolvent(&c, 0.5).unwrap();
        let expected = op(2, 2, &[0.8, -0.4, 0.4, 0.8]);
        assert!((r.entries() - expected.entries()).amax() < 1e-15);
    }

    #[test]
    fn resolvent_detects_singularity_and_negative_eta() {
        let c = op(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(resolvent(&c, 1.0), Err(OperatorError::Singular { .. })));
        assert_eq!(resolvent(&c, -0.1), Err(OperatorError::NegativeParameter(-0.1)));
    }

    #[test]
    fn power_iteration_matches_svd_above_dense_limit() {
        let n = 70;
        let m = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.5);
        let exact = m.singular_values().max();
        assert!((spectral_norm(&m) - exact).abs() <= 1e-8 * exact);
    }
}
