//! Residual checks for commutator, resolvent and transmutator identities.
//!
//! Each check evaluates both sides of an identity independently with dense
//! arithmetic and reports the size of their difference.

use nalgebra::DVector;

use super::{
    adjoint, commutator, resolvent, skew_part, sym_part, transmutator, OperatorError, OperatorMatrix,
};

/// `η` values used to observe the `O(η)` decay of `[(1 + ηC)⁻¹, α]`.
pub const DEFAULT_ETA_SWEEP: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorDecay {
    pub eta: f64,
    /// `‖[(1 + ηC)⁻¹, α]‖₂`.
    pub commutator_norm: f64,
    /// `‖C [(1 + ηC)⁻¹, α]‖₂`.
    pub generator_commutator_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventCommutatorCheck {
    pub eta: f64,
    /// `‖[R, α] − η R [α, C] R‖₂` with `R = (1 + ηC)⁻¹`.
    pub residual: f64,
    /// `η ‖R‖₂² ‖[α, C]‖₂`, the size bound of the right-hand side; rounding
    /// errors in the residual grow with it.
    pub scale: f64,
    pub sweep: Vec<CommutatorDecay>,
}

impl ResolventCommutatorCheck {
    /// `residual / max(1, scale)`.
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.scale.max(1.0)
    }

    /// True when consecutive sweep entries shrink like `η`: the ratio of
    /// commutator norms stays within a factor 2 of the ratio of the `η`.
    pub fn decays_linearly(&self) -> bool {
        self.sweep.windows(2).all(|w| {
            let (a, b) = (w[0], w[1]);
            if a.commutator_norm == 0.0 {
                return b.commutator_norm == 0.0;
            }
            let observed = b.commutator_norm / a.commutator_norm;
            let expected = b.eta / a.eta;
            observed <= 2.0 * expected && observed >= 0.5 * expected
        })
    }
}

fn resolvent_commutator_parts(
    c: &OperatorMatrix,
    alpha: &OperatorMatrix,
    eta: f64,
) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix), OperatorError> {
    let r = resolvent(c, eta)?;
    let lhs = commutator(&r, alpha)?;
    let rhs = r.compose(&commutator(alpha, c)?)?.compose(&r)?.scale(eta);
    Ok((r, lhs, rhs))
}

/// Checks `[(1 + ηC)⁻¹, α] = η (1 + ηC)⁻¹ [α, C] (1 + ηC)⁻¹` at `eta`, and
/// records the commutator norms over [`DEFAULT_ETA_SWEEP`].
pub fn verify_resolvent_commutator(
    c: &OperatorMatrix,
    alpha: &OperatorMatrix,
    eta: f64,
) -> Result<ResolventCommutatorCheck, OperatorError> {
    if c.shape() != alpha.shape() {
        return Err(OperatorError::ShapeMismatch { op: "resolvent commutator", left: c.shape(), right: alpha.shape() });
    }
    let (r, lhs, rhs) = resolvent_commutator_parts(c, alpha, eta)?;
    let residual = lhs.sub(&rhs)?.spectral_norm();
    let scale = eta * r.spectral_norm().powi(2) * commutator(alpha, c)?.spectral_norm();
    let mut sweep = Vec::with_capacity(DEFAULT_ETA_SWEEP.len());
    for &e in &DEFAULT_ETA_SWEEP {
        let (_, comm, _) = resolvent_commutator_parts(c, alpha, e)?;
        sweep.push(CommutatorDecay {
            eta: e,
            commutator_norm: comm.spectral_norm(),
            generator_commutator_norm: c.compose(&comm)?.spectral_norm(),
        });
    }
    Ok(ResolventCommutatorCheck { eta, residual, scale, sweep })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakStrongReport {
    /// `αC − (Cα + [α, C])`.
    pub product_residual: f64,
    /// `[α, C]* − [C*, α*]`.
    pub commutator_adjoint_residual: f64,
    /// `(αC)* − (α*C* + [C*, α*])`.
    pub product_adjoint_residual: f64,
}

impl WeakStrongReport {
    pub fn max_abs_residual(&self) -> f64 {
        self.product_residual.max(self.commutator_adjoint_residual).max(self.product_adjoint_residual)
    }
}

/// Entrywise residuals of the product and adjoint rules for commutators.
pub fn verify_weak_equals_strong(c: &OperatorMatrix, alpha: &OperatorMatrix) -> Result<WeakStrongReport, OperatorError> {
    if !c.is_square() {
        return Err(OperatorError::NotSquare { rows: c.rows(), cols: c.cols() });
    }
    if c.shape() != alpha.shape() {
        return Err(OperatorError::ShapeMismatch { op: "weak equals strong", left: alpha.shape(), right: c.shape() });
    }
    let comm = commutator(alpha, c)?;
    let (ct, at) = (adjoint(c), adjoint(alpha));
    let adj_comm = commutator(&ct, &at)?;

    let product_residual = alpha.compose(c)?.sub(&c.compose(alpha)?.add(&comm)?)?.max_abs();
    let commutator_adjoint_residual = adjoint(&comm).sub(&adj_comm)?.max_abs();
    let product_adjoint_residual = adjoint(&alpha.compose(c)?).sub(&at.compose(&ct)?.add(&adj_comm)?)?.max_abs();
    Ok(WeakStrongReport { product_residual, commutator_adjoint_residual, product_adjoint_residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewDecompositionReport {
    /// `‖S + Sᵀ‖` with `S = skew(αC)`.
    pub antisymmetry_residual: f64,
    /// `‖S − (αC − α sym C − ½[C*, α])‖`.
    pub formula_residual: f64,
    /// `‖S* + skew(C) α + ½[α, C]‖`.
    pub adjoint_residual: f64,
}

impl SkewDecompositionReport {
    pub fn max_residual(&self) -> f64 {
        self.antisymmetry_residual.max(self.formula_residual).max(self.adjoint_residual)
    }
}

/// Checks the decomposition of `skew(αC)` for symmetric `α`. Residuals are
/// entrywise maxima.
pub fn verify_skew_decomposition(
    alpha: &OperatorMatrix,
    c: &OperatorMatrix,
) -> Result<SkewDecompositionReport, OperatorError> {
    if !alpha.is_square() {
        return Err(OperatorError::NotSquare { rows: alpha.rows(), cols: alpha.cols() });
    }
    let defect = alpha.sub(&adjoint(alpha))?.max_abs();
    if defect > 1e-14 * alpha.max_abs().max(1.0) {
        return Err(OperatorError::NotSymmetric(defect));
    }
    let ac = alpha.compose(c)?;
    let s = skew_part(&ac)?;
    let antisymmetry_residual = s.add(&adjoint(&s))?.max_abs();

    let half_comm_adj = commutator(&adjoint(c), alpha)?.scale(0.5);
    let formula = ac.sub(&alpha.compose(&sym_part(c)?)?)?.sub(&half_comm_adj)?;
    let formula_residual = s.sub(&formula)?.max_abs();

    let adj_formula = skew_part(c)?.compose(alpha)?.add(&commutator(alpha, c)?.scale(0.5))?;
    let adjoint_residual = adjoint(&s).add(&adj_formula)?.max_abs();
    Ok(SkewDecompositionReport { antisymmetry_residual, formula_residual, adjoint_residual })
}

/// `L_ε` and `R_ε` for one value of `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmutatorPair {
    pub eps: f64,
    pub left: OperatorMatrix,
    pub right: OperatorMatrix,
}

/// Builds `L_ε = diag((1 − εG_u*)⁻¹, (1 + εG_w)⁻¹)` and
/// `R_ε = diag((1 + εG_u)⁻¹, (1 − εG_w*)⁻¹)` on the product space, for each
/// `ε` in `schedule`.
pub fn resolvent_transmutator_family(
    gen_u: &OperatorMatrix,
    gen_w: &OperatorMatrix,
    schedule: &[f64],
) -> Result<Vec<TransmutatorPair>, OperatorError> {
    let (neg_u_adj, neg_w_adj) = (adjoint(gen_u).scale(-1.0), adjoint(gen_w).scale(-1.0));
    schedule
        .iter()
        .map(|&eps| {
            let left = resolvent(&neg_u_adj, eps)?.block_diag(&resolvent(gen_w, eps)?);
            let right = resolvent(gen_u, eps)?.block_diag(&resolvent(&neg_w_adj, eps)?);
            Ok(TransmutatorPair { eps, left, right })
        })
        .collect()
}

/// Entrywise residual of `[R*, T*, L*] = −[L, T, R]*`.
pub fn transmutator_adjoint_residual(
    l: &OperatorMatrix,
    t: &OperatorMatrix,
    r: &OperatorMatrix,
) -> Result<f64, OperatorError> {
    let lhs = transmutator(&adjoint(r), &adjoint(t), &adjoint(l))?;
    let rhs = adjoint(&transmutator(l, t, r)?).scale(-1.0);
    Ok(lhs.sub(&rhs)?.max_abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumTheoremEntry {
    pub eps: f64,
    pub adjoint_residual: f64,
    /// Largest `‖[L_ε, C + D, R_ε]* x‖` over the probe vectors.
    pub transmutator_adjoint_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumTheoremReport {
    pub entries: Vec<SumTheoremEntry>,
}

impl SumTheoremReport {
    pub fn max_adjoint_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.adjoint_residual).fold(0.0, f64::max)
    }

    /// Along the schedule each norm is at most twice its predecessor and the
    /// last is below the first (or all vanish).
    pub fn decay_observed(&self) -> bool {
        let norms: Vec<f64> = self.entries.iter().map(|e| e.transmutator_adjoint_norm).collect();
        let (Some(&first), Some(&last)) = (norms.first(), norms.last()) else {
            return true;
        };
        if first == 0.0 {
            return norms.iter().all(|&n| n == 0.0);
        }
        norms.windows(2).all(|w| w[1] <= 2.0 * w[0]) && (last < first || norms.len() == 1)
    }
}

/// Evaluates the transmutator adjoint identity and the size of
/// `[L_ε, C + D, R_ε]* x` for every member of `family`.
pub fn verify_sum_theorem(
    c: &OperatorMatrix,
    d: &OperatorMatrix,
    family: &[TransmutatorPair],
    probes: &[DVector<f64>],
) -> Result<SumTheoremReport, OperatorError> {
    let sum = c.add(d)?;
    let mut entries = Vec::with_capacity(family.len());
    for pair in family {
        let adjoint_residual = transmutator_adjoint_residual(&pair.left, &sum, &pair.right)?;
        let t_adj = adjoint(&transmutator(&pair.left, &sum, &pair.right)?);
        let mut norm: f64 = 0.0;
        for x in probes {
            if x.len() != t_adj.cols() {
                return Err(OperatorError::ShapeMismatch {
                    op: "sum theorem probe",
                    left: t_adj.shape(),
                    right: (x.len(), 1),
                });
            }
            norm = norm.max(t_adj.apply(x).norm());
        }
        entries.push(SumTheoremEntry { eps: pair.eps, adjoint_residual, transmutator_adjoint_norm: norm });
    }
    Ok(SumTheoremReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, data: &[f64]) -> OperatorMatrix {
        OperatorMatrix::from_row_slice(n, n, data).unwrap()
    }

    #[test]
    fn identity_alpha_has_zero_residual() {
        let c = op(2, &[0.3, 1.0, -1.0, 0.1]);
        let rep = verify_resolvent_commutator(&c, &OperatorMatrix::identity(2), 0.1).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(rep.decays_linearly());
    }

    #[test]
    fn self_commutation_is_exact() {
        let c = op(2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(verify_weak_equals_strong(&c, &c).unwrap().max_abs_residual(), 0.0);
    }

    #[test]
    fn skew_decomposition_with_identity_alpha() {
        let c = op(2, &[0.0, 2.0, -2.0, 0.0]);
        let rep = verify_skew_decomposition(&OperatorMatrix::identity(2), &c).unwrap();
        assert_eq!(rep.max_residual(), 0.0);
    }

    #[test]
    fn skew_decomposition_rejects_nonsymmetric_alpha() {
        let alpha = op(2, &[1.0, 1.0, 0.0, 1.0]);
        let c = OperatorMatrix::identity(2);
        assert!(matches!(verify_skew_decomposition(&alpha, &c), Err(OperatorError::NotSymmetric(_))));
    }

    #[test]
    fn identity_family_has_zero_transmutators() {
        let c = op(2, &[0.0, 1.0, -1.0, 0.0]);
        let d = op(2, &[0.5, 0.0, 0.0, 0.2]);
        let family: Vec<TransmutatorPair> = [0.1, 0.01]
            .iter()
            .map(|&eps| TransmutatorPair { eps, left: OperatorMatrix::identity(2), right: OperatorMatrix::identity(2) })
            .collect();
        let probes = [DVector::from_vec(vec![1.0, -2.0])];
        let rep = verify_sum_theorem(&c, &d, &family, &probes).unwrap();
        assert!(rep.entries.iter().all(|e| e.transmutator_adjoint_norm == 0.0 && e.adjoint_residual == 0.0));
        assert!(rep.decay_observed());
    }
}
