//! Accretivity and quasi-m-accretivity checks.

use super::{resolvent, sym_part, OperatorError, OperatorMatrix};

/// Tolerance on the smallest eigenvalue of `sym C` below which `C` is no
/// longer counted as accretive.
pub const ACCRETIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccretivityVerdict {
    Accretive,
    QuasiMAccretive,
    Neither,
}

impl AccretivityVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Accretive => "accretive",
            Self::QuasiMAccretive => "quasi_m_accretive",
            Self::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccretivityReport {
    pub min_sym_eigenvalue: f64,
    pub eta0: f64,
    /// `max ‖(1 + ηC)⁻¹‖₂` over the sampled `η`; infinite if some `1 + ηC`
    /// with `η ∈ (0, η₀]` is singular.
    pub resolvent_norm_sup: f64,
    pub verdict: AccretivityVerdict,
}

/// Classifies `C` from the spectrum of its symmetric part and the resolvent
/// norms on the grid `η = η₀ j / n`, `j = 1..=n`.
///
/// A real eigenvalue `λ ≤ −1/η₀` makes `1 + ηC` singular at `η = −1/λ` even
/// when the grid misses that point; it is detected from the spectrum of `C`.
pub fn check_accretivity(c: &OperatorMatrix, eta0: f64, n_samples: usize) -> Result<AccretivityReport, OperatorError> {
    if !c.is_square() {
        return Err(OperatorError::NotSquare { rows: c.rows(), cols: c.cols() });
    }
    if !(eta0 > 0.0) {
        return Err(OperatorError::NegativeParameter(eta0));
    }
    let sym = sym_part(c)?.into_entries();
    let min_sym_eigenvalue = if sym.is_empty() { 0.0 } else { sym.symmetric_eigenvalues().min() };

    let mut singular = c.entries().complex_eigenvalues().iter().any(|lambda| {
        let real = lambda.im.abs() <= 1e-12 * lambda.norm().max(1.0);
        real && lambda.re < 0.0 && -1.0 / lambda.re <= eta0 * (1.0 + 1e-12)
    });
    let mut sup: f64 = 1.0;
    if !singular {
        for j in 1..=n_samples.max(1) {
            let eta = eta0 * j as f64 / n_samples.max(1) as f64;
            match resolvent(c, eta) {
                Ok(r) => sup = sup.max(r.spectral_norm()),
                Err(OperatorError::Singular { .. }) => {
                    singular = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let (resolvent_norm_sup, verdict) = if singular {
        (f64::INFINITY, AccretivityVerdict::Neither)
    } else if min_sym_eigenvalue >= -ACCRETIVE_TOL {
        (sup, AccretivityVerdict::Accretive)
    } else {
        (sup, AccretivityVerdict::QuasiMAccretive)
    };
    Ok(AccretivityReport { min_sym_eigenvalue, eta0, resolvent_norm_sup, verdict })
}
