//! The change of unknowns `(p̃, ṽ) = (p + v₀v₃, v + v₀p e₃)` that moves the
//! drift into the material block
//! `M₀ = (1/(1−v₀²)) [[1, −v₀e₃ᵀ], [−v₀e₃, 1]]`.
//!
//! `M₀` is positive definite only for `|v₀| < 1`, and the transform is not
//! invertible at `|v₀| = 1`. The direct first-order formulation has no such
//! restriction.

use nalgebra::{Matrix4, Vector4};

use crate::calculus::Variant;
use crate::linalg::CsrMatrix;

use super::{ProductSpace, WaveError};

/// `|1 − v₀²|` below this counts as the singular case `|v₀| = 1`.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BiIsotropic {
    v0: f64,
    m0: Matrix4<f64>,
    eigenvalues: [f64; 4],
}

impl BiIsotropic {
    pub fn new(v0: f64) -> Result<Self, WaveError> {
        if !v0.is_finite() {
            return Err(WaveError::InvalidParameter(format!("drift speed must be finite, got {v0}")));
        }
        let gap = 1.0 - v0 * v0;
        if gap.abs() <= SINGULAR_TOL {
            return Err(WaveError::SingularTransform);
        }
        let s = 1.0 / gap;
        let mut m0 = Matrix4::identity() * s;
        m0[(0, 3)] = -v0 * s;
        m0[(3, 0)] = -v0 * s;
        let mut ev: Vec<f64> = m0.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { v0, m0, eigenvalues: [ev[0], ev[1], ev[2], ev[3]] })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// `[[1, v₀e₃ᵀ], [v₀e₃, 1]]` acting on `(p, v₁, v₂, v₃)`.
    pub fn transform_matrix(&self) -> Matrix4<f64> {
        let mut t = Matrix4::identity();
        t[(0, 3)] = self.v0;
        t[(3, 0)] = self.v0;
        t
    }

    pub fn m0(&self) -> &Matrix4<f64> {
        &self.m0
    }

    /// Eigenvalues of `M₀`, descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        self.eigenvalues
    }

    pub fn is_indefinite(&self) -> bool {
        self.eigenvalues[3] <= 0.0
    }

    /// Message for `|v₀| > 1`, where `M₀` loses positivity.
    pub fn warning(&self) -> Option<String> {
        self.is_indefinite().then(|| {
            format!(
                "M0 is indefinite for |v0| = {} > 1 (smallest eigenvalue {:.6}); the transformed system is not \
                 well-posed, use the direct formulation",
                self.v0.abs(),
                self.eigenvalues[3]
            )
        })
    }

    pub fn forward(&self, p: f64, v: [f64; 3]) -> (f64, [f64; 3]) {
        let y = self.transform_matrix() * Vector4::new(p, v[0], v[1], v[2]);
        (y[0], [y[1], y[2], y[3]])
    }

    pub fn inverse(&self, pt: f64, vt: [f64; 3]) -> (f64, [f64; 3]) {
        // Only the (p, v₃) pair is coupled.
        let s = 1.0 / (1.0 - self.v0 * self.v0);
        let p = s * (pt - self.v0 * vt[2]);
        let v3 = s * (vt[2] - self.v0 * pt);
        (p, [vt[0], vt[1], v3])
    }
}

/// `M₀` on 0-forms × 1-forms: the `e₃` coupling pairs vertex values with the
/// axial edges above and below (averaged), and the reverse block is the
/// adjoint in the mass inner product so that `M₀` stays selfadjoint.
pub fn manifold_m0(space: &ProductSpace, v0: f64) -> Result<CsrMatrix, WaveError> {
    if space.degree() != 0 {
        return Err(WaveError::InvalidParameter(format!(
            "the drift-absorbing transform pairs 0-forms with 1-forms, got degree {}",
            space.degree()
        )));
    }
    BiIsotropic::new(v0)?;
    let grid = space.grid();
    let [nu, nw] = space.sizes();
    let hz = grid.spacing()[2];
    let zt = grid.type_of(1, &[2]);
    let mut trip = Vec::new();
    for (row, &vertex) in grid.interior(0).iter().enumerate() {
        let p = grid.cell(0, vertex).1.map(|v| v as i64);
        for shift in [0, -1] {
            let mut q = p;
            q[2] += shift;
            if let Some(edge) = grid.locate(1, zt, q) {
                if let Some(col) = grid.interior_position(1, edge) {
                    trip.push((row, col, 0.5 / hz));
                }
            }
        }
    }
    let b = CsrMatrix::from_triplets(nu, nw, &trip);
    let gu = grid.mass_for(0, Variant::Dirichlet);
    let gw = grid.mass_for(1, Variant::Dirichlet);
    let b_adj = b.transpose().scale_rows(&gw.iter().map(|w| 1.0 / w).collect::<Vec<_>>()).scale_cols(&gu);
    let s = 1.0 / (1.0 - v0 * v0);
    let coupling = b.scale(-v0 * s);
    let coupling_adj = b_adj.scale(-v0 * s);
    let iu = CsrMatrix::identity(nu).scale(s);
    let iw = CsrMatrix::identity(nw).scale(s);
    Ok(CsrMatrix::block2([[Some(&iu), Some(&coupling)], [Some(&coupling_adj), Some(&iw)]], [nu, nw], [nu, nw]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_drift_is_identity() {
        let t = BiIsotropic::new(0.0).unwrap();
        assert_eq!(*t.m0(), Matrix4::identity());
        assert_eq!(t.forward(1.0, [2.0, 3.0, 4.0]), (1.0, [2.0, 3.0, 4.0]));
    }

    #[test]
    fn half_mach_material_block() {
        let t = BiIsotropic::new(0.5).unwrap();
        assert!((t.m0()[(0, 0)] - 4.0 / 3.0).abs() < 1e-15);
        assert!((t.m0()[(0, 3)] + 2.0 / 3.0).abs() < 1e-15);
        let ev = t.eigenvalues();
        for (a, b) in ev.iter().zip([2.0, 4.0 / 3.0, 4.0 / 3.0, 2.0 / 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!t.is_indefinite() && t.warning().is_none());
    }

    #[test]
    fn supersonic_is_indefinite_and_sonic_is_singular() {
        assert!(BiIsotropic::new(1.5).unwrap().is_indefinite());
        assert_eq!(BiIsotropic::new(1.0), Err(WaveError::SingularTransform));
        assert_eq!(BiIsotropic::new(-1.0), Err(WaveError::SingularTransform));
    }

    #[test]
    fn inverse_undoes_forward() {
        let t = BiIsotropic::new(0.7).unwrap();
        let (pt, vt) = t.forward(0.3, [-1.0, 2.0, 0.25]);
        let (p, v) = t.inverse(pt, vt);
        assert!((p - 0.3).abs() < 1e-13);
        for (a, b) in v.iter().zip([-1.0, 2.0, 0.25]) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
