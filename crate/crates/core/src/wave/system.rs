use crate::calculus::{covariant_matrix, lie_matrix, Cochain, CylinderGrid, Variant, VectorField};
use crate::linalg::{
    weighted_adjoint, weighted_min_eigenvalue, weighted_skew_defect, weighted_sym_skew, weighted_symmetric_norm,
    CsrMatrix,
};

use super::WaveError;

/// Relative size of `M₀α − αM₀` above which the drift is rejected.
const COMMUTATION_TOL: f64 = 1e-12;

/// `Λᵏ × Λᵏ⁺¹` restricted to the Dirichlet degrees of freedom, with the
/// product mass weights `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    grid: CylinderGrid,
    degree: usize,
    weights: Vec<f64>,
}

impl ProductSpace {
    pub fn new(grid: CylinderGrid, degree: usize) -> Result<Self, WaveError> {
        if degree > 2 {
            return Err(WaveError::InvalidDegree(degree));
        }
        let mut weights = grid.mass_for(degree, Variant::Dirichlet);
        weights.extend(grid.mass_for(degree + 1, Variant::Dirichlet));
        Ok(Self { grid, degree, weights })
    }

    pub fn grid(&self) -> &CylinderGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Degrees of freedom of the two blocks.
    pub fn sizes(&self) -> [usize; 2] {
        [self.grid.interior(self.degree).len(), self.grid.interior(self.degree + 1).len()]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Diagonal of the product mass matrix `G`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Full cell indices behind each degree of freedom, paired with its degree.
    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.degree;
        self.grid.interior(k).iter().map(move |&i| (k, i)).chain(self.grid.interior(k + 1).iter().map(move |&i| (k + 1, i)))
    }

    /// Diagonal operator multiplying each degree of freedom by the average of
    /// a vertex field over the cell's corners; `u` acts on the first block and
    /// `w` on the second.
    pub fn vertex_field_operator(&self, u: &[f64], w: &[f64]) -> CsrMatrix {
        let au = self.grid.average_to_cells(self.degree, u);
        let aw = self.grid.average_to_cells(self.degree + 1, w);
        let diag: Vec<f64> =
            self.cells().map(|(k, i)| if k == self.degree { au[i] } else { aw[i] }).collect();
        CsrMatrix::diagonal(&diag)
    }

    /// `diag(a·I, b·I)`.
    pub fn scalar_operator(&self, a: f64, b: f64) -> CsrMatrix {
        let [nu, nw] = self.sizes();
        let mut d = vec![a; nu];
        d.extend(std::iter::repeat_n(b, nw));
        CsrMatrix::diagonal(&d)
    }

    /// Restricts a pair of full cochains to the degrees of freedom.
    pub fn pack(&self, u: &Cochain, w: &Cochain) -> Result<Vec<f64>, WaveError> {
        if u.degree() != self.degree || w.degree() != self.degree + 1 {
            return Err(WaveError::InvalidParameter("cochain degrees do not match the product space".into()));
        }
        if u.grid_hash() != self.grid.hash() || w.grid_hash() != self.grid.hash() {
            return Err(crate::calculus::CalculusError::GridMismatch.into());
        }
        Ok(self.cells().map(|(k, i)| if k == self.degree { u.values()[i] } else { w.values()[i] }).collect())
    }

    /// Full cochains from a state vector; wall cells are zero.
    pub fn unpack(&self, x: &[f64]) -> (Cochain, Cochain) {
        let k = self.degree;
        let mut u = vec![0.0; self.grid.num_cells(k)];
        let mut w = vec![0.0; self.grid.num_cells(k + 1)];
        for ((deg, i), &v) in self.cells().zip(x) {
            if deg == k {
                u[i] = v;
            } else {
                w[i] = v;
            }
        }
        (
            Cochain::new(&self.grid, k, u).expect("sizes match"),
            Cochain::new(&self.grid, k + 1, w).expect("sizes match"),
        )
    }

    /// `⟨x, y⟩_G`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::linalg::weighted_dot(x, y, &self.weights)
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).sqrt()
    }

    /// Centre of each degree of freedom's cell.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let h = self.grid.spacing();
        self.cells()
            .map(|(k, i)| {
                let (t, p) = self.grid.cell(k, i);
                let mut x = self.grid.vertex_position(p);
                for &a in &self.grid.cell_types(k)[t].axes {
                    x[a] += 0.5 * h[a];
                }
                x
            })
            .collect()
    }

    /// Primal measure of each degree of freedom's cell; dividing a value by
    /// it gives a density.
    pub fn measures(&self) -> Vec<f64> {
        let h = self.grid.spacing();
        self.cells()
            .map(|(k, i)| {
                let t = self.grid.cell(k, i).0;
                self.grid.cell_types(k)[t].axes.iter().map(|&a| h[a]).product()
            })
            .collect()
    }

    fn block_diag(&self, a: &CsrMatrix, b: &CsrMatrix) -> CsrMatrix {
        let s = self.sizes();
        CsrMatrix::block2([[Some(a), None], [None, Some(b)]], s, s)
    }

    fn restrict(&self, m: &CsrMatrix, k: usize) -> CsrMatrix {
        let dofs = self.grid.interior(k);
        if dofs.len() == self.grid.num_cells(k) {
            m.clone()
        } else {
            m.select(dofs, dofs)
        }
    }

    /// `[[0, −d̊*], [d̊, 0]]`.
    pub fn exterior_block(&self) -> CsrMatrix {
        let d = self.grid.exterior_matrix(self.degree, Variant::Dirichlet);
        let dstar = self.grid.codifferential_matrix(self.degree, Variant::Dirichlet).scale(-1.0);
        CsrMatrix::block2([[None, Some(&dstar)], [Some(&d), None]], self.sizes(), self.sizes())
    }

    /// `diag(𝓛_X, −𝓛_X*)` with the adjoint taken in the mass inner product.
    pub fn lie_block(&self, x: &VectorField) -> Result<CsrMatrix, WaveError> {
        let k = self.degree;
        let lk = self.restrict(&lie_matrix(&self.grid, x, k)?, k);
        let lk1 = self.restrict(&lie_matrix(&self.grid, x, k + 1)?, k + 1);
        let adj = weighted_adjoint(&lk1, &self.grid.mass_for(k + 1, Variant::Dirichlet)).scale(-1.0);
        Ok(self.block_diag(&lk, &adj))
    }

    /// `diag(∇_X, ∇_X)`.
    pub fn covariant_block(&self, x: &VectorField) -> Result<CsrMatrix, WaveError> {
        let k = self.degree;
        let a = self.restrict(&covariant_matrix(&self.grid, x, k)?, k);
        let b = self.restrict(&covariant_matrix(&self.grid, x, k + 1)?, k + 1);
        Ok(self.block_diag(&a, &b))
    }
}

/// Drift field `X₀` and the scalar `α` multiplying the drift term, both
/// sampled at vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSpec {
    pub field: VectorField,
    pub alpha: Vec<f64>,
}

impl DriftSpec {
    pub fn new(field: VectorField, alpha: Vec<f64>) -> Self {
        Self { field, alpha }
    }

    pub fn max_abs_alpha(&self) -> f64 {
        self.alpha.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

/// The assembled evolution operator `∂₀M₀ + M̃₁ + A` with
/// `A = D + [[0, −d̊*], [d̊, 0]]` skew and `M̃₁` bounded.
#[derive(Debug, Clone)]
pub struct EvoSystem {
    space: ProductSpace,
    m0: CsrMatrix,
    m1: CsrMatrix,
    m1_tilde: CsrMatrix,
    drift_sym: CsrMatrix,
    drift_skew: CsrMatrix,
    remainder: CsrMatrix,
    exterior: CsrMatrix,
    a_skew: CsrMatrix,
    commutation_residual: f64,
    c: f64,
    sym_m1_tilde_norm: f64,
    rho0: f64,
}

impl EvoSystem {
    /// Assembles the system for drift `α∇_{X₀}M₀` and materials `M₀`, `M₁`.
    ///
    /// With `L = diag(𝓛_{X₀}, −𝓛_{X₀}*)` the drift splits as
    /// `α∇M₀ = C + D + α(∇ − L)M₀ + α[L, M₀]` where `C` and `D` are the
    /// symmetric and skew parts of `αM₀L`; `M̃₁ = M₁ + α(∇ − L)M₀ + α[L, M₀] + C`.
    pub fn assemble(space: ProductSpace, drift: &DriftSpec, m0: CsrMatrix, m1: CsrMatrix) -> Result<Self, WaveError> {
        let n = space.len();
        if m0.nrows() != n || m0.ncols() != n || m1.nrows() != n || m1.ncols() != n {
            return Err(WaveError::InvalidParameter(format!("material blocks must be {n}×{n}")));
        }
        let g = space.weights().to_vec();
        let gm0 = m0.scale_rows(&g);
        let defect = gm0.sub(&gm0.transpose()).max_abs();
        if defect > 1e-12 * gm0.max_abs().max(f64::MIN_POSITIVE) {
            return Err(WaveError::NotSelfadjoint(defect));
        }

        let alpha = space.vertex_field_operator(&drift.alpha, &drift.alpha);
        let commutation_residual = m0.matmul(&alpha).sub(&alpha.matmul(&m0)).max_abs();
        if commutation_residual > COMMUTATION_TOL * m0.max_abs().max(1.0) * alpha.max_abs().max(1.0) {
            return Err(WaveError::CommutationViolated(commutation_residual));
        }

        let l = space.lie_block(&drift.field)?;
        let nabla = space.covariant_block(&drift.field)?;
        let p = alpha.matmul(&m0).matmul(&l);
        let (drift_sym, drift_skew) = weighted_sym_skew(&p, &g);
        let lie_remainder = alpha.matmul(&nabla.sub(&l)).matmul(&m0);
        let commutator = alpha.matmul(&l.matmul(&m0).sub(&m0.matmul(&l)));
        let remainder = lie_remainder.add(&commutator);

        let exterior = space.exterior_block();
        let a_skew = drift_skew.add(&exterior);
        let m1_tilde = m1.add(&remainder).add(&drift_sym);

        let c = weighted_min_eigenvalue(&m0, &g);
        if !(c > 0.0) {
            return Err(WaveError::NotPositive(c));
        }
        let sym_m1_tilde_norm = weighted_symmetric_norm(&m1_tilde, &g);
        let rho0 = (sym_m1_tilde_norm + 1.0) / c;
        Ok(Self {
            space,
            m0,
            m1,
            m1_tilde,
            drift_sym,
            drift_skew,
            remainder,
            exterior,
            a_skew,
            commutation_residual,
            c,
            sym_m1_tilde_norm,
            rho0,
        })
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn m0(&self) -> &CsrMatrix {
        &self.m0
    }

    pub fn m1(&self) -> &CsrMatrix {
        &self.m1
    }

    pub fn m1_tilde(&self) -> &CsrMatrix {
        &self.m1_tilde
    }

    /// `C = sym(αM₀L)`.
    pub fn drift_sym(&self) -> &CsrMatrix {
        &self.drift_sym
    }

    /// `D = skew(αM₀L)`.
    pub fn drift_skew(&self) -> &CsrMatrix {
        &self.drift_skew
    }

    /// `α(∇ − L)M₀ + α[L, M₀]`.
    pub fn remainder(&self) -> &CsrMatrix {
        &self.remainder
    }

    pub fn exterior(&self) -> &CsrMatrix {
        &self.exterior
    }

    /// `D + [[0, −d̊*], [d̊, 0]]`.
    pub fn a_skew(&self) -> &CsrMatrix {
        &self.a_skew
    }

    /// `K = M̃₁ + A`, the full spatial operator.
    pub fn generator(&self) -> CsrMatrix {
        self.m1_tilde.add(&self.a_skew)
    }

    pub fn commutation_residual(&self) -> f64 {
        self.commutation_residual
    }

    /// Smallest eigenvalue of `M₀`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `‖sym M̃₁‖` in the mass inner product.
    pub fn sym_m1_tilde_norm(&self) -> f64 {
        self.sym_m1_tilde_norm
    }

    /// `(‖sym M̃₁‖ + 1)/c`.
    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    /// `ρ c − ‖sym M̃₁‖`, the coercivity constant of `ρM₀ + M̃₁`.
    pub fn coercivity(&self, rho: f64) -> f64 {
        rho * self.c - self.sym_m1_tilde_norm
    }

    /// `‖G A + Aᵀ G‖` entrywise.
    pub fn skew_defect(&self) -> f64 {
        weighted_skew_defect(&self.a_skew, self.space.weights())
    }

    /// `⟨M₀x, x⟩_G`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.space.inner(&self.m0.mul_vec(x), x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::GridSpec;

    fn torus_space(n: usize, k: usize) -> ProductSpace {
        ProductSpace::new(CylinderGrid::new(GridSpec::torus([n; 3], [1.0; 3])).unwrap(), k).unwrap()
    }

    #[test]
    fn exterior_block_is_skew_on_walled_grid() {
        let g = CylinderGrid::new(GridSpec::truncated_pipe([3, 4, 5], [1.0, 2.0, 1.5])).unwrap();
        for k in 0..3 {
            let s = ProductSpace::new(g.clone(), k).unwrap();
            assert!(weighted_skew_defect(&s.exterior_block(), s.weights()) <= 1e-12);
        }
    }

    #[test]
    fn zero_alpha_gives_zero_drift() {
        let s = torus_space(4, 1);
        let x = VectorField::constant(s.grid(), [0.3, 0.0, 1.0]);
        let drift = DriftSpec::new(x, vec![0.0; s.grid().num_vertices()]);
        let sys = EvoSystem::assemble(s.clone(), &drift, s.scalar_operator(1.0, 1.0), s.scalar_operator(0.0, 0.0)).unwrap();
        assert_eq!(sys.drift_sym().nnz() + sys.drift_skew().nnz() + sys.remainder().nnz(), 0);
    }

    #[test]
    fn constant_axial_drift_is_pure_transport() {
        let s = torus_space(4, 0);
        let x = VectorField::constant(s.grid(), [0.0, 0.0, 1.0]);
        let drift = DriftSpec::new(x, vec![1.0; s.grid().num_vertices()]);
        let sys = EvoSystem::assemble(s.clone(), &drift, s.scalar_operator(1.0, 1.0), s.scalar_operator(0.0, 0.0)).unwrap();
        assert!(sys.drift_sym().max_abs() <= 1e-12);
        assert!(sys.remainder().max_abs() <= 1e-12);
        assert!(sys.m1_tilde().max_abs() <= 1e-12);
        assert!((sys.rho0() - (1.0 + sys.sym_m1_tilde_norm())).abs() < 1e-12);
        assert!(sys.skew_defect() <= 1e-10);
    }

    #[test]
    fn noncommuting_material_is_rejected() {
        let s = torus_space(3, 0);
        let n = s.grid().num_vertices();
        let x = VectorField::constant(s.grid(), [0.0, 0.0, 1.0]);
        let alpha: Vec<f64> = (0..n).map(|i| 1.0 + (i % 2) as f64).collect();
        // M₀ couples neighbouring cells, α varies between them.
        let m = s.len();
        let mut t: Vec<(usize, usize, f64)> = (0..m).map(|i| (i, i, 2.0)).collect();
        t.push((0, 1, 0.1));
        t.push((1, 0, 0.1));
        let m0 = CsrMatrix::from_triplets(m, m, &t);
        let err = EvoSystem::assemble(s.clone(), &DriftSpec::new(x, alpha), m0, s.scalar_operator(0.0, 0.0));
        assert!(matches!(err, Err(WaveError::CommutationViolated(_))));
    }
}
