//! Sparse matrices, linear solvers and norm estimators shared by the
//! calculus and wave modules.

mod direct;
pub mod krylov;
pub mod sparse;

pub use direct::SparseLu;
pub use krylov::{gmres, GmresOptions, GmresOutcome};
pub use sparse::{dot, norm2, weighted_dot, CsrMatrix};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("linear solve did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
}

/// How the implicit systems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverPolicy {
    /// GMRES first; falls back to a sparse LU when GMRES stalls and the system
    /// is below [`SolverOptions::direct_limit`] unknowns.
    #[default]
    Auto,
    Krylov,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub policy: SolverPolicy,
    pub rel_tol: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub direct_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { policy: SolverPolicy::Auto, rel_tol: 1e-10, restart: 60, max_iter: 3000, direct_limit: 200_000 }
    }
}

impl SolverOptions {
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_policy(mut self, policy: SolverPolicy) -> Self {
        self.policy = policy;
        self
    }

    fn gmres(&self) -> GmresOptions {
        GmresOptions { rel_tol: self.rel_tol, restart: self.restart, max_iter: self.max_iter }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveStats {
    pub iterations: usize,
    pub rel_residual: f64,
    pub used_direct: bool,
}

/// A solver bound to one fixed matrix; the LU factors, once computed, are reused.
#[derive(Debug)]
pub struct LinearSolver {
    matrix: CsrMatrix,
    opts: SolverOptions,
    lu: Option<SparseLu>,
}

impl LinearSolver {
    pub fn new(matrix: CsrMatrix, opts: SolverOptions) -> Result<Self, SolverError> {
        let lu = match opts.policy {
            SolverPolicy::Direct => Some(SparseLu::factor(&matrix).map_err(SolverError::Factorization)?),
            _ => None,
        };
        Ok(Self { matrix, opts, lu })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    /// Solves `A x = b`; `guess` seeds the Krylov iteration.
    pub fn solve(&mut self, b: &[f64], guess: Option<&[f64]>) -> Result<(Vec<f64>, SolveStats), SolverError> {
        if let Some(lu) = &self.lu {
            let x = lu.solve(b);
            let res = self.relative_residual(&x, b);
            return Ok((x, SolveStats { iterations: 0, rel_residual: res, used_direct: true }));
        }
        let mut x = guess.map_or_else(|| vec![0.0; b.len()], <[f64]>::to_vec);
        let out = gmres(&self.matrix, b, &mut x, &self.opts.gmres());
        if out.converged {
            return Ok((x, SolveStats { iterations: out.iterations, rel_residual: out.rel_residual, used_direct: false }));
        }
        if self.opts.policy == SolverPolicy::Auto && self.matrix.nrows() <= self.opts.direct_limit {
            let lu = SparseLu::factor(&self.matrix).map_err(SolverError::Factorization)?;
            let x = lu.solve(b);
            let res = self.relative_residual(&x, b);
            self.lu = Some(lu);
            return Ok((x, SolveStats { iterations: out.iterations, rel_residual: res, used_direct: true }));
        }
        Err(SolverError::NotConverged { residual: out.rel_residual, iterations: out.iterations })
    }

    fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        let ax = self.matrix.mul_vec(x);
        let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let bn = norm2(b);
        if bn == 0.0 {
            r
        } else {
            r / bn
        }
    }
}

/// Power iteration settings for spectral norms of large operators.
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;

fn start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f9e11);
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    v.into_iter().map(|x| x / nv).collect()
}

/// Largest `|λ|` of a symmetric matrix given as a matvec closure.
pub fn symmetric_norm_by_power<F>(n: usize, apply: F) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if n == 0 {
        return 0.0;
    }
    // Iterate on A² so that ±λ pairs do not stall the iteration.
    let mut v = start_vector(n);
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let av = apply(&v);
        let aav = apply(&av);
        let lam2 = dot(&v, &aav);
        let nrm = norm2(&aav);
        if nrm == 0.0 {
            return 0.0;
        }
        let next = lam2.max(0.0).sqrt();
        v = aav.into_iter().map(|x| x / nrm).collect();
        if (next - estimate).abs() <= POWER_TOL * next.max(f64::MIN_POSITIVE) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Spectral norm of a symmetric sparse matrix.
pub fn symmetric_norm(a: &CsrMatrix) -> f64 {
    assert!(a.is_square());
    symmetric_norm_by_power(a.nrows(), |v| a.mul_vec(v))
}

/// Spectral norm `‖A‖₂` of a general sparse matrix via `AᵀA`.
pub fn spectral_norm_sparse(a: &CsrMatrix) -> f64 {
    let at = a.transpose();
    let n = a.ncols();
    if n == 0 || a.nnz() == 0 {
        return 0.0;
    }
    let mut v = start_vector(n);
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = at.mul_vec(&a.mul_vec(&v));
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = dot(&v, &w).max(0.0).sqrt();
        v = w.into_iter().map(|x| x / nw).collect();
        if (next - estimate).abs() <= POWER_TOL * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Norm of an operator that is symmetric under the weighted inner product
/// `⟨x, y⟩ = Σ wᵢ xᵢ yᵢ`, i.e. `‖W^{1/2} A W^{-1/2}‖₂`.
pub fn weighted_symmetric_norm(a: &CsrMatrix, weights: &[f64]) -> f64 {
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let isq: Vec<f64> = sq.iter().map(|s| 1.0 / s).collect();
    let scaled = a.scale_rows(&sq).scale_cols(&isq);
    let sym = scaled.lincomb(0.5, &scaled.transpose(), 0.5);
    symmetric_norm(&sym)
}

/// `‖W A + Aᵀ W‖` measured entrywise; zero for operators skew under `W`.
pub fn weighted_skew_defect(a: &CsrMatrix, weights: &[f64]) -> f64 {
    let wa = a.scale_rows(weights);
    wa.add(&wa.transpose()).max_abs()
}

/// `(A + A*)/2` and `(A − A*)/2` with `A* = W⁻¹ Aᵀ W`.
pub fn weighted_sym_skew(a: &CsrMatrix, weights: &[f64]) -> (CsrMatrix, CsrMatrix) {
    let inv: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    let adj = a.transpose().scale_rows(&inv).scale_cols(weights);
    (a.lincomb(0.5, &adj, 0.5), a.lincomb(0.5, &adj, -0.5))
}

/// Weighted adjoint `W⁻¹ Aᵀ W`.
pub fn weighted_adjoint(a: &CsrMatrix, weights: &[f64]) -> CsrMatrix {
    let inv: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    a.transpose().scale_rows(&inv).scale_cols(weights)
}

/// Smallest eigenvalue of an operator selfadjoint under the weighted inner
/// product `⟨x, y⟩ = Σ wᵢ xᵢ yᵢ`. Diagonal operators are read off directly.
pub fn weighted_min_eigenvalue(a: &CsrMatrix, weights: &[f64]) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let diag = a.diagonal_entries();
    if a.triplets().iter().all(|&(r, c, _)| r == c) {
        return diag.into_iter().fold(f64::INFINITY, f64::min);
    }
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let isq: Vec<f64> = sq.iter().map(|s| 1.0 / s).collect();
    let scaled = a.scale_rows(&sq).scale_cols(&isq);
    let sym = scaled.lincomb(0.5, &scaled.transpose(), 0.5);
    // λ_min = s − ‖sI − A‖ with s ≥ ‖A‖, since sI − A is positive semidefinite.
    let s = symmetric_norm(&sym) * (1.0 + 1e-6) + f64::MIN_POSITIVE;
    let shifted = CsrMatrix::identity(n).lincomb(s, &sym, -1.0);
    s - symmetric_norm(&shifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_norm_of_diagonal() {
        let a = CsrMatrix::diagonal(&[1.0, -3.0, 2.0]);
        assert!((symmetric_norm(&a) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_norm_matches_dense_svd() {
        let a = CsrMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (1, 1, 2.0), (2, 0, -1.0), (2, 1, 0.5)]);
        let dense = a.to_dense().singular_values().max();
        assert!((spectral_norm_sparse(&a) - dense).abs() < 1e-8);
    }

    #[test]
    fn direct_and_krylov_agree() {
        let n = 30;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0 + (i as f64) * 0.01));
            t.push((i, (i + 3) % n, 1.0));
            t.push(((i + 3) % n, i, -1.0));
        }
        let a = CsrMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let opts = SolverOptions::default().with_tolerance(1e-13);
        let (xk, sk) = LinearSolver::new(a.clone(), opts.with_policy(SolverPolicy::Krylov)).unwrap().solve(&b, None).unwrap();
        let (xd, sd) = LinearSolver::new(a, opts.with_policy(SolverPolicy::Direct)).unwrap().solve(&b, None).unwrap();
        assert!(!sk.used_direct && sd.used_direct);
        for (p, q) in xk.iter().zip(&xd) {
            assert!((p - q).abs() < 1e-11);
        }
    }

    #[test]
    fn weighted_min_eigenvalue_of_coupled_block() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 4.0 / 3.0), (0, 1, -2.0 / 3.0), (1, 0, -2.0 / 3.0), (1, 1, 4.0 / 3.0)]);
        assert!((weighted_min_eigenvalue(&a, &[1.0, 1.0]) - 2.0 / 3.0).abs() < 1e-8);
        assert_eq!(weighted_min_eigenvalue(&CsrMatrix::diagonal(&[3.0, 0.5]), &[1.0, 2.0]), 0.5);
    }

    #[test]
    fn weighted_skew_defect_vanishes_for_weighted_skew() {
        // A = W⁻¹ S with S antisymmetric is skew under W.
        let w = [2.0, 0.5, 4.0];
        let s = CsrMatrix::from_triplets(3, 3, &[(0, 1, 1.0), (1, 0, -1.0), (1, 2, 3.0), (2, 1, -3.0)]);
        let a = s.scale_rows(&w.map(|x| 1.0 / x));
        assert!(weighted_skew_defect(&a, &w) < 1e-15);
        let (sym, _) = weighted_sym_skew(&a, &w);
        assert!(sym.max_abs() < 1e-15);
    }
}
