use crate::linalg::{CsrMatrix, LinearSolver, SolveStats, SolverOptions};

use super::WaveError;

/// Implicit midpoint rule for `M₀ u' + K u = f`:
/// `(M₀/dt + K/2) u⁺ = (M₀/dt − K/2) u + f_mid`.
///
/// The left-hand matrix is bound to one solver so factorizations are reused
/// across steps.
#[derive(Debug)]
pub struct MidpointStepper {
    dt: f64,
    explicit: CsrMatrix,
    solver: LinearSolver,
    last: SolveStats,
}

impl MidpointStepper {
    pub fn new(m0: &CsrMatrix, k: &CsrMatrix, dt: f64, opts: SolverOptions) -> Result<Self, WaveError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(WaveError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let implicit = m0.lincomb(1.0 / dt, k, 0.5);
        let explicit = m0.lincomb(1.0 / dt, k, -0.5);
        Ok(Self { dt, explicit, solver: LinearSolver::new(implicit, opts)?, last: SolveStats::default() })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Statistics of the most recent linear solve.
    pub fn last_stats(&self) -> SolveStats {
        self.last
    }

    /// Advances `u` by one step; `f_mid` is the source at the midpoint time.
    pub fn step(&mut self, u: &[f64], f_mid: Option<&[f64]>) -> Result<Vec<f64>, WaveError> {
        let mut rhs = self.explicit.mul_vec(u);
        if let Some(f) = f_mid {
            rhs.iter_mut().zip(f).for_each(|(r, fi)| *r += fi);
        }
        if rhs.iter().all(|&v| v == 0.0) {
            self.last = SolveStats::default();
            return Ok(vec![0.0; u.len()]);
        }
        let (x, stats) = self.solver.solve(&rhs, Some(u))?;
        self.last = stats;
        Ok(x)
    }
}
