//! Residual of the second-order pressure equation
//! `∂₀²p + 2v₀∂₀∂₃p − (∂₁² + ∂₂² + (1 − v₀²)∂₃²)p = (∂₀ + v₀∂₃)f`
//! evaluated with central differences on pressures computed by the
//! first-order Cartesian solver.

use std::collections::VecDeque;

use crate::calculus::CylinderGrid;

use super::cartesian::{CartesianScenario, CartesianSystem};
use super::WaveError;

/// Keeps the last three pressure levels and evaluates the residual at the
/// middle one.
pub struct SecondOrderResidual<'a> {
    grid: CylinderGrid,
    v0: f64,
    dt: f64,
    source: Option<&'a dyn Fn([f64; 3], f64) -> f64>,
    levels: VecDeque<(f64, Vec<f64>)>,
    history: Vec<(f64, f64)>,
}

impl<'a> SecondOrderResidual<'a> {
    pub fn new(
        grid: CylinderGrid,
        v0: f64,
        dt: f64,
        source: Option<&'a dyn Fn([f64; 3], f64) -> f64>,
    ) -> Result<Self, WaveError> {
        if !grid.is_fully_periodic() {
            return Err(WaveError::NonPeriodic("the second-order pressure residual"));
        }
        Ok(Self { grid, v0, dt, source, levels: VecDeque::with_capacity(3), history: Vec::new() })
    }

    /// Adds the pressure at time `t`; returns the residual norm at the
    /// previous level once three levels are stored.
    pub fn push(&mut self, t: f64, p: &[f64]) -> Option<f64> {
        if self.levels.len() == 3 {
            self.levels.pop_front();
        }
        self.levels.push_back((t, p.to_vec()));
        if self.levels.len() < 3 {
            return None;
        }
        let r = self.evaluate();
        self.history.push((self.levels[1].0, r));
        Some(r)
    }

    /// `(time, ‖residual‖)` for every evaluated level.
    pub fn history(&self) -> &[(f64, f64)] {
        &self.history
    }

    pub fn latest(&self) -> Result<f64, WaveError> {
        self.history.last().map(|&(_, r)| r).ok_or(WaveError::InsufficientHistory(self.levels.len()))
    }

    fn shifted(&self, i: usize, axis: usize, s: i64) -> usize {
        let mut q = self.grid.cell(0, i).1.map(|v| v as i64);
        q[axis] += s;
        self.grid.locate(0, 0, q).expect("periodic")
    }

    fn evaluate(&self) -> f64 {
        let h = self.grid.spacing();
        let (dt, v0) = (self.dt, self.v0);
        let (t0, pm) = (&self.levels[0].0, &self.levels[0].1);
        let (t1, pc) = (&self.levels[1].0, &self.levels[1].1);
        let (t2, pp) = (&self.levels[2].0, &self.levels[2].1);
        let n = self.grid.num_vertices();
        let mut sum = 0.0;
        for i in 0..n {
            let up = self.shifted(i, 2, 1);
            let dn = self.shifted(i, 2, -1);
            let d3 = |f: &[f64]| (f[up] - f[dn]) / (2.0 * h[2]);
            let mut lap = 0.0;
            for a in 0..3 {
                let second = (pc[self.shifted(i, a, 1)] - 2.0 * pc[i] + pc[self.shifted(i, a, -1)]) / (h[a] * h[a]);
                lap += if a == 2 { (1.0 - v0 * v0) * second } else { second };
            }
            let lhs = (pp[i] - 2.0 * pc[i] + pm[i]) / (dt * dt) + 2.0 * v0 * (d3(pp) - d3(pm)) / (2.0 * dt) - lap;
            let rhs = match self.source {
                Some(f) => {
                    let x = self.grid.vertex_position(self.grid.cell(0, i).1);
                    let at = |j: usize, t: f64| f(self.grid.vertex_position(self.grid.cell(0, j).1), t);
                    (f(x, *t2) - f(x, *t0)) / (2.0 * dt) + v0 * (at(up, *t1) - at(dn, *t1)) / (2.0 * h[2])
                }
                None => 0.0,
            };
            let r = lhs - rhs;
            sum += r * r;
        }
        (sum * h[0] * h[1] * h[2]).sqrt()
    }
}

/// Runs the Cartesian solver from rest under pressure forcing `source` and
/// returns the residual history.
pub fn second_order_pressure_residual(
    scenario: &CartesianScenario,
    source: Option<&dyn Fn([f64; 3], f64) -> f64>,
) -> Result<Vec<(f64, f64)>, WaveError> {
    let system = CartesianSystem::new(scenario.grid, scenario.v0, scenario.order)?;
    if scenario.steps < 2 {
        return Err(WaveError::InsufficientHistory(scenario.steps + 1));
    }
    let np = system.num_pressure();
    let mut residual = SecondOrderResidual::new(system.grid().clone(), scenario.v0, scenario.dt, source)?;
    let src = |t: f64| source.map(|g| system.pressure_source(g, t));
    let u0 = vec![0.0; system.len()];
    system.run(&u0, &src, scenario.dt, scenario.steps, scenario.solver, &mut |_, t, u| {
        residual.push(t, &u[..np]);
    })?;
    Ok(residual.history().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::GridSpec;
    use crate::linalg::SolverOptions;
    use crate::wave::cartesian::StencilOrder;

    #[test]
    fn rest_without_forcing_has_zero_residual() {
        let sc = CartesianScenario {
            grid: GridSpec::torus([4; 3], [1.0; 3]),
            v0: 0.5,
            dt: 0.05,
            steps: 4,
            order: StencilOrder::Second,
            solver: SolverOptions::default(),
            modes: vec![],
        };
        let h = second_order_pressure_residual(&sc, None).unwrap();
        assert_eq!(h.len(), 3);
        assert!(h.iter().all(|&(_, r)| r == 0.0));
    }

    #[test]
    fn latest_needs_three_levels() {
        let g = CylinderGrid::new(GridSpec::torus([3; 3], [1.0; 3])).unwrap();
        let mut r = SecondOrderResidual::new(g, 0.0, 0.1, None).unwrap();
        r.push(0.0, &[0.0; 27]);
        assert_eq!(r.latest(), Err(WaveError::InsufficientHistory(1)));
    }
}
