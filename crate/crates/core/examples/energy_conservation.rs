//! Constant drift on the 16³ torus: the assembled generator is skew, M̃₁
//! vanishes, and implicit midpoint steps keep the energy fixed.
//!
//! cargo run --release --example energy_conservation [steps]

use driftwave::calculus::{CylinderGrid, GridSpec, VectorField};
use driftwave::linalg::SolverOptions;
use driftwave::wave::{simulate, DriftSpec, EvoSystem, ProductSpace, SimulationOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let steps = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(1000);
    let grid = CylinderGrid::new(GridSpec::torus([16; 3], [1.0; 3]))?;
    let space = ProductSpace::new(grid, 0)?;
    let field = VectorField::constant(space.grid(), [0.0, 0.0, 1.0]);
    let drift = DriftSpec::new(field, vec![1.0; space.grid().num_vertices()]);
    let system =
        EvoSystem::assemble(space.clone(), &drift, space.scalar_operator(1.0, 1.0), space.scalar_operator(0.0, 0.0))?;
    println!("skew defect {:.3e}   max |M̃₁| {:.3e}   ρ₀ {}", system.skew_defect(), system.m1_tilde().max_abs(), system.rho0());

    let u0: Vec<f64> = (0..space.len()).map(|i| ((i * 7919) % 1000) as f64 / 500.0 - 1.0).collect();
    let mut opts = SimulationOptions::new(0.01, steps);
    opts.solver = SolverOptions::default().with_tolerance(1e-13);
    let result = simulate(&system, &u0, &|_| None, &opts)?;
    let e0 = result.records[0].energy;
    for r in result.records.iter().step_by((steps / 10).max(1)) {
        println!("step {:5}  t {:6.2}  E {:.15}  (E − E0)/E0 {:+.3e}", r.step, r.time, r.energy, (r.energy - e0) / e0);
    }
    let drift = result.records.iter().map(|r| ((r.energy - e0) / e0).abs()).fold(0.0, f64::max);
    println!("max relative drift {drift:.3e}, max solver residual {:.3e}", result.max_solver_residual);
    Ok(())
}
