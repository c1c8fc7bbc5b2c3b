//! Exponentially weighted solution norms against the forcing norms, for a
//! variable drift in a walled pipe with random forcing.
//!
//! cargo run --release --example weighted_bound

use driftwave::calculus::{CylinderGrid, GridSpec, VectorField};
use driftwave::wave::{simulate, DriftSpec, EvoSystem, ProductSpace, SimulationOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tau = 2.0 * std::f64::consts::PI;
    let grid = CylinderGrid::new(GridSpec::periodic_pipe([6, 6, 12], [1.0; 3]))?;
    let space = ProductSpace::new(grid, 1)?;
    let field = VectorField::from_fn(space.grid(), |x| [0.0, 0.0, 1.0 + 0.5 * (tau * x[2]).sin()])?;
    let drift = DriftSpec::new(field, vec![1.0; space.grid().num_vertices()]);
    let system =
        EvoSystem::assemble(space.clone(), &drift, space.scalar_operator(1.5, 1.5), space.scalar_operator(0.2, 0.1))?;
    let rho = 2.0 * system.rho0();
    println!(
        "c {:.3}  ‖sym M̃₁‖ {:.3}  ρ₀ {:.3}  ρ {:.3}  bound 1/(ρc − ‖sym M̃₁‖) = {:.4}",
        system.c(),
        system.sym_m1_tilde_norm(),
        system.rho0(),
        rho,
        1.0 / system.coercivity(rho)
    );
    let dt = 0.1 / rho;
    let steps = (1.0 / dt).ceil() as usize;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let forces: Vec<Vec<f64>> =
            (0..steps).map(|_| (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut opts = SimulationOptions::new(dt, steps);
        opts.rho = rho;
        let r = simulate(&system, &vec![0.0; space.len()], &|t| Some(forces[(t / dt) as usize].clone()), &opts)?;
        println!("seed {seed}  ‖u‖_ρ/‖F‖_ρ = {:.4e}  (bound {:.4e})", r.weighted.ratio(), r.weighted.bound());
    }
    Ok(())
}
