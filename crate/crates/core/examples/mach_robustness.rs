//! The first-order acoustic system conserves energy at every Mach number,
//! while the drift-absorbing material block degenerates at Mach 1.
//!
//! cargo run --release --example mach_robustness

use driftwave::calculus::GridSpec;
use driftwave::linalg::SolverOptions;
use driftwave::wave::cartesian::{friedrichs_cartesian_simulate, CartesianScenario, StencilOrder};
use driftwave::wave::transform::BiIsotropic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for v0 in [0.0, 0.5, 1.0, 1.5, 3.0] {
        let scenario = CartesianScenario {
            grid: GridSpec::torus([4, 4, 32], [1.0; 3]),
            v0,
            dt: 1e-3,
            steps: 1000,
            order: StencilOrder::Fourth,
            solver: SolverOptions::default(),
            modes: vec![[0, 0, 1], [1, 0, 1]],
        };
        let out = friedrichs_cartesian_simulate(&scenario, None)?;
        let transform = match BiIsotropic::new(v0) {
            Ok(t) => {
                let ev = t.eigenvalues();
                format!("M0 eigenvalues [{:.3}, {:.3}, {:.3}, {:.3}]{}", ev[0], ev[1], ev[2], ev[3], if t.is_indefinite() { " indefinite" } else { "" })
            }
            Err(e) => e.to_string(),
        };
        println!("v0 {v0:3.1}  energy max/min − 1 = {:.3e}  |  {transform}", out.energy_ratio() - 1.0);
    }
    Ok(())
}
