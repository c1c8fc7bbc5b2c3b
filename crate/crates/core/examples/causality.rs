//! Spread of a point pulse under a constant drift, compared with the
//! envelope (1 + max|X0|)·t + 3h at several amplitude thresholds.
//!
//! cargo run --release --example causality [cells]

use driftwave::calculus::{CylinderGrid, GridSpec, VectorField};
use driftwave::wave::{simulate, DriftSpec, EvoSystem, ProductSpace, SimulationOptions, SupportProbe};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(24);
    let h = 1.0 / n as f64;
    let speed = 0.5;
    let grid = CylinderGrid::new(GridSpec::torus([n; 3], [1.0; 3]))?;
    let space = ProductSpace::new(grid, 0)?;
    let field = VectorField::constant(space.grid(), [0.0, 0.0, speed]);
    let drift = DriftSpec::new(field, vec![1.0; space.grid().num_vertices()]);
    let system =
        EvoSystem::assemble(space.clone(), &drift, space.scalar_operator(1.0, 1.0), space.scalar_operator(0.0, 0.0))?;
    let mut u0 = vec![0.0; space.len()];
    u0[space.grid().locate(0, 0, [(n / 2) as i64; 3]).expect("centre vertex")] = 1.0;

    let steps = n;
    println!("{:>6} {:>9} | radius at threshold", "t", "envelope");
    println!("{:>6} {:>9} | {:>8} {:>8} {:>8} {:>8}", "", "", "1e-9", "1e-6", "1e-3", "1e-1");
    let mut table = Vec::new();
    for threshold in [1e-9, 1e-6, 1e-3, 1e-1] {
        let mut opts = SimulationOptions::new(h / 4.0, steps);
        opts.probe = Some(SupportProbe { origin: [0.5; 3], threshold });
        table.push(simulate(&system, &u0, &|_| None, &opts)?.records);
    }
    for i in (0..=steps).step_by(4) {
        let t = table[0][i].time;
        let radii: Vec<String> = table.iter().map(|r| format!("{:8.4}", r[i].support_radius)).collect();
        println!("{t:6.3} {:9.4} | {}", (1.0 + speed) * t + 3.0 * h, radii.join(" "));
    }
    Ok(())
}
