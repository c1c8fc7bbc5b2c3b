//! Second-order pressure equation evaluated on first-order solutions under
//! joint refinement of h and dt, below and above Mach 1.
//!
//! cargo run --release --example pressure_residual

use driftwave::calculus::GridSpec;
use driftwave::linalg::SolverOptions;
use driftwave::wave::cartesian::{CartesianScenario, StencilOrder};
use driftwave::wave::pressure::second_order_pressure_residual;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tau = 2.0 * std::f64::consts::PI;
    let f = move |x: [f64; 3], t: f64| (tau * x[0]).sin() * (tau * x[2]).cos() * (3.0 * t).sin();
    for v0 in [0.5, 1.5] {
        let mut previous: Option<f64> = None;
        for n in [8usize, 16, 32] {
            let h = 1.0 / n as f64;
            let scenario = CartesianScenario {
                grid: GridSpec::torus([n; 3], [1.0; 3]),
                v0,
                dt: 0.5 * h,
                steps: n,
                order: StencilOrder::Second,
                solver: SolverOptions::default(),
                modes: vec![],
            };
            let history = second_order_pressure_residual(&scenario, Some(&f))?;
            let r = history.last().map(|&(_, r)| r).unwrap_or(f64::NAN);
            let ratio = previous.map(|p| format!("ratio {:.2}", p / r)).unwrap_or_default();
            println!("v0 {v0}  n {n:3}  residual {r:.4e}  {ratio}");
            previous = Some(r);
        }
    }
    Ok(())
}
