//! Symmetric part of the discrete Lie derivative under refinement, for a
//! constant and a variable axial field on the periodic box.
//!
//! cargo run --release --example lie_skewness

use driftwave::calculus::{lie_skew_symmetry_report, GridSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = GridSpec::torus([4, 4, 16], [1.0; 3]);
    let tau = 2.0 * std::f64::consts::PI;
    type Field<'a> = (&'a str, &'a dyn Fn([f64; 3]) -> [f64; 3]);
    let fields: [Field; 2] = [
        ("X = e3", &|_| [0.0, 0.0, 1.0]),
        ("X3 = 1 + sin(2πz)/2", &|x| [0.0, 0.0, 1.0 + 0.5 * (tau * x[2]).sin()]),
    ];
    for (name, field) in fields {
        let report = lie_skew_symmetry_report(&base, field, 3)?;
        println!("{name}  (quasi-skew: {})", report.quasi_skew);
        for level in &report.levels {
            let n = level.sym_norms.map(|v| format!("{v:.4e}"));
            println!("  {:?}  ‖sym 𝓛‖ per degree: {}", level.cells, n.join("  "));
        }
    }
    println!("reference sup|∂3 X3|/2 = {:.4}", std::f64::consts::PI / 2.0);
    Ok(())
}
