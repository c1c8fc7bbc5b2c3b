//! Commutator, resolvent and transmutator identities on random matrices,
//! plus the accretivity classification of a few hand-picked operators.
//!
//! cargo run --release --example operator_identities [cases]

use driftwave::operator::{check_accretivity, resolvent, OperatorMatrix};
use driftwave::scenario::suites::operator_suite;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(200);
    let report = operator_suite(0, cases)?;
    print!("{}", report.to_text());

    let rotation = OperatorMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])?;
    println!("\n(1 + 0.5 J)⁻¹ for the rotation generator J:");
    println!("{}", resolvent(&rotation, 0.5)?.entries());

    let samples: [(&str, OperatorMatrix, f64); 3] = [
        ("rotation generator", rotation, 1.0),
        ("rotation − 0.4 I", OperatorMatrix::from_row_slice(2, 2, &[-0.4, 1.0, -1.0, -0.4])?, 1.0),
        ("−I", OperatorMatrix::identity(2).scale(-1.0), 2.0),
    ];
    for (name, c, eta0) in samples {
        let r = check_accretivity(&c, eta0, 32)?;
        println!(
            "{name:<24} eta0 {eta0}  min eig sym {:+.3}  sup ‖(1+ηC)⁻¹‖ {:.4}  → {}",
            r.min_sym_eigenvalue,
            r.resolvent_norm_sup,
            r.verdict.as_str()
        );
    }
    Ok(())
}
