//! Parses an inline scenario and runs it the way the command line tool does.
//!
//! cargo run --release --example config_run

use driftwave::scenario::{parse_str, run};

const SCENARIO: &str = r#"
mode = "simulate_manifold"
seed = 3
degree = 0

[grid]
cells = [8, 8, 16]
cross_section = "walled"

[drift]
field = ["0", "0", "0.8 + 0.4*cos(2*pi*z)"]
alpha = "1"

[material]
m0 = "1 + 0.2*sin(2*pi*z)"

[time]
dt = 0.01
t_end = 0.5

[initial]
kind = "expression"
expression = "sin(pi*x)*sin(pi*y)*exp(-20*(z - 0.5)^2)"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_str(SCENARIO)?;
    let out = std::env::temp_dir().join("driftwave-config-run");
    let outcome = run(&cfg, &out)?;
    print!("{}", outcome.report.to_text());
    for a in &outcome.artifacts {
        println!("wrote {}", a.display());
    }

    let typo = SCENARIO.replace("alpha", "alpah");
    if let Err(e) = parse_str(&typo) {
        println!("\nwith a typo:\n{e}");
    }
    Ok(())
}
