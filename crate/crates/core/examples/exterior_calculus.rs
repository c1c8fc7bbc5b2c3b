//! Cochains on a walled pipe: exterior derivative, codifferential, Hodge
//! star, interior product and the Cartan-built Lie derivative.
//!
//! cargo run --release --example exterior_calculus

use driftwave::calculus::{
    codifferential, exterior_derivative, hodge_star, inner_product, interior_product, io, lie_derivative, Cochain,
    CylinderGrid, GridSpec, Variant, VectorField,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = CylinderGrid::new(GridSpec::periodic_pipe([4, 4, 8], [1.0, 1.0, 2.0]))?;
    println!("cells per degree: {:?}", (0..4).map(|k| grid.num_cells(k)).collect::<Vec<_>>());
    println!("wall-free dofs:   {:?}", (0..4).map(|k| grid.num_dofs(k, Variant::Dirichlet)).collect::<Vec<_>>());

    let tau = 2.0 * std::f64::consts::PI;
    let f = Cochain::from_vertex_fn(&grid, |x| (tau * x[0]).sin() * (tau * x[2] / 2.0).cos())?;
    let df = exterior_derivative(&grid, &f, Variant::Full)?;
    let ddf = exterior_derivative(&grid, &df, Variant::Full)?;
    println!("max |ddf| = {:e}", ddf.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));

    // ⟨dS, T⟩ = ⟨S, d*T⟩
    let t = Cochain::new(&grid, 1, (0..grid.num_cells(1)).map(|i| ((i * 37) % 11) as f64 - 5.0).collect())?;
    let lhs = inner_product(&grid, &df, &t)?;
    let rhs = inner_product(&grid, &f, &codifferential(&grid, &t, Variant::Full)?)?;
    println!("⟨df, t⟩ = {lhs:.12}   ⟨f, d*t⟩ = {rhs:.12}");

    let star = hodge_star(&grid, &f)?;
    println!("⟨⋆f, ⋆f⟩ − ⟨f, f⟩ = {:e}", inner_product(&grid, &star, &star)? - inner_product(&grid, &f, &f)?);

    let e3 = VectorField::constant(&grid, [0.0, 0.0, 1.0]);
    let lf = lie_derivative(&grid, &e3, &f)?;
    let contracted = interior_product(&grid, &e3, &df)?;
    let same = lf.values().iter().zip(contracted.values()).all(|(a, b)| (a - b).abs() < 1e-14);
    println!("𝓛_e3 f equals ι_e3 df on 0-forms: {same}");

    let mut buf = Vec::new();
    io::write_binary(&mut buf, &df)?;
    let back = io::read_binary(&mut buf.as_slice(), &grid)?;
    println!("binary round trip: {} bytes, identical = {}", buf.len(), back == df);
    Ok(())
}
