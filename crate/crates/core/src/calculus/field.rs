use crate::linalg::CsrMatrix;

use super::{AxisKind, CalculusError, Cochain, CochainKind, CylinderGrid};

/// A vector field sampled at the grid vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid_hash: u64,
    components: [Vec<f64>; 3],
}

impl VectorField {
    pub fn new(grid: &CylinderGrid, components: [Vec<f64>; 3]) -> Result<Self, CalculusError> {
        let n = grid.num_vertices();
        for c in &components {
            if c.len() != n {
                return Err(CalculusError::LengthMismatch { degree: 0, expected: n, got: c.len() });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(CalculusError::NonFinite);
            }
        }
        Ok(Self { grid_hash: grid.hash(), components })
    }

    pub fn from_fn(grid: &CylinderGrid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self, CalculusError> {
        let mut components: [Vec<f64>; 3] = Default::default();
        for i in 0..grid.num_vertices() {
            let x = f(grid.vertex_position(grid.cell(0, i).1));
            for a in 0..3 {
                components[a].push(x[a]);
            }
        }
        Self::new(grid, components)
    }

    pub fn constant(grid: &CylinderGrid, x: [f64; 3]) -> Self {
        Self::from_fn(grid, |_| x).expect("finite constant")
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    /// Largest pointwise Euclidean length.
    pub fn max_norm(&self) -> f64 {
        (0..self.components[0].len())
            .map(|i| (0..3).map(|a| self.components[a][i].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Vertices where the field does not vanish.
    pub fn support_mask(&self) -> Vec<bool> {
        (0..self.components[0].len()).map(|i| (0..3).any(|a| self.components[a][i] != 0.0)).collect()
    }

    /// Largest normal component on a wall; zero for fields tangent to every
    /// wall.
    pub fn wall_normal_defect(&self, grid: &CylinderGrid) -> f64 {
        let n = grid.cells_per_axis();
        let mut worst: f64 = 0.0;
        for i in 0..grid.num_vertices() {
            let p = grid.cell(0, i).1;
            for a in 0..3 {
                if grid.axis_kind(a) == AxisKind::Bounded && (p[a] == 0 || p[a] == n[a]) {
                    worst = worst.max(self.components[a][i].abs());
                }
            }
        }
        worst
    }

    fn check_grid(&self, grid: &CylinderGrid) -> Result<(), CalculusError> {
        if self.grid_hash != grid.hash() {
            return Err(CalculusError::GridMismatch);
        }
        Ok(())
    }
}

/// Matrix of `ι_X` from `k`-cochains to `(k−1)`-cochains, `1 ≤ k ≤ 3`.
///
/// For a `(k−1)`-cell `τ` spanning axes `T` and each axis `a ∉ T`, the two
/// `k`-cells spanning `T ∪ {a}` on either side of `τ` are averaged, divided
/// by `h_a` and weighted by `X_a` averaged over the corners of `τ`. The sign
/// is `(−1)^j` where `j` is the position of `a` in `T ∪ {a}`. At a wall only
/// the one existing neighbour is used.
pub fn interior_product_matrix(grid: &CylinderGrid, x: &VectorField, k: usize) -> Result<CsrMatrix, CalculusError> {
    x.check_grid(grid)?;
    if k == 0 || k > 3 {
        return Err(CalculusError::InvalidDegree { op: "interior product", degree: k });
    }
    let h = grid.spacing();
    let mut trip = Vec::new();
    for row in 0..grid.num_cells(k - 1) {
        let (t, p) = grid.cell(k - 1, row);
        let corners = grid.cell_vertices(k - 1, row);
        let face_axes = &grid.cell_types(k - 1)[t].axes;
        for a in (0..3).filter(|a| !face_axes.contains(a)) {
            let xa = corners.iter().map(|&v| x.components[a][v]).sum::<f64>() / corners.len() as f64;
            if xa == 0.0 {
                continue;
            }
            let mut axes = face_axes.clone();
            axes.push(a);
            axes.sort_unstable();
            let j = axes.iter().position(|&b| b == a).expect("just inserted");
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let st = grid.type_of(k, &axes);
            let base = p.map(|v| v as i64);
            let mut below = base;
            below[a] -= 1;
            let cells: Vec<usize> = [grid.locate(k, st, base), grid.locate(k, st, below)].into_iter().flatten().collect();
            let w = sign * xa / (h[a] * cells.len() as f64);
            for c in cells {
                trip.push((row, c, w));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(grid.num_cells(k - 1), grid.num_cells(k), &trip))
}

/// Matrix of `𝓛_X = d ι_X + ι_X d` on `k`-cochains, with the full `d`.
pub fn lie_matrix(grid: &CylinderGrid, x: &VectorField, k: usize) -> Result<CsrMatrix, CalculusError> {
    if k > 3 {
        return Err(CalculusError::InvalidDegree { op: "Lie derivative", degree: k });
    }
    let n = grid.num_cells(k);
    let mut l = CsrMatrix::zeros(n, n);
    if k >= 1 {
        l = l.add(&grid.incidence(k - 1).matmul(&interior_product_matrix(grid, x, k)?));
    }
    if k <= 2 {
        l = l.add(&interior_product_matrix(grid, x, k + 1)?.matmul(&grid.incidence(k)));
    }
    Ok(l)
}

/// Matrix of the flat covariant derivative `∇_X` on `k`-cochains: every
/// cell value is differentiated along each axis with central differences
/// between cells of the same type (one-sided at walls) and weighted by
/// `X_a` averaged over the cell's corners.
pub fn covariant_matrix(grid: &CylinderGrid, x: &VectorField, k: usize) -> Result<CsrMatrix, CalculusError> {
    x.check_grid(grid)?;
    if k > 3 {
        return Err(CalculusError::InvalidDegree { op: "covariant derivative", degree: k });
    }
    let h = grid.spacing();
    let mut trip = Vec::new();
    for row in 0..grid.num_cells(k) {
        let (t, p) = grid.cell(k, row);
        let corners = grid.cell_vertices(k, row);
        for a in 0..3 {
            let xa = corners.iter().map(|&v| x.components[a][v]).sum::<f64>() / corners.len() as f64;
            if xa == 0.0 {
                continue;
            }
            let base = p.map(|v| v as i64);
            let (mut up, mut down) = (base, base);
            up[a] += 1;
            down[a] -= 1;
            match (grid.locate(k, t, up), grid.locate(k, t, down)) {
                (Some(u), Some(d)) => {
                    trip.push((row, u, xa / (2.0 * h[a])));
                    trip.push((row, d, -xa / (2.0 * h[a])));
                }
                (Some(u), None) => {
                    trip.push((row, u, xa / h[a]));
                    trip.push((row, row, -xa / h[a]));
                }
                (None, Some(d)) => {
                    trip.push((row, row, xa / h[a]));
                    trip.push((row, d, -xa / h[a]));
                }
                (None, None) => {}
            }
        }
    }
    Ok(CsrMatrix::from_triplets(grid.num_cells(k), grid.num_cells(k), &trip))
}

fn apply(grid: &CylinderGrid, m: &CsrMatrix, degree: usize, omega: &Cochain) -> Cochain {
    Cochain::from_parts(degree, CochainKind::Primal, grid.hash(), m.mul_vec(omega.values()))
}

fn check(grid: &CylinderGrid, omega: &Cochain, op: &'static str) -> Result<(), CalculusError> {
    omega.check_grid(grid)?;
    omega.require_primal(op)
}

pub fn interior_product(grid: &CylinderGrid, x: &VectorField, omega: &Cochain) -> Result<Cochain, CalculusError> {
    check(grid, omega, "interior product")?;
    let k = omega.degree();
    let m = interior_product_matrix(grid, x, k)?;
    Ok(apply(grid, &m, k - 1, omega))
}

pub fn lie_derivative(grid: &CylinderGrid, x: &VectorField, omega: &Cochain) -> Result<Cochain, CalculusError> {
    check(grid, omega, "Lie derivative")?;
    let m = lie_matrix(grid, x, omega.degree())?;
    Ok(apply(grid, &m, omega.degree(), omega))
}

pub fn covariant_derivative(grid: &CylinderGrid, x: &VectorField, omega: &Cochain) -> Result<Cochain, CalculusError> {
    check(grid, omega, "covariant derivative")?;
    let m = covariant_matrix(grid, x, omega.degree())?;
    Ok(apply(grid, &m, omega.degree(), omega))
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;

    fn torus(n: usize) -> CylinderGrid {
        CylinderGrid::new(GridSpec::torus([n; 3], [1.0; 3])).unwrap()
    }

    #[test]
    fn axial_contraction_of_axial_unit_form() {
        let g = torus(4);
        let hz = g.spacing()[2];
        let e3 = VectorField::constant(&g, [0.0, 0.0, 1.0]);
        let zt = g.type_of(1, &[2]);
        let vals: Vec<f64> =
            (0..g.num_cells(1)).map(|i| if g.cell(1, i).0 == zt { hz } else { 0.0 }).collect();
        let omega = Cochain::new(&g, 1, vals).unwrap();
        let out = interior_product(&g, &e3, &omega).unwrap();
        assert!(out.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn axial_contraction_ignores_transverse_edges() {
        let g = torus(3);
        let e3 = VectorField::constant(&g, [0.0, 0.0, 1.0]);
        let xt = g.type_of(1, &[0]);
        let vals: Vec<f64> = (0..g.num_cells(1)).map(|i| if g.cell(1, i).0 == xt { 0.7 } else { 0.0 }).collect();
        let out = interior_product(&g, &e3, &Cochain::new(&g, 1, vals).unwrap()).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn double_contraction_vanishes_for_constant_field() {
        let g = torus(3);
        let x = VectorField::constant(&g, [0.3, -1.2, 0.8]);
        for k in 2..4 {
            let m = interior_product_matrix(&g, &x, k - 1).unwrap().matmul(&interior_product_matrix(&g, &x, k).unwrap());
            assert!(m.max_abs() < 1e-12, "k = {k}: {}", m.max_abs());
        }
    }

    #[test]
    fn lie_of_function_along_axis_is_central_difference() {
        let g = torus(8);
        let e3 = VectorField::constant(&g, [0.0, 0.0, 1.0]);
        let f = Cochain::from_vertex_fn(&g, |p| (2.0 * std::f64::consts::PI * p[2]).sin()).unwrap();
        let lf = lie_derivative(&g, &e3, &f).unwrap();
        let cf = covariant_derivative(&g, &e3, &f).unwrap();
        for (a, b) in lf.values().iter().zip(cf.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_data_differentiated_exactly_on_truncated_axis() {
        let g = CylinderGrid::new(GridSpec::truncated_pipe([2, 2, 6], [1.0, 1.0, 3.0])).unwrap();
        let e3 = VectorField::constant(&g, [0.0, 0.0, 1.0]);
        let f = Cochain::from_vertex_fn(&g, |p| 2.0 * p[2] - 1.0).unwrap();
        let df = covariant_derivative(&g, &e3, &f).unwrap();
        assert!(df.values().iter().all(|&v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn zero_field_gives_zero_operators() {
        let g = torus(3);
        let zero = VectorField::constant(&g, [0.0; 3]);
        for k in 0..4 {
            assert_eq!(lie_matrix(&g, &zero, k).unwrap().nnz(), 0);
            assert_eq!(covariant_matrix(&g, &zero, k).unwrap().nnz(), 0);
        }
    }
}
