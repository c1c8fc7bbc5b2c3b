use crate::linalg::weighted_symmetric_norm;

use super::{lie_matrix, AxisKind, CalculusError, CylinderGrid, GridSpec, VectorField};

/// Allowed growth of the symmetric-part norm from one refinement level to
/// the next for the sequence to count as bounded.
const GROWTH_LIMIT: f64 = 1.5;
/// Absolute floor below which symmetric-part norms count as zero.
const ZERO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieSkewLevel {
    pub cells: [usize; 3],
    /// `‖½(𝓛 + 𝓛*)‖` in the mass inner product, per degree `0..=3`.
    pub sym_norms: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieSkewReport {
    pub levels: Vec<LieSkewLevel>,
    /// True when the symmetric-part norms stay bounded under refinement.
    pub quasi_skew: bool,
}

impl LieSkewReport {
    pub fn max_sym_norm(&self) -> f64 {
        self.levels.iter().flat_map(|l| l.sym_norms).fold(0.0, f64::max)
    }
}

/// Measures the symmetric part of the Lie derivative along `field` on
/// `base` and `levels − 1` successive doublings of it.
///
/// On walled axes only interior degrees of freedom are used, and the field
/// must be tangent to the walls; on a truncated axis it must also vanish at
/// both ends, otherwise transport through the ends makes `𝓛` far from skew.
pub fn lie_skew_symmetry_report(
    base: &GridSpec,
    field: &dyn Fn([f64; 3]) -> [f64; 3],
    levels: usize,
) -> Result<LieSkewReport, CalculusError> {
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels.max(1) {
        let grid = CylinderGrid::new(base.refined(1 << level))?;
        let x = VectorField::from_fn(&grid, field)?;
        admissible(&grid, &x)?;
        let mut sym_norms = [0.0; 4];
        for (k, slot) in sym_norms.iter_mut().enumerate() {
            let l = lie_matrix(&grid, &x, k)?;
            let dofs = grid.interior(k);
            let l = if dofs.len() == grid.num_cells(k) { l } else { l.select(dofs, dofs) };
            let mass: Vec<f64> = dofs.iter().map(|&i| grid.mass(k)[i]).collect();
            *slot = weighted_symmetric_norm(&l, &mass);
        }
        out.push(LieSkewLevel { cells: grid.cells_per_axis(), sym_norms });
    }
    let quasi_skew = out.windows(2).all(|w| {
        (0..4).all(|k| w[1].sym_norms[k] <= GROWTH_LIMIT * w[0].sym_norms[k] + ZERO_FLOOR)
    });
    Ok(LieSkewReport { levels: out, quasi_skew })
}

fn admissible(grid: &CylinderGrid, x: &VectorField) -> Result<(), CalculusError> {
    let defect = x.wall_normal_defect(grid);
    if defect > 0.0 {
        return Err(CalculusError::NotSkewAdmissible(format!(
            "the field crosses a wall (normal component up to {defect:.3e})"
        )));
    }
    if grid.axis_kind(2) == AxisKind::Bounded {
        let nz = grid.cells_per_axis()[2];
        let support = x.support_mask();
        let leaks = (0..grid.num_vertices()).any(|i| {
            let pz = grid.cell(0, i).1[2];
            support[i] && (pz == 0 || pz == nz)
        });
        if leaks {
            return Err(CalculusError::NotSkewAdmissible(
                "the axis is truncated and the field does not vanish at its ends; use a periodic axis or a field \
                 supported away from the ends"
                    .into(),
            ));
        }
    }
    Ok(())
}
