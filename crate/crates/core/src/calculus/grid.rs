//! Structured cubical grid on a box `[0,Lx]×[0,Ly]×[0,Lz]` with per-axis
//! periodic or walled topology, its cell enumeration, incidence matrices and
//! diagonal mass weights.

use crate::linalg::CsrMatrix;

use super::CalculusError;

/// Topology of one grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKind {
    /// Index `n` is identified with `0`.
    Periodic,
    /// Two walls at `0` and `L`; for the axial direction this is the
    /// truncated cylinder.
    Bounded,
}

/// Input to [`CylinderGrid::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Cell counts `(nx, ny, nz)`.
    pub cells: [usize; 3],
    /// Physical lengths `(Lx, Ly, Lz)`.
    pub lengths: [f64; 3],
    /// Topology shared by the two cross-section axes.
    pub cross_section: AxisKind,
    pub axial: AxisKind,
}

impl GridSpec {
    /// Fully periodic box.
    pub fn torus(cells: [usize; 3], lengths: [f64; 3]) -> Self {
        Self { cells, lengths, cross_section: AxisKind::Periodic, axial: AxisKind::Periodic }
    }

    /// Walled cross-section, periodic axis.
    pub fn periodic_pipe(cells: [usize; 3], lengths: [f64; 3]) -> Self {
        Self { cells, lengths, cross_section: AxisKind::Bounded, axial: AxisKind::Periodic }
    }

    /// Walled cross-section, truncated axis.
    pub fn truncated_pipe(cells: [usize; 3], lengths: [f64; 3]) -> Self {
        Self { cells, lengths, cross_section: AxisKind::Bounded, axial: AxisKind::Bounded }
    }

    /// Same box with every cell count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { cells: self.cells.map(|n| n * factor), ..*self }
    }
}

/// Which exterior derivative to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Cells lying in a wall carry no degrees of freedom.
    Dirichlet,
    Full,
}

/// One family of k-cells: those spanning exactly the axes in `axes`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellType {
    /// Axes spanned, sorted ascending.
    pub axes: Vec<usize>,
    /// Number of positions along each axis.
    pub extents: [usize; 3],
    /// Index of the first cell of this type within its degree.
    pub offset: usize,
}

impl CellType {
    pub fn spans(&self, axis: usize) -> bool {
        self.axes.contains(&axis)
    }

    pub fn count(&self) -> usize {
        self.extents.iter().product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderGrid {
    spec: GridSpec,
    spacing: [f64; 3],
    kinds: [AxisKind; 3],
    types: [Vec<CellType>; 4],
    counts: [usize; 4],
    mass: [Vec<f64>; 4],
    interior: [Vec<usize>; 4],
    interior_pos: [Vec<Option<usize>>; 4],
    hash: u64,
}

const AXIS_SETS: [&[&[usize]]; 4] = [&[&[]], &[&[0], &[1], &[2]], &[&[0, 1], &[0, 2], &[1, 2]], &[&[0, 1, 2]]];

impl CylinderGrid {
    pub fn new(spec: GridSpec) -> Result<Self, CalculusError> {
        let names = ["nx", "ny", "nz"];
        let mut problems = Vec::new();
        for a in 0..3 {
            if spec.cells[a] < 2 {
                problems.push(format!("{} must be at least 2, got {}", names[a], spec.cells[a]));
            }
            let l = spec.lengths[a];
            if !(l.is_finite() && l > 0.0) {
                problems.push(format!("length along axis {a} must be positive and finite, got {l}"));
            }
        }
        if !problems.is_empty() {
            return Err(CalculusError::InvalidGrid(problems.join("; ")));
        }
        let kinds = [spec.cross_section, spec.cross_section, spec.axial];
        let spacing = [0, 1, 2].map(|a| spec.lengths[a] / spec.cells[a] as f64);

        let mut types: [Vec<CellType>; 4] = Default::default();
        let mut counts = [0; 4];
        for k in 0..4 {
            let mut offset = 0;
            for axes in AXIS_SETS[k] {
                let extents = [0, 1, 2].map(|a| {
                    let n = spec.cells[a];
                    match (axes.contains(&a), kinds[a]) {
                        (true, _) | (false, AxisKind::Periodic) => n,
                        (false, AxisKind::Bounded) => n + 1,
                    }
                });
                let t = CellType { axes: axes.to_vec(), extents, offset };
                offset += t.count();
                types[k].push(t);
            }
            counts[k] = offset;
        }

        let mut grid = Self {
            spec,
            spacing,
            kinds,
            types,
            counts,
            mass: Default::default(),
            interior: Default::default(),
            interior_pos: Default::default(),
            hash: 0,
        };
        for k in 0..4 {
            let mut mass = Vec::with_capacity(counts[k]);
            let mut interior = Vec::new();
            let mut pos = Vec::with_capacity(counts[k]);
            for idx in 0..counts[k] {
                let (t, p) = grid.cell(k, idx);
                mass.push(grid.mass_ratio(&grid.types[k][t], p));
                if grid.on_wall(&grid.types[k][t], p) {
                    pos.push(None);
                } else {
                    pos.push(Some(interior.len()));
                    interior.push(idx);
                }
            }
            grid.mass[k] = mass;
            grid.interior[k] = interior;
            grid.interior_pos[k] = pos;
        }
        grid.hash = fingerprint(&spec);
        Ok(grid)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cells_per_axis(&self) -> [usize; 3] {
        self.spec.cells
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.spec.lengths
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn axis_kind(&self, axis: usize) -> AxisKind {
        self.kinds[axis]
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.kinds.iter().all(|k| *k == AxisKind::Periodic)
    }

    /// Fingerprint stored with cochains to detect grid mismatches.
    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn num_cells(&self, k: usize) -> usize {
        self.counts[k]
    }

    pub fn cell_types(&self, k: usize) -> &[CellType] {
        &self.types[k]
    }

    pub fn num_vertices(&self) -> usize {
        self.counts[0]
    }

    /// Type index and position of cell `idx` of degree `k`.
    pub fn cell(&self, k: usize, idx: usize) -> (usize, [usize; 3]) {
        let t = self.types[k].iter().rposition(|t| t.offset <= idx).expect("index in range");
        let ty = &self.types[k][t];
        let mut r = idx - ty.offset;
        let mut p = [0; 3];
        for a in 0..3 {
            p[a] = r % ty.extents[a];
            r /= ty.extents[a];
        }
        (t, p)
    }

    /// Index of the cell of type `t` at position `p`, wrapping periodic axes;
    /// `None` when `p` falls outside a bounded axis.
    pub fn locate(&self, k: usize, t: usize, p: [i64; 3]) -> Option<usize> {
        let ty = &self.types[k][t];
        let mut idx = 0;
        let mut stride = 1;
        for a in 0..3 {
            let e = ty.extents[a] as i64;
            let q = match self.kinds[a] {
                AxisKind::Periodic => p[a].rem_euclid(e),
                AxisKind::Bounded if (0..e).contains(&p[a]) => p[a],
                AxisKind::Bounded => return None,
            };
            idx += q as usize * stride;
            stride *= e as usize;
        }
        Some(ty.offset + idx)
    }

    /// Type index of the `k`-cells spanning exactly `axes` (sorted).
    pub fn type_of(&self, k: usize, axes: &[usize]) -> usize {
        self.types[k].iter().position(|t| t.axes == axes).expect("valid axis set")
    }

    /// Coordinates of the vertex at grid position `p`.
    pub fn vertex_position(&self, p: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| p[a] as f64 * self.spacing[a])
    }

    /// Vertex indices of the corners of a cell.
    pub fn cell_vertices(&self, k: usize, idx: usize) -> Vec<usize> {
        let (t, p) = self.cell(k, idx);
        let axes = &self.types[k][t].axes;
        let mut out = Vec::with_capacity(1 << axes.len());
        for mask in 0..(1usize << axes.len()) {
            let mut q = p.map(|v| v as i64);
            for (j, &a) in axes.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    q[a] += 1;
                }
            }
            out.push(self.locate(0, 0, q).expect("corner exists"));
        }
        out
    }

    /// Average of vertex values over the corners of each `k`-cell.
    pub fn average_to_cells(&self, k: usize, vertex_values: &[f64]) -> Vec<f64> {
        (0..self.counts[k])
            .map(|idx| {
                let vs = self.cell_vertices(k, idx);
                vs.iter().map(|&v| vertex_values[v]).sum::<f64>() / vs.len() as f64
            })
            .collect()
    }

    /// Dual-to-primal volume ratio of a cell; these are the diagonal mass
    /// weights. Dual lengths are halved at walls.
    fn mass_ratio(&self, ty: &CellType, p: [usize; 3]) -> f64 {
        let mut r = 1.0;
        for a in 0..3 {
            let h = self.spacing[a];
            if ty.spans(a) {
                r /= h;
            } else if self.kinds[a] == AxisKind::Bounded && (p[a] == 0 || p[a] == self.spec.cells[a]) {
                r *= 0.5 * h;
            } else {
                r *= h;
            }
        }
        r
    }

    /// True when the cell lies inside a wall.
    fn on_wall(&self, ty: &CellType, p: [usize; 3]) -> bool {
        (0..3).any(|a| {
            self.kinds[a] == AxisKind::Bounded && !ty.spans(a) && (p[a] == 0 || p[a] == self.spec.cells[a])
        })
    }

    /// Diagonal mass weights of degree `k`.
    pub fn mass(&self, k: usize) -> &[f64] {
        &self.mass[k]
    }

    /// Indices of the `k`-cells that carry Dirichlet degrees of freedom.
    pub fn interior(&self, k: usize) -> &[usize] {
        &self.interior[k]
    }

    /// Position of cell `idx` in [`Self::interior`], if it is not on a wall.
    pub fn interior_position(&self, k: usize, idx: usize) -> Option<usize> {
        self.interior_pos[k][idx]
    }

    pub fn num_dofs(&self, k: usize, variant: Variant) -> usize {
        match variant {
            Variant::Full => self.counts[k],
            Variant::Dirichlet => self.interior[k].len(),
        }
    }

    /// Mass weights restricted to the degrees of freedom of `variant`.
    pub fn mass_for(&self, k: usize, variant: Variant) -> Vec<f64> {
        match variant {
            Variant::Full => self.mass[k].clone(),
            Variant::Dirichlet => self.interior[k].iter().map(|&i| self.mass[k][i]).collect(),
        }
    }

    /// Zeroes the wall entries of a full-length `k`-cochain value vector.
    pub fn clear_walls(&self, k: usize, values: &mut [f64]) {
        for (v, pos) in values.iter_mut().zip(&self.interior_pos[k]) {
            if pos.is_none() {
                *v = 0.0;
            }
        }
    }

    /// Exterior derivative `d_k` on all cells: `(n_{k+1} × n_k)` with entries in `{−1, 0, 1}`.
    pub fn incidence(&self, k: usize) -> CsrMatrix {
        assert!(k <= 2);
        let mut trip = Vec::new();
        for (row, (t, p)) in (0..self.counts[k + 1]).map(|i| (i, self.cell(k + 1, i))) {
            let axes = &self.types[k + 1][t].axes;
            for (j, &a) in axes.iter().enumerate() {
                let face: Vec<usize> = axes.iter().copied().filter(|&b| b != a).collect();
                let ft = self.type_of(k, &face);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let base = p.map(|v| v as i64);
                let mut shifted = base;
                shifted[a] += 1;
                let hi = self.locate(k, ft, shifted).expect("face exists");
                let lo = self.locate(k, ft, base).expect("face exists");
                trip.push((row, hi, sign));
                trip.push((row, lo, -sign));
            }
        }
        CsrMatrix::from_triplets(self.counts[k + 1], self.counts[k], &trip)
    }

    /// `d_k` for the given variant; the Dirichlet matrix acts on interior
    /// degrees of freedom only.
    pub fn exterior_matrix(&self, k: usize, variant: Variant) -> CsrMatrix {
        let d = self.incidence(k);
        match variant {
            Variant::Full => d,
            Variant::Dirichlet => d.select(&self.interior[k + 1], &self.interior[k]),
        }
    }

    /// `d_k* = M_k⁻¹ d_kᵀ M_{k+1}` for the given variant.
    pub fn codifferential_matrix(&self, k: usize, variant: Variant) -> CsrMatrix {
        let d = self.exterior_matrix(k, variant);
        let inv: Vec<f64> = self.mass_for(k, variant).iter().map(|m| 1.0 / m).collect();
        d.transpose().scale_rows(&inv).scale_cols(&self.mass_for(k + 1, variant))
    }
}

/// FNV-1a over the grid description.
fn fingerprint(spec: &GridSpec) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut bytes = Vec::new();
    for n in spec.cells {
        bytes.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for l in spec.lengths {
        bytes.extend_from_slice(&l.to_bits().to_le_bytes());
    }
    for kind in [spec.cross_section, spec.axial] {
        bytes.push(matches!(kind, AxisKind::Bounded) as u8);
    }
    bytes.iter().fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_unit_cube_counts() {
        let g = CylinderGrid::new(GridSpec::torus([2, 2, 2], [1.0; 3])).unwrap();
        assert_eq!((0..4).map(|k| g.num_cells(k)).collect::<Vec<_>>(), vec![8, 24, 24, 8]);
    }

    #[test]
    fn truncated_counts_follow_euler_characteristic() {
        let g = CylinderGrid::new(GridSpec::truncated_pipe([2, 3, 4], [1.0; 3])).unwrap();
        let c: Vec<i64> = (0..4).map(|k| g.num_cells(k) as i64).collect();
        assert_eq!(c[0], 3 * 4 * 5);
        assert_eq!(c[0] - c[1] + c[2] - c[3], 1);
    }

    #[test]
    fn rejects_small_counts_and_bad_lengths() {
        let err = CylinderGrid::new(GridSpec::torus([1, 2, 2], [1.0, -1.0, 1.0])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nx") && msg.contains("axis 1"), "{msg}");
    }

    #[test]
    fn cell_and_locate_are_inverse() {
        let g = CylinderGrid::new(GridSpec::periodic_pipe([3, 2, 4], [1.0, 2.0, 3.0])).unwrap();
        for k in 0..4 {
            for idx in 0..g.num_cells(k) {
                let (t, p) = g.cell(k, idx);
                assert_eq!(g.locate(k, t, p.map(|v| v as i64)), Some(idx));
            }
        }
    }

    #[test]
    fn incidence_entries_are_signed_units_and_dd_vanishes() {
        for spec in [GridSpec::torus([2, 3, 2], [1.0; 3]), GridSpec::truncated_pipe([3, 2, 3], [1.0; 3])] {
            let g = CylinderGrid::new(spec).unwrap();
            for k in 0..3 {
                let d = g.incidence(k);
                assert!(d.triplets().iter().all(|&(_, _, v)| v == 1.0 || v == -1.0));
            }
            for k in 0..2 {
                assert_eq!(g.incidence(k + 1).matmul(&g.incidence(k)).nnz(), 0);
            }
        }
    }

    #[test]
    fn vertex_mass_partitions_volume() {
        let g = CylinderGrid::new(GridSpec::truncated_pipe([3, 4, 5], [1.5, 2.0, 0.7])).unwrap();
        let total: f64 = g.mass(0).iter().sum();
        assert!((total - 1.5 * 2.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn hash_distinguishes_topology() {
        let a = CylinderGrid::new(GridSpec::torus([4; 3], [1.0; 3])).unwrap();
        let b = CylinderGrid::new(GridSpec::periodic_pipe([4; 3], [1.0; 3])).unwrap();
        assert_ne!(a.hash(), b.hash());
    }
}
