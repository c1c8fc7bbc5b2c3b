//! Compressed sparse row matrices.
//!
//! Every operation here walks rows and columns in a fixed order, so results
//! are bitwise reproducible across runs and thread counts.

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed in
    /// insertion order; entries that sum to exactly zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&i| (triplets[i].0, triplets[i].1));

        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut cursor = 0;
        while cursor < order.len() {
            let (r, c, _) = triplets[order[cursor]];
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            let mut sum = 0.0;
            while cursor < order.len() && triplets[order[cursor]].0 == r && triplets[order[cursor]].1 == c
            {
                sum += triplets[order[cursor]].2;
                cursor += 1;
            }
            if sum != 0.0 {
                indices.push(c);
                values.push(sum);
                indptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let triplets: Vec<_> = diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        Self::from_triplets(n, n, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Iterates `(col, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            out.extend(self.row(r).map(|(c, v)| (r, c, v)));
        }
        out
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "matvec: input length");
        assert_eq!(y.len(), self.nrows, "matvec: output length");
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                let slot = next[c];
                indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self { nrows: self.ncols, ncols: self.nrows, indptr, indices, values }
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows, "matmul: inner dimensions");
        let mut accum = vec![0.0; other.ncols];
        let mut touched = vec![false; other.ncols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        pattern.push(c);
                    }
                    accum[c] += a * b;
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                if accum[c] != 0.0 {
                    indices.push(c);
                    values.push(accum[c]);
                }
                accum[c] = 0.0;
                touched[c] = false;
            }
            pattern.clear();
            indptr[r + 1] = indices.len();
        }
        Self { nrows: self.nrows, ncols: other.ncols, indptr, indices, values }
    }

    /// `alpha * self + beta * other`.
    pub fn lincomb(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "lincomb: shapes");
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        triplets.extend(self.triplets().into_iter().map(|(r, c, v)| (r, c, alpha * v)));
        triplets.extend(other.triplets().into_iter().map(|(r, c, v)| (r, c, beta * v)));
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        self.lincomb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        self.lincomb(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.drop_zeros()
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.nrows);
        let mut out = self.clone();
        for r in 0..self.nrows {
            for k in out.indptr[r]..out.indptr[r + 1] {
                out.values[k] *= d[r];
            }
        }
        out.drop_zeros()
    }

    /// `self * diag(d)`.
    pub fn scale_cols(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.ncols);
        let mut out = self.clone();
        for k in 0..out.values.len() {
            out.values[k] *= d[out.indices[k]];
        }
        out.drop_zeros()
    }

    /// Submatrix on the given (sorted or unsorted) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_r, &old_r) in rows.iter().enumerate() {
            for (c, v) in self.row(old_r) {
                if col_map[c] != usize::MAX {
                    triplets.push((new_r, col_map[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &triplets)
    }

    /// Assembles a 2×2 block matrix; `None` blocks are zero.
    pub fn block2(blocks: [[Option<&CsrMatrix>; 2]; 2], row_sizes: [usize; 2], col_sizes: [usize; 2]) -> Self {
        let mut triplets = Vec::new();
        for (bi, block_row) in blocks.iter().enumerate() {
            for (bj, block) in block_row.iter().enumerate() {
                if let Some(m) = block {
                    assert_eq!((m.nrows, m.ncols), (row_sizes[bi], col_sizes[bj]), "block2: block ({bi},{bj}) shape");
                    let r0 = if bi == 0 { 0 } else { row_sizes[0] };
                    let c0 = if bj == 0 { 0 } else { col_sizes[0] };
                    triplets.extend(m.triplets().into_iter().map(|(r, c, v)| (r + r0, c + c0, v)));
                }
            }
        }
        Self::from_triplets(row_sizes[0] + row_sizes[1], col_sizes[0] + col_sizes[1], &triplets)
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    triplets.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &triplets)
    }

    fn drop_zeros(self) -> Self {
        if self.values.iter().all(|&v| v != 0.0) {
            return self;
        }
        let triplets = self.triplets();
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn weighted_dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), m)| x * y * m).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, -3.0), (0, 0, 0.5)])
    }

    #[test]
    fn duplicates_are_summed() {
        let m = sample();
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn cancelling_duplicates_are_dropped() {
        let m = CsrMatrix::from_triplets(1, 1, &[(0, 0, 1.0), (0, 0, -1.0)]);
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn transpose_and_product_match_dense() {
        let a = sample();
        let b = CsrMatrix::from_triplets(3, 2, &[(0, 1, 2.0), (2, 0, 1.0), (1, 1, 4.0)]);
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());
        assert_eq!(a.matmul(&b).to_dense(), a.to_dense() * b.to_dense());
    }

    #[test]
    fn select_and_blocks() {
        let a = sample();
        let s = a.select(&[1], &[1, 2]);
        assert_eq!(s.to_dense(), DMatrix::from_row_slice(1, 2, &[-3.0, 0.0]));
        let i = CsrMatrix::identity(2);
        let ata = a.transpose().matmul(&a);
        let blk = CsrMatrix::block2([[Some(&i), Some(&a)], [None, Some(&ata)]], [2, 3], [2, 3]);
        assert_eq!(blk.nrows(), 5);
        assert_eq!(blk.get(0, 2), 1.5);
        assert_eq!(blk.get(4, 2), 3.0);
    }
}
