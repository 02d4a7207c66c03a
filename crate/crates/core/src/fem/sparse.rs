//! Compressed sparse row matrix assembled from triplets.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Sums duplicate entries. Panics on out-of-range indices.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        for &(i, j, _) in &triplets {
            assert!(
                i < nrows && j < ncols,
                "triplet ({i}, {j}) outside {nrows}x{ncols}"
            );
        }
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix::from_triplets(nrows, ncols, Vec::new())
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, col, value)` of all stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols);
        DVector::from_fn(self.nrows, |i, _| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.values[k] * x[self.col_idx[k]])
                .sum()
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(i, j, v)| (j, i, v)).collect(),
        )
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SparseMatrix, b: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t = self
            .triplets()
            .map(|(i, j, v)| (i, j, a * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, b * v)))
            .collect();
        SparseMatrix::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `||A - A^T||_F / ||A||_F`.
    pub fn skew_ratio(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.combine(1.0, &self.transpose(), -1.0).frobenius_norm() / norm
    }

    /// Principal submatrix on the sorted index set `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.nrows.max(self.ncols)];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let t = self
            .triplets()
            .filter(|&(i, j, _)| map[i] != usize::MAX && map[j] != usize::MAX)
            .map(|(i, j, v)| (map[i], map[j], v))
            .collect();
        SparseMatrix::from_triplets(keep.len(), keep.len(), t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(1, 2, 1.0), (0, 0, 2.0), (1, 2, 0.5)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 2), 1.5);
        assert_eq!(m.get(1, 0), 0.0);
        let y = m.matvec(&DVector::from_vec(vec![1.0, 1.0, 2.0]));
        assert_eq!(y.as_slice(), &[2.0, 3.0]);
    }

    #[test]
    fn skew_ratio_and_restriction() {
        let m = SparseMatrix::from_triplets(3, 3, vec![(0, 1, 1.0), (1, 0, 1.0), (2, 2, 4.0)]);
        assert_eq!(m.skew_ratio(), 0.0);
        let n = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0)]);
        assert!((n.skew_ratio() - 2f64.sqrt()).abs() < 1e-15);
        let r = m.restrict(&[1, 2]);
        assert_eq!(
            r.to_dense(),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 4.0])
        );
    }
}
