//! Compressed sparse row storage used for incidence matrices and Laplacians.

use std::ops::{Add, AddAssign, Mul, Neg};

use nalgebra::DMatrix;

/// Element types storable in a [`CsrMatrix`].
pub trait Scalar:
    Copy + Default + PartialEq + Add<Output = Self> + Mul<Output = Self> + AddAssign + std::fmt::Debug
{
    fn to_f64(self) -> f64;
}

impl Scalar for i32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for i64 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

/// Sink for arithmetic-operation counts. The unit type discards everything,
/// so uninstrumented calls compile to the plain loop.
pub trait OpCounter {
    fn record(&mut self, flops: u64);
}

impl OpCounter for () {
    #[inline(always)]
    fn record(&mut self, _flops: u64) {}
}

/// Counts floating point operations (one per multiply, one per add).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount(pub u64);

impl OpCounter for OpCount {
    #[inline]
    fn record(&mut self, flops: u64) {
        self.0 += flops;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions are
    /// summed and explicit zeros dropped.
    ///
    /// Panics if a triplet lies outside `nrows x ncols`.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, T)>) -> Self {
        for &(r, c, _) in &triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) outside {nrows}x{ncols}");
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
        .pruned()
    }

    fn pruned(self) -> Self {
        let zero = T::default();
        if self.values.iter().all(|&v| v != zero) {
            return self;
        }
        let mut triplets = Vec::with_capacity(self.values.len());
        for (r, c, v) in self.iter() {
            if v != zero {
                triplets.push((r, c, v));
            }
        }
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for i in 0..self.nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            row_ptr,
            col_idx,
            values,
            ..self
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(col, value)` over the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Iterates `(row, col, value)` over all stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::default(),
        }
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, triplets)
    }

    /// Sparse product `self * rhs` (row-by-row accumulation).
    ///
    /// Panics on incompatible shapes.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "incompatible shapes for matmul");
        let mut triplets = Vec::new();
        let mut acc: Vec<Option<T>> = vec![None; rhs.ncols];
        let mut touched = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    match &mut acc[j] {
                        Some(s) => *s += a * b,
                        slot @ None => {
                            *slot = Some(a * b);
                            touched.push(j);
                        }
                    }
                }
            }
            for j in touched.drain(..) {
                triplets.push((i, j, acc[j].take().unwrap()));
            }
        }
        Self::from_triplets(self.nrows, rhs.ncols, triplets)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let triplets = self.iter().chain(rhs.iter()).collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> CsrMatrix<U> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
        .pruned()
    }

    pub fn to_f64(&self) -> CsrMatrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v.to_f64();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.iter().all(|(r, c, v)| self.get(c, r) == v)
    }

    /// Number of stored off-diagonal entries in row `i`.
    pub fn off_diagonal_count(&self, i: usize) -> usize {
        self.row(i).filter(|&(c, _)| c != i).count()
    }
}

impl<T: Scalar + Neg<Output = T>> CsrMatrix<T> {
    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }
}

impl CsrMatrix<f64> {
    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        self.mul_vec_counted(x, out, &mut ());
    }

    /// `out = self * x`, reporting two flops (multiply + add) per stored entry.
    pub fn mul_vec_counted<C: OpCounter>(&self, x: &[f64], out: &mut [f64], counter: &mut C) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(out.len(), self.nrows);
        for (i, o) in out.iter_mut().enumerate() {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            *o = self.col_idx[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
        counter.record(2 * self.nnz() as u64);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1), (0, 0, 2), (1, 1, 1), (1, 1, -1)]);
        assert_eq!(m.get(0, 0), 3);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, -1.0)]);
        let b = CsrMatrix::from_triplets(3, 2, vec![(0, 1, 4.0), (1, 0, 3.0), (2, 0, 5.0)]);
        let c = a.matmul(&b);
        assert_eq!(c.to_dense(), a.to_dense() * b.to_dense());
    }

    #[test]
    fn cancellation_in_product_is_pruned() {
        // [1 1] * [1; -1] = 0
        let a = CsrMatrix::from_triplets(1, 2, vec![(0, 0, 1), (0, 1, 1)]);
        let b = CsrMatrix::from_triplets(2, 1, vec![(0, 0, 1), (1, 0, -1)]);
        assert!(a.matmul(&b).is_zero());
    }

    #[test]
    fn counted_product_reports_two_flops_per_entry() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 1, 3.0)]);
        let mut count = OpCount::default();
        let mut out = vec![0.0; 2];
        a.mul_vec_counted(&[1.0, 1.0], &mut out, &mut count);
        assert_eq!(out, vec![3.0, 3.0]);
        assert_eq!(count.0, 6);
    }
}
