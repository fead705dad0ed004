use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::error::Result;
use crate::scalar::Scalar;

/// Compressed sparse column matrix with sorted, unique row indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T: Scalar> {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowind: Vec<usize>,
    pub values: Vec<T>,
}

/// Coordinate-format accumulator; duplicates are summed on conversion.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T: Scalar> {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sums duplicates in insertion order, so the result does not depend on
    /// how entries were sorted.
    pub fn build(&self) -> CscMatrix<T> {
        let mut count = vec![0usize; self.ncols + 1];
        for &(_, j, _) in &self.entries {
            count[j + 1] += 1;
        }
        for j in 0..self.ncols {
            count[j + 1] += count[j];
        }
        let mut next = count.clone();
        let mut rows = vec![0usize; self.entries.len()];
        let mut vals = vec![T::zero(); self.entries.len()];
        for &(i, j, v) in &self.entries {
            rows[next[j]] = i;
            vals[next[j]] = v;
            next[j] += 1;
        }
        let mut colptr = Vec::with_capacity(self.ncols + 1);
        let mut rowind = Vec::with_capacity(self.entries.len());
        let mut values = Vec::with_capacity(self.entries.len());
        colptr.push(0);
        let mut mark = vec![usize::MAX; self.nrows];
        for j in 0..self.ncols {
            let start = rowind.len();
            // stable sort of the column keeps summation order deterministic
            let mut col: Vec<(usize, T)> = (count[j]..count[j + 1]).map(|p| (rows[p], vals[p])).collect();
            col.sort_by_key(|e| e.0);
            for (i, v) in col {
                if mark[i] == j {
                    let last = values.len() - 1;
                    values[last] += v;
                } else {
                    mark[i] = j;
                    rowind.push(i);
                    values.push(v);
                }
            }
            debug_assert!(rowind[start..].windows(2).all(|w| w[0] < w[1]));
            colptr.push(rowind.len());
        }
        CscMatrix { nrows: self.nrows, ncols: self.ncols, colptr, rowind, values }
    }
}

impl<T: Scalar> CscMatrix<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            colptr: (0..=n).collect(),
            rowind: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = &self.rowind[self.colptr[j]..self.colptr[j + 1]];
        match r.binary_search(&i) {
            Ok(p) => self.values[self.colptr[j] + p],
            Err(_) => T::zero(),
        }
    }

    pub fn mul_vec(&self, x: &DVector<T>) -> DVector<T> {
        let mut y = DVector::zeros(self.nrows);
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == T::zero() {
                continue;
            }
            for p in self.colptr[j]..self.colptr[j + 1] {
                y[self.rowind[p]] += self.values[p] * xj;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut b = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for j in 0..self.ncols {
            for p in self.colptr[j]..self.colptr[j + 1] {
                b.push(j, self.rowind[p], self.values[p]);
            }
        }
        b.build()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<T> {
        let mut d = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for p in self.colptr[j]..self.colptr[j + 1] {
                d[(self.rowind[p], j)] = self.values[p];
            }
        }
        d
    }

    /// Coordinate text: a `% rows cols nnz` header, then one `row col value`
    /// line per stored entry (0-based, column-major).
    pub fn to_coo_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "% {} {} {}", self.nrows, self.ncols, self.nnz());
        for j in 0..self.ncols {
            for p in self.colptr[j]..self.colptr[j + 1] {
                let _ = writeln!(s, "{} {} {:e}", self.rowind[p], j, self.values[p]);
            }
        }
        s
    }

    pub fn write_coo(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_coo_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut b = TripletBuilder::<f64>::new(3, 3);
        b.push(2, 0, 1.0);
        b.push(0, 0, 2.0);
        b.push(2, 0, 3.0);
        b.push(1, 2, -1.0);
        let m = b.build();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(2, 0), 4.0);
        assert_eq!(m.get(0, 0), 2.0);
        assert_eq!(m.get(1, 1), 0.0);
        let t = m.transpose();
        assert_eq!(t.get(0, 2), 4.0);
        let y = m.mul_vec(&DVector::from_vec(vec![1.0, 1.0, 1.0]));
        assert_eq!(y.as_slice(), &[2.0, -1.0, 4.0]);
        assert!(m.to_coo_string().starts_with("% 3 3 3\n0 0 2e0\n"));
    }
}
