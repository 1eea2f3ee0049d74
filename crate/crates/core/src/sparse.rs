//! Row-compressed sparse matrices over real entries.
//!
//! All Hamiltonians in this crate are real symmetric, so the storage is f64;
//! matvec is provided for both real and complex vectors. Row blocks run in
//! parallel through [`crate::exec`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zero(dim: usize) -> Self {
        CsrMatrix { dim, row_ptr: vec![0; dim + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    /// Build from coordinate triplets; duplicate entries are summed and
    /// resulting exact zeros dropped.
    pub fn from_coo(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            debug_assert!(r < dim && c < dim);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        // drop exact zeros produced by cancellation
        let keep: Vec<bool> = values.iter().map(|&v| v != 0.0).collect();
        if keep.iter().any(|&k| !k) {
            let mut new_cols = Vec::with_capacity(col_idx.len());
            let mut new_vals = Vec::with_capacity(values.len());
            let mut new_counts = vec![0usize; dim + 1];
            let mut idx = 0;
            for r in 0..dim {
                let n = row_ptr[r + 1];
                for _ in 0..n {
                    if keep[idx] {
                        new_cols.push(col_idx[idx]);
                        new_vals.push(values[idx]);
                        new_counts[r + 1] += 1;
                    }
                    idx += 1;
                }
            }
            row_ptr = new_counts;
            col_idx = new_cols;
            values = new_vals;
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { dim, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    /// Largest |a_ij - a_ji| over all entries.
    pub fn symmetry_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                dev = dev.max((self.values[k] - self.get(c, r)).abs());
            }
        }
        dev
    }

    pub fn require_symmetric(&self, tol: f64) -> Result<()> {
        let dev = self.symmetry_deviation();
        if dev > tol {
            Err(Error::NonHermitian { deviation: dev })
        } else {
            Ok(())
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        exec::map_indexed(self.dim, |r| {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            acc
        })
    }

    pub fn matvec_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.dim);
        exec::map_indexed(self.dim, |r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.col_idx[k]] * self.values[k];
            }
            acc
        })
    }

    /// Sequential matvec used by the bench suite as the comparison baseline.
    pub fn matvec_seq(&self, x: &[f64]) -> Vec<f64> {
        exec::map_indexed_seq(self.dim, |r| {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            acc
        })
    }

    /// `alpha * self + beta * other`, merging sorted rows.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!(self.dim, other.dim);
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            let (mut i, hi_a) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let (mut j, hi_b) = (other.row_ptr[r], other.row_ptr[r + 1]);
            while i < hi_a || j < hi_b {
                let (c, v) = if j >= hi_b || (i < hi_a && self.col_idx[i] < other.col_idx[j]) {
                    let e = (self.col_idx[i], alpha * self.values[i]);
                    i += 1;
                    e
                } else if i >= hi_a || other.col_idx[j] < self.col_idx[i] {
                    let e = (other.col_idx[j], beta * other.values[j]);
                    j += 1;
                    e
                } else {
                    let e = (self.col_idx[i], alpha * self.values[i] + beta * other.values[j]);
                    i += 1;
                    j += 1;
                    e
                };
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        CsrMatrix { dim: self.dim, row_ptr, col_idx, values }
    }

    /// Spectral norm (largest |eigenvalue|) of a symmetric matrix by power
    /// iteration with a fixed deterministic start.
    pub fn spectral_norm(&self, iterations: usize) -> f64 {
        if self.dim == 0 || self.nnz() == 0 {
            return 0.0;
        }
        let mut v: Vec<f64> = (0..self.dim)
            .map(|i| ((i as f64 + 1.0) * 0.754877666).fract() - 0.5)
            .collect();
        let mut norm = normalize(&mut v);
        if norm == 0.0 {
            return 0.0;
        }
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let mut w = self.matvec(&v);
            norm = normalize(&mut w);
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm;
            v = w;
        }
        lambda
    }

    /// Coordinate text export: `row col re im` per line, row-major order.
    pub fn to_coo_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push_str(&format!("{} {} {:.17e} 0\n", r, self.col_idx[k], self.values[k]));
            }
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_coo(2, vec![(0, 1, 0.5), (0, 1, 0.25), (1, 0, 0.75)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 0.75);
        assert_eq!(m.get(1, 0), 0.75);
        assert!(m.require_symmetric(1e-12).is_ok());
    }

    #[test]
    fn cancellation_drops_entries() {
        let m = CsrMatrix::from_coo(2, vec![(0, 0, 1.0), (0, 0, -1.0)]);
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn matvec_matches_dense() {
        let m = CsrMatrix::from_coo(3, vec![(0, 0, 2.0), (0, 2, -1.0), (2, 0, -1.0), (1, 1, 3.0)]);
        let x = vec![1.0, 2.0, 3.0];
        let y = m.matvec(&x);
        assert_eq!(y, vec![-1.0, 6.0, -1.0]);
        assert_eq!(y, m.matvec_seq(&x));
    }

    #[test]
    fn linear_combination_merges() {
        let a = CsrMatrix::from_coo(2, vec![(0, 0, 1.0), (0, 1, 2.0)]);
        let b = CsrMatrix::from_coo(2, vec![(0, 1, 1.0), (1, 1, 4.0)]);
        let c = a.linear_combination(0.5, &b, 2.0);
        assert_eq!(c.get(0, 0), 0.5);
        assert_eq!(c.get(0, 1), 3.0);
        assert_eq!(c.get(1, 1), 8.0);
    }

    #[test]
    fn spectral_norm_of_pauli_x() {
        let m = CsrMatrix::from_coo(2, vec![(0, 1, 1.0), (1, 0, 1.0)]);
        assert!((m.spectral_norm(200) - 1.0).abs() < 1e-9);
    }
}
