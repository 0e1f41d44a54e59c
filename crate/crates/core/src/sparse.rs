//! Complex sparse matrices in compressed-row form.

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparseError {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} operator")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("shape mismatch: {left:?} against {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

/// A `rows x cols` complex matrix. Stored entries are nonzero and have
/// distinct coordinates, sorted by row then column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseOperator {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds an operator from `(row, col, value)` triplets. Zero values are
    /// dropped; repeated coordinates are an error.
    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self, SparseError>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut entries: Vec<(usize, usize, Complex64)> = entries.into_iter().collect();
        for &(row, col, _) in &entries {
            if row >= rows || col >= cols {
                return Err(SparseError::OutOfBounds {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(SparseError::Duplicate {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }
        Ok(Self::from_sorted(rows, cols, entries))
    }

    fn from_sorted(rows: usize, cols: usize, entries: Vec<(usize, usize, Complex64)>) -> Self {
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseOperator {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Square diagonal operator.
    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_sorted(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Copy with the entry at `(r, c)` replaced by `value`.
    pub fn with_entry(&self, r: usize, c: usize, value: Complex64) -> Self {
        let mut entries: Vec<_> = self.entries().filter(|&(i, j, _)| (i, j) != (r, c)).collect();
        entries.push((r, c, value));
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Self::from_sorted(self.rows, self.cols, entries)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `A^* x`.
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.rows, "vector length mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (c, v) in self.row(r) {
                out[c] += v.conj() * xr;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self::from_sorted(self.cols, self.rows, entries)
    }

    pub fn mul(&self, rhs: &SparseOperator) -> Result<Self, SparseError> {
        if self.cols != rhs.rows {
            return Err(SparseError::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = vec![zero; rhs.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut seen = vec![false; rhs.cols];
        let mut entries = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in rhs.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                entries.push((r, c, acc[c]));
                acc[c] = zero;
                seen[c] = false;
            }
            touched.clear();
        }
        Ok(Self::from_sorted(self.rows, rhs.cols, entries))
    }

    fn combine(
        &self,
        rhs: &SparseOperator,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self, SparseError> {
        if self.shape() != rhs.shape() {
            return Err(SparseError::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut entries = Vec::with_capacity(self.nnz() + rhs.nnz());
        for r in 0..self.rows {
            let mut a = self.row(r).peekable();
            let mut b = rhs.row(r).peekable();
            loop {
                match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                        entries.push((r, ca, f(va, vb)));
                        a.next();
                        b.next();
                    }
                    (Some((ca, va)), Some((cb, _))) if ca < cb => {
                        entries.push((r, ca, f(va, zero)));
                        a.next();
                    }
                    (Some((ca, va)), None) => {
                        entries.push((r, ca, f(va, zero)));
                        a.next();
                    }
                    (_, Some((cb, vb))) => {
                        entries.push((r, cb, f(zero, vb)));
                        b.next();
                    }
                }
            }
        }
        Ok(Self::from_sorted(self.rows, self.cols, entries))
    }

    pub fn add(&self, rhs: &SparseOperator) -> Result<Self, SparseError> {
        self.combine(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &SparseOperator) -> Result<Self, SparseError> {
        self.combine(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let entries = self.entries().map(|(r, c, v)| (r, c, v * s)).collect();
        Self::from_sorted(self.rows, self.cols, entries)
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (j, &c) in cols.iter().enumerate() {
            col_pos[c] = j;
        }
        let mut entries = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_pos[c] != usize::MAX {
                    entries.push((i, col_pos[c], v));
                }
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        Self::from_sorted(rows.len(), cols.len(), entries)
    }

    /// Largest entry modulus; 0 for the zero operator.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Assembles an `n x n` block operator whose blocks all have this
    /// operator's block shape `(rows, cols)`; missing blocks are zero.
    pub fn blocks(
        n: usize,
        block_shape: (usize, usize),
        blocks: &[(usize, usize, SparseOperator)],
    ) -> Result<Self, SparseError> {
        let (br, bc) = block_shape;
        let mut entries = Vec::new();
        for (i, j, b) in blocks {
            if b.shape() != block_shape {
                return Err(SparseError::ShapeMismatch {
                    left: block_shape,
                    right: b.shape(),
                });
            }
            if *i >= n || *j >= n {
                return Err(SparseError::OutOfBounds {
                    row: *i,
                    col: *j,
                    rows: n,
                    cols: n,
                });
            }
            entries.extend(b.entries().map(|(r, c, v)| (i * br + r, j * bc + c, v)));
        }
        Self::from_triplets(n * br, n * bc, entries)
    }

    /// `A ⊕ A ⊕ ... ⊕ A` with `n` copies.
    pub fn ampliate(&self, n: usize) -> Self {
        let blocks: Vec<_> = (0..n).map(|i| (i, i, self.clone())).collect();
        Self::blocks(n, self.shape(), &blocks).expect("diagonal blocks have matching shapes")
    }

    /// One `row col re im` line per stored entry.
    pub fn to_coo_text(&self) -> String {
        let mut out = String::new();
        for (r, c, v) in self.entries() {
            writeln!(out, "{r} {c} {} {}", v.re, v.im).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn triplet_validation() {
        assert!(matches!(
            SparseOperator::from_triplets(2, 2, [(0, 0, c(1.0)), (0, 0, c(2.0))]),
            Err(SparseError::Duplicate { row: 0, col: 0 })
        ));
        assert!(matches!(
            SparseOperator::from_triplets(2, 2, [(2, 0, c(1.0))]),
            Err(SparseError::OutOfBounds { .. })
        ));
        let a = SparseOperator::from_triplets(2, 2, [(0, 1, c(0.0))]).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn product_and_adjoint() {
        let shift = SparseOperator::from_triplets(3, 3, [(1, 0, c(1.0)), (2, 1, c(1.0))]).unwrap();
        let sq = shift.mul(&shift).unwrap();
        assert_eq!(sq.entries().collect::<Vec<_>>(), vec![(2, 0, c(1.0))]);
        let p = shift.adjoint().mul(&shift).unwrap();
        assert_eq!(p, SparseOperator::diagonal(&[c(1.0), c(1.0), c(0.0)]));
        assert!(shift.mul(&SparseOperator::zeros(2, 2)).is_err());
    }

    #[test]
    fn restrict_and_blocks() {
        let a = SparseOperator::from_triplets(3, 3, [(0, 0, c(1.0)), (2, 1, c(3.0))]).unwrap();
        let r = a.restrict(&[2, 0], &[1]);
        assert_eq!(r.entries().collect::<Vec<_>>(), vec![(0, 0, c(3.0))]);
        let amp = a.ampliate(2);
        assert_eq!(amp.shape(), (6, 6));
        assert_eq!(amp.get(5, 4), c(3.0));
        assert_eq!(amp.get(3, 3), c(1.0));
        assert_eq!(amp.get(2, 4), c(0.0));
    }

    #[test]
    fn coo_dump() {
        let a = SparseOperator::from_triplets(2, 2, [(1, 0, Complex64::new(1.0, -0.5))]).unwrap();
        assert_eq!(a.to_coo_text(), "1 0 1 -0.5\n");
    }

    fn small_op() -> impl Strategy<Value = SparseOperator> {
        prop::collection::btree_map((0usize..4, 0usize..4), -3i32..4, 0..10).prop_map(|m| {
            SparseOperator::from_triplets(
                4,
                4,
                m.into_iter()
                    .map(|((r, c), v)| (r, c, Complex64::new(v as f64, (v % 2) as f64))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn adjoint_reverses_products(a in small_op(), b in small_op()) {
            let lhs = a.mul(&b).unwrap().adjoint();
            let rhs = b.adjoint().mul(&a.adjoint()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn matvec_agrees_with_product(a in small_op(), b in small_op()) {
            let x: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64, 1.0)).collect();
            let lhs = a.mul(&b).unwrap().matvec(&x);
            let rhs = a.matvec(&b.matvec(&x));
            prop_assert_eq!(lhs, rhs);
            let y = a.adjoint().matvec(&x);
            prop_assert_eq!(y, a.adjoint_matvec(&x));
        }

        #[test]
        fn sub_of_self_is_zero(a in small_op()) {
            prop_assert!(a.sub(&a).unwrap().is_zero());
        }
    }
}
