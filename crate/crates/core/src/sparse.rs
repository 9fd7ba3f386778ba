//! Minimal compressed-row sparse matrices.

use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Float> CsrMatrix<T> {
    /// Builds from per-row `(column, value)` lists; duplicate columns are summed.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        let nrows = rows.len();
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                assert!(c < cols, "column {c} out of range");
                if last == Some(c) {
                    let k = values.len() - 1;
                    values[k] = values[k] + v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix { rows: nrows, cols, indptr, indices, values }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![(i, T::one())]).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[s..e].iter().copied().zip(self.values[s..e].iter().copied())
    }

    pub fn row_dense(&self, i: usize) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (c, v) in self.row(i) {
            out[c] = v;
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).fold(T::zero(), |acc, (c, v)| acc + v * x[c]))
            .collect()
    }

    /// `A^T y`.
    pub fn tr_mul_vec(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (c, v) in self.row(i) {
                out[c] = out[c] + v * yi;
            }
        }
        out
    }

    /// Product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix<T>) -> CsrMatrix<T> {
        assert_eq!(self.cols, other.rows);
        let rows = (0..self.rows)
            .map(|i| {
                let mut acc: Vec<(usize, T)> = Vec::new();
                for (k, a) in self.row(i) {
                    for (c, b) in other.row(k) {
                        acc.push((c, a * b));
                    }
                }
                acc
            })
            .collect();
        CsrMatrix::from_rows(other.cols, rows)
    }

    pub fn scale(&self, s: T) -> CsrMatrix<T> {
        let mut m = self.clone();
        for v in &mut m.values {
            *v = *v * s;
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row_dense(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_match_dense() {
        let a = CsrMatrix::from_rows(3, vec![vec![(0, 1.0), (2, 2.0)], vec![(1, -1.0), (1, 4.0)]]);
        assert_eq!(a.to_dense(), vec![vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 0.0]]);
        assert_eq!(a.mul_vec(&[1.0, 2.0, 3.0]), vec![7.0, 6.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 1.0]), vec![1.0, 3.0, 2.0]);
        let b = CsrMatrix::from_rows(2, vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(0, 1.0), (1, 1.0)]]);
        assert_eq!(a.matmul(&b).to_dense(), vec![vec![3.0, 2.0], vec![0.0, 3.0]]);
    }
}
