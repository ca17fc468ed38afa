use crate::scalar::Real;

/// Compressed sparse row matrix, used to cross-check the matrix-free
/// operators and to form Galerkin products on small template grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    /// Sums duplicate entries.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trip: Vec<(usize, usize, T)>) -> Self {
        trip.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut data: Vec<T> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                let d = data.last_mut().expect("previous entry");
                *d = *d + v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix { nrows, ncols, indptr, indices, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b].iter().copied().zip(self.data[a..b].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.row(r).find(|&(j, _)| j == c).map(|(_, v)| v).unwrap_or(T::zero())
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            trip.extend(self.row(r).map(|(c, v)| (c, r, v)));
        }
        SparseMatrix::from_triplets(self.ncols, self.nrows, trip)
    }

    /// Row-by-row product with a dense accumulator.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut acc = vec![T::zero(); other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut trip = Vec::new();
        for r in 0..self.nrows {
            let mut cols = Vec::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = T::zero();
                        cols.push(c);
                    }
                    acc[c] = acc[c] + a * b;
                }
            }
            trip.extend(cols.into_iter().map(|c| (r, c, acc[c])));
        }
        SparseMatrix::from_triplets(self.nrows, other.ncols, trip)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.nrows * self.ncols];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                d[r * self.ncols + c] = v;
            }
        }
        d
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let a = self.to_dense();
        let b = other.to_dense();
        a.iter().zip(&b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = SparseMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0), (0, 0, 1.0)]);
        assert_eq!(a.get(0, 0), 2.0);
        let ata = a.transpose().matmul(&a);
        let d = ata.to_dense();
        assert_eq!(d, vec![4.0, 0.0, 4.0, 0.0, 9.0, 0.0, 4.0, 0.0, 4.0]);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![4.0, 3.0]);
    }
}
